#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace grfg {

// Mathematical transforms available for descriptor generation. Every
// operation is a total function: the *_safe / *_abs / *_clamped variants bake
// the domain guard into the operation itself so re-evaluating a lineage always
// reproduces the same values.
enum class OpKind {
    Square,
    SqrtAbs,
    LogAbs,
    ExpClamped,
    Sin,
    Cos,
    ReciprocalSafe,
    Tanh,
    Add,
    Subtract,
    Multiply,
    DivideSafe,
};

constexpr double kOpEpsilon = 1e-10;
constexpr double kExpClamp = 50.0;

int op_arity(OpKind op);
bool is_unary(OpKind op);
bool is_binary(OpKind op);

// Canonical token used in rendered expression strings, e.g. "div", "log".
std::string_view op_token(OpKind op);
std::optional<OpKind> op_from_token(std::string_view token);

double apply_op(OpKind op, double x);
double apply_op(OpKind op, double a, double b);

// Ordered operation inventory for one run. Indices are stable for the whole
// run: they define the one-hot encoding seen by the operation agent.
class OperationSet {
public:
    OperationSet() = default;
    explicit OperationSet(std::vector<OpKind> ops);

    static OperationSet defaults();
    // Comma-separated tokens, unary list + binary list (either may be empty,
    // not both). Throws std::invalid_argument on unknown tokens or misplaced
    // arity.
    static OperationSet parse(std::string_view unary_csv, std::string_view binary_csv);

    std::size_t size() const { return ops_.size(); }
    bool empty() const { return ops_.empty(); }
    OpKind at(std::size_t i) const { return ops_.at(i); }
    const std::vector<OpKind>& ops() const { return ops_; }

    bool contains(OpKind op) const;
    // Stable one-hot index; throws if the op is not in the set.
    std::size_t index_of(OpKind op) const;

    std::vector<std::size_t> unary_indices() const;
    std::vector<std::size_t> binary_indices() const;
    bool has_unary() const;
    bool has_binary() const;

    std::string to_string() const;  // comma-joined tokens in index order

private:
    std::vector<OpKind> ops_;
};

}  // namespace grfg
