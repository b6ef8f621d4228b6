#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "grfg/operations.hpp"

namespace grfg {

struct ExprParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Immutable expression tree recording the full generation lineage of a
// descriptor. Leaves name columns of the original raw dataset. Renders to a
// canonical prefix string (`div(log(f3),f7)`) that parses back to a
// structurally identical tree.
class Expression {
public:
    enum class Kind { Raw, Unary, Binary };

    Expression() : Expression(raw("_")) {}

    static Expression raw(std::string column_name);
    static Expression unary(OpKind op, Expression child);
    static Expression binary(OpKind op, Expression left, Expression right);

    Kind kind() const { return node_->kind; }
    bool is_raw() const { return node_->kind == Kind::Raw; }
    OpKind op() const;
    const std::string& column_name() const;  // Raw only
    Expression child() const;                // Unary only
    Expression left() const;                 // Binary only
    Expression right() const;                // Binary only

    int depth() const;  // Raw has depth 0
    void collect_leaves(std::vector<std::string>& out) const;

    std::string str() const;  // canonical form
    static Expression parse(const std::string& text);

    bool operator==(const Expression& other) const;
    bool operator!=(const Expression& other) const { return !(*this == other); }

private:
    struct Node {
        Kind kind;
        OpKind op{};
        std::string name;
        std::shared_ptr<const Node> left, right;
    };

    explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expression wrap(Node n) { return Expression(std::make_shared<const Node>(std::move(n))); }

    std::shared_ptr<const Node> node_;
};

// True when `name` can appear as a leaf of the expression grammar
// `name | op(expr) | op(expr,expr)` without ambiguity.
bool is_grammar_safe_name(const std::string& name);

}  // namespace grfg
