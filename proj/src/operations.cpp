#include "grfg/operations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace grfg {

namespace {

struct OpInfo {
    OpKind kind;
    std::string_view token;
    int arity;
};

constexpr OpInfo kOps[] = {
    {OpKind::Square, "square", 1},
    {OpKind::SqrtAbs, "sqrt", 1},
    {OpKind::LogAbs, "log", 1},
    {OpKind::ExpClamped, "exp", 1},
    {OpKind::Sin, "sin", 1},
    {OpKind::Cos, "cos", 1},
    {OpKind::ReciprocalSafe, "recip", 1},
    {OpKind::Tanh, "tanh", 1},
    {OpKind::Add, "add", 2},
    {OpKind::Subtract, "sub", 2},
    {OpKind::Multiply, "mul", 2},
    {OpKind::DivideSafe, "div", 2},
};

const OpInfo& info(OpKind op) {
    for (const auto& i : kOps) {
        if (i.kind == op) return i;
    }
    throw std::logic_error("unknown OpKind");
}

// sign with sign(0) = +1, so x + sign(x)*eps never crosses zero.
double guard_sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

int op_arity(OpKind op) { return info(op).arity; }
bool is_unary(OpKind op) { return op_arity(op) == 1; }
bool is_binary(OpKind op) { return op_arity(op) == 2; }

std::string_view op_token(OpKind op) { return info(op).token; }

std::optional<OpKind> op_from_token(std::string_view token) {
    for (const auto& i : kOps) {
        if (i.token == token) return i.kind;
    }
    return std::nullopt;
}

double apply_op(OpKind op, double x) {
    switch (op) {
        case OpKind::Square: return x * x;
        case OpKind::SqrtAbs: return std::sqrt(std::fabs(x));
        case OpKind::LogAbs: return std::log(std::fabs(x) + kOpEpsilon);
        case OpKind::ExpClamped: return std::exp(std::min(x, kExpClamp));
        case OpKind::Sin: return std::sin(x);
        case OpKind::Cos: return std::cos(x);
        case OpKind::ReciprocalSafe: return 1.0 / (x + guard_sign(x) * kOpEpsilon);
        case OpKind::Tanh: return std::tanh(x);
        default: break;
    }
    throw std::invalid_argument("apply_op: operation is not unary: " + std::string(op_token(op)));
}

double apply_op(OpKind op, double a, double b) {
    switch (op) {
        case OpKind::Add: return a + b;
        case OpKind::Subtract: return a - b;
        case OpKind::Multiply: return a * b;
        case OpKind::DivideSafe: return a / (b + guard_sign(b) * kOpEpsilon);
        default: break;
    }
    throw std::invalid_argument("apply_op: operation is not binary: " + std::string(op_token(op)));
}

OperationSet::OperationSet(std::vector<OpKind> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("OperationSet: must not be empty");
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        for (std::size_t j = i + 1; j < ops_.size(); ++j) {
            if (ops_[i] == ops_[j]) {
                throw std::invalid_argument("OperationSet: duplicate operation " +
                                            std::string(op_token(ops_[i])));
            }
        }
    }
}

OperationSet OperationSet::defaults() {
    return OperationSet({OpKind::Square, OpKind::SqrtAbs, OpKind::LogAbs, OpKind::ExpClamped,
                         OpKind::Sin, OpKind::Cos, OpKind::ReciprocalSafe, OpKind::Tanh,
                         OpKind::Add, OpKind::Subtract, OpKind::Multiply, OpKind::DivideSafe});
}

namespace {

void append_tokens(std::string_view csv, int want_arity, std::vector<OpKind>& out) {
    std::string tok;
    std::istringstream ss{std::string(csv)};
    while (std::getline(ss, tok, ',')) {
        // trim
        auto b = tok.find_first_not_of(" \t");
        auto e = tok.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        tok = tok.substr(b, e - b + 1);
        auto op = op_from_token(tok);
        if (!op) throw std::invalid_argument("unknown operation token: " + tok);
        if (op_arity(*op) != want_arity) {
            throw std::invalid_argument("operation " + tok + " has arity " +
                                        std::to_string(op_arity(*op)) + ", expected " +
                                        std::to_string(want_arity));
        }
        out.push_back(*op);
    }
}

}  // namespace

OperationSet OperationSet::parse(std::string_view unary_csv, std::string_view binary_csv) {
    std::vector<OpKind> ops;
    append_tokens(unary_csv, 1, ops);
    append_tokens(binary_csv, 2, ops);
    return OperationSet(std::move(ops));
}

bool OperationSet::contains(OpKind op) const {
    return std::find(ops_.begin(), ops_.end(), op) != ops_.end();
}

std::size_t OperationSet::index_of(OpKind op) const {
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i] == op) return i;
    }
    throw std::invalid_argument("operation not in set: " + std::string(op_token(op)));
}

std::vector<std::size_t> OperationSet::unary_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (is_unary(ops_[i])) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> OperationSet::binary_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (is_binary(ops_[i])) out.push_back(i);
    }
    return out;
}

bool OperationSet::has_unary() const { return !unary_indices().empty(); }
bool OperationSet::has_binary() const { return !binary_indices().empty(); }

std::string OperationSet::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (i) out += ',';
        out += op_token(ops_[i]);
    }
    return out;
}

}  // namespace grfg
