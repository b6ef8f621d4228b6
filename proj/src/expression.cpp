#include "grfg/expression.hpp"

#include <algorithm>
#include <cctype>

namespace grfg {

Expression Expression::raw(std::string column_name) {
    if (column_name.empty()) throw std::invalid_argument("Expression::raw: empty column name");
    Node n;
    n.kind = Kind::Raw;
    n.name = std::move(column_name);
    return wrap(std::move(n));
}

Expression Expression::unary(OpKind op, Expression child) {
    if (!is_unary(op)) throw std::invalid_argument("Expression::unary: binary op given");
    Node n;
    n.kind = Kind::Unary;
    n.op = op;
    n.left = child.node_;
    return wrap(std::move(n));
}

Expression Expression::binary(OpKind op, Expression left, Expression right) {
    if (!is_binary(op)) throw std::invalid_argument("Expression::binary: unary op given");
    Node n;
    n.kind = Kind::Binary;
    n.op = op;
    n.left = left.node_;
    n.right = right.node_;
    return wrap(std::move(n));
}

OpKind Expression::op() const {
    if (node_->kind == Kind::Raw) throw std::logic_error("Expression::op on raw node");
    return node_->op;
}

const std::string& Expression::column_name() const {
    if (node_->kind != Kind::Raw) throw std::logic_error("Expression::column_name on non-raw node");
    return node_->name;
}

Expression Expression::child() const {
    if (node_->kind != Kind::Unary) throw std::logic_error("Expression::child on non-unary node");
    return Expression(node_->left);
}

Expression Expression::left() const {
    if (node_->kind != Kind::Binary) throw std::logic_error("Expression::left on non-binary node");
    return Expression(node_->left);
}

Expression Expression::right() const {
    if (node_->kind != Kind::Binary) throw std::logic_error("Expression::right on non-binary node");
    return Expression(node_->right);
}

int Expression::depth() const {
    switch (node_->kind) {
        case Kind::Raw: return 0;
        case Kind::Unary: return 1 + Expression(node_->left).depth();
        case Kind::Binary:
            return 1 + std::max(Expression(node_->left).depth(), Expression(node_->right).depth());
    }
    return 0;
}

void Expression::collect_leaves(std::vector<std::string>& out) const {
    switch (node_->kind) {
        case Kind::Raw: out.push_back(node_->name); return;
        case Kind::Unary: Expression(node_->left).collect_leaves(out); return;
        case Kind::Binary:
            Expression(node_->left).collect_leaves(out);
            Expression(node_->right).collect_leaves(out);
            return;
    }
}

std::string Expression::str() const {
    switch (node_->kind) {
        case Kind::Raw: return node_->name;
        case Kind::Unary:
            return std::string(op_token(node_->op)) + "(" + Expression(node_->left).str() + ")";
        case Kind::Binary:
            return std::string(op_token(node_->op)) + "(" + Expression(node_->left).str() + "," +
                   Expression(node_->right).str() + ")";
    }
    return {};
}

bool Expression::operator==(const Expression& other) const {
    if (node_ == other.node_) return true;
    if (node_->kind != other.node_->kind) return false;
    switch (node_->kind) {
        case Kind::Raw: return node_->name == other.node_->name;
        case Kind::Unary:
            return node_->op == other.node_->op &&
                   Expression(node_->left) == Expression(other.node_->left);
        case Kind::Binary:
            return node_->op == other.node_->op &&
                   Expression(node_->left) == Expression(other.node_->left) &&
                   Expression(node_->right) == Expression(other.node_->right);
    }
    return false;
}

namespace {

// Recursive-descent parser for `name | op(expr) | op(expr,expr)`.
// Whitespace around tokens is tolerated; the canonical renderer emits none.
struct Parser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ExprParseError("expression parse error at offset " + std::to_string(pos) + ": " +
                             what + " in '" + text + "'");
    }

    // A name token runs until one of the structural characters.
    std::string token() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != '(' && text[pos] != ')' && text[pos] != ',') ++pos;
        std::string t = text.substr(start, pos - start);
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        if (t.empty()) fail("expected name or operation");
        return t;
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    Expression expr() {
        std::string t = token();
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
            auto op = op_from_token(t);
            if (!op) fail("unknown operation '" + t + "'");
            ++pos;  // consume '('
            Expression first = expr();
            skip_ws();
            if (op_arity(*op) == 1) {
                expect(')');
                return Expression::unary(*op, std::move(first));
            }
            expect(',');
            Expression second = expr();
            expect(')');
            return Expression::binary(*op, std::move(first), std::move(second));
        }
        return Expression::raw(t);
    }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p{text};
    Expression e = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    return e;
}

bool is_grammar_safe_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        if (c == '(' || c == ')' || c == ',' || c == '"' ||
            std::isspace(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

}  // namespace grfg
