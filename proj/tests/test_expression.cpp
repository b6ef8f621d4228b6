#include <doctest.h>

#include <string>
#include <vector>

#include "grfg/expression.hpp"
#include "grfg/rng.hpp"

using namespace grfg;

TEST_CASE("canonical rendering") {
    Expression e = Expression::binary(OpKind::DivideSafe,
                                      Expression::unary(OpKind::LogAbs, Expression::raw("f3")),
                                      Expression::raw("f7"));
    CHECK(e.str() == "div(log(f3),f7)");
    CHECK(Expression::binary(OpKind::Add, Expression::raw("u"), Expression::raw("v")).str() ==
          "add(u,v)");
    CHECK(Expression::raw("f1").str() == "f1");
    CHECK(e.depth() == 2);

    std::vector<std::string> leaves;
    e.collect_leaves(leaves);
    CHECK(leaves == std::vector<std::string>{"f3", "f7"});
}

namespace {

Expression random_expr(Rng& rng, int max_depth) {
    const std::vector<std::string> names = {"f1", "f2", "f3", "alpha", "x_9"};
    std::uniform_int_distribution<int> kind(0, max_depth <= 0 ? 0 : 2);
    std::uniform_int_distribution<std::size_t> name_pick(0, names.size() - 1);
    auto ops = OperationSet::defaults();
    switch (kind(rng)) {
        case 1: {
            auto unary = ops.unary_indices();
            std::uniform_int_distribution<std::size_t> pick(0, unary.size() - 1);
            return Expression::unary(ops.at(unary[pick(rng)]), random_expr(rng, max_depth - 1));
        }
        case 2: {
            auto binary = ops.binary_indices();
            std::uniform_int_distribution<std::size_t> pick(0, binary.size() - 1);
            return Expression::binary(ops.at(binary[pick(rng)]), random_expr(rng, max_depth - 1),
                                      random_expr(rng, max_depth - 1));
        }
        default: return Expression::raw(names[name_pick(rng)]);
    }
}

}  // namespace

TEST_CASE("parse(render(e)) round-trips random expressions up to depth 6") {
    Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        Expression e = random_expr(rng, 6);
        CHECK(e.depth() <= 6);
        Expression back = Expression::parse(e.str());
        CHECK(back == e);
        CHECK(back.str() == e.str());
    }
}

TEST_CASE("parser accepts whitespace and rejects malformed input") {
    CHECK(Expression::parse(" add( f1 , f2 ) ") ==
          Expression::binary(OpKind::Add, Expression::raw("f1"), Expression::raw("f2")));

    CHECK_THROWS_AS(Expression::parse(""), ExprParseError);
    CHECK_THROWS_AS(Expression::parse("add(f1)"), ExprParseError);       // missing arg
    CHECK_THROWS_AS(Expression::parse("sin(f1,f2)"), ExprParseError);    // extra arg
    CHECK_THROWS_AS(Expression::parse("frob(f1)"), ExprParseError);      // unknown op
    CHECK_THROWS_AS(Expression::parse("add(f1,f2"), ExprParseError);     // unbalanced
    CHECK_THROWS_AS(Expression::parse("add(f1,f2))"), ExprParseError);   // trailing
    CHECK_THROWS_AS(Expression::parse("add(,f2)"), ExprParseError);
}

TEST_CASE("structural equality distinguishes shapes") {
    Expression a = Expression::binary(OpKind::Add, Expression::raw("f1"), Expression::raw("f2"));
    Expression b = Expression::binary(OpKind::Add, Expression::raw("f2"), Expression::raw("f1"));
    CHECK(a != b);
    CHECK(a == Expression::parse("add(f1,f2)"));
    CHECK(Expression::raw("add") == Expression::parse("add"));  // bare name, not a call
}

TEST_CASE("grammar-safe names") {
    CHECK(is_grammar_safe_name("f1"));
    CHECK(is_grammar_safe_name("cross_section-2.5"));
    CHECK(!is_grammar_safe_name(""));
    CHECK(!is_grammar_safe_name("a,b"));
    CHECK(!is_grammar_safe_name("a(b"));
    CHECK(!is_grammar_safe_name("a b"));
    CHECK(!is_grammar_safe_name("a\"b"));
}
