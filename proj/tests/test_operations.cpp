#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "grfg/operations.hpp"

using namespace grfg;

TEST_CASE("op tokens round-trip for the whole inventory") {
    auto ops = OperationSet::defaults();
    CHECK(ops.size() == 12);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        OpKind op = ops.at(i);
        auto back = op_from_token(op_token(op));
        REQUIRE(back.has_value());
        CHECK(*back == op);
        CHECK(ops.index_of(op) == i);
    }
    CHECK(!op_from_token("nope").has_value());
}

TEST_CASE("sanitized operation semantics") {
    CHECK(apply_op(OpKind::Square, 3.0) == 9.0);
    CHECK(apply_op(OpKind::SqrtAbs, -4.0) == 2.0);
    CHECK(apply_op(OpKind::LogAbs, 0.0) == doctest::Approx(std::log(1e-10)));
    CHECK(apply_op(OpKind::LogAbs, -std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(apply_op(OpKind::ExpClamped, 100.0) == std::exp(50.0));
    CHECK(apply_op(OpKind::ExpClamped, 1.0) == std::exp(1.0));
    CHECK(apply_op(OpKind::ReciprocalSafe, 0.0) == doctest::Approx(1e10));
    CHECK(apply_op(OpKind::ReciprocalSafe, 2.0) == doctest::Approx(0.5));
    CHECK(apply_op(OpKind::ReciprocalSafe, -2.0) == doctest::Approx(-0.5));
    CHECK(apply_op(OpKind::Tanh, 0.0) == 0.0);
    CHECK(apply_op(OpKind::Add, 2.0, 3.0) == 5.0);
    CHECK(apply_op(OpKind::Subtract, 2.0, 3.0) == -1.0);
    CHECK(apply_op(OpKind::Multiply, 2.0, 3.0) == 6.0);
    CHECK(apply_op(OpKind::DivideSafe, 1.0, 0.0) == doctest::Approx(1e10));
    CHECK(apply_op(OpKind::DivideSafe, 4.0, 2.0) == doctest::Approx(2.0));
    // negative denominators keep their sign under the guard
    CHECK(apply_op(OpKind::DivideSafe, 1.0, -1e-30) == doctest::Approx(-1e10));

    // totality: extreme inputs stay deterministic (may overflow to inf; the
    // merge step filters non-finite columns)
    CHECK(std::isinf(apply_op(OpKind::Multiply, 1e200, 1e200)));

    CHECK_THROWS_AS(apply_op(OpKind::Add, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_op(OpKind::Square, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("operation set parsing and stable indices") {
    auto ops = OperationSet::parse("square,sin", "add , div");
    REQUIRE(ops.size() == 4);
    CHECK(ops.at(0) == OpKind::Square);
    CHECK(ops.at(1) == OpKind::Sin);
    CHECK(ops.at(2) == OpKind::Add);
    CHECK(ops.at(3) == OpKind::DivideSafe);
    CHECK(ops.to_string() == "square,sin,add,div");
    CHECK(ops.unary_indices() == std::vector<std::size_t>{0, 1});
    CHECK(ops.binary_indices() == std::vector<std::size_t>{2, 3});

    CHECK_THROWS_AS(OperationSet::parse("", ""), std::invalid_argument);
    CHECK_THROWS_AS(OperationSet::parse("add", ""), std::invalid_argument);  // wrong arity slot
    CHECK_THROWS_AS(OperationSet::parse("", "sin"), std::invalid_argument);
    CHECK_THROWS_AS(OperationSet::parse("square,square", ""), std::invalid_argument);
    CHECK_THROWS_AS(OperationSet::parse("frob", ""), std::invalid_argument);
}
