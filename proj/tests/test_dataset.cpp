#include <doctest.h>

#include <cstring>
#include <sstream>

#include "grfg/dataset.hpp"
#include "test_util.hpp"

using namespace grfg;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::string small_csv(std::size_t rows = 100) {
    std::ostringstream out;
    out << "f1,f2,y\n";
    for (std::size_t i = 0; i < rows; ++i) {
        out << i << "," << 2.5 * i << "," << (i % 7) << "\n";
    }
    return out.str();
}

}  // namespace

TEST_CASE("load_csv produces raw descriptors in header order") {
    TempDir dir;
    write_file(dir.file("d.csv"), small_csv());
    Dataset d = load_csv(dir.file("d.csv"), "y");
    CHECK(d.n_samples() == 100);
    REQUIRE(d.n_descriptors() == 2);
    CHECK(d.column(0).name == "f1");
    CHECK(d.column(1).name == "f2");
    CHECK(d.column(0).expr.is_raw());
    CHECK(d.target_name() == "y");
    CHECK(d.target()[8] == 1.0);
}

TEST_CASE("a 21-column file with a named target yields 20 descriptors") {
    TempDir dir;
    std::ostringstream out;
    for (int c = 0; c < 20; ++c) out << "d" << c << ",";
    out << "thermal_conductivity\n";
    for (int r = 0; r < 30; ++r) {
        for (int c = 0; c < 20; ++c) out << (r * 20 + c) << ",";
        out << r << "\n";
    }
    write_file(dir.file("polymers.csv"), out.str());
    Dataset d = load_csv(dir.file("polymers.csv"), "thermal_conductivity");
    CHECK(d.n_descriptors() == 20);
    CHECK(d.n_samples() == 30);
    CHECK(d.target_name() == "thermal_conductivity");
}

TEST_CASE("load_csv error paths") {
    TempDir dir;
    CHECK_THROWS_AS(load_csv(dir.file("missing.csv"), "y"), InputError);

    write_file(dir.file("dup.csv"), "a,a,y\n1,2,3\n");
    CHECK_THROWS_WITH_AS(load_csv(dir.file("dup.csv"), "y"),
                         doctest::Contains("duplicate column 'a'"), InputError);

    write_file(dir.file("no_target.csv"), small_csv());
    CHECK_THROWS_AS(load_csv(dir.file("no_target.csv"), "nope"), InputError);

    std::string bad = "f1,y\n";
    for (int i = 0; i < 12; ++i) bad += std::to_string(i) + ",1\n";
    bad += "oops,1\n";
    write_file(dir.file("bad.csv"), bad);
    try {
        load_csv(dir.file("bad.csv"), "y");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::strstr(e.what(), "row 14") != nullptr);
        CHECK(std::strstr(e.what(), "'f1'") != nullptr);
    }

    write_file(dir.file("tiny.csv"), "f1,y\n1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(load_csv(dir.file("tiny.csv"), "y"), doctest::Contains("at least 10"),
                         InputError);

    write_file(dir.file("ragged.csv"), small_csv() + "1,2\n");
    CHECK_THROWS_AS(load_csv(dir.file("ragged.csv"), "y"), InputError);
}

TEST_CASE("dataset invariants") {
    CHECK_THROWS(testutil::make_dataset({{"a", {1, 2}}, {"a", {3, 4}}}, {0, 1}));
    CHECK_THROWS(testutil::make_dataset({{"a", {1, 2, 3}}}, {0, 1}));
    CHECK_THROWS(testutil::make_dataset({{"a", {1, std::nan("")}}}, {0, 1}));
    CHECK_THROWS(testutil::make_dataset({}, {0, 1}));
}

TEST_CASE("evaluate_expression basics and oracles") {
    Dataset d = testutil::make_dataset(
        {{"f1", {1, 2, 3, 0, -2}}, {"f2", {0, 1, 2, -1, 4}}}, {1, 1, 1, 1, 1});

    CHECK(evaluate_expression(Expression::raw("f1"), d) == d.column(0).values);

    auto sq = evaluate_expression(Expression::unary(OpKind::Square, Expression::raw("f1")), d);
    CHECK(sq == std::vector<double>{1, 4, 9, 0, 4});

    // divide_safe against a direct elementwise oracle with the same epsilon
    Expression div = Expression::binary(OpKind::DivideSafe, Expression::raw("f1"),
                                        Expression::raw("f2"));
    auto got = evaluate_expression(div, d);
    for (std::size_t i = 0; i < got.size(); ++i) {
        double b = d.column(1).values[i];
        double sign = b < 0 ? -1.0 : 1.0;
        double expect = d.column(0).values[i] / (b + sign * 1e-10);
        CHECK(got[i] == expect);
        CHECK(std::isfinite(got[i]));
    }

    CHECK_THROWS_AS(evaluate_expression(Expression::raw("nope"), d), InputError);

    OperationSet unary_only = OperationSet::parse("square", "");
    CHECK_THROWS_AS(evaluate_expression(div, d, unary_only), InputError);
    CHECK_NOTHROW(evaluate_expression(Expression::unary(OpKind::Square, Expression::raw("f1")), d,
                                      unary_only));
}

TEST_CASE("export/load round-trip is bit-exact, generated headers quoted") {
    Rng rng(7);
    Dataset base = testutil::make_dataset({{"f1", testutil::uniform_vector(40, rng)},
                                           {"f2", testutil::uniform_vector(40, rng)}},
                                          testutil::uniform_vector(40, rng));
    Expression gen = Expression::binary(OpKind::DivideSafe, Expression::raw("f1"),
                                        Expression::raw("f2"));
    Dataset d = base.with_appended({make_descriptor(gen, base)});

    TempDir dir;
    export_dataset(d, dir.file("out.csv"));
    Dataset back = load_csv(dir.file("out.csv"), "y");
    REQUIRE(back.n_descriptors() == 3);
    CHECK(back.column(2).name == "div(f1,f2)");
    for (std::size_t c = 0; c < 3; ++c) {
        REQUIRE(back.column(c).values.size() == d.column(c).values.size());
        for (std::size_t i = 0; i < d.n_samples(); ++i) {
            CHECK(back.column(c).values[i] == d.column(c).values[i]);
        }
    }
    for (std::size_t i = 0; i < d.n_samples(); ++i) CHECK(back.target()[i] == d.target()[i]);
}

TEST_CASE("export rejects an empty descriptor list") {
    Rng rng(7);
    Dataset d = testutil::make_dataset({{"f1", testutil::uniform_vector(12, rng)}},
                                       testutil::uniform_vector(12, rng));
    TempDir dir;
    CHECK_THROWS_AS(export_dataset(d.subset({}), dir.file("x.csv")), std::exception);
}

TEST_CASE("provenance: descriptor values re-evaluate bit-identically") {
    Rng rng(11);
    Dataset raw = testutil::make_dataset({{"f1", testutil::uniform_vector(30, rng)},
                                          {"f2", testutil::uniform_vector(30, rng)},
                                          {"f3", testutil::uniform_vector(30, rng)}},
                                         testutil::uniform_vector(30, rng));
    Expression e = Expression::parse("mul(log(f2),sub(f1,recip(f3)))");
    Descriptor desc = make_descriptor(e, raw);
    auto again = evaluate_expression(desc.expr, raw);
    REQUIRE(again.size() == desc.values.size());
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i] == desc.values[i]);
}
