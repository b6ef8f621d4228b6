#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "grfg/state_rep.hpp"
#include "test_util.hpp"

using namespace grfg;

namespace {

// Second implementation of the same quartile convention (h = p*(n-1), linear
// interpolation), written against a copy of the definition.
double quartile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double h = p * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TEST_CASE("seven_stats pinned order and conventions") {
    auto s = seven_stats({4.0, 1.0, 3.0, 2.0}, 4.0);
    CHECK(s[0] == 4.0);                                  // count
    CHECK(s[1] == doctest::Approx(std::sqrt(1.25)));     // population std
    CHECK(s[2] == 1.0);                                  // min
    CHECK(s[3] == 4.0);                                  // max
    CHECK(s[4] == doctest::Approx(1.75));                // Q1
    CHECK(s[5] == doctest::Approx(2.5));                 // median (midpoint)
    CHECK(s[6] == doctest::Approx(3.25));                // Q3
}

TEST_CASE("quartile convention agrees with an independent implementation") {
    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        std::uniform_int_distribution<std::size_t> len(1, 40);
        auto v = testutil::uniform_vector(len(rng), rng);
        auto s = seven_stats(v, static_cast<double>(v.size()));
        CHECK(s[4] == doctest::Approx(quartile_oracle(v, 0.25)).epsilon(1e-12));
        CHECK(s[5] == doctest::Approx(quartile_oracle(v, 0.50)).epsilon(1e-12));
        CHECK(s[6] == doctest::Approx(quartile_oracle(v, 0.75)).epsilon(1e-12));
    }
}

TEST_CASE("golden 49-vector for the constant-column fixture (n=5, c=2)") {
    Dataset d = testutil::make_dataset({{"c", {2, 2, 2, 2, 2}}}, {1, 2, 3, 4, 5});
    auto rep = rep_descriptor_set(d);
    REQUIRE(rep.size() == 49);

    // First pass: (5, 0, 2, 2, 2, 2, 2). Second pass on single-entry rows:
    // (1, 0, v, v, v, v, v) per statistic row, flattened row-major.
    std::vector<double> expected;
    for (double v : {5.0, 0.0, 2.0, 2.0, 2.0, 2.0, 2.0}) {
        expected.insert(expected.end(), {1.0, 0.0, v, v, v, v, v});
    }
    for (std::size_t i = 0; i < 49; ++i) CHECK(rep[i] == expected[i]);
}

TEST_CASE("representation length is 49 for any shape") {
    Rng rng(37);
    for (std::size_t width : {1ul, 3ul, 17ul, 120ul, 500ul}) {
        std::vector<std::pair<std::string, std::vector<double>>> cols;
        for (std::size_t c = 0; c < width; ++c) {
            cols.emplace_back("f" + std::to_string(c), testutil::uniform_vector(19, rng));
        }
        Dataset d = testutil::make_dataset(cols, testutil::uniform_vector(19, rng));
        CHECK(rep_descriptor_set(d).size() == 49);
    }
    // tall input
    Dataset tall = testutil::make_dataset({{"a", testutil::uniform_vector(100000, rng)},
                                           {"b", testutil::uniform_vector(100000, rng)}},
                                          testutil::uniform_vector(100000, rng));
    CHECK(rep_descriptor_set(tall).size() == 49);
}

TEST_CASE("representation is invariant to column order") {
    Rng rng(41);
    Dataset d = testutil::make_dataset({{"a", testutil::uniform_vector(50, rng)},
                                        {"b", testutil::uniform_vector(50, rng)},
                                        {"c", testutil::normal_vector(50, rng)}},
                                       testutil::uniform_vector(50, rng));
    auto r1 = rep_descriptor_set(d);
    auto r2 = rep_descriptor_set(d.subset({2, 0, 1}));
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);
}

TEST_CASE("group representation sees only the group's columns") {
    Rng rng(43);
    auto a = testutil::uniform_vector(30, rng);
    auto b = testutil::uniform_vector(30, rng);
    Dataset d = testutil::make_dataset({{"a", a}, {"b", b}}, testutil::uniform_vector(30, rng));
    Dataset only_a = testutil::make_dataset({{"a", a}}, d.target());
    auto via_group = rep_group(d, DescriptorGroup{{0}});
    auto direct = rep_descriptor_set(only_a);
    for (std::size_t i = 0; i < 49; ++i) CHECK(via_group[i] == direct[i]);
}

TEST_CASE("operation one-hot is stable and normalized") {
    auto ops = OperationSet::defaults();
    auto v = rep_operation(ops.at(0), ops);
    REQUIRE(v.size() == ops.size());
    CHECK(v[0] == 1.0);
    double sum = 0.0;
    for (double x : v) sum += x;
    CHECK(sum == 1.0);

    // index stability across repeated queries
    for (int rep = 0; rep < 3; ++rep) {
        auto w = rep_operation(OpKind::Multiply, ops);
        CHECK(w[ops.index_of(OpKind::Multiply)] == 1.0);
    }
    OperationSet small = OperationSet::parse("sin", "add");
    CHECK_THROWS_AS(rep_operation(OpKind::Tanh, small), std::invalid_argument);
}

TEST_CASE("state concatenation lengths") {
    Rng rng(47);
    Dataset d = testutil::make_dataset({{"a", testutil::uniform_vector(25, rng)},
                                        {"b", testutil::uniform_vector(25, rng)}},
                                       testutil::uniform_vector(25, rng));
    auto ops = OperationSet::defaults();
    auto s1 = rep_descriptor_set(d);
    auto c1 = rep_group(d, DescriptorGroup{{0}});
    auto so = concat_states(std::array{s1, c1});
    CHECK(so.size() == 98);
    auto o = rep_operation(OpKind::Add, ops);
    auto s2 = concat_states(std::array{so, o});
    CHECK(s2.size() == 98 + ops.size());

    auto solo = concat_states(std::array{s1});
    CHECK(solo == s1);
}
