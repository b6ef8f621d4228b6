#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "grfg/generation.hpp"
#include "test_util.hpp"

using namespace grfg;

TEST_CASE("crossing a single orthogonal pair yields add(u,v) with provenance") {
    // u and v mean-centered orthogonal
    std::vector<double> u{1, -1, 1, -1, 1, -1, 1, -1};
    std::vector<double> v{1, 1, -1, -1, 1, 1, -1, -1};
    Dataset d = testutil::make_dataset({{"u", u}, {"v", v}}, {1, 2, 3, 4, 5, 6, 7, 8});

    GenerationConfig cfg;
    auto out = cross_groups_binary(d, DescriptorGroup{{0}}, DescriptorGroup{{1}}, OpKind::Add, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].desc.name == "add(u,v)");
    CHECK(out[0].rank_score == doctest::Approx(0.0));
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(out[0].desc.values[i] == u[i] + v[i]);
    CHECK(evaluate_expression(out[0].desc.expr, d) == out[0].desc.values);
}

TEST_CASE("identical columns rank last (|cos| = 1)") {
    Rng rng(91);
    auto f = testutil::uniform_vector(50, rng);
    auto g = testutil::normal_vector(50, rng);
    Dataset d = testutil::make_dataset({{"f", f}, {"f2", f}, {"g", g}},
                                       testutil::uniform_vector(50, rng));
    CHECK(abs_cosine(f, f, true) == doctest::Approx(1.0));

    GenerationConfig cfg;
    cfg.top_k = 1;
    auto out = cross_groups_binary(d, DescriptorGroup{{0}}, DescriptorGroup{{1, 2}},
                                   OpKind::Multiply, cfg);
    REQUIRE(out.size() == 1);
    // the copy pair (f, f2) has |cos| = 1 and must not be the chosen pair
    CHECK(out[0].desc.name == "mul(f,g)");
}

TEST_CASE("2x2 crossing picks exactly the lowest-|cos| pairs (enumeration oracle)") {
    Rng rng(93);
    auto a = testutil::uniform_vector(60, rng);
    auto b = testutil::uniform_vector(60, rng);
    auto c = testutil::uniform_vector(60, rng);
    auto e = testutil::uniform_vector(60, rng);
    Dataset d = testutil::make_dataset({{"a", a}, {"b", b}, {"c", c}, {"e", e}},
                                       testutil::uniform_vector(60, rng));
    DescriptorGroup g1{{0, 1}}, g2{{2, 3}};

    // enumerate all four cosines directly
    struct P {
        double cos;
        std::string name;
    };
    std::vector<P> oracle{{abs_cosine(a, c, true), "sub(a,c)"},
                          {abs_cosine(a, e, true), "sub(a,e)"},
                          {abs_cosine(b, c, true), "sub(b,c)"},
                          {abs_cosine(b, e, true), "sub(b,e)"}};
    std::sort(oracle.begin(), oracle.end(), [](const P& x, const P& y) { return x.cos < y.cos; });

    GenerationConfig cfg;
    cfg.top_k = 2;
    auto out = cross_groups_binary(d, g1, g2, OpKind::Subtract, cfg);
    REQUIRE(out.size() == 2);
    CHECK(out[0].desc.name == oracle[0].name);
    CHECK(out[1].desc.name == oracle[1].name);
    CHECK(out[0].rank_score == doctest::Approx(oracle[0].cos));
}

TEST_CASE("centered vs raw cosine: constant offset masquerades only when uncentered") {
    Rng rng(95);
    auto base = testutil::uniform_vector(40, rng);
    std::vector<double> shifted = base;
    for (double& x : shifted) x += 100.0;
    // centered: shifted copy is perfectly correlated -> |cos| = 1
    CHECK(abs_cosine(base, shifted, true) == doctest::Approx(1.0));
    // raw cosine of the offset pair differs from the centered one
    CHECK(abs_cosine(base, shifted, false) < 1.0);

    std::vector<double> constant(40, 7.0);
    CHECK(abs_cosine(base, constant, true) == 1.0);  // degenerate counts as similar
}

TEST_CASE("apply_unary picks the more target-relevant group (oracle) with ties to C1") {
    MIEstimatorConfig mi;
    mi.n_bins = 2;
    Rng rng(97);
    std::vector<double> y;
    for (int i = 0; i < 60; ++i) y.push_back(i % 2 ? 1.0 : -1.0);
    auto noise1 = testutil::uniform_vector(60, rng);
    auto noise2 = testutil::uniform_vector(60, rng);
    Dataset d = testutil::make_dataset({{"ycopy", y}, {"n1", noise1}, {"n2", noise2}}, y);

    MIMemo memo(mi);
    DescriptorGroup gy{{0}}, gn{{1, 2}};
    REQUIRE(testutil::oracle_group_relevance(d, gy, mi) >
            testutil::oracle_group_relevance(d, gn, mi));

    auto res = apply_unary(d, gy, gn, OpKind::Square, memo);
    CHECK(res.applied_to_c1);
    CHECK(res.descriptors.size() == 1);
    CHECK(res.descriptors[0].desc.name == "square(ycopy)");

    auto res2 = apply_unary(d, gn, gy, OpKind::Square, memo);
    CHECK(!res2.applied_to_c1);
    CHECK(res2.descriptors.size() == 1);

    // exact tie (same content twice) goes to C1
    auto res3 = apply_unary(d, gy, gy, OpKind::Sin, memo);
    CHECK(res3.applied_to_c1);

    // no second group: apply to C1, one descriptor per member
    auto res4 = apply_unary(d, gn, std::nullopt, OpKind::Tanh, memo);
    CHECK(res4.applied_to_c1);
    CHECK(res4.descriptors.size() == 2);
}

TEST_CASE("dedup_and_merge drops constants, non-finite, duplicates") {
    Rng rng(99);
    auto f1 = testutil::uniform_vector(30, rng);
    auto f2 = testutil::uniform_vector(30, rng);
    Dataset d = testutil::make_dataset({{"f1", f1}, {"f2", f2}},
                                       testutil::uniform_vector(30, rng));
    GenerationConfig cfg;

    auto mk = [&](const std::string& name, std::vector<double> v) {
        GeneratedDescriptor g;
        g.desc = Descriptor{name, std::move(v), Expression::raw(name)};
        return g;
    };

    // a duplicate of f1, a constant (log of a positive constant column), an
    // inf column, and three novel columns
    std::vector<double> inf_col(30, 1.0);
    inf_col[7] = std::numeric_limits<double>::infinity();
    std::vector<GeneratedDescriptor> generated;
    generated.push_back(mk("dup", f1));
    generated.push_back(mk("const", std::vector<double>(30, std::log(5.0))));
    generated.push_back(mk("bad", inf_col));
    generated.push_back(mk("n1", testutil::uniform_vector(30, rng)));
    generated.push_back(mk("n2", testutil::uniform_vector(30, rng)));
    generated.push_back(mk("n3", testutil::uniform_vector(30, rng)));
    // duplicate of a survivor within the same batch
    auto n1_copy = generated[3].desc.values;
    generated.push_back(mk("n1copy", n1_copy));

    std::vector<DropRecord> drops;
    Dataset merged = dedup_and_merge(d, generated, cfg, &drops);
    CHECK(merged.n_descriptors() == 2 + 3);
    REQUIRE(drops.size() == 4);
    CHECK(drops[0].name == "dup");
    CHECK(drops[0].reason == "duplicate of f1");
    CHECK(drops[1].name == "const");
    CHECK(drops[1].reason == "constant");
    CHECK(drops[2].name == "bad");
    CHECK(drops[2].reason == "non-finite");
    CHECK(drops[3].name == "n1copy");

    // originals never dropped, order preserved
    CHECK(merged.column(0).name == "f1");
    CHECK(merged.column(1).name == "f2");
}

TEST_CASE("kbest_select keeps the highest-MI descriptors, earlier column wins ties") {
    MIEstimatorConfig mi;
    mi.n_bins = 2;
    Rng rng(103);
    std::vector<double> y;
    for (int i = 0; i < 80; ++i) y.push_back(i % 2 ? 3.0 : -3.0);
    Dataset d = testutil::make_dataset({{"noise1", testutil::uniform_vector(80, rng)},
                                        {"ycopy", y},
                                        {"noise2", testutil::uniform_vector(80, rng)}},
                                       y);
    MIMemo memo(mi);

    Dataset one = kbest_select(d, 1, memo);
    REQUIRE(one.n_descriptors() == 1);
    CHECK(one.column(0).name == "ycopy");

    // identity below the limit
    Dataset same = kbest_select(d, 3, memo);
    CHECK(same.n_descriptors() == 3);

    // constant column has MI 0 and is dropped first
    Dataset with_const = testutil::make_dataset({{"c", std::vector<double>(80, 1.0)},
                                                 {"ycopy", y},
                                                 {"noise", testutil::uniform_vector(80, rng)}},
                                                y);
    MIMemo memo2(mi);
    Dataset trimmed = kbest_select(with_const, 2, memo2);
    REQUIRE(trimmed.n_descriptors() == 2);
    CHECK(trimmed.find("c") == Dataset::npos);
    // column order preserved among survivors
    CHECK(trimmed.column(0).name == "ycopy");
    CHECK(trimmed.column(1).name == "noise");
}

TEST_CASE("generation is deterministic and provenance re-evaluates bit-exactly") {
    Rng rng(107);
    Dataset d = testutil::make_dataset({{"f1", testutil::uniform_vector(40, rng)},
                                        {"f2", testutil::uniform_vector(40, rng)},
                                        {"f3", testutil::uniform_vector(40, rng)}},
                                       testutil::uniform_vector(40, rng));
    GenerationConfig cfg;
    auto a = cross_groups_binary(d, DescriptorGroup{{0, 1}}, DescriptorGroup{{2}},
                                 OpKind::DivideSafe, cfg);
    auto b = cross_groups_binary(d, DescriptorGroup{{0, 1}}, DescriptorGroup{{2}},
                                 OpKind::DivideSafe, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].desc.name == b[i].desc.name);
        CHECK(a[i].desc.values == b[i].desc.values);
        CHECK(evaluate_expression(a[i].desc.expr, d) == a[i].desc.values);
    }
}

TEST_CASE("random-align crossing emits min(|C1|,|C2|) descriptors from the groups") {
    Rng rng(109);
    Dataset d = testutil::make_dataset({{"a", testutil::uniform_vector(30, rng)},
                                        {"b", testutil::uniform_vector(30, rng)},
                                        {"c", testutil::uniform_vector(30, rng)},
                                        {"e", testutil::uniform_vector(30, rng)},
                                        {"f", testutil::uniform_vector(30, rng)}},
                                       testutil::uniform_vector(30, rng));
    Rng ablation(5);
    auto out = cross_groups_random_align(d, DescriptorGroup{{0, 1}}, DescriptorGroup{{2, 3, 4}},
                                         OpKind::Add, ablation);
    REQUIRE(out.size() == 2);
    for (const auto& g : out) {
        CHECK(g.desc.expr.kind() == Expression::Kind::Binary);
        CHECK(evaluate_expression(g.desc.expr, d) == g.desc.values);
    }
}
