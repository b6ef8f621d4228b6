#include "grfg/generation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace grfg {

double abs_cosine(const std::vector<double>& a, const std::vector<double>& b, bool center) {
    if (a.size() != b.size()) throw std::invalid_argument("abs_cosine: length mismatch");
    const std::size_t n = a.size();
    double mean_a = 0.0, mean_b = 0.0;
    if (center) {
        for (std::size_t i = 0; i < n; ++i) {
            mean_a += a[i];
            mean_b += b[i];
        }
        mean_a /= static_cast<double>(n);
        mean_b /= static_cast<double>(n);
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = a[i] - mean_a;
        double y = b[i] - mean_b;
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    constexpr double kDegenerate = 1e-30;
    if (na <= kDegenerate || nb <= kDegenerate) return 1.0;
    return std::fabs(dot / std::sqrt(na * nb));
}

namespace {

GeneratedDescriptor make_binary(const Dataset& d, std::size_t li, std::size_t ri, OpKind op,
                                double score) {
    const auto& l = d.column(li);
    const auto& r = d.column(ri);
    Expression expr = Expression::binary(op, l.expr, r.expr);
    std::vector<double> values(d.n_samples());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = apply_op(op, l.values[i], r.values[i]);
    }
    return {Descriptor{expr.str(), std::move(values), std::move(expr)}, score};
}

GeneratedDescriptor make_unary(const Dataset& d, std::size_t ci, OpKind op, double score) {
    const auto& c = d.column(ci);
    Expression expr = Expression::unary(op, c.expr);
    std::vector<double> values(d.n_samples());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = apply_op(op, c.values[i]);
    return {Descriptor{expr.str(), std::move(values), std::move(expr)}, score};
}

}  // namespace

GeneratedDescriptor cross_pair(const Dataset& d, std::size_t left, std::size_t right, OpKind op,
                               double rank_score) {
    return make_binary(d, left, right, op, rank_score);
}

std::vector<GeneratedDescriptor> cross_groups_binary(const Dataset& d, const DescriptorGroup& c1,
                                                     const DescriptorGroup& c2, OpKind op,
                                                     const GenerationConfig& cfg) {
    if (!is_binary(op)) throw std::invalid_argument("cross_groups_binary: op must be binary");
    if (c1.members.empty() || c2.members.empty()) {
        throw std::invalid_argument("cross_groups_binary: empty group");
    }

    struct Pair {
        double sim;
        std::size_t left, right;
    };
    std::vector<Pair> pairs;
    pairs.reserve(c1.members.size() * c2.members.size());
    for (std::size_t li : c1.members) {
        for (std::size_t ri : c2.members) {
            double sim = abs_cosine(d.column(li).values, d.column(ri).values, cfg.center_cosine);
            pairs.push_back({sim, li, ri});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(a.sim, a.left, a.right) < std::tie(b.sim, b.left, b.right);
    });

    std::vector<GeneratedDescriptor> out;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.top_k), pairs.size());
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(make_binary(d, pairs[i].left, pairs[i].right, op, pairs[i].sim));
    }
    return out;
}

std::vector<GeneratedDescriptor> cross_groups_random_align(const Dataset& d,
                                                           const DescriptorGroup& c1,
                                                           const DescriptorGroup& c2, OpKind op,
                                                           Rng& rng) {
    if (!is_binary(op)) throw std::invalid_argument("cross_groups_random_align: op must be binary");
    if (c1.members.empty() || c2.members.empty()) {
        throw std::invalid_argument("cross_groups_random_align: empty group");
    }
    const bool c1_smaller = c1.members.size() <= c2.members.size();
    const auto& small = c1_smaller ? c1.members : c2.members;
    std::vector<std::size_t> large = c1_smaller ? c2.members : c1.members;
    const std::size_t k = small.size();
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, large.size() - 1);
        std::swap(large[i], large[pick(rng)]);
    }
    std::vector<GeneratedDescriptor> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t li = c1_smaller ? small[i] : large[i];
        std::size_t ri = c1_smaller ? large[i] : small[i];
        out.push_back(make_binary(d, li, ri, op, 0.0));
    }
    return out;
}

std::vector<GeneratedDescriptor> apply_unary_to_group(const Dataset& d, const DescriptorGroup& g,
                                                      OpKind op) {
    if (!is_unary(op)) throw std::invalid_argument("apply_unary_to_group: op must be unary");
    if (g.members.empty()) throw std::invalid_argument("apply_unary_to_group: empty group");
    std::vector<GeneratedDescriptor> out;
    out.reserve(g.members.size());
    for (std::size_t ci : g.members) out.push_back(make_unary(d, ci, op, 0.0));
    return out;
}

UnaryGeneration apply_unary(const Dataset& d, const DescriptorGroup& c1,
                            const std::optional<DescriptorGroup>& c2, OpKind op, MIMemo& memo) {
    UnaryGeneration result;
    result.rel_c1 = group_relevance(d, c1, memo);
    result.rel_c2 = c2 ? group_relevance(d, *c2, memo) : 0.0;
    result.applied_to_c1 = !c2 || result.rel_c1 >= result.rel_c2;  // ties go to c1
    const DescriptorGroup& chosen = result.applied_to_c1 ? c1 : *c2;
    result.descriptors = apply_unary_to_group(d, chosen, op);
    double rel = result.applied_to_c1 ? result.rel_c1 : result.rel_c2;
    for (auto& g : result.descriptors) g.rank_score = rel;
    return result;
}

namespace {

bool is_constant(const std::vector<double>& v, double tol) {
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    return *mx - *mn <= tol;
}

bool is_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool elementwise_equal(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::fabs(a[i] - b[i]) > tol) return false;
    }
    return true;
}

}  // namespace

Dataset dedup_and_merge(const Dataset& f_prev, const std::vector<GeneratedDescriptor>& generated,
                        const GenerationConfig& cfg, std::vector<DropRecord>* drops) {
    std::vector<Descriptor> survivors;
    for (const auto& g : generated) {
        const auto& cand = g.desc;
        if (!is_finite(cand.values)) {
            if (drops) drops->push_back({cand.name, "non-finite"});
            continue;
        }
        if (is_constant(cand.values, cfg.dedup_tolerance)) {
            if (drops) drops->push_back({cand.name, "constant"});
            continue;
        }
        const Descriptor* dup = nullptr;
        for (const auto& c : f_prev.columns()) {
            if (elementwise_equal(cand.values, c.values, cfg.dedup_tolerance)) {
                dup = &c;
                break;
            }
        }
        if (!dup) {
            for (const auto& c : survivors) {
                if (elementwise_equal(cand.values, c.values, cfg.dedup_tolerance)) {
                    dup = &c;
                    break;
                }
            }
        }
        if (dup) {
            if (drops) drops->push_back({cand.name, "duplicate of " + dup->name});
            continue;
        }
        survivors.push_back(cand);
    }
    if (survivors.empty()) return f_prev;
    return f_prev.with_appended(std::move(survivors));
}

Dataset kbest_select(const Dataset& d, std::size_t limit, MIMemo& memo) {
    if (limit < 1) throw std::invalid_argument("kbest_select: limit must be >= 1");
    if (d.n_descriptors() <= limit) return d;

    std::vector<std::pair<double, std::size_t>> ranked;  // (-mi, index) for stable ties
    ranked.reserve(d.n_descriptors());
    for (std::size_t i = 0; i < d.n_descriptors(); ++i) {
        const auto& c = d.column(i);
        ranked.emplace_back(-memo.target_mi(c.name, c.values, d.target()), i);
    }
    std::sort(ranked.begin(), ranked.end());

    std::vector<std::size_t> keep;
    keep.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) keep.push_back(ranked[i].second);
    std::sort(keep.begin(), keep.end());  // preserve original column order
    return d.subset(keep);
}

}  // namespace grfg
