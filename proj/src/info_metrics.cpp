#include "grfg/info_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grfg {

namespace {

// Quantile by linear interpolation between order statistics (inclusive),
// h = p * (n - 1). Same convention as state_rep's quartiles.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    double h = p * static_cast<double>(n - 1);
    auto lo = static_cast<std::size_t>(h);
    if (lo >= n - 1) return sorted[n - 1];
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<int> quantile_bins(const std::vector<double>& x, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("quantile_bins: n_bins must be >= 2");
    if (x.size() < 2) throw std::invalid_argument("quantile_bins: need at least 2 samples");
    if (static_cast<std::size_t>(n_bins) > x.size()) {
        throw std::invalid_argument("quantile_bins: n_bins exceeds sample count");
    }
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(n_bins) - 1);
    for (int k = 1; k < n_bins; ++k) {
        edges.push_back(quantile_sorted(sorted, static_cast<double>(k) / n_bins));
    }

    std::vector<int> bins(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        // number of edges <= v; edges are nondecreasing
        auto it = std::upper_bound(edges.begin(), edges.end(), x[i]);
        bins[i] = static_cast<int>(it - edges.begin());
    }
    return bins;
}

namespace {

double plugin_mi(const std::vector<int>& bx, const std::vector<int>& bz, int n_bins) {
    const std::size_t n = bx.size();
    const int B = n_bins;
    std::vector<double> joint(static_cast<std::size_t>(B) * B, 0.0);
    std::vector<double> px(B, 0.0), pz(B, 0.0);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        joint[static_cast<std::size_t>(bx[i]) * B + bz[i]] += w;
        px[bx[i]] += w;
        pz[bz[i]] += w;
    }
    double mi = 0.0;
    for (int a = 0; a < B; ++a) {
        for (int b = 0; b < B; ++b) {
            double p = joint[static_cast<std::size_t>(a) * B + b];
            if (p > 0.0) mi += p * std::log(p / (px[a] * pz[b]));
        }
    }
    return std::max(mi, 0.0);
}

}  // namespace

double mutual_information(const std::vector<double>& x, const std::vector<double>& z,
                          const MIEstimatorConfig& cfg) {
    if (x.size() != z.size()) throw std::invalid_argument("mutual_information: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("mutual_information: need at least 2 samples");
    int n_bins = std::min<int>(cfg.n_bins, static_cast<int>(x.size()));
    std::vector<int> bx = quantile_bins(x, n_bins);
    std::vector<int> bz = quantile_bins(z, n_bins);
    // canonical operand order makes the summation order, and hence the
    // result, exactly symmetric
    if (bz < bx) bx.swap(bz);
    return plugin_mi(bx, bz, n_bins);
}

const std::vector<int>& MIMemo::bins_for(const std::string& name,
                                         const std::vector<double>& values) {
    auto it = bins_.find(name);
    if (it != bins_.end()) return it->second;
    int n_bins = std::min<int>(cfg_.n_bins, static_cast<int>(values.size()));
    auto [ins, _] = bins_.emplace(name, quantile_bins(values, n_bins));
    return ins->second;
}

double MIMemo::pair_mi(const std::string& name_a, const std::vector<double>& a,
                       const std::string& name_b, const std::vector<double>& b) {
    const bool in_order = name_a <= name_b;
    std::pair<std::string, std::string> key =
        in_order ? std::make_pair(name_a, name_b) : std::make_pair(name_b, name_a);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mi_.find(key);
    if (it != mi_.end()) return it->second;
    // copy eagerly: the second bins_for call may rehash and invalidate the
    // first reference
    std::vector<int> bx = bins_for(in_order ? name_a : name_b, in_order ? a : b);
    std::vector<int> bz = bins_for(in_order ? name_b : name_a, in_order ? b : a);
    if (bz < bx) bx.swap(bz);
    double v = plugin_mi(bx, bz, std::min<int>(cfg_.n_bins, static_cast<int>(bx.size())));
    mi_.emplace(std::move(key), v);
    return v;
}

double MIMemo::target_mi(const std::string& name, const std::vector<double>& values,
                         const std::vector<double>& target) {
    // '\n' cannot appear in a column name, so this key never collides.
    static const std::string kTargetKey = "\n__target__";
    std::pair<std::string, std::string> key(name, kTargetKey);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mi_.find(key);
    if (it != mi_.end()) return it->second;
    std::vector<int> bx = bins_for(name, values);
    std::vector<int> bz = bins_for(kTargetKey, target);
    if (bz < bx) bx.swap(bz);
    double v = plugin_mi(bx, bz, std::min<int>(cfg_.n_bins, static_cast<int>(bx.size())));
    mi_.emplace(std::move(key), v);
    return v;
}

double group_distance(const Dataset& d, const DescriptorGroup& a, const DescriptorGroup& b,
                      MIMemo& memo) {
    if (a.members.empty() || b.members.empty()) {
        throw std::invalid_argument("group_distance: empty group");
    }
    double sum = 0.0;
    for (std::size_t i : a.members) {
        const auto& ci = d.column(i);
        double rel_i = memo.target_mi(ci.name, ci.values, d.target());
        for (std::size_t j : b.members) {
            const auto& cj = d.column(j);
            double rel_j = memo.target_mi(cj.name, cj.values, d.target());
            double red = memo.pair_mi(ci.name, ci.values, cj.name, cj.values);
            sum += std::fabs(rel_i - rel_j) / (red + memo.cfg().epsilon);
        }
    }
    return sum / (static_cast<double>(a.members.size()) * static_cast<double>(b.members.size()));
}

double set_utility(const Dataset& d, const std::vector<std::size_t>& subset, MIMemo& memo) {
    if (subset.empty()) throw std::invalid_argument("set_utility: empty descriptor set");
    const double m = static_cast<double>(subset.size());
    double redundancy = 0.0;
    for (std::size_t i : subset) {
        const auto& ci = d.column(i);
        for (std::size_t j : subset) {
            if (memo.cfg().exclude_diagonal && i == j) continue;
            const auto& cj = d.column(j);
            redundancy += memo.pair_mi(ci.name, ci.values, cj.name, cj.values);
        }
    }
    double relevance = 0.0;
    for (std::size_t i : subset) {
        const auto& ci = d.column(i);
        relevance += memo.target_mi(ci.name, ci.values, d.target());
    }
    return -redundancy / (m * m) + relevance / m;
}

double set_utility(const Dataset& d, MIMemo& memo) {
    std::vector<std::size_t> all(d.n_descriptors());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return set_utility(d, all, memo);
}

double group_relevance(const Dataset& d, const DescriptorGroup& g, MIMemo& memo) {
    if (g.members.empty()) throw std::invalid_argument("group_relevance: empty group");
    double sum = 0.0;
    for (std::size_t i : g.members) {
        const auto& c = d.column(i);
        sum += memo.target_mi(c.name, c.values, d.target());
    }
    return sum / static_cast<double>(g.members.size());
}

double group_distance(const Dataset& d, const DescriptorGroup& a, const DescriptorGroup& b,
                      const MIEstimatorConfig& cfg) {
    MIMemo memo(cfg);
    return group_distance(d, a, b, memo);
}

double set_utility(const Dataset& d, const MIEstimatorConfig& cfg) {
    MIMemo memo(cfg);
    return set_utility(d, memo);
}

double group_relevance(const Dataset& d, const DescriptorGroup& g, const MIEstimatorConfig& cfg) {
    MIMemo memo(cfg);
    return group_relevance(d, g, memo);
}

}  // namespace grfg
