#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "grfg/dataset.hpp"
#include "grfg/info_metrics.hpp"
#include "grfg/rng.hpp"

namespace testutil {

// ---- fixtures -------------------------------------------------------------

inline grfg::Dataset make_dataset(const std::vector<std::pair<std::string, std::vector<double>>>& cols,
                                  std::vector<double> y, std::string target_name = "y") {
    std::vector<grfg::Descriptor> descriptors;
    for (const auto& [name, values] : cols) {
        descriptors.push_back({name, values, grfg::Expression::raw(name)});
    }
    return grfg::Dataset(std::move(descriptors), std::move(y), std::move(target_name));
}

inline std::vector<double> uniform_vector(std::size_t n, grfg::Rng& rng, double lo = -1.0,
                                          double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline std::vector<double> normal_vector(std::size_t n, grfg::Rng& rng, double sigma = 1.0) {
    std::normal_distribution<double> dist(0.0, sigma);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// Synthetic regression benchmark: y = f1*f2 + sin(f3) + 0.05*noise over m iid
// uniform descriptors. The multiplicative interaction is reachable in one
// binary crossing step, sin(f3) in one unary step.
inline grfg::Dataset synthetic_benchmark(std::uint64_t seed, std::size_t n = 500,
                                         std::size_t m = 8) {
    grfg::Rng rng(grfg::splitmix64(seed ^ 0xbe9cbe9cULL));
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    for (std::size_t c = 0; c < m; ++c) {
        cols.emplace_back("f" + std::to_string(c + 1), uniform_vector(n, rng, -2.0, 2.0));
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = cols[0].second[i] * cols[1].second[i] + std::sin(cols[2].second[i]) +
               0.05 * noise(rng);
    }
    return make_dataset(cols, y);
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("grfg_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// ---- independent oracles --------------------------------------------------

// Plug-in MI straight from a pair of discrete label vectors (no binning); the
// tests feed it hand-built joint distributions.
inline double mi_from_labels(const std::vector<int>& a, const std::vector<int>& b) {
    int ka = 0, kb = 0;
    for (int v : a) ka = std::max(ka, v + 1);
    for (int v : b) kb = std::max(kb, v + 1);
    std::vector<double> joint(static_cast<std::size_t>(ka) * kb, 0.0), pa(ka, 0.0), pb(kb, 0.0);
    double w = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[static_cast<std::size_t>(a[i]) * kb + b[i]] += w;
        pa[a[i]] += w;
        pb[b[i]] += w;
    }
    double mi = 0.0;
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            double p = joint[static_cast<std::size_t>(i) * kb + j];
            if (p > 0) mi += p * std::log(p / (pa[i] * pb[j]));
        }
    }
    return mi;
}

// Double-loop re-statement of the group distance formula, built directly on
// mutual_information (no memo, no shared code with the production
// aggregation).
inline double oracle_group_distance(const grfg::Dataset& d, const grfg::DescriptorGroup& a,
                                    const grfg::DescriptorGroup& b,
                                    const grfg::MIEstimatorConfig& cfg) {
    double sum = 0.0;
    for (std::size_t i : a.members) {
        for (std::size_t j : b.members) {
            double rel_i = grfg::mutual_information(d.column(i).values, d.target(), cfg);
            double rel_j = grfg::mutual_information(d.column(j).values, d.target(), cfg);
            double red = grfg::mutual_information(d.column(i).values, d.column(j).values, cfg);
            sum += std::fabs(rel_i - rel_j) / (red + cfg.epsilon);
        }
    }
    return sum / (static_cast<double>(a.members.size()) * static_cast<double>(b.members.size()));
}

inline double oracle_set_utility(const grfg::Dataset& d, const grfg::MIEstimatorConfig& cfg) {
    const std::size_t m = d.n_descriptors();
    double red = 0.0, rel = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (cfg.exclude_diagonal && i == j) continue;
            red += grfg::mutual_information(d.column(i).values, d.column(j).values, cfg);
        }
        rel += grfg::mutual_information(d.column(i).values, d.target(), cfg);
    }
    double dm = static_cast<double>(m);
    return -red / (dm * dm) + rel / dm;
}

inline double oracle_group_relevance(const grfg::Dataset& d, const grfg::DescriptorGroup& g,
                                     const grfg::MIEstimatorConfig& cfg) {
    double rel = 0.0;
    for (std::size_t i : g.members) {
        rel += grfg::mutual_information(d.column(i).values, d.target(), cfg);
    }
    return rel / static_cast<double>(g.members.size());
}

// Brute-force agglomerative merging: recomputes every pairwise distance from
// scratch each step and applies the documented tie-break. Independent of the
// production clustering loop.
struct OracleMerge {
    std::vector<std::size_t> a, b;
    double dist;
};
inline std::vector<OracleMerge> oracle_merge_sequence(const grfg::Dataset& d, double threshold,
                                                      int min_groups,
                                                      const grfg::MIEstimatorConfig& cfg) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < d.n_descriptors(); ++i) groups.push_back({i});
    std::vector<OracleMerge> seq;
    while (groups.size() > static_cast<std::size_t>(min_groups)) {
        double best = 0.0;
        std::size_t bi = 0, bj = 0;
        bool found = false;
        auto key_of = [&](std::size_t i, std::size_t j) {
            std::size_t u_min = std::min(groups[i].front(), groups[j].front());
            std::size_t u_max = std::max(groups[i].back(), groups[j].back());
            std::size_t lo = std::min(groups[i].front(), groups[j].front());
            std::size_t hi = std::max(groups[i].front(), groups[j].front());
            return std::tuple{u_min, u_max, lo, hi};
        };
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                double dist = oracle_group_distance(d, grfg::DescriptorGroup{groups[i]},
                                                    grfg::DescriptorGroup{groups[j]}, cfg);
                if (!found || dist < best || (dist == best && key_of(i, j) < key_of(bi, bj))) {
                    best = dist;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        if (!found || best > threshold) break;
        seq.push_back({groups[bi], groups[bj], best});
        std::vector<std::size_t> merged;
        std::merge(groups[bi].begin(), groups[bi].end(), groups[bj].begin(), groups[bj].end(),
                   std::back_inserter(merged));
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
        groups[bi] = std::move(merged);
    }
    return seq;
}

// Independently coded accuracy formulas.
struct OracleMetrics {
    double rae1, mae1, mse1;
};
inline OracleMetrics oracle_metrics(const std::vector<double>& y, const std::vector<double>& p,
                                    bool paper_literal = false) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double sum_abs = 0.0, sum_sq = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum_abs += std::fabs(y[i] - p[i]);
        sum_sq += (y[i] - p[i]) * (y[i] - p[i]);
        denom += std::fabs(y[i] - mean);
    }
    OracleMetrics m;
    m.rae1 = 1.0 - sum_abs / denom;
    if (paper_literal) {
        m.mae1 = 1.0 - sum_abs;
        m.mse1 = 1.0 - sum_sq;
    } else {
        m.mae1 = 1.0 - sum_abs / static_cast<double>(y.size());
        m.mse1 = 1.0 - sum_sq / static_cast<double>(y.size());
    }
    return m;
}

}  // namespace testutil
