#include "grfg/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "grfg/state_rep.hpp"

namespace grfg {

std::vector<DescriptorGroup> singleton_groups(std::size_t n_descriptors) {
    std::vector<DescriptorGroup> groups(n_descriptors);
    for (std::size_t i = 0; i < n_descriptors; ++i) groups[i].members = {i};
    return groups;
}

namespace {

double euclidean_rep_distance(const Dataset& d, const DescriptorGroup& a,
                              const DescriptorGroup& b) {
    auto ra = rep_group(d, a);
    auto rb = rep_group(d, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) sum += (ra[k] - rb[k]) * (ra[k] - rb[k]);
    return std::sqrt(sum);
}

double pair_distance(const Dataset& d, const DescriptorGroup& a, const DescriptorGroup& b,
                     const ClusteringConfig& cfg, MIMemo& memo) {
    if (cfg.distance == GroupDistanceMode::EuclideanRep) return euclidean_rep_distance(d, a, b);
    return group_distance(d, a, b, memo);
}

// Deterministic ordering for equal-distance pairs.
std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> pair_key(
    const DescriptorGroup& a, const DescriptorGroup& b) {
    std::size_t lo_a = a.members.front(), lo_b = b.members.front();
    std::size_t union_min = std::min(lo_a, lo_b);
    std::size_t union_max = std::max(a.members.back(), b.members.back());
    return {union_min, union_max, std::min(lo_a, lo_b), std::max(lo_a, lo_b)};
}

}  // namespace

ClusterResult m_cluster(const Dataset& d, const ClusteringConfig& cfg, MIMemo& memo) {
    if (d.n_descriptors() == 0) throw std::invalid_argument("m_cluster: empty descriptor set");
    if (cfg.stop_threshold < 0.0) throw std::invalid_argument("m_cluster: negative threshold");
    if (cfg.min_groups < 1) throw std::invalid_argument("m_cluster: min_groups must be >= 1");

    ClusterResult result;
    result.groups = singleton_groups(d.n_descriptors());
    if (d.n_descriptors() == 1) {
        result.single_descriptor = true;
        return result;
    }

    while (result.groups.size() > static_cast<std::size_t>(cfg.min_groups)) {
        auto& groups = result.groups;
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                double dist = pair_distance(d, groups[i], groups[j], cfg, memo);
                if (!found || dist < best ||
                    (dist == best && pair_key(groups[i], groups[j]) < pair_key(groups[bi], groups[bj]))) {
                    best = dist;
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        if (!found || best > cfg.stop_threshold) break;

        MergeEvent ev;
        ev.a = groups[bi].members;
        ev.b = groups[bj].members;
        ev.distance = best;
        result.merges.push_back(std::move(ev));

        DescriptorGroup merged;
        merged.members.reserve(groups[bi].members.size() + groups[bj].members.size());
        std::merge(groups[bi].members.begin(), groups[bi].members.end(), groups[bj].members.begin(),
                   groups[bj].members.end(), std::back_inserter(merged.members));
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(bj));
        groups[bi] = std::move(merged);
    }

    // Canonical group order: by smallest member.
    std::sort(result.groups.begin(), result.groups.end(),
              [](const DescriptorGroup& a, const DescriptorGroup& b) {
                  return a.members.front() < b.members.front();
              });
    return result;
}

ClusterResult m_cluster(const Dataset& d, const ClusteringConfig& cfg,
                        const MIEstimatorConfig& mi_cfg) {
    MIMemo memo(mi_cfg);
    return m_cluster(d, cfg, memo);
}

}  // namespace grfg
