#pragma once

#include <cstddef>
#include <vector>

#include "grfg/dataset.hpp"
#include "grfg/info_metrics.hpp"

namespace grfg {

enum class GroupDistanceMode {
    InfoTheoretic,  // relevance-difference / redundancy ratio
    EuclideanRep,   // euclidean distance between 49-dim group representations
};

struct ClusteringConfig {
    double stop_threshold = 0.1;
    int min_groups = 2;
    GroupDistanceMode distance = GroupDistanceMode::InfoTheoretic;
};

struct MergeEvent {
    std::vector<std::size_t> a, b;  // member sets merged (sorted)
    double distance;
};

struct ClusterResult {
    std::vector<DescriptorGroup> groups;  // partition of 0..m-1
    std::vector<MergeEvent> merges;       // in merge order, for oracle comparison
    bool single_descriptor = false;       // crossing impossible, caller should log
};

// Agglomerative merging: start from singletons, repeatedly merge the closest
// pair (distance <= stop_threshold), recomputing distances against the new
// group directly. Stops when the minimum pairwise distance exceeds the
// threshold or the group count reaches min_groups. Equal minimum distances
// are broken by the pair key (union min member, union max member, smallest
// member of each side) so the merge sequence is deterministic.
ClusterResult m_cluster(const Dataset& d, const ClusteringConfig& cfg, MIMemo& memo);
ClusterResult m_cluster(const Dataset& d, const ClusteringConfig& cfg,
                        const MIEstimatorConfig& mi_cfg);

// One group per descriptor; the no-clustering ablation and the |F| = 1 case.
std::vector<DescriptorGroup> singleton_groups(std::size_t n_descriptors);

}  // namespace grfg
