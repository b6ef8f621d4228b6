#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "grfg/dataset.hpp"
#include "grfg/info_metrics.hpp"
#include "grfg/rng.hpp"

namespace grfg {

struct GenerationConfig {
    int top_k = 5;                  // pairs kept when crossing two groups
    double size_tolerance = 3.0;    // max |F| as a multiple of |F0|
    double dedup_tolerance = 1e-12; // elementwise equality slack
    bool center_cosine = true;      // mean-center before cosine (Pearson-style)
};

// One candidate descriptor plus the score that ranked it (|cosine| of the
// parent pair for crossings, group relevance for unary generation).
struct GeneratedDescriptor {
    Descriptor desc;
    double rank_score = 0.0;
};

// |cosine| between two columns, mean-centered when `center` is set. A column
// with (near-)zero variance counts as maximally similar so degenerate pairs
// rank last.
double abs_cosine(const std::vector<double>& a, const std::vector<double>& b, bool center);

// Scenario-1 crossing: enumerate all cross pairs of the two groups, rank by
// |cosine| ascending (most dissimilar first, ties by column indices), apply
// the binary op to the top_k pairs. Lineage is Binary(op, left, right).
std::vector<GeneratedDescriptor> cross_groups_binary(const Dataset& d, const DescriptorGroup& c1,
                                                     const DescriptorGroup& c2, OpKind op,
                                                     const GenerationConfig& cfg);

// Ablation variant of crossing: align the groups by sampling
// min(|C1|,|C2|) members without replacement from the larger group and pair
// them with the smaller group in order.
std::vector<GeneratedDescriptor> cross_groups_random_align(const Dataset& d,
                                                           const DescriptorGroup& c1,
                                                           const DescriptorGroup& c2, OpKind op,
                                                           Rng& rng);

// Scenario-2 unary generation: apply the op to every descriptor of whichever
// of the two groups is more relevant to the target (ties -> c1; no second
// group -> c1).
struct UnaryGeneration {
    std::vector<GeneratedDescriptor> descriptors;
    bool applied_to_c1 = true;
    double rel_c1 = 0.0;
    double rel_c2 = 0.0;
};
UnaryGeneration apply_unary(const Dataset& d, const DescriptorGroup& c1,
                            const std::optional<DescriptorGroup>& c2, OpKind op, MIMemo& memo);

// Applies the op to one specific group (random-unary-group ablation).
std::vector<GeneratedDescriptor> apply_unary_to_group(const Dataset& d, const DescriptorGroup& g,
                                                      OpKind op);

// Crosses one specific descriptor pair (expansion baseline plumbing).
GeneratedDescriptor cross_pair(const Dataset& d, std::size_t left, std::size_t right, OpKind op,
                               double rank_score);

struct DropRecord {
    std::string name;
    std::string reason;  // "constant" | "non-finite" | "duplicate of <col>"
};

// Appends generated survivors to the previous set: drops candidates that are
// constant, non-finite, or elementwise duplicates (within dedup_tolerance) of
// any retained column. Original columns are never dropped here.
Dataset dedup_and_merge(const Dataset& f_prev, const std::vector<GeneratedDescriptor>& generated,
                        const GenerationConfig& cfg, std::vector<DropRecord>* drops = nullptr);

// Keeps the `limit` descriptors with the highest MI(f, y) (ties -> earlier
// column), preserving column order; identity when |F| <= limit.
Dataset kbest_select(const Dataset& d, std::size_t limit, MIMemo& memo);

}  // namespace grfg
