#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grfg/clustering.hpp"
#include "grfg/qlearn.hpp"
#include "grfg/state_rep.hpp"

namespace grfg {

// The three cascading agents. Input widths are fixed for a run:
//   group agent 1:   Rep(F) ++ Rep(C)            = 49 + 49
//   operation agent: Rep(F)+Rep(C1) ++ onehot(o) = 98 + |O|
//   group agent 2:   s_o + onehot(o) ++ Rep(C)   = (98 + |O|) + 49
class CascadeAgents {
public:
    CascadeAgents(std::size_t op_count, const AgentConfig& cfg, std::uint64_t seed);

    DqnAgent& group1() { return group1_; }
    DqnAgent& operation() { return operation_; }
    DqnAgent& group2() { return group2_; }
    const DqnAgent& group1() const { return group1_; }
    const DqnAgent& operation() const { return operation_; }
    const DqnAgent& group2() const { return group2_; }
    std::size_t op_count() const { return op_count_; }

private:
    std::size_t op_count_;
    DqnAgent group1_, operation_, group2_;
};

// Everything one sequential selection produced: the choice itself, the states
// the agents saw, and the candidate sets that were available (needed later as
// the bootstrap-max candidates of the preceding transition).
struct CascadeSelection {
    std::size_t group1 = 0;                 // index into the partition
    OpKind op{};
    std::optional<std::size_t> group2;      // none when no second group exists
    bool agent2_queried = false;
    bool restricted_to_unary = false;       // binary drawn with a single group; resampled

    std::vector<double> s1, a1;             // agent-1 state / chosen group rep
    std::vector<double> so, ao;             // operation agent state / one-hot
    std::vector<double> s2, a2;             // agent-2 state (always built) / rep if queried

    std::vector<std::vector<double>> group_reps;           // candidates of agent 1
    std::vector<std::vector<double>> op_candidates;        // one-hots available this step
    std::vector<std::vector<double>> group2_candidates;    // reps of partition \ {group1}
    std::vector<std::size_t> group2_candidate_indices;
};

// Picks the second group for unary operations (relevance argmax on the main
// path, uniform under the random-unary ablation). Receives the chosen C1
// index; returns none when the partition has no other group.
using UnaryGroupPicker = std::function<std::optional<std::size_t>(std::size_t group1_index)>;

// Sequential selection: agent 1 picks C1 from the partition, the operation
// agent picks o (restricted to unary ops, with a resample, when a binary op
// is drawn but no second group exists), and agent 2 picks C2 for binary ops.
// With eps = 0 and frozen parameters this is a pure function of its inputs.
CascadeSelection cascade_select(CascadeAgents& agents, const Dataset& f_prev,
                                const std::vector<DescriptorGroup>& partition,
                                const OperationSet& ops, double eps, Rng& rng,
                                const UnaryGroupPicker& unary_picker);

// Versioned checkpoint: agent parameters + operation-set ordering + config
// hash. Loading rejects files whose version, operation order, or config hash
// do not match.
void save_checkpoint(const std::string& path, const CascadeAgents& agents,
                     const OperationSet& ops, const std::string& config_hash);
void load_checkpoint(const std::string& path, CascadeAgents& agents, const OperationSet& ops,
                     const std::string& config_hash);

}  // namespace grfg
