#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "grfg/dataset.hpp"

namespace grfg {

struct MIEstimatorConfig {
    int n_bins = 16;            // equal-frequency (quantile) bins per variable
    double epsilon = 1e-10;     // denominator guard in the group distance
    bool exclude_diagonal = false;  // drop i=j terms from the utility's redundancy sum
};

// Equal-frequency discretization. Edges are the k/n_bins quantiles (linear
// interpolation between order statistics); bin(v) = number of edges <= v.
// Identical values always land in the same bin; a constant vector collapses
// to a single bin.
std::vector<int> quantile_bins(const std::vector<double>& x, int n_bins);

// Plug-in mutual information (nats) of the joint histogram after binning x
// and z independently. Symmetric, >= 0; MI(x,x) equals the entropy of the
// binned marginal. Throws std::invalid_argument on length mismatch or
// length < 2.
double mutual_information(const std::vector<double>& x, const std::vector<double>& z,
                          const MIEstimatorConfig& cfg);

// Pairwise-MI memo over named columns of one run. Descriptor values are
// immutable per name, so entries stay valid across iterations. Insert-or-read
// is guarded by a mutex so parallel scans can share one memo.
class MIMemo {
public:
    explicit MIMemo(const MIEstimatorConfig& cfg) : cfg_(cfg) {}

    const MIEstimatorConfig& cfg() const { return cfg_; }

    // MI between two descriptors (by name+values) with memoization.
    double pair_mi(const std::string& name_a, const std::vector<double>& a,
                   const std::string& name_b, const std::vector<double>& b);
    // MI between a descriptor and the target vector.
    double target_mi(const std::string& name, const std::vector<double>& values,
                     const std::vector<double>& target);

private:
    const std::vector<int>& bins_for(const std::string& name, const std::vector<double>& values);

    MIEstimatorConfig cfg_;
    std::mutex mu_;
    std::unordered_map<std::string, std::vector<int>> bins_;
    std::map<std::pair<std::string, std::string>, double> mi_;
};

// Group of descriptor column indices (sorted ascending).
struct DescriptorGroup {
    std::vector<std::size_t> members;
};

// Eq.-style group-group distance: mean over cross pairs of
// |MI(fi,y) - MI(fj,y)| / (MI(fi,fj) + eps). Symmetric; 0 when every cross
// pair has equal relevance to the target.
double group_distance(const Dataset& d, const DescriptorGroup& a, const DescriptorGroup& b,
                      MIMemo& memo);

// Descriptor-set utility: relevance minus redundancy,
// -(1/|F|^2) sum_{i,j} MI(fi,fj) + (1/|F|) sum_i MI(fi,y).
// The double sum includes i=j unless cfg.exclude_diagonal.
double set_utility(const Dataset& d, MIMemo& memo);
double set_utility(const Dataset& d, const std::vector<std::size_t>& subset, MIMemo& memo);

// Mean MI between the group's descriptors and the target.
double group_relevance(const Dataset& d, const DescriptorGroup& g, MIMemo& memo);

// Convenience one-shot variants (fresh memo) used by tests and small callers.
double group_distance(const Dataset& d, const DescriptorGroup& a, const DescriptorGroup& b,
                      const MIEstimatorConfig& cfg);
double set_utility(const Dataset& d, const MIEstimatorConfig& cfg);
double group_relevance(const Dataset& d, const DescriptorGroup& g, const MIEstimatorConfig& cfg);

}  // namespace grfg
