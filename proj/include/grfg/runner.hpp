#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grfg/cascade.hpp"
#include "grfg/config.hpp"
#include "grfg/eval.hpp"
#include "grfg/generation.hpp"

namespace grfg {

struct IterationRecord {
    int iteration = 0;
    bool skipped = false;
    std::string skip_reason;

    double epsilon = 0.0;
    std::size_t n_groups = 0;
    std::vector<std::string> group1, group2;  // member column names
    std::string op;                           // token
    bool agent2_queried = false;
    bool restricted_to_unary = false;
    std::string unary_applied_to;  // "group1" | "group2" | "random" | ""

    std::size_t merged_size = 0;
    std::size_t size_after_select = 0;
    std::vector<std::string> pool;  // column names carried into the next iteration
    double utility = 0.0;           // U of the merged set
    double va = 0.0;                // V_A of the merged set
    double r1 = 0.0, r_op = 0.0, r2 = 0.0;
    std::optional<double> loss1, loss_op, loss2;
};

struct ImportanceEntry {
    std::string name;
    double importance = 0.0;
    bool original = false;
};

struct RunReport {
    RunConfig config;
    std::string config_hash;

    std::size_t n_samples = 0;
    std::size_t n_original = 0;
    std::string target_name;
    std::string split_hash;

    Metrics org_metrics;
    double org_va = 0.0;

    std::vector<IterationRecord> iterations;

    int best_iteration = 0;  // 0: the original space
    Metrics best_metrics;
    double best_va = 0.0;
    std::size_t best_size = 0;
    std::optional<Metrics> holdout_metrics;
    std::optional<Metrics> cv_metrics;

    std::vector<std::string> best_names;  // canonical expressions (provenance)
    std::vector<bool> best_original;

    std::vector<ImportanceEntry> importance;
    double importance_top10_generated_fraction = 0.0;

    bool aborted = false;
    std::string abort_reason;
};

struct RunOutput {
    RunReport report;
    Dataset best_set;
    std::vector<std::string> trace_lines;
};

// Runs the configured mode end to end. Iteration-level module errors skip the
// iteration; three consecutive skips abort the run (report.aborted).
RunOutput run(const Dataset& raw, const RunConfig& cfg);

// Impurity-decrease importances of a descriptor set (random-forest based),
// normalized, descending.
std::vector<ImportanceEntry> report_importance(const Dataset& d, const EvalProtocol& protocol,
                                               const ForestConfig& forest);

// Re-scores a descriptor set under the protocol/seeds a config implies; used
// to confirm an exported best set reproduces its reported V_A.
ScoreResult rescore(const Dataset& d, const RunConfig& cfg);

nlohmann::ordered_json report_to_json(const RunReport& r);

// Writes report.json, best_features.csv, and trace.log into out_dir
// (created if missing).
void write_outputs(const RunOutput& out, const std::string& out_dir);

// ASCII lineage tree for the trace subcommand.
std::string render_lineage_tree(const Expression& e);

}  // namespace grfg
