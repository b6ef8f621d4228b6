#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "grfg/clustering.hpp"
#include "grfg/eval.hpp"
#include "grfg/generation.hpp"
#include "grfg/info_metrics.hpp"
#include "grfg/qlearn.hpp"

namespace grfg {

enum class RunMode { Grfg, Rdg, Erg, Org };

std::string mode_name(RunMode m);
RunMode mode_from_name(const std::string& s);  // throws InputError

struct RunConfig {
    std::uint64_t seed = 0;
    int max_iterations = 100;
    RunMode mode = RunMode::Grfg;

    std::string unary_ops = "square,sqrt,log,exp,sin,cos,recip,tanh";
    std::string binary_ops = "add,sub,mul,div";

    MIEstimatorConfig mi;
    ClusteringConfig clustering;  // distance mode driven by the ablation flag
    GenerationConfig generation;

    AgentConfig agent;
    double gamma = 0.9;
    ExplorationSchedule exploration;
    std::string agent1_reward = "prose";  // prose: U(C1|y); formula: U(F_{t-1}|y)

    EvalConfig eval;
    bool holdout = false;
    int early_stop_patience = 0;  // 0: disabled

    // ablation switches, valid only in grfg mode
    bool no_cluster = false;
    bool euclidean_distance = false;
    bool random_unary_group = false;
    bool random_binary_align = false;

    std::string checkpoint_out;  // optional agent checkpoint path

    OperationSet operation_set() const;
    void validate() const;  // throws InputError on inconsistent settings

    // Canonical flat key=value form; also the config-hash input and the
    // embedded copy in reports.
    std::string to_key_values() const;
    std::string hash() const;
    nlohmann::ordered_json to_json() const;
};

// Applies `key = value` lines from a flat config file (# comments allowed).
// Unknown keys are rejected with InputError.
RunConfig load_config_file(const std::string& path, RunConfig base = {});
// Applies a single key/value pair (shared by file parsing and report
// round-trips). Throws InputError on unknown keys or unparseable values.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace grfg
