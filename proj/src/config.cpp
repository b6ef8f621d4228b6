#include "grfg/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace grfg {

std::string mode_name(RunMode m) {
    switch (m) {
        case RunMode::Grfg: return "grfg";
        case RunMode::Rdg: return "rdg";
        case RunMode::Erg: return "erg";
        case RunMode::Org: return "org";
    }
    return "grfg";
}

RunMode mode_from_name(const std::string& s) {
    if (s == "grfg") return RunMode::Grfg;
    if (s == "rdg") return RunMode::Rdg;
    if (s == "erg") return RunMode::Erg;
    if (s == "org") return RunMode::Org;
    throw InputError("unknown mode '" + s + "' (expected grfg|rdg|erg|org)");
}

OperationSet RunConfig::operation_set() const {
    return OperationSet::parse(unary_ops, binary_ops);
}

void RunConfig::validate() const {
    if (max_iterations < 0) throw InputError("max_iterations must be >= 0");
    if (mi.n_bins < 2) throw InputError("n_bins must be >= 2");
    if (mi.epsilon <= 0.0) throw InputError("mi_epsilon must be positive");
    if (clustering.stop_threshold < 0.0) throw InputError("stop_threshold must be >= 0");
    if (clustering.min_groups < 2) throw InputError("min_groups must be >= 2");
    if (generation.top_k < 1) throw InputError("top_k must be >= 1");
    if (generation.size_tolerance < 1.0) throw InputError("size_tolerance must be >= 1");
    if (generation.dedup_tolerance < 0.0) throw InputError("dedup_tolerance must be >= 0");
    if (gamma < 0.0 || gamma > 1.0) throw InputError("gamma must be in [0,1]");
    if (agent.learning_rate <= 0.0) throw InputError("learning_rate must be positive");
    if (agent.replay_capacity < 1) throw InputError("replay_capacity must be >= 1");
    if (agent.batch_size < 1) throw InputError("batch_size must be >= 1");
    if (exploration.eps_start < 0.0 || exploration.eps_start > 1.0 ||
        exploration.eps_end < 0.0 || exploration.eps_end > 1.0) {
        throw InputError("epsilon bounds must be in [0,1]");
    }
    if (exploration.decay_fraction <= 0.0 || exploration.decay_fraction > 1.0) {
        throw InputError("epsilon_decay_fraction must be in (0,1]");
    }
    if (agent1_reward != "prose" && agent1_reward != "formula") {
        throw InputError("agent1_reward must be 'prose' or 'formula'");
    }
    if (eval.forest.n_trees < 1) throw InputError("n_trees must be >= 1");
    if (eval.forest.max_depth < 0) throw InputError("max_depth must be >= 0");
    if (eval.forest.min_samples_leaf < 1) throw InputError("min_samples_leaf must be >= 1");
    if (eval.ridge_lambda < 0.0) throw InputError("ridge_lambda must be >= 0");
    if (eval.cv_folds != 0 && eval.cv_folds < 2) throw InputError("cv_folds must be 0 or >= 2");
    if (early_stop_patience < 0) throw InputError("early_stop_patience must be >= 0");
    const bool any_ablation = no_cluster || euclidean_distance || random_unary_group ||
                              random_binary_align;
    if (any_ablation && mode != RunMode::Grfg) {
        throw InputError("ablation flags are only valid in grfg mode");
    }
    operation_set();  // throws on bad tokens
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string model_name(ModelKind m) {
    switch (m) {
        case ModelKind::Forest: return "rf";
        case ModelKind::Ridge: return "ridge";
        case ModelKind::Tree: return "tree";
    }
    return "rf";
}

ModelKind model_from_name(const std::string& s) {
    if (s == "rf") return ModelKind::Forest;
    if (s == "ridge") return ModelKind::Ridge;
    if (s == "tree") return ModelKind::Tree;
    throw InputError("unknown model '" + s + "' (expected rf|ridge|tree)");
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InputError("expected boolean, got '" + v + "'");
}

double parse_double(const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw InputError("");
        return x;
    } catch (...) {
        throw InputError("expected number, got '" + v + "'");
    }
}

long long parse_int(const std::string& v) {
    try {
        std::size_t pos = 0;
        long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw InputError("");
        return x;
    } catch (...) {
        throw InputError("expected integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw InputError("");
        return x;
    } catch (...) {
        throw InputError("expected unsigned integer, got '" + v + "'");
    }
}

}  // namespace

std::string RunConfig::to_key_values() const {
    std::ostringstream out;
    out << "seed = " << seed << '\n';
    out << "max_iterations = " << max_iterations << '\n';
    out << "mode = " << mode_name(mode) << '\n';
    out << "unary_ops = " << unary_ops << '\n';
    out << "binary_ops = " << binary_ops << '\n';
    out << "n_bins = " << mi.n_bins << '\n';
    out << "mi_epsilon = " << fmt_double(mi.epsilon) << '\n';
    out << "exclude_diagonal = " << (mi.exclude_diagonal ? "true" : "false") << '\n';
    out << "stop_threshold = " << fmt_double(clustering.stop_threshold) << '\n';
    out << "min_groups = " << clustering.min_groups << '\n';
    out << "top_k = " << generation.top_k << '\n';
    out << "size_tolerance = " << fmt_double(generation.size_tolerance) << '\n';
    out << "dedup_tolerance = " << fmt_double(generation.dedup_tolerance) << '\n';
    out << "center_cosine = " << (generation.center_cosine ? "true" : "false") << '\n';
    out << "gamma = " << fmt_double(gamma) << '\n';
    out << "learning_rate = " << fmt_double(agent.learning_rate) << '\n';
    out << "replay_capacity = " << agent.replay_capacity << '\n';
    out << "batch_size = " << agent.batch_size << '\n';
    out << "target_network = " << (agent.target_network ? "true" : "false") << '\n';
    out << "target_sync_every = " << agent.target_sync_every << '\n';
    out << "epsilon_start = " << fmt_double(exploration.eps_start) << '\n';
    out << "epsilon_end = " << fmt_double(exploration.eps_end) << '\n';
    out << "epsilon_decay_fraction = " << fmt_double(exploration.decay_fraction) << '\n';
    out << "agent1_reward = " << agent1_reward << '\n';
    out << "model = " << model_name(eval.model) << '\n';
    out << "n_trees = " << eval.forest.n_trees << '\n';
    out << "max_depth = " << eval.forest.max_depth << '\n';
    out << "min_samples_leaf = " << eval.forest.min_samples_leaf << '\n';
    out << "ridge_lambda = " << fmt_double(eval.ridge_lambda) << '\n';
    out << "tree_depth = " << eval.tree_depth << '\n';
    out << "metrics = " << (eval.paper_literal_metrics ? "paper_literal" : "mean") << '\n';
    out << "cv_folds = " << eval.cv_folds << '\n';
    out << "holdout = " << (holdout ? "true" : "false") << '\n';
    out << "early_stop_patience = " << early_stop_patience << '\n';
    out << "no_cluster = " << (no_cluster ? "true" : "false") << '\n';
    out << "euclidean_distance = " << (euclidean_distance ? "true" : "false") << '\n';
    out << "random_unary_group = " << (random_unary_group ? "true" : "false") << '\n';
    out << "random_binary_align = " << (random_binary_align ? "true" : "false") << '\n';
    out << "checkpoint_out = " << checkpoint_out << '\n';
    return out.str();
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_key_values()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "seed") cfg.seed = parse_u64(value);
    else if (key == "max_iterations") cfg.max_iterations = static_cast<int>(parse_int(value));
    else if (key == "mode") cfg.mode = mode_from_name(value);
    else if (key == "unary_ops") cfg.unary_ops = value;
    else if (key == "binary_ops") cfg.binary_ops = value;
    else if (key == "n_bins") cfg.mi.n_bins = static_cast<int>(parse_int(value));
    else if (key == "mi_epsilon") cfg.mi.epsilon = parse_double(value);
    else if (key == "exclude_diagonal") cfg.mi.exclude_diagonal = parse_bool(value);
    else if (key == "stop_threshold") cfg.clustering.stop_threshold = parse_double(value);
    else if (key == "min_groups") cfg.clustering.min_groups = static_cast<int>(parse_int(value));
    else if (key == "top_k") cfg.generation.top_k = static_cast<int>(parse_int(value));
    else if (key == "size_tolerance") cfg.generation.size_tolerance = parse_double(value);
    else if (key == "dedup_tolerance") cfg.generation.dedup_tolerance = parse_double(value);
    else if (key == "center_cosine") cfg.generation.center_cosine = parse_bool(value);
    else if (key == "gamma") cfg.gamma = parse_double(value);
    else if (key == "learning_rate") cfg.agent.learning_rate = parse_double(value);
    else if (key == "replay_capacity") cfg.agent.replay_capacity = static_cast<std::size_t>(parse_int(value));
    else if (key == "batch_size") cfg.agent.batch_size = static_cast<std::size_t>(parse_int(value));
    else if (key == "target_network") cfg.agent.target_network = parse_bool(value);
    else if (key == "target_sync_every") cfg.agent.target_sync_every = static_cast<int>(parse_int(value));
    else if (key == "epsilon_start") cfg.exploration.eps_start = parse_double(value);
    else if (key == "epsilon_end") cfg.exploration.eps_end = parse_double(value);
    else if (key == "epsilon_decay_fraction") cfg.exploration.decay_fraction = parse_double(value);
    else if (key == "agent1_reward") cfg.agent1_reward = value;
    else if (key == "model") cfg.eval.model = model_from_name(value);
    else if (key == "n_trees") cfg.eval.forest.n_trees = static_cast<int>(parse_int(value));
    else if (key == "max_depth") cfg.eval.forest.max_depth = static_cast<int>(parse_int(value));
    else if (key == "min_samples_leaf") cfg.eval.forest.min_samples_leaf = static_cast<int>(parse_int(value));
    else if (key == "ridge_lambda") cfg.eval.ridge_lambda = parse_double(value);
    else if (key == "tree_depth") cfg.eval.tree_depth = static_cast<int>(parse_int(value));
    else if (key == "metrics") {
        if (value == "paper_literal") cfg.eval.paper_literal_metrics = true;
        else if (value == "mean") cfg.eval.paper_literal_metrics = false;
        else throw InputError("metrics must be 'mean' or 'paper_literal'");
    } else if (key == "cv_folds") cfg.eval.cv_folds = static_cast<int>(parse_int(value));
    else if (key == "holdout") cfg.holdout = parse_bool(value);
    else if (key == "early_stop_patience") cfg.early_stop_patience = static_cast<int>(parse_int(value));
    else if (key == "no_cluster") cfg.no_cluster = parse_bool(value);
    else if (key == "euclidean_distance") cfg.euclidean_distance = parse_bool(value);
    else if (key == "random_unary_group") cfg.random_unary_group = parse_bool(value);
    else if (key == "random_binary_align") cfg.random_binary_align = parse_bool(value);
    else if (key == "checkpoint_out") cfg.checkpoint_out = value;
    else throw InputError("unknown config key '" + key + "'");
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw InputError("config line " + std::to_string(line_no) + ": empty key");
        }
        try {
            apply_config_key(base, key, value);
        } catch (const InputError& e) {
            throw InputError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    std::istringstream in(to_key_values());
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find(" = ");
        j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    for (auto it = j.begin(); it != j.end(); ++it) {
        apply_config_key(cfg, it.key(), it.value().get<std::string>());
    }
    cfg.validate();
    return cfg;
}

}  // namespace grfg
