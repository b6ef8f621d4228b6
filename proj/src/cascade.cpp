#include "grfg/cascade.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "grfg/dataset.hpp"

namespace grfg {

namespace {
constexpr int kStateWidth = static_cast<int>(kRepWidth);
}

CascadeAgents::CascadeAgents(std::size_t op_count, const AgentConfig& cfg, std::uint64_t seed)
    : op_count_(op_count),
      group1_(kStateWidth, kStateWidth, cfg, splitmix64(seed ^ 0x67726f7570310aULL)),
      operation_(2 * kStateWidth, static_cast<int>(op_count), cfg,
                 splitmix64(seed ^ 0x6f7065726174ULL)),
      group2_(2 * kStateWidth + static_cast<int>(op_count), kStateWidth, cfg,
              splitmix64(seed ^ 0x67726f7570320aULL)) {
    if (op_count == 0) throw std::invalid_argument("CascadeAgents: empty operation set");
}

CascadeSelection cascade_select(CascadeAgents& agents, const Dataset& f_prev,
                                const std::vector<DescriptorGroup>& partition,
                                const OperationSet& ops, double eps, Rng& rng,
                                const UnaryGroupPicker& unary_picker) {
    if (partition.empty()) throw std::invalid_argument("cascade_select: empty partition");
    if (ops.empty()) throw std::invalid_argument("cascade_select: empty operation set");

    CascadeSelection sel;
    sel.s1 = rep_descriptor_set(f_prev);
    sel.group_reps.reserve(partition.size());
    for (const auto& g : partition) sel.group_reps.push_back(rep_group(f_prev, g));

    sel.group1 = agents.group1().select(sel.s1, sel.group_reps, eps, rng);
    sel.a1 = sel.group_reps[sel.group1];

    sel.so = concat_states(std::array{sel.s1, sel.a1});

    const bool second_group_exists = partition.size() > 1;
    std::vector<std::vector<double>> all_ops;
    all_ops.reserve(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) all_ops.push_back(rep_operation(ops.at(i), ops));

    std::size_t op_idx = agents.operation().select(sel.so, all_ops, eps, rng);
    if (is_binary(ops.at(op_idx)) && !second_group_exists) {
        // A binary op cannot run with a single group: resample among unary ops.
        auto unary = ops.unary_indices();
        if (unary.empty()) {
            throw std::runtime_error(
                "cascade_select: binary operation drawn with a single descriptor group and no "
                "unary operations available");
        }
        sel.restricted_to_unary = true;
        std::vector<std::vector<double>> unary_reps;
        unary_reps.reserve(unary.size());
        for (std::size_t i : unary) unary_reps.push_back(all_ops[i]);
        std::size_t pick = agents.operation().select(sel.so, unary_reps, eps, rng);
        op_idx = unary[pick];
    }
    sel.op = ops.at(op_idx);
    sel.ao = all_ops[op_idx];
    // Candidates actually available in this state, used as the bootstrap-max
    // set when this selection becomes some transition's next step.
    if (second_group_exists) {
        sel.op_candidates = all_ops;
    } else {
        for (std::size_t i : ops.unary_indices()) sel.op_candidates.push_back(all_ops[i]);
    }

    sel.s2 = concat_states(std::array{sel.so, sel.ao});
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (i == sel.group1) continue;
        sel.group2_candidates.push_back(sel.group_reps[i]);
        sel.group2_candidate_indices.push_back(i);
    }

    if (is_binary(sel.op)) {
        std::size_t pick = agents.group2().select(sel.s2, sel.group2_candidates, eps, rng);
        sel.group2 = sel.group2_candidate_indices[pick];
        sel.a2 = sel.group2_candidates[pick];
        sel.agent2_queried = true;
    } else {
        sel.group2 = unary_picker ? unary_picker(sel.group1) : std::nullopt;
    }
    return sel;
}

namespace {

using json = nlohmann::ordered_json;

json net_to_json(const Mlp& net) {
    json j;
    j["layers"] = net.layer_sizes();
    j["params"] = net.params();
    return j;
}

void net_from_json(const json& j, Mlp& net) {
    auto layers = j.at("layers").get<std::vector<int>>();
    if (layers != net.layer_sizes()) {
        throw InputError("checkpoint: network shape mismatch");
    }
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != net.n_params()) {
        throw InputError("checkpoint: parameter count mismatch");
    }
    net.params() = std::move(params);
}

}  // namespace

void save_checkpoint(const std::string& path, const CascadeAgents& agents,
                     const OperationSet& ops, const std::string& config_hash) {
    json j;
    j["format"] = "grfg-agents";
    j["version"] = 1;
    j["operations"] = ops.to_string();
    j["config_hash"] = config_hash;
    j["group1"] = net_to_json(agents.group1().net());
    j["operation"] = net_to_json(agents.operation().net());
    j["group2"] = net_to_json(agents.group2().net());
    std::ofstream out(path);
    if (!out) throw InputError("cannot write checkpoint: " + path);
    out << j.dump(2) << '\n';
}

void load_checkpoint(const std::string& path, CascadeAgents& agents, const OperationSet& ops,
                     const std::string& config_hash) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("checkpoint parse error: " + std::string(e.what()));
    }
    if (j.value("format", "") != "grfg-agents" || j.value("version", 0) != 1) {
        throw InputError("checkpoint: unknown format or version");
    }
    if (j.value("operations", "") != ops.to_string()) {
        throw InputError("checkpoint: operation-set ordering mismatch");
    }
    if (j.value("config_hash", "") != config_hash) {
        throw InputError("checkpoint: config hash mismatch");
    }
    net_from_json(j.at("group1"), agents.group1().net());
    net_from_json(j.at("operation"), agents.operation().net());
    net_from_json(j.at("group2"), agents.group2().net());
}

}  // namespace grfg
