#include "grfg/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace grfg {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt_score(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<std::string> member_names(const Dataset& d, const DescriptorGroup& g) {
    std::vector<std::string> out;
    out.reserve(g.members.size());
    for (std::size_t i : g.members) out.push_back(d.column(i).name);
    return out;
}

std::size_t size_cap(std::size_t n_original, double tolerance) {
    return static_cast<std::size_t>(std::ceil(tolerance * static_cast<double>(n_original)));
}

void require_grammar_safe(const Dataset& raw) {
    for (const auto& c : raw.columns()) {
        if (!is_grammar_safe_name(c.name)) {
            throw InputError("column name '" + c.name +
                             "' cannot be used in expressions; rename it (no parentheses, commas, "
                             "quotes, or whitespace)");
        }
    }
}

struct PendingTransitions {
    std::vector<double> s1, a1;
    double r1 = 0.0;
    std::vector<double> so, ao;
    double r_op = 0.0;
    bool has_g2 = false;
    std::vector<double> s2, a2;
    double r2 = 0.0;
};

std::string trace_line(int iter, const GeneratedDescriptor& g, OpKind op,
                       const std::string& status) {
    std::string parents;
    const Expression& e = g.desc.expr;
    if (e.kind() == Expression::Kind::Binary) {
        parents = e.left().str() + "|" + e.right().str();
    } else {
        parents = e.child().str();
    }
    std::ostringstream line;
    line << "iter=" << iter << " expr=" << g.desc.name << " op=" << op_token(op)
         << " parents=" << parents << " score=" << fmt_score(g.rank_score) << " " << status;
    return line.str();
}

struct BestTracker {
    int iteration = 0;
    double va = 0.0;
    Metrics metrics;
    Dataset set;

    BestTracker(double org_va, const Metrics& org_metrics, Dataset org_set)
        : va(org_va), metrics(org_metrics), set(std::move(org_set)) {}

    bool consider(int iter, const ScoreResult& score, const Dataset& candidate) {
        if (score.va > va) {
            iteration = iter;
            va = score.va;
            metrics = score.metrics;
            set = candidate;
            return true;
        }
        return false;
    }
};

void finish_report(RunOutput& out, const RunConfig& cfg, const EvalConfig& ec,
                   const EvalProtocol& protocol, const BestTracker& best) {
    RunReport& r = out.report;
    r.best_iteration = best.iteration;
    r.best_va = best.va;
    r.best_metrics = best.metrics;
    r.best_size = best.set.n_descriptors();
    out.best_set = best.set;

    for (const auto& c : best.set.columns()) {
        r.best_names.push_back(c.name);
        r.best_original.push_back(c.is_original());
    }

    r.importance = report_importance(best.set, protocol, ec.forest);
    std::size_t top = std::min<std::size_t>(10, r.importance.size());
    std::size_t generated = 0;
    for (std::size_t i = 0; i < top; ++i) {
        if (!r.importance[i].original) ++generated;
    }
    r.importance_top10_generated_fraction =
        top == 0 ? 0.0 : static_cast<double>(generated) / static_cast<double>(top);

    if (cfg.holdout && !protocol.holdout_rows.empty()) {
        r.holdout_metrics = score_rows(best.set, protocol, ec, protocol.holdout_rows).metrics;
    }
    if (ec.cv_folds >= 2) {
        r.cv_metrics = score_space_cv(best.set, derive_seed(cfg.seed, "cv"), ec, ec.cv_folds).metrics;
    }
}

// The GRFG loop; also serves rdg (epsilon pinned to 1, no TD training).
RunOutput run_loop(const Dataset& raw, const RunConfig& cfg) {
    require_grammar_safe(raw);
    const OperationSet ops = cfg.operation_set();
    const bool train_agents = cfg.mode == RunMode::Grfg;

    EvalConfig ec = cfg.eval;
    ec.forest.seed = derive_seed(cfg.seed, "forest");
    EvalProtocol protocol = EvalProtocol::make(raw.n_samples(), derive_seed(cfg.seed, "split"),
                                               cfg.holdout);

    Rng explore_rng = make_rng(cfg.seed, "explore");
    Rng replay_rng = make_rng(cfg.seed, "replay");
    Rng ablation_rng = make_rng(cfg.seed, "ablation");

    MIMemo memo(cfg.mi);
    ClusteringConfig ccfg = cfg.clustering;
    ccfg.distance = cfg.euclidean_distance ? GroupDistanceMode::EuclideanRep
                                           : GroupDistanceMode::InfoTheoretic;

    ScoreResult org = score_space(raw, protocol, ec);

    RunOutput out{RunReport{}, raw, {}};
    RunReport& report = out.report;
    report.config = cfg;
    report.config_hash = cfg.hash();
    report.n_samples = raw.n_samples();
    report.n_original = raw.n_descriptors();
    report.target_name = raw.target_name();
    report.split_hash = hex64(protocol.split_hash);
    report.org_metrics = org.metrics;
    report.org_va = org.va;

    BestTracker best(org.va, org.metrics, raw);
    const std::size_t cap = size_cap(raw.n_descriptors(), cfg.generation.size_tolerance);

    CascadeAgents agents(ops.size(), cfg.agent, derive_seed(cfg.seed, "agents"));
    std::optional<PendingTransitions> pending;

    Dataset current = raw;
    double prev_utility = set_utility(current, memo);
    int consecutive_skips = 0;
    int since_improvement = 0;

    for (int t = 1; t <= cfg.max_iterations; ++t) {
        IterationRecord rec;
        rec.iteration = t;
        try {
            std::vector<DescriptorGroup> partition =
                cfg.no_cluster ? singleton_groups(current.n_descriptors())
                               : m_cluster(current, ccfg, memo).groups;
            rec.n_groups = partition.size();

            const double eps = cfg.mode == RunMode::Rdg
                                   ? 1.0
                                   : cfg.exploration.at(static_cast<std::size_t>(t - 1),
                                                        static_cast<std::size_t>(cfg.max_iterations));
            rec.epsilon = eps;

            UnaryGroupPicker rel_picker = [&](std::size_t c1) -> std::optional<std::size_t> {
                std::optional<std::size_t> pick;
                double best_rel = 0.0;
                for (std::size_t i = 0; i < partition.size(); ++i) {
                    if (i == c1) continue;
                    double rel = group_relevance(current, partition[i], memo);
                    if (!pick || rel > best_rel) {
                        pick = i;
                        best_rel = rel;
                    }
                }
                return pick;
            };

            CascadeSelection sel =
                cascade_select(agents, current, partition, ops, eps, explore_rng, rel_picker);

            // The states of this selection complete the previous iteration's
            // transitions.
            if (pending) {
                agents.group1().remember({pending->s1, pending->a1, pending->r1, sel.s1,
                                          sel.group_reps});
                agents.operation().remember({pending->so, pending->ao, pending->r_op, sel.so,
                                             sel.op_candidates});
                if (pending->has_g2) {
                    agents.group2().remember({pending->s2, pending->a2, pending->r2, sel.s2,
                                              sel.group2_candidates});
                }
                pending.reset();
            }

            rec.group1 = member_names(current, partition[sel.group1]);
            rec.op = op_token(sel.op);
            rec.agent2_queried = sel.agent2_queried;
            rec.restricted_to_unary = sel.restricted_to_unary;

            std::vector<GeneratedDescriptor> generated;
            if (is_binary(sel.op)) {
                const DescriptorGroup& c1 = partition[sel.group1];
                const DescriptorGroup& c2 = partition[*sel.group2];
                rec.group2 = member_names(current, c2);
                generated = cfg.random_binary_align
                                ? cross_groups_random_align(current, c1, c2, sel.op, ablation_rng)
                                : cross_groups_binary(current, c1, c2, sel.op, cfg.generation);
            } else if (cfg.random_unary_group) {
                std::uniform_int_distribution<std::size_t> pick(0, partition.size() - 1);
                std::size_t g = pick(ablation_rng);
                rec.unary_applied_to = "random";
                rec.group2 = member_names(current, partition[g]);
                generated = apply_unary_to_group(current, partition[g], sel.op);
            } else {
                std::optional<DescriptorGroup> c2;
                if (sel.group2) {
                    c2 = partition[*sel.group2];
                    rec.group2 = member_names(current, *c2);
                }
                UnaryGeneration gen =
                    apply_unary(current, partition[sel.group1], c2, sel.op, memo);
                rec.unary_applied_to = gen.applied_to_c1 ? "group1" : "group2";
                generated = std::move(gen.descriptors);
            }

            std::vector<DropRecord> drops;
            Dataset merged = dedup_and_merge(current, generated, cfg.generation, &drops);
            for (const auto& g : generated) {
                std::string status = "kept";
                for (const auto& d : drops) {
                    if (d.name == g.desc.name) {
                        status = "dropped=" + d.reason;
                        break;
                    }
                }
                out.trace_lines.push_back(trace_line(t, g, sel.op, status));
            }
            rec.merged_size = merged.n_descriptors();

            ScoreResult score = score_space(merged, protocol, ec);
            double merged_utility = set_utility(merged, memo);
            rec.utility = merged_utility;
            rec.va = score.va;

            rec.r1 = cfg.agent1_reward == "prose"
                         ? set_utility(current, partition[sel.group1].members, memo)
                         : prev_utility;
            rec.r_op = merged_utility - prev_utility;
            rec.r2 = rec.r_op + score.va;

            // one TD step per agent, after the environment reward is known
            if (train_agents) {
                rec.loss1 = agents.group1().train_step(cfg.gamma, replay_rng);
                rec.loss_op = agents.operation().train_step(cfg.gamma, replay_rng);
                rec.loss2 = agents.group2().train_step(cfg.gamma, replay_rng);
            }

            PendingTransitions next;
            next.s1 = sel.s1;
            next.a1 = sel.a1;
            next.r1 = rec.r1;
            next.so = sel.so;
            next.ao = sel.ao;
            next.r_op = rec.r_op;
            next.has_g2 = sel.agent2_queried;
            if (sel.agent2_queried) {
                next.s2 = sel.s2;
                next.a2 = sel.a2;
                next.r2 = rec.r2;
            }
            pending = std::move(next);

            if (best.consider(t, score, merged)) since_improvement = 0;
            else ++since_improvement;

            Dataset kept = merged.n_descriptors() > cap ? kbest_select(merged, cap, memo) : merged;
            rec.size_after_select = kept.n_descriptors();
            for (const auto& c : kept.columns()) rec.pool.push_back(c.name);
            prev_utility = kept.n_descriptors() == merged.n_descriptors()
                               ? merged_utility
                               : set_utility(kept, memo);
            current = std::move(kept);
            consecutive_skips = 0;
        } catch (const std::exception& e) {
            rec.skipped = true;
            rec.skip_reason = e.what();
            if (++consecutive_skips >= 3) {
                report.iterations.push_back(std::move(rec));
                report.aborted = true;
                report.abort_reason = "three consecutive iterations failed; last error: " +
                                      std::string(e.what());
                break;
            }
        }
        report.iterations.push_back(std::move(rec));
        if (cfg.early_stop_patience > 0 && since_improvement >= cfg.early_stop_patience) break;
    }

    finish_report(out, cfg, ec, protocol, best);
    if (train_agents && !cfg.checkpoint_out.empty()) {
        save_checkpoint(cfg.checkpoint_out, agents, ops, cfg.hash());
    }
    return out;
}

RunOutput run_org(const Dataset& raw, const RunConfig& cfg) {
    EvalConfig ec = cfg.eval;
    ec.forest.seed = derive_seed(cfg.seed, "forest");
    EvalProtocol protocol = EvalProtocol::make(raw.n_samples(), derive_seed(cfg.seed, "split"),
                                               cfg.holdout);
    ScoreResult org = score_space(raw, protocol, ec);

    RunOutput out{RunReport{}, raw, {}};
    RunReport& report = out.report;
    report.config = cfg;
    report.config_hash = cfg.hash();
    report.n_samples = raw.n_samples();
    report.n_original = raw.n_descriptors();
    report.target_name = raw.target_name();
    report.split_hash = hex64(protocol.split_hash);
    report.org_metrics = org.metrics;
    report.org_va = org.va;

    BestTracker best(org.va, org.metrics, raw);
    finish_report(out, cfg, ec, protocol, best);
    return out;
}

// Expansion-reduction baseline: every unary op on every descriptor, every
// binary op on the top-correlated pairs, one K-best pass down to the size
// cap, then a single scoring.
RunOutput run_erg(const Dataset& raw, const RunConfig& cfg) {
    require_grammar_safe(raw);
    const OperationSet ops = cfg.operation_set();

    EvalConfig ec = cfg.eval;
    ec.forest.seed = derive_seed(cfg.seed, "forest");
    EvalProtocol protocol = EvalProtocol::make(raw.n_samples(), derive_seed(cfg.seed, "split"),
                                               cfg.holdout);
    MIMemo memo(cfg.mi);

    ScoreResult org = score_space(raw, protocol, ec);

    RunOutput out{RunReport{}, raw, {}};
    RunReport& report = out.report;
    report.config = cfg;
    report.config_hash = cfg.hash();
    report.n_samples = raw.n_samples();
    report.n_original = raw.n_descriptors();
    report.target_name = raw.target_name();
    report.split_hash = hex64(protocol.split_hash);
    report.org_metrics = org.metrics;
    report.org_va = org.va;

    const std::size_t m = raw.n_descriptors();
    std::vector<GeneratedDescriptor> generated;
    DescriptorGroup all;
    for (std::size_t i = 0; i < m; ++i) all.members.push_back(i);
    for (std::size_t oi : ops.unary_indices()) {
        auto batch = apply_unary_to_group(raw, all, ops.at(oi));
        for (auto& g : batch) generated.push_back(std::move(g));
    }

    if (ops.has_binary() && m >= 2) {
        struct Pair {
            double sim;
            std::size_t i, j;
        };
        std::vector<Pair> pairs;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                pairs.push_back({abs_cosine(raw.column(i).values, raw.column(j).values,
                                            cfg.generation.center_cosine),
                                 i, j});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.sim != b.sim) return a.sim > b.sim;  // most correlated first
            return std::tie(a.i, a.j) < std::tie(b.i, b.j);
        });
        const std::size_t keep = std::min(pairs.size(), m);
        for (std::size_t p = 0; p < keep; ++p) {
            for (std::size_t oi : ops.binary_indices()) {
                generated.push_back(cross_pair(raw, pairs[p].i, pairs[p].j, ops.at(oi),
                                               pairs[p].sim));
            }
        }
    }

    std::vector<DropRecord> drops;
    Dataset merged = dedup_and_merge(raw, generated, cfg.generation, &drops);
    for (const auto& g : generated) {
        std::string status = "kept";
        for (const auto& d : drops) {
            if (d.name == g.desc.name) {
                status = "dropped=" + d.reason;
                break;
            }
        }
        OpKind op = g.desc.expr.op();
        out.trace_lines.push_back(trace_line(1, g, op, status));
    }

    const std::size_t cap = size_cap(m, cfg.generation.size_tolerance);
    Dataset kept = merged.n_descriptors() > cap ? kbest_select(merged, cap, memo) : merged;
    ScoreResult score = score_space(kept, protocol, ec);

    IterationRecord rec;
    rec.iteration = 1;
    rec.op = "expand";
    rec.merged_size = merged.n_descriptors();
    rec.size_after_select = kept.n_descriptors();
    rec.utility = set_utility(kept, memo);
    rec.va = score.va;
    report.iterations.push_back(std::move(rec));

    BestTracker best(org.va, org.metrics, raw);
    best.consider(1, score, kept);
    finish_report(out, cfg, ec, protocol, best);
    return out;
}

}  // namespace

RunOutput run(const Dataset& raw, const RunConfig& cfg) {
    cfg.validate();
    switch (cfg.mode) {
        case RunMode::Grfg:
        case RunMode::Rdg: return run_loop(raw, cfg);
        case RunMode::Erg: return run_erg(raw, cfg);
        case RunMode::Org: return run_org(raw, cfg);
    }
    throw std::logic_error("unreachable");
}

std::vector<ImportanceEntry> report_importance(const Dataset& d, const EvalProtocol& protocol,
                                               const ForestConfig& forest) {
    RandomForest rf;
    ColumnView cols = column_view(d);
    rf.fit(cols, d.target(), protocol.train_rows, forest);
    std::vector<double> imp = rf.importances();

    std::vector<std::size_t> order(imp.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (imp[a] != imp[b]) return imp[a] > imp[b];
        return a < b;
    });

    std::vector<ImportanceEntry> out;
    out.reserve(order.size());
    for (std::size_t i : order) {
        out.push_back({d.column(i).name, imp[i], d.column(i).is_original()});
    }
    return out;
}

ScoreResult rescore(const Dataset& d, const RunConfig& cfg) {
    EvalConfig ec = cfg.eval;
    ec.forest.seed = derive_seed(cfg.seed, "forest");
    EvalProtocol protocol = EvalProtocol::make(d.n_samples(), derive_seed(cfg.seed, "split"),
                                               cfg.holdout);
    return score_space(d, protocol, ec);
}

namespace {

using json = nlohmann::ordered_json;

json metrics_to_json(const Metrics& m) {
    json j;
    j["one_minus_rae"] = m.one_minus_rae;
    j["one_minus_mae"] = m.one_minus_mae;
    j["one_minus_mse"] = m.one_minus_mse;
    return j;
}

}  // namespace

nlohmann::ordered_json report_to_json(const RunReport& r) {
    json j;
    j["format"] = "grfg-report";
    j["version"] = 1;
    j["config"] = r.config.to_json();
    j["config_hash"] = r.config_hash;

    json ds;
    ds["n_samples"] = r.n_samples;
    ds["n_original"] = r.n_original;
    ds["target"] = r.target_name;
    ds["split_hash"] = r.split_hash;
    j["dataset"] = ds;

    j["org"] = metrics_to_json(r.org_metrics);
    j["org"]["va"] = r.org_va;

    json iters = json::array();
    for (const auto& it : r.iterations) {
        json ji;
        ji["iteration"] = it.iteration;
        ji["skipped"] = it.skipped;
        if (it.skipped) {
            ji["skip_reason"] = it.skip_reason;
            iters.push_back(std::move(ji));
            continue;
        }
        ji["epsilon"] = it.epsilon;
        ji["n_groups"] = it.n_groups;
        ji["group1"] = it.group1;
        ji["op"] = it.op;
        if (!it.group2.empty()) ji["group2"] = it.group2;
        else ji["group2"] = nullptr;
        ji["agent2_queried"] = it.agent2_queried;
        ji["restricted_to_unary"] = it.restricted_to_unary;
        if (!it.unary_applied_to.empty()) ji["unary_applied_to"] = it.unary_applied_to;
        ji["merged_size"] = it.merged_size;
        ji["size_after_select"] = it.size_after_select;
        ji["pool"] = it.pool;
        ji["utility"] = it.utility;
        ji["va"] = it.va;
        ji["r1"] = it.r1;
        ji["r_op"] = it.r_op;
        ji["r2"] = it.r2;
        ji["loss1"] = it.loss1 ? json(*it.loss1) : json(nullptr);
        ji["loss_op"] = it.loss_op ? json(*it.loss_op) : json(nullptr);
        ji["loss2"] = it.loss2 ? json(*it.loss2) : json(nullptr);
        iters.push_back(std::move(ji));
    }
    j["iterations"] = std::move(iters);

    json best = metrics_to_json(r.best_metrics);
    best["va"] = r.best_va;
    best["iteration"] = r.best_iteration;
    best["size"] = r.best_size;
    j["best"] = std::move(best);
    j["holdout"] = r.holdout_metrics ? metrics_to_json(*r.holdout_metrics) : json(nullptr);
    j["cv"] = r.cv_metrics ? metrics_to_json(*r.cv_metrics) : json(nullptr);

    json feats = json::array();
    for (std::size_t i = 0; i < r.best_names.size(); ++i) {
        json f;
        f["name"] = r.best_names[i];
        f["origin"] = r.best_original[i] ? "original" : "generated";
        feats.push_back(std::move(f));
    }
    j["best_features"] = std::move(feats);

    json imp = json::array();
    for (const auto& e : r.importance) {
        json f;
        f["name"] = e.name;
        f["importance"] = e.importance;
        f["origin"] = e.original ? "original" : "generated";
        imp.push_back(std::move(f));
    }
    j["importance"] = std::move(imp);
    j["importance_top10_generated_fraction"] = r.importance_top10_generated_fraction;

    j["aborted"] = r.aborted;
    if (r.aborted) j["abort_reason"] = r.abort_reason;
    return j;
}

void write_outputs(const RunOutput& out, const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory: " + out_dir);

    {
        std::ofstream f(dir / "report.json");
        if (!f) throw InputError("cannot write report.json in " + out_dir);
        f << report_to_json(out.report).dump(2) << '\n';
    }
    export_dataset(out.best_set, (dir / "best_features.csv").string());
    {
        std::ofstream f(dir / "trace.log");
        if (!f) throw InputError("cannot write trace.log in " + out_dir);
        for (const auto& line : out.trace_lines) f << line << '\n';
    }
}

namespace {

void lineage_rec(const Expression& e, const std::string& prefix, bool last, bool root,
                 std::string& out) {
    std::string label;
    switch (e.kind()) {
        case Expression::Kind::Raw: label = e.column_name() + "  [raw]"; break;
        case Expression::Kind::Unary:
        case Expression::Kind::Binary:
            label = e.str() + "  [" + std::string(op_token(e.op())) + "]";
            break;
    }
    if (root) {
        out += label + "\n";
    } else {
        out += prefix + (last ? "`-- " : "|-- ") + label + "\n";
    }
    std::string child_prefix = root ? "" : prefix + (last ? "    " : "|   ");
    switch (e.kind()) {
        case Expression::Kind::Raw: break;
        case Expression::Kind::Unary: lineage_rec(e.child(), child_prefix, true, false, out); break;
        case Expression::Kind::Binary:
            lineage_rec(e.left(), child_prefix, false, false, out);
            lineage_rec(e.right(), child_prefix, true, false, out);
            break;
    }
}

}  // namespace

std::string render_lineage_tree(const Expression& e) {
    std::string out;
    lineage_rec(e, "", true, true, out);
    return out;
}

}  // namespace grfg
