// Command-line front end: `run` executes a transformation search and writes
// report.json / best_features.csv / trace.log; `trace` prints the lineage of
// one feature from a report; `report` renders the metric table.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "grfg/runner.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitAborted = 2;

json load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw grfg::InputError("cannot open report: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw grfg::InputError("report parse error: " + std::string(e.what()));
    }
    if (j.value("format", "") != "grfg-report") {
        throw grfg::InputError("not a grfg report: " + path);
    }
    return j;
}

void print_metric_row(const std::string& label, const json& m) {
    std::printf("  %-10s %12.6f %12.6f %12.6f\n", label.c_str(),
                m.at("one_minus_rae").get<double>(), m.at("one_minus_mae").get<double>(),
                m.at("one_minus_mse").get<double>());
}

int cmd_run(const std::string& data, const std::string& target, const std::string& out_dir,
            const std::optional<std::string>& config_path,
            const std::optional<std::string>& mode, const std::optional<std::uint64_t>& seed,
            const std::optional<int>& iters, const std::optional<double>& tolerance) {
    grfg::RunConfig cfg;
    if (config_path) cfg = grfg::load_config_file(*config_path, cfg);
    if (mode) cfg.mode = grfg::mode_from_name(*mode);
    if (seed) cfg.seed = *seed;
    if (iters) cfg.max_iterations = *iters;
    if (tolerance) cfg.generation.size_tolerance = *tolerance;
    cfg.validate();

    grfg::Dataset raw = grfg::load_csv(data, target);
    grfg::RunOutput out = grfg::run(raw, cfg);
    grfg::write_outputs(out, out_dir);

    const auto& r = out.report;
    std::printf("mode=%s seed=%llu iterations=%zu\n", grfg::mode_name(cfg.mode).c_str(),
                static_cast<unsigned long long>(cfg.seed), r.iterations.size());
    std::printf("org  V_A = %.6f\n", r.org_va);
    std::printf("best V_A = %.6f (iteration %d, %zu descriptors)\n", r.best_va, r.best_iteration,
                r.best_size);
    std::printf("outputs written to %s\n", out_dir.c_str());
    if (r.aborted) {
        std::fprintf(stderr, "run aborted: %s\n", r.abort_reason.c_str());
        return kExitAborted;
    }
    return kExitOk;
}

int cmd_trace(const std::string& report_path, const std::string& feature) {
    json j = load_report(report_path);
    bool found = false;
    for (const auto& f : j.at("best_features")) {
        if (f.at("name").get<std::string>() == feature) {
            found = true;
            break;
        }
    }
    if (!found) {
        std::fprintf(stderr, "feature '%s' is not in the report's best set; available:\n",
                     feature.c_str());
        for (const auto& f : j.at("best_features")) {
            std::fprintf(stderr, "  %s\n", f.at("name").get<std::string>().c_str());
        }
        return kExitInputError;
    }
    grfg::Expression e = grfg::Expression::parse(feature);
    std::fputs(grfg::render_lineage_tree(e).c_str(), stdout);
    return kExitOk;
}

int cmd_report(const std::string& report_path) {
    json j = load_report(report_path);
    std::printf("mode=%s  seed=%s  target=%s\n",
                j.at("config").at("mode").get<std::string>().c_str(),
                j.at("config").at("seed").get<std::string>().c_str(),
                j.at("dataset").at("target").get<std::string>().c_str());
    std::printf("dataset: %llu samples, %llu original descriptors (split %s)\n",
                j.at("dataset").at("n_samples").get<unsigned long long>(),
                j.at("dataset").at("n_original").get<unsigned long long>(),
                j.at("dataset").at("split_hash").get<std::string>().c_str());
    std::printf("\n  %-10s %12s %12s %12s\n", "space", "1-RAE", "1-MAE", "1-MSE");
    print_metric_row("org", j.at("org"));
    print_metric_row("best", j.at("best"));
    if (!j.at("holdout").is_null()) print_metric_row("holdout", j.at("holdout"));
    if (!j.at("cv").is_null()) print_metric_row("cv", j.at("cv"));
    std::printf("\nbest iteration %d, %llu descriptors\n", j.at("best").at("iteration").get<int>(),
                j.at("best").at("size").get<unsigned long long>());

    const auto& imp = j.at("importance");
    std::size_t top = std::min<std::size_t>(10, imp.size());
    std::printf("\ntop %zu descriptors by importance:\n", top);
    for (std::size_t i = 0; i < top; ++i) {
        std::printf("  %8.4f  %-9s  %s\n", imp[i].at("importance").get<double>(),
                    imp[i].at("origin").get<std::string>().c_str(),
                    imp[i].at("name").get<std::string>().c_str());
    }
    std::printf("generated fraction of top 10: %.2f\n",
                j.at("importance_top10_generated_fraction").get<double>());
    if (j.value("aborted", false)) {
        std::printf("\nNOTE: run aborted early: %s\n",
                    j.value("abort_reason", std::string{}).c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"group-wise reinforcement feature transformation"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a transformation search");
    std::string data, target, out_dir = "out";
    std::optional<std::string> config_path, mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> iters;
    std::optional<double> tolerance;
    run->add_option("--data", data, "input CSV")->required();
    run->add_option("--target", target, "target column name")->required();
    run->add_option("--mode", mode, "grfg|rdg|erg|org");
    run->add_option("--seed", seed, "random seed");
    run->add_option("--iters", iters, "iteration budget");
    run->add_option("--tolerance", tolerance, "descriptor-space size tolerance multiplier");
    run->add_option("--config", config_path, "flat key=value config file");
    run->add_option("--out", out_dir, "output directory");

    auto* trace = app.add_subcommand("trace", "print the lineage of one feature");
    std::string report_path, feature;
    trace->add_option("--report", report_path, "report.json path")->required();
    trace->add_option("--feature", feature, "feature expression string")->required();

    auto* report = app.add_subcommand("report", "render the metric table of a report");
    std::string report_path2;
    report->add_option("--report", report_path2, "report.json path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(data, target, out_dir, config_path, mode, seed, iters, tolerance);
        }
        if (trace->parsed()) return cmd_trace(report_path, feature);
        if (report->parsed()) return cmd_report(report_path2);
    } catch (const grfg::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
    return kExitOk;
}
