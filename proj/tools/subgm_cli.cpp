#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "subgm/experiment.hpp"
#include "subgm/plot.hpp"

namespace fs = std::filesystem;
using namespace subgm;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitDiverged = 3;

int do_run(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitParse;
    }
    RunArtifacts art = cmd_run(cfg, out_dir);
    const RunOutcome& out = art.outcome;
    if (out.init_degenerate)
        std::cerr << "warning: spectral start degenerated to U0 = 0; consider another seed\n";
    std::printf("csv=%s iters=%ld termination=%s final_loss=%.6g err_op=%.6g err_fro=%.6g "
                "rel_err_fro=%.6g wall_s=%.3f\n",
                art.csv_path.c_str(), out.traj.final_iter,
                out.diverged ? "diverged" : termination_name(out.traj.termination).c_str(),
                out.final_loss, out.final_err_op, out.final_err_fro, out.final_rel_err_fro,
                out.wall_seconds);
    if (out.diverged) {
        std::cerr << "run diverged at iteration " << out.diverged_at << '\n';
        return kExitDiverged;
    }
    return 0;
}

int do_sweep(const std::string& sweep_path, const std::string& out_dir) {
    SweepSpec sweep;
    try {
        sweep = load_sweep(sweep_path);
    } catch (const std::exception& e) {
        std::cerr << "sweep error: " << e.what() << '\n';
        return kExitParse;
    }
    SweepArtifacts art = cmd_sweep(sweep, out_dir);
    std::size_t failed = 0;
    for (const SweepRow& row : art.rows) {
        if (!row.ok) {
            ++failed;
            std::cerr << "row value=" << row.value.dump() << " rep=" << row.replica
                      << " failed: " << row.error << '\n';
        }
    }
    std::printf("aggregate=%s rows=%zu failed=%zu\n", art.aggregate_path.c_str(), art.rows.size(),
                failed);
    return failed == art.rows.size() && !art.rows.empty() ? 1 : 0;
}

int do_signrip(const std::string& config_path, const std::string& out_dir) {
    VerifierJobs jobs;
    try {
        jobs = load_verifier_jobs(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitParse;
    }
    run_verifier_rows(jobs.rows);
    const std::string path = write_verifier_csv(resolve_out_dir(jobs.out_dir, out_dir), jobs.rows);
    std::printf("csv=%s rows=%zu\n", path.c_str(), jobs.rows.size());
    return 0;
}

int do_plot(const std::vector<std::string>& csvs, const std::vector<std::string>& metrics,
            const std::string& out_file) {
    try {
        write_metric_plot(out_file, csvs, metrics);
    } catch (const std::exception& e) {
        std::cerr << "plot error: " << e.what() << '\n';
        return kExitParse;
    }
    std::printf("svg=%s\n", out_file.c_str());
    return 0;
}

int do_preset(const std::string& dir) {
    std::string resolved = dir;
    if (resolved.empty()) {
        if (const char* env = std::getenv("SUBGM_PRESET_DIR"); env && *env)
            resolved = env;
        else
            resolved = "presets";
    }
    if (!fs::is_directory(resolved)) {
        std::cerr << "no preset directory at " << resolved << '\n';
        return 1;
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(resolved))
        if (entry.path().extension() == ".json") names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const std::string& n : names) std::printf("%s/%s\n", resolved.c_str(), n.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust low-rank matrix recovery via the sub-gradient method"};
    app.require_subcommand(1);

    std::string config_path, out_dir, out_file = "plot.svg", preset_dir;
    std::vector<std::string> csvs, metrics;

    CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment config");
    run_cmd->add_option("config", config_path, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory override");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    sweep_cmd->add_option("sweep", config_path, "sweep spec (JSON)")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory override");

    CLI::App* signrip_cmd =
        app.add_subcommand("signrip", "estimate measurement isometry deviations");
    signrip_cmd->add_option("config", config_path, "verifier config (JSON)")->required();
    signrip_cmd->add_option("--out", out_dir, "output directory override");

    CLI::App* plot_cmd = app.add_subcommand("plot", "render trajectory CSVs as an SVG chart");
    plot_cmd->add_option("csv", csvs, "trajectory CSV files")->required()->expected(-1);
    plot_cmd->add_option("--metric", metrics, "metric columns to chart")->required();
    plot_cmd->add_option("--out", out_file, "output SVG path");

    CLI::App* preset_cmd = app.add_subcommand("preset", "list shipped experiment presets");
    preset_cmd->add_option("--dir", preset_dir, "preset directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(config_path, out_dir);
        if (sweep_cmd->parsed()) return do_sweep(config_path, out_dir);
        if (signrip_cmd->parsed()) return do_signrip(config_path, out_dir);
        if (plot_cmd->parsed()) return do_plot(csvs, metrics, out_file);
        if (preset_cmd->parsed()) return do_preset(preset_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
