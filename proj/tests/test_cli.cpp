#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "subgm/experiment.hpp"
#include "subgm/plot.hpp"

using namespace subgm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_config(const std::string& dir) {
    ExperimentConfig cfg;
    cfg.ground_truth = {2, 1, 1.0, 3};
    cfg.ensemble = EnsembleSpec{8, NoiseModel::none(), 5, false};
    cfg.init = {InitSpec::Mode::Spectral, 0.5, 1, 0.0, ""};
    cfg.run.algorithm = Algorithm::SubgmL1;
    cfg.run.max_iters = 1;
    cfg.run.policy = StepSizePolicy::Kind::AdaptiveLoss;
    cfg.run.eta = 0.1;
    cfg.output.dir = dir;
    return cfg;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_test_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path.parent_path()); }
};

} // namespace

TEST_CASE("minimal run writes a CSV with the exact schema") {
    TempDir tmp("minimal");
    const RunArtifacts art = cmd_run(tiny_config(tmp.path.string()));
    CHECK(art.outcome.traj.final_iter == 1);
    const CsvTable table = read_csv(art.csv_path);
    const std::vector<std::string> expect = {
        "t",      "loss",     "eta_t",  "err_op", "err_fro", "signal",
        "cross",  "residual", "f_term", "g_term", "lambda_min_signal", "eig_1"};
    CHECK(table.columns == expect);
    CHECK(table.rows.size() == 2); // t = 0 and the final iterate
    CHECK(table.rows.front()[0] == 0.0);
    CHECK(table.rows.back()[0] == 1.0);
}

TEST_CASE("save_state makes the run resumable from files") {
    TempDir tmp("state");
    ExperimentConfig cfg = tiny_config(tmp.path.string());
    cfg.output.save_state = true;
    const RunArtifacts art = cmd_run(cfg);
    const std::string factor_path = (tmp.path / "factor_final.txt").string();
    REQUIRE(fs::exists(factor_path));
    REQUIRE(fs::exists(tmp.path / "ground_truth.txt"));

    // continue from the stored factor
    ExperimentConfig resume = cfg;
    resume.init.mode = InitSpec::Mode::FromFile;
    resume.init.file = factor_path;
    resume.output.dir = (tmp.path / "resumed").string();
    const RunArtifacts art2 = cmd_run(resume);
    CHECK(art2.outcome.traj.records.front().err_fro ==
          doctest::Approx(art.outcome.traj.records.back().err_fro).epsilon(1e-12));
}

TEST_CASE("degenerate one-value one-replica sweep reproduces the single run") {
    TempDir tmp("degenerate_sweep");
    ExperimentConfig base = tiny_config((tmp.path / "single").string());
    base.run.max_iters = 5;
    const RunArtifacts single = cmd_run(base);

    SweepSpec sweep;
    sweep.base = base;
    sweep.base.output.dir = (tmp.path / "sweep").string();
    sweep.axis = "init.alpha";
    sweep.values = {json(base.init.alpha)};
    sweep.replicas = 1;
    const SweepArtifacts art = cmd_sweep(sweep);
    REQUIRE(art.rows.size() == 1);
    CHECK(art.rows[0].ok);
    CHECK(slurp(art.rows[0].csv_path) == slurp(single.csv_path));
}

TEST_CASE("sweep rows do not depend on scheduling") {
    TempDir tmp("sweep_sched");
    SweepSpec sweep;
    sweep.base = tiny_config((tmp.path / "a").string());
    sweep.base.run.max_iters = 10;
    sweep.axis = "init.alpha";
    sweep.values = {json(0.25), json(0.5), json(1.0)};
    sweep.replicas = 2;
    sweep.parallelism = 1;
    const SweepArtifacts serial = cmd_sweep(sweep);
    sweep.base.output.dir = (tmp.path / "b").string();
    sweep.parallelism = 4;
    const SweepArtifacts parallel = cmd_sweep(sweep);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].outcome.final_err_fro == parallel.rows[i].outcome.final_err_fro);
        CHECK(slurp(serial.rows[i].csv_path) == slurp(parallel.rows[i].csv_path));
    }
    // aggregates identical apart from the differing directory names
    CHECK(fs::exists(serial.aggregate_path));
}

TEST_CASE("diverged runs still leave a diagnostic CSV behind") {
    TempDir tmp("diverge");
    ExperimentConfig cfg = tiny_config(tmp.path.string());
    cfg.ground_truth = {6, 2, 2.0, 9};
    cfg.ensemble = EnsembleSpec{60, NoiseModel::none(), 4, false};
    cfg.init = {InitSpec::Mode::Spectral, 1.0, 6, 0.0, ""};
    cfg.run.algorithm = Algorithm::GdL2;
    cfg.run.policy = StepSizePolicy::Kind::Constant;
    cfg.run.eta = 50.0;
    cfg.run.max_iters = 500;
    const RunArtifacts art = cmd_run(cfg);
    CHECK(art.outcome.diverged);
    CHECK(art.outcome.diverged_at > 0);
    const CsvTable table = read_csv(art.csv_path);
    REQUIRE(!table.rows.empty());
    // last row names the diverged iteration and carries NaN metrics
    CHECK(table.rows.back()[0] == static_cast<double>(art.outcome.diverged_at));
    CHECK(std::isnan(table.rows.back()[3]));
}

TEST_CASE("verifier command handles an empty grid") {
    TempDir tmp("verify_empty");
    const std::string cfg_path = (tmp.path / "jobs.json").string();
    {
        std::ofstream os(cfg_path);
        os << R"({"output": {"dir": ")" << (tmp.path / "out").string() << R"("}, "jobs": []})";
    }
    VerifierJobs jobs = load_verifier_jobs(cfg_path);
    run_verifier_rows(jobs.rows);
    const std::string csv = write_verifier_csv(jobs.out_dir, jobs.rows);
    const std::string text = slurp(csv);
    CHECK(text.find("kind,d,m,k") == 0);
    CHECK(text.find('\n') == text.size() - 1); // header only
}

TEST_CASE("verifier command fills rows for a small grid") {
    TempDir tmp("verify_grid");
    const std::string cfg_path = (tmp.path / "jobs.json").string();
    {
        std::ofstream os(cfg_path);
        os << R"({
  "output": {"dir": ")" << (tmp.path / "out").string() << R"("},
  "jobs": [
    {"kind": "l2_q", "d": 4, "m": 200, "num_probes": 4, "seeds": [1, 2],
     "grid": [{"p": 0.0, "sigma": 0.0}, {"p": 0.1, "sigma": 10.0}]},
    {"kind": "l2_rip", "d": 4, "k": 2, "m": 300, "num_probes": 4, "seeds": [1]},
    {"kind": "signrip", "d": 4, "k": 2, "m": [200, 400], "zeta": 0.5, "R": 5.0,
     "num_probes": 4, "seeds": [1], "noise": {"type": "gaussian", "nu_g": 0.5}}
  ]})";
    }
    VerifierJobs jobs = load_verifier_jobs(cfg_path);
    CHECK(jobs.rows.size() == 4 + 1 + 2);
    run_verifier_rows(jobs.rows);
    for (const VerifierRow& row : jobs.rows) CHECK(row.value > 0.0);
    const CsvTable table = read_csv(write_verifier_csv(jobs.out_dir, jobs.rows));
    CHECK(table.rows.size() == jobs.rows.size());
}

TEST_CASE("plot renders one chart per metric") {
    TempDir tmp("plot");
    ExperimentConfig cfg = tiny_config((tmp.path / "run").string());
    cfg.run.max_iters = 30;
    const RunArtifacts art = cmd_run(cfg);
    const std::string svg_path = (tmp.path / "chart.svg").string();
    write_metric_plot(svg_path, {art.csv_path}, {"err_fro", "loss"});
    const std::string svg = slurp(svg_path);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("err_fro") != std::string::npos);
    CHECK(svg.find("loss") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK_THROWS(write_metric_plot(svg_path, {art.csv_path}, {"no_such_metric"}));
}

TEST_CASE("shipped presets parse and validate") {
    const fs::path presets = fs::path(SUBGM_SOURCE_DIR) / "presets";
    REQUIRE(fs::is_directory(presets));
    int seen = 0;
    for (const auto& entry : fs::directory_iterator(presets)) {
        if (entry.path().extension() != ".json") continue;
        ++seen;
        std::ifstream is(entry.path());
        json j;
        is >> j;
        if (j.contains("axis"))
            CHECK_NOTHROW(sweep_from_json(j));
        else if (j.contains("jobs"))
            CHECK_NOTHROW(load_verifier_jobs(entry.path().string()));
        else
            CHECK_NOTHROW(config_from_json(j));
    }
    CHECK(seen >= 8);
}

TEST_CASE("output directory resolution falls back to the environment") {
    CHECK(resolve_out_dir("configured", "override") == "override");
    CHECK(resolve_out_dir("configured", "") == "configured");
    setenv("SUBGM_OUT_DIR", "env_dir", 1);
    CHECK(resolve_out_dir("", "") == "env_dir");
    unsetenv("SUBGM_OUT_DIR");
    CHECK(resolve_out_dir("", "") == "out");
}

TEST_CASE("cli exit codes: success, parse failure, divergence") {
    TempDir tmp("exitcodes");
    const std::string cli = SUBGM_CLI_PATH;

    const std::string good = (tmp.path / "good.json").string();
    ExperimentConfig cfg = tiny_config((tmp.path / "good_out").string());
    save_config(good, cfg);
    CHECK(std::system((cli + " run " + good + " > /dev/null 2>&1").c_str()) == 0);

    const std::string bad = (tmp.path / "bad.json").string();
    {
        std::ofstream os(bad);
        os << "{ nope";
    }
    int rc = std::system((cli + " run " + bad + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);

    ExperimentConfig blowup = tiny_config((tmp.path / "div_out").string());
    blowup.ground_truth = {6, 2, 2.0, 9};
    blowup.ensemble = EnsembleSpec{60, NoiseModel::none(), 4, false};
    blowup.init = {InitSpec::Mode::Spectral, 1.0, 6, 0.0, ""};
    blowup.run.algorithm = Algorithm::GdL2;
    blowup.run.policy = StepSizePolicy::Kind::Constant;
    blowup.run.eta = 50.0;
    blowup.run.max_iters = 500;
    const std::string div = (tmp.path / "div.json").string();
    save_config(div, blowup);
    rc = std::system((cli + " run " + div + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 3);
    CHECK(fs::exists(tmp.path / "div_out" / "run.csv")); // diagnostic CSV still written
}

TEST_CASE("config files load and reject malformed input") {
    TempDir tmp("files");
    const std::string good = (tmp.path / "good.json").string();
    save_config(good, tiny_config("out"));
    CHECK_NOTHROW(load_config(good));
    const std::string bad = (tmp.path / "bad.json").string();
    {
        std::ofstream os(bad);
        os << "{ not json";
    }
    CHECK_THROWS(load_config(bad));
    CHECK_THROWS(load_config((tmp.path / "missing.json").string()));
}
