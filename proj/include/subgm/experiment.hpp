#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subgm/config.hpp"
#include "subgm/init.hpp"
#include "subgm/signrip.hpp"

namespace subgm {

/// Fully resolved problem instance: ground truth, optional ensemble, initial
/// point, and the run configuration with derived step-size defaults filled in.
struct Instance {
    GroundTruth gt;
    std::optional<MeasurementEnsemble> ensemble;
    Factor u0;
    RunConfig run;
    bool init_degenerate = false;
};

Instance build_instance(const ExperimentConfig& cfg);

struct RunOutcome {
    Trajectory traj;
    bool diverged = false;
    long diverged_at = 0;
    double wall_seconds = 0.0;
    bool init_degenerate = false;
    double final_loss = 0.0;
    double final_err_op = 0.0;
    double final_err_fro = 0.0;
    double final_rel_err_fro = 0.0;
    std::optional<long> iters_to_rel_1e2; // first recorded t at 1e-2 relative error
};

// executes a resolved instance; never touches the filesystem
RunOutcome execute_run(const Instance& inst, const GroundTruth& gt);

// convenience: build + execute
RunOutcome execute_config(const ExperimentConfig& cfg, GroundTruth* gt_out = nullptr);

/// `run` command: execute one config, write the trajectory CSV (plus optional
/// plot and resumable state) into the output directory.
struct RunArtifacts {
    RunOutcome outcome;
    std::string out_dir;
    std::string csv_path;
};

RunArtifacts cmd_run(const ExperimentConfig& cfg, const std::string& out_dir_override = "");

struct SweepRow {
    nlohmann::json value;
    int replica = 0;
    std::uint64_t gt_seed = 0;
    std::uint64_t ens_seed = 0;
    bool ok = false;
    std::string error;
    std::string termination;
    long iterations = 0;
    RunOutcome outcome;
    std::string csv_path;
};

struct SweepArtifacts {
    std::vector<SweepRow> rows;
    std::string out_dir;
    std::string aggregate_path;
};

// in-memory sweep (acceptance checks use this); rows ordered by (value, replica)
std::vector<SweepRow> run_sweep(const SweepSpec& sweep);

// `sweep` command: one trajectory CSV per row plus an aggregate CSV
SweepArtifacts cmd_sweep(const SweepSpec& sweep, const std::string& out_dir_override = "");

/// One row of the isometry-verifier grid.
struct VerifierRow {
    std::string kind; // signrip | l2_rip | l2_q
    int d = 0;
    int m = 0;
    int k = 0;
    double epsilon = 0.0;
    double zeta = 0.0;
    double big_r = 0.0;
    NoiseModel noise{};
    double sigma = 0.0; // l2_q outlier std
    int num_probes = 0;
    std::uint64_t seed = 0;
    double value = 0.0;
};

struct VerifierJobs {
    std::vector<VerifierRow> rows; // values unfilled until run
    std::string out_dir;
};

VerifierJobs load_verifier_jobs(const std::string& path);
void run_verifier_rows(std::vector<VerifierRow>& rows);
std::string write_verifier_csv(const std::string& dir, const std::vector<VerifierRow>& rows);

// output.dir resolution: explicit override, then the config value, then the
// SUBGM_OUT_DIR environment variable, then ./out
std::string resolve_out_dir(const std::string& configured, const std::string& override_dir);

std::string termination_name(Termination t);

} // namespace subgm
