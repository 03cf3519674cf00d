#include "subgm/experiment.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subgm/csv.hpp"
#include "subgm/plot.hpp"

namespace subgm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string termination_name(Termination t) {
    switch (t) {
    case Termination::MaxIters: return "max_iters";
    case Termination::ErrorThreshold: return "error_threshold";
    case Termination::DegenerateStep: return "degenerate_step";
    }
    return "?";
}

namespace {

double default_eta(const RunSpec& run, const GroundTruth& gt, double alpha) {
    const double log_inv_alpha = std::max(1.0, std::log(1.0 / alpha));
    if (run.policy == StepSizePolicy::Kind::Geometric)
        return 0.05 / (gt.kappa() * log_inv_alpha);
    return 0.1 / gt.sigma1();
}

double default_rho(const GroundTruth& gt, double eta, double alpha) {
    const double log_inv_alpha = std::max(1.0, std::log(1.0 / alpha));
    return 1.0 - eta / (gt.kappa() * log_inv_alpha);
}

} // namespace

Instance build_instance(const ExperimentConfig& cfg) {
    cfg.validate();
    Instance inst;
    inst.gt = random_ground_truth(cfg.ground_truth.d, cfg.ground_truth.r, cfg.ground_truth.spectrum,
                                  cfg.ground_truth.seed);
    if (cfg.ensemble)
        inst.ensemble = MeasurementEnsemble::build(inst.gt, cfg.ensemble->m, cfg.ensemble->noise,
                                                   cfg.ensemble->seed, cfg.ensemble->lazy);

    const SignConvention sign{cfg.init.sign_at_zero};
    switch (cfg.init.mode) {
    case InitSpec::Mode::Spectral: {
        InitResult init = spectral_init(*inst.ensemble, cfg.init.r_prime, cfg.init.alpha, sign);
        inst.u0 = std::move(init.u0);
        inst.init_degenerate = init.degenerate;
        break;
    }
    case InitSpec::Mode::OracleSpectral: {
        InitResult init = oracle_spectral_init(inst.gt, cfg.init.r_prime, cfg.init.alpha);
        inst.u0 = std::move(init.u0);
        inst.init_degenerate = init.degenerate;
        break;
    }
    case InitSpec::Mode::FromFile:
        inst.u0 = load_factor(cfg.init.file);
        if (inst.u0.dim() != cfg.ground_truth.d)
            throw std::invalid_argument("init file dimension does not match the configured problem");
        break;
    }

    RunConfig run;
    run.max_iters = cfg.run.max_iters;
    run.algorithm = cfg.run.algorithm;
    run.sign = sign;
    run.stop_error = cfg.run.stop_error;
    run.record_every = cfg.output.record_stride;
    run.policy.kind = cfg.run.policy;
    run.policy.eta = cfg.run.eta ? *cfg.run.eta : default_eta(cfg.run, inst.gt, cfg.init.alpha);
    run.policy.rho = cfg.run.rho ? *cfg.run.rho : default_rho(inst.gt, run.policy.eta, cfg.init.alpha);
    inst.run = run;
    return inst;
}

RunOutcome execute_run(const Instance& inst, const GroundTruth& gt) {
    RunOutcome out;
    out.init_degenerate = inst.init_degenerate;
    const auto start = std::chrono::steady_clock::now();
    try {
        out.traj = run(gt, inst.ensemble ? &*inst.ensemble : nullptr, inst.u0, inst.run);
    } catch (DivergenceError& e) {
        out.traj = std::move(e.partial);
        out.diverged = true;
        out.diverged_at = e.iteration;
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const double xfro = gt.xstar_fro();
    for (const IterateRecord& rec : out.traj.records) {
        if (!out.iters_to_rel_1e2 && std::isfinite(rec.err_fro) && rec.err_fro <= 1e-2 * xfro)
            out.iters_to_rel_1e2 = rec.t;
    }
    if (!out.traj.records.empty()) {
        const IterateRecord& last = out.traj.records.back();
        out.final_loss = last.loss;
        out.final_err_op = last.err_op;
        out.final_err_fro = last.err_fro;
        out.final_rel_err_fro = last.err_fro / xfro;
    }
    return out;
}

RunOutcome execute_config(const ExperimentConfig& cfg, GroundTruth* gt_out) {
    Instance inst = build_instance(cfg);
    RunOutcome out = execute_run(inst, inst.gt);
    if (gt_out) *gt_out = std::move(inst.gt);
    return out;
}

std::string resolve_out_dir(const std::string& configured, const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv("SUBGM_OUT_DIR"); env && *env) return env;
    return "out";
}

RunArtifacts cmd_run(const ExperimentConfig& cfg, const std::string& out_dir_override) {
    RunArtifacts art;
    art.out_dir = resolve_out_dir(cfg.output.dir, out_dir_override);
    fs::create_directories(art.out_dir);

    Instance inst = build_instance(cfg);
    art.outcome = execute_run(inst, inst.gt);
    art.csv_path = (fs::path(art.out_dir) / "run.csv").string();
    write_trajectory_csv(art.csv_path, art.outcome.traj.records, inst.gt.r);

    if (cfg.output.save_state) {
        save_ground_truth((fs::path(art.out_dir) / "ground_truth.txt").string(), inst.gt);
        save_factor((fs::path(art.out_dir) / "factor_final.txt").string(), art.outcome.traj.final_u);
    }
    if (cfg.output.plot)
        write_metric_plot((fs::path(art.out_dir) / "run.svg").string(), {art.csv_path},
                          {"err_fro", "loss"});
    return art;
}

namespace {

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == '.' || c == '"' || c == '/' || c == ' ') c = '_';
    return s;
}

std::string value_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& sweep) {
    struct Job {
        ExperimentConfig cfg;
        json value;
        int replica;
    };
    std::vector<Job> jobs;
    for (const json& v : sweep.values) {
        const ExperimentConfig with_value = apply_axis(sweep.base, sweep.axis, v);
        for (int k = 0; k < sweep.replicas; ++k)
            jobs.push_back({apply_replica(with_value, k), v, k});
    }

    std::vector<SweepRow> rows(jobs.size());
    const int threads = sweep.parallelism > 0 ? sweep.parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        SweepRow& row = rows[i];
        row.value = jobs[i].value;
        row.replica = jobs[i].replica;
        row.gt_seed = jobs[i].cfg.ground_truth.seed;
        row.ens_seed = jobs[i].cfg.ensemble ? jobs[i].cfg.ensemble->seed : 0;
        try {
            row.outcome = execute_config(jobs[i].cfg);
            row.ok = !row.outcome.diverged;
            if (row.outcome.diverged) row.error = "diverged";
            row.termination = row.outcome.diverged ? "diverged"
                                                   : termination_name(row.outcome.traj.termination);
            row.iterations = row.outcome.traj.final_iter;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    }
    return rows;
}

SweepArtifacts cmd_sweep(const SweepSpec& sweep, const std::string& out_dir_override) {
    SweepArtifacts art;
    art.out_dir = resolve_out_dir(sweep.base.output.dir, out_dir_override);
    fs::create_directories(art.out_dir);

    struct Job {
        ExperimentConfig cfg;
        json value;
        int replica;
        std::string csv;
    };
    std::vector<Job> jobs;
    for (const json& v : sweep.values) {
        const ExperimentConfig with_value = apply_axis(sweep.base, sweep.axis, v);
        for (int k = 0; k < sweep.replicas; ++k) {
            Job job{apply_replica(with_value, k), v, k, ""};
            job.csv = (fs::path(art.out_dir) /
                       (sanitize(sweep.axis) + "=" + sanitize(value_text(v)) + "__rep" +
                        std::to_string(k) + ".csv"))
                          .string();
            jobs.push_back(std::move(job));
        }
    }

    art.rows.resize(jobs.size());
    const int threads = sweep.parallelism > 0 ? sweep.parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        SweepRow& row = art.rows[i];
        row.value = jobs[i].value;
        row.replica = jobs[i].replica;
        row.gt_seed = jobs[i].cfg.ground_truth.seed;
        row.ens_seed = jobs[i].cfg.ensemble ? jobs[i].cfg.ensemble->seed : 0;
        row.csv_path = jobs[i].csv;
        try {
            Instance inst = build_instance(jobs[i].cfg);
            row.outcome = execute_run(inst, inst.gt);
            write_trajectory_csv(row.csv_path, row.outcome.traj.records, inst.gt.r);
            row.ok = !row.outcome.diverged;
            if (row.outcome.diverged) row.error = "diverged";
            row.termination = row.outcome.diverged ? "diverged"
                                                   : termination_name(row.outcome.traj.termination);
            row.iterations = row.outcome.traj.final_iter;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    }

    art.aggregate_path = (fs::path(art.out_dir) / "aggregate.csv").string();
    std::ofstream os(art.aggregate_path);
    if (!os) throw std::runtime_error("cannot write " + art.aggregate_path);
    os << "axis,value,replica,gt_seed,ens_seed,status,termination,iterations,"
          "final_loss,final_err_op,final_err_fro,final_rel_err_fro,iters_to_rel_1e2,csv\n";
    for (const SweepRow& row : art.rows) {
        os << sweep.axis << ',' << value_text(row.value) << ',' << row.replica << ','
           << row.gt_seed << ',' << row.ens_seed << ',' << (row.ok ? "ok" : "failed") << ','
           << row.termination << ',' << row.iterations << ','
           << format_double(row.outcome.final_loss) << ','
           << format_double(row.outcome.final_err_op) << ','
           << format_double(row.outcome.final_err_fro) << ','
           << format_double(row.outcome.final_rel_err_fro) << ','
           << (row.outcome.iters_to_rel_1e2 ? std::to_string(*row.outcome.iters_to_rel_1e2) : "")
           << ',' << row.csv_path << '\n';
    }
    return art;
}

VerifierJobs load_verifier_jobs(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    json j;
    is >> j;

    VerifierJobs out;
    if (j.contains("output")) out.out_dir = j.at("output").value("dir", "");

    auto seeds_of = [](const json& job) {
        std::vector<std::uint64_t> seeds;
        if (job.contains("seeds"))
            for (const json& s : job.at("seeds")) seeds.push_back(s.get<std::uint64_t>());
        else
            seeds.push_back(job.value("seed", 0ULL));
        return seeds;
    };
    auto ms_of = [](const json& job) {
        std::vector<int> ms;
        if (job.at("m").is_array())
            for (const json& m : job.at("m")) ms.push_back(m.get<int>());
        else
            ms.push_back(job.at("m").get<int>());
        return ms;
    };

    for (const json& job : j.value("jobs", json::array())) {
        const std::string kind = job.at("kind").get<std::string>();
        const int d = job.at("d").get<int>();
        const int probes = job.value("num_probes", 40);
        if (kind == "signrip") {
            NoiseModel noise;
            if (job.contains("noise")) noise = noise_from_json(job.at("noise"));
            for (int m : ms_of(job))
                for (std::uint64_t seed : seeds_of(job)) {
                    VerifierRow row;
                    row.kind = "signrip";
                    row.d = d;
                    row.m = m;
                    row.k = job.at("k").get<int>();
                    row.epsilon = job.value("epsilon", 0.0);
                    row.zeta = job.value("zeta", 0.5);
                    row.big_r = job.value("R", 5.0);
                    row.noise = noise;
                    row.num_probes = probes;
                    row.seed = seed;
                    out.rows.push_back(row);
                }
        } else if (kind == "l2_rip") {
            for (int m : ms_of(job))
                for (std::uint64_t seed : seeds_of(job)) {
                    VerifierRow row;
                    row.kind = "l2_rip";
                    row.d = d;
                    row.m = m;
                    row.k = job.at("k").get<int>();
                    row.num_probes = probes;
                    row.seed = seed;
                    out.rows.push_back(row);
                }
        } else if (kind == "l2_q") {
            for (const json& cell : job.at("grid"))
                for (int m : ms_of(job))
                    for (std::uint64_t seed : seeds_of(job)) {
                        VerifierRow row;
                        row.kind = "l2_q";
                        row.d = d;
                        row.m = m;
                        row.noise.kind = NoiseModel::Kind::Outlier;
                        row.noise.p = cell.at("p").get<double>();
                        row.sigma = cell.at("sigma").get<double>();
                        row.num_probes = probes;
                        row.seed = seed;
                        out.rows.push_back(row);
                    }
        } else {
            throw std::invalid_argument("verifier config: unknown kind '" + kind + "'");
        }
    }
    return out;
}

void run_verifier_rows(std::vector<VerifierRow>& rows) {
    for (VerifierRow& row : rows) {
        if (row.kind == "signrip") {
            const MeasurementEnsemble ens =
                MeasurementEnsemble::build_unattached(row.d, row.m, row.noise, row.seed);
            const SignRipEstimate est =
                estimate_signrip(ens, ScalingSpec::from_noise(row.noise), row.k, row.zeta,
                                 row.big_r, row.num_probes, row.seed, row.epsilon);
            row.value = est.delta_hat;
        } else if (row.kind == "l2_rip") {
            const MeasurementEnsemble ens =
                MeasurementEnsemble::build_unattached(row.d, row.m, row.noise, row.seed);
            row.value = l2_rip_deviation(ens, row.k, row.num_probes, row.seed);
        } else if (row.kind == "l2_q") {
            row.value = l2_q_deviation(row.d, row.m, row.noise.p, row.sigma, row.num_probes,
                                       row.seed);
        }
    }
}

std::string write_verifier_csv(const std::string& dir, const std::vector<VerifierRow>& rows) {
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / "verifier.csv").string();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "kind,d,m,k,epsilon,zeta,R,noise,p,mag_kind,mag_value,nu_g,sigma,num_probes,seed,value\n";
    for (const VerifierRow& row : rows) {
        const char* noise_name = row.noise.kind == NoiseModel::Kind::None       ? "none"
                                 : row.noise.kind == NoiseModel::Kind::Outlier  ? "outlier"
                                 : row.noise.kind == NoiseModel::Kind::Gaussian ? "gaussian"
                                                                                : "mixed";
        os << row.kind << ',' << row.d << ',' << row.m << ',' << row.k << ','
           << format_double(row.epsilon) << ',' << format_double(row.zeta) << ','
           << format_double(row.big_r) << ',' << noise_name << ',' << format_double(row.noise.p)
           << ','
           << (row.noise.magnitude.kind == OutlierMagnitude::Kind::Gaussian ? "gaussian"
                                                                            : "point_mass")
           << ',' << format_double(row.noise.magnitude.value) << ','
           << format_double(row.noise.nu_g) << ',' << format_double(row.sigma) << ','
           << row.num_probes << ',' << row.seed << ',' << format_double(row.value) << '\n';
    }
    return path;
}

} // namespace subgm
