#include "subgm/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace subgm {

using nlohmann::json;

namespace {

std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::SubgmL1: return "subgm_l1";
    case Algorithm::GdL2: return "gd_l2";
    case Algorithm::SubgmExpected: return "subgm_expected";
    }
    throw std::logic_error("algorithm_name");
}

Algorithm algorithm_from(const std::string& s) {
    if (s == "subgm_l1") return Algorithm::SubgmL1;
    if (s == "gd_l2") return Algorithm::GdL2;
    if (s == "subgm_expected") return Algorithm::SubgmExpected;
    throw std::invalid_argument("config: unknown algorithm '" + s + "'");
}

std::string policy_name(StepSizePolicy::Kind k) {
    switch (k) {
    case StepSizePolicy::Kind::AdaptiveLoss: return "adaptive_loss";
    case StepSizePolicy::Kind::Geometric: return "geometric";
    case StepSizePolicy::Kind::Constant: return "constant";
    case StepSizePolicy::Kind::ExpectedOracle: return "expected_oracle";
    }
    throw std::logic_error("policy_name");
}

StepSizePolicy::Kind policy_from(const std::string& s) {
    if (s == "adaptive_loss") return StepSizePolicy::Kind::AdaptiveLoss;
    if (s == "geometric") return StepSizePolicy::Kind::Geometric;
    if (s == "constant") return StepSizePolicy::Kind::Constant;
    if (s == "expected_oracle") return StepSizePolicy::Kind::ExpectedOracle;
    throw std::invalid_argument("config: unknown step-size policy '" + s + "'");
}

OutlierMagnitude magnitude_from(const json& j);

} // namespace

json noise_to_json(const NoiseModel& n) {
    json j;
    switch (n.kind) {
    case NoiseModel::Kind::None:
        j["type"] = "none";
        break;
    case NoiseModel::Kind::Outlier:
        j["type"] = "outlier";
        j["p"] = n.p;
        j["magnitude"] = {{"type", n.magnitude.kind == OutlierMagnitude::Kind::Gaussian
                                       ? "gaussian"
                                       : "point_mass"},
                          {"value", n.magnitude.value}};
        break;
    case NoiseModel::Kind::Gaussian:
        j["type"] = "gaussian";
        j["nu_g"] = n.nu_g;
        break;
    case NoiseModel::Kind::Mixed:
        j["type"] = "mixed";
        j["p"] = n.p;
        j["magnitude"] = {{"type", n.magnitude.kind == OutlierMagnitude::Kind::Gaussian
                                       ? "gaussian"
                                       : "point_mass"},
                          {"value", n.magnitude.value}};
        j["nu_g"] = n.nu_g;
        break;
    }
    return j;
}

namespace {

OutlierMagnitude magnitude_from(const json& j) {
    OutlierMagnitude mag;
    const std::string type = j.value("type", "gaussian");
    if (type == "gaussian")
        mag.kind = OutlierMagnitude::Kind::Gaussian;
    else if (type == "point_mass")
        mag.kind = OutlierMagnitude::Kind::PointMass;
    else
        throw std::invalid_argument("config: unknown outlier magnitude '" + type + "'");
    mag.value = j.value("value", 10.0);
    return mag;
}

} // namespace

NoiseModel noise_from_json(const json& j) {
    NoiseModel n;
    const std::string type = j.value("type", "none");
    if (type == "none") {
        n.kind = NoiseModel::Kind::None;
    } else if (type == "outlier") {
        n.kind = NoiseModel::Kind::Outlier;
        n.p = j.at("p").get<double>();
        if (j.contains("magnitude")) n.magnitude = magnitude_from(j.at("magnitude"));
    } else if (type == "gaussian") {
        n.kind = NoiseModel::Kind::Gaussian;
        n.nu_g = j.at("nu_g").get<double>();
    } else if (type == "mixed") {
        n.kind = NoiseModel::Kind::Mixed;
        n.p = j.at("p").get<double>();
        if (j.contains("magnitude")) n.magnitude = magnitude_from(j.at("magnitude"));
        n.nu_g = j.at("nu_g").get<double>();
    } else {
        throw std::invalid_argument("config: unknown noise type '" + type + "'");
    }
    n.validate();
    return n;
}

namespace {

std::string init_mode_name(InitSpec::Mode m) {
    switch (m) {
    case InitSpec::Mode::Spectral: return "spectral";
    case InitSpec::Mode::OracleSpectral: return "oracle_spectral";
    case InitSpec::Mode::FromFile: return "from_file";
    }
    throw std::logic_error("init_mode_name");
}

InitSpec::Mode init_mode_from(const std::string& s) {
    if (s == "spectral") return InitSpec::Mode::Spectral;
    if (s == "oracle_spectral") return InitSpec::Mode::OracleSpectral;
    if (s == "from_file") return InitSpec::Mode::FromFile;
    throw std::invalid_argument("config: unknown init mode '" + s + "'");
}

} // namespace

void ExperimentConfig::validate() const {
    if (ground_truth.d < 1 || ground_truth.r < 1 || ground_truth.r > ground_truth.d)
        throw std::invalid_argument("config: need 1 <= r <= d");
    if (const auto* vals = std::get_if<std::vector<double>>(&ground_truth.spectrum)) {
        if (static_cast<int>(vals->size()) != ground_truth.r)
            throw std::invalid_argument("config: spectrum length must equal r");
    }
    if (ensemble) {
        if (ensemble->m < 1) throw std::invalid_argument("config: m must be >= 1");
        ensemble->noise.validate();
    }
    if (!(init.alpha > 0.0)) throw std::invalid_argument("config: alpha must be positive");
    if (init.r_prime < 1 || init.r_prime > ground_truth.d)
        throw std::invalid_argument("config: need 1 <= r' <= d");
    if (std::fabs(init.sign_at_zero) > 1.0)
        throw std::invalid_argument("config: sign_at_zero must be in [-1, 1]");
    if (init.mode == InitSpec::Mode::FromFile && init.file.empty())
        throw std::invalid_argument("config: init.file required for from_file mode");
    if (init.mode == InitSpec::Mode::Spectral && !ensemble)
        throw std::invalid_argument("config: spectral init requires an ensemble");
    if (run.algorithm != Algorithm::SubgmExpected && !ensemble)
        throw std::invalid_argument("config: this algorithm requires an ensemble");
    if (run.max_iters < 1) throw std::invalid_argument("config: max_iters must be >= 1");
    if (output.record_stride < 1)
        throw std::invalid_argument("config: record stride must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    const json& g = j.at("ground_truth");
    cfg.ground_truth.d = g.at("d").get<int>();
    cfg.ground_truth.r = g.at("r").get<int>();
    cfg.ground_truth.seed = g.value("seed", 0ULL);
    const json& spec = g.at("spectrum");
    if (spec.is_object() && spec.contains("kappa"))
        cfg.ground_truth.spectrum = spec.at("kappa").get<double>();
    else if (spec.is_array())
        cfg.ground_truth.spectrum = spec.get<std::vector<double>>();
    else
        throw std::invalid_argument("config: spectrum must be {\"kappa\": x} or an array");

    if (j.contains("ensemble") && !j.at("ensemble").is_null()) {
        const json& e = j.at("ensemble");
        EnsembleSpec ens;
        ens.m = e.at("m").get<int>();
        ens.noise = noise_from_json(e.value("noise", json{{"type", "none"}}));
        ens.seed = e.value("seed", 0ULL);
        ens.lazy = e.value("lazy", false);
        cfg.ensemble = ens;
    }

    const json& i = j.at("init");
    cfg.init.mode = init_mode_from(i.value("mode", "spectral"));
    cfg.init.alpha = i.at("alpha").get<double>();
    cfg.init.r_prime = i.at("r_prime").get<int>();
    cfg.init.sign_at_zero = i.value("sign_at_zero", 0.0);
    cfg.init.file = i.value("file", "");

    const json& r = j.at("run");
    cfg.run.algorithm = algorithm_from(r.at("algorithm").get<std::string>());
    cfg.run.max_iters = r.at("max_iters").get<long>();
    cfg.run.policy = policy_from(r.at("policy").get<std::string>());
    if (r.contains("eta") && !r.at("eta").is_null()) cfg.run.eta = r.at("eta").get<double>();
    if (r.contains("rho") && !r.at("rho").is_null()) cfg.run.rho = r.at("rho").get<double>();
    if (r.contains("stop_error") && !r.at("stop_error").is_null())
        cfg.run.stop_error = r.at("stop_error").get<double>();

    if (j.contains("output")) {
        const json& o = j.at("output");
        cfg.output.dir = o.value("dir", "");
        cfg.output.record_stride = o.value("record_stride", 1L);
        cfg.output.plot = o.value("plot", false);
        cfg.output.save_state = o.value("save_state", false);
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json g;
    g["d"] = cfg.ground_truth.d;
    g["r"] = cfg.ground_truth.r;
    g["seed"] = cfg.ground_truth.seed;
    if (const auto* kappa = std::get_if<double>(&cfg.ground_truth.spectrum))
        g["spectrum"] = {{"kappa", *kappa}};
    else
        g["spectrum"] = std::get<std::vector<double>>(cfg.ground_truth.spectrum);

    json j;
    j["ground_truth"] = g;
    if (cfg.ensemble) {
        j["ensemble"] = {{"m", cfg.ensemble->m},
                         {"noise", noise_to_json(cfg.ensemble->noise)},
                         {"seed", cfg.ensemble->seed},
                         {"lazy", cfg.ensemble->lazy}};
    }
    j["init"] = {{"mode", init_mode_name(cfg.init.mode)},
                 {"alpha", cfg.init.alpha},
                 {"r_prime", cfg.init.r_prime},
                 {"sign_at_zero", cfg.init.sign_at_zero}};
    if (!cfg.init.file.empty()) j["init"]["file"] = cfg.init.file;

    json r;
    r["algorithm"] = algorithm_name(cfg.run.algorithm);
    r["max_iters"] = cfg.run.max_iters;
    r["policy"] = policy_name(cfg.run.policy);
    if (cfg.run.eta) r["eta"] = *cfg.run.eta;
    if (cfg.run.rho) r["rho"] = *cfg.run.rho;
    if (cfg.run.stop_error) r["stop_error"] = *cfg.run.stop_error;
    j["run"] = r;

    j["output"] = {{"dir", cfg.output.dir},
                   {"record_stride", cfg.output.record_stride},
                   {"plot", cfg.output.plot},
                   {"save_state", cfg.output.save_state}};
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    json j;
    is >> j;
    return config_from_json(j);
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write config file " + path);
    os << config_to_json(cfg).dump(2) << '\n';
}

SweepSpec sweep_from_json(const json& j) {
    SweepSpec sweep;
    sweep.base = config_from_json(j.at("base"));
    sweep.axis = j.at("axis").get<std::string>();
    for (const json& v : j.at("values")) sweep.values.push_back(v);
    sweep.replicas = j.value("replicas", 1);
    sweep.parallelism = j.value("parallelism", 0);
    if (sweep.values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
    if (sweep.replicas < 1) throw std::invalid_argument("sweep: replicas must be >= 1");
    // every axis value must produce a valid config
    for (const json& v : sweep.values) (void)apply_axis(sweep.base, sweep.axis, v);
    return sweep;
}

SweepSpec load_sweep(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open sweep file " + path);
    json j;
    is >> j;
    return sweep_from_json(j);
}

ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const json& value) {
    json j = config_to_json(base);
    std::string pointer = "/";
    for (char c : axis) pointer += (c == '.') ? '/' : c;
    const json::json_pointer ptr(pointer);
    if (!j.contains(ptr))
        throw std::invalid_argument("sweep: axis '" + axis + "' does not name a config field");
    j[ptr] = value;
    return config_from_json(j);
}

ExperimentConfig apply_replica(const ExperimentConfig& base, int replica) {
    ExperimentConfig cfg = base;
    cfg.ground_truth.seed += static_cast<std::uint64_t>(replica);
    if (cfg.ensemble) cfg.ensemble->seed += static_cast<std::uint64_t>(replica);
    return cfg;
}

} // namespace subgm
