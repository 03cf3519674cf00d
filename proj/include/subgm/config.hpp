#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "subgm/measure.hpp"
#include "subgm/optim.hpp"

namespace subgm {

struct GroundTruthSpec {
    int d = 2;
    int r = 1;
    SpectrumSpec spectrum = 1.0; // condition target by default
    std::uint64_t seed = 0;
};

struct EnsembleSpec {
    int m = 1;
    NoiseModel noise{};
    std::uint64_t seed = 0;
    bool lazy = false;
};

struct InitSpec {
    enum class Mode { Spectral, OracleSpectral, FromFile };
    Mode mode = Mode::Spectral;
    double alpha = 1e-3;
    int r_prime = 1;
    double sign_at_zero = 0.0;
    std::string file; // FromFile
};

struct RunSpec {
    Algorithm algorithm = Algorithm::SubgmL1;
    long max_iters = 100;
    StepSizePolicy::Kind policy = StepSizePolicy::Kind::AdaptiveLoss;
    std::optional<double> eta;  // default derived from the problem when absent
    std::optional<double> rho;  // geometric only
    std::optional<double> stop_error;
};

struct OutputSpec {
    std::string dir;
    long record_stride = 1;
    bool plot = false;
    bool save_state = false;
};

struct ExperimentConfig {
    GroundTruthSpec ground_truth{};
    std::optional<EnsembleSpec> ensemble{};
    InitSpec init{};
    RunSpec run{};
    OutputSpec output{};

    void validate() const;
};

struct SweepSpec {
    ExperimentConfig base{};
    std::string axis; // dotted config path, e.g. "init.alpha"
    std::vector<nlohmann::json> values;
    int replicas = 1;
    int parallelism = 0; // 0 = library default
};

NoiseModel noise_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseModel& n);

// JSON round-trip; to_json(from_json(x)) reproduces the config exactly
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

SweepSpec sweep_from_json(const nlohmann::json& j);
SweepSpec load_sweep(const std::string& path);

// applies one sweep axis value; throws when the path does not name a config
// field or the value has the wrong type
ExperimentConfig apply_axis(const ExperimentConfig& base, const std::string& axis,
                            const nlohmann::json& value);

// replica k shifts both seeds by k (k = 0 reproduces the base run)
ExperimentConfig apply_replica(const ExperimentConfig& base, int replica);

} // namespace subgm
