#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subgm/diag.hpp"
#include "subgm/loss.hpp"

namespace subgm {

enum class Algorithm { SubgmL1, GdL2, SubgmExpected };

struct StepSizePolicy {
    enum class Kind { AdaptiveLoss, Geometric, Constant, ExpectedOracle };
    Kind kind = Kind::AdaptiveLoss;
    double eta = 0.1;
    double rho = 0.99; // Geometric only

    void validate() const;
    static StepSizePolicy adaptive_loss(double eta);
    static StepSizePolicy geometric(double eta, double rho);
    static StepSizePolicy constant(double eta);
    static StepSizePolicy expected_oracle(double eta);
};

/// Inputs a policy may need at iteration t. Fields that do not apply to the
/// chosen variant are ignored.
struct StepState {
    double loss = 0.0;
    double q_norm = 0.0;    // operator norm of the sign-weighted average
    double delta_fro = 0.0; // oracle ||U U^T - X*||_F
};

// nullopt when a Geometric step degenerates (q_norm <= 1e-14); the run loop
// treats that as convergence
std::optional<double> step_size(const StepSizePolicy& policy, long t, const StepState& state);

struct RunConfig {
    long max_iters = 100;
    Algorithm algorithm = Algorithm::SubgmL1;
    StepSizePolicy policy{};
    SignConvention sign{};
    std::optional<double> stop_error{}; // Frobenius threshold on the error
    long record_every = 1;
    bool monitors = true;
};

enum class Termination { MaxIters, ErrorThreshold, DegenerateStep };

/// One-step dynamics check. In the oracle mode the iterate decomposition obeys
/// a set of per-iteration growth/decay inequalities whenever the listed
/// preconditions hold; each check counts how often it was active and whether
/// it ever failed (slack 1e-10).
struct MonitorCheck {
    std::string name;
    long checked = 0;
    long skipped = 0; // preconditions unmet
    long violations = 0;
    double worst_violation = 0.0;
};

struct Trajectory {
    std::vector<IterateRecord> records;
    Factor final_u;
    Termination termination = Termination::MaxIters;
    long final_iter = 0;
    std::vector<MonitorCheck> monitor;
};

/// Thrown when the iterate blows up; carries the partial trajectory with a
/// diagnostic record naming the offending iteration.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(long iteration, Trajectory partial)
        : std::runtime_error("iterate diverged at iteration " + std::to_string(iteration)),
          iteration(iteration), partial(std::move(partial)) {}
    long iteration;
    Trajectory partial;
};

// ens may be null only for Algorithm::SubgmExpected
Trajectory run(const GroundTruth& gt, const MeasurementEnsemble* ens, const Factor& u0,
               const RunConfig& cfg);

PhaseBoundaries detect_phases(const Trajectory& traj, const GroundTruth& gt);

} // namespace subgm
