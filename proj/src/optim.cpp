#include "subgm/optim.hpp"

#include <cmath>
#include <limits>

#include "subgm/linalg.hpp"

namespace subgm {

void StepSizePolicy::validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("StepSizePolicy: eta must be positive");
    if (kind == Kind::Geometric && !(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("StepSizePolicy: rho must be in (0, 1)");
}

StepSizePolicy StepSizePolicy::adaptive_loss(double eta) { return {Kind::AdaptiveLoss, eta, 0.99}; }
StepSizePolicy StepSizePolicy::geometric(double eta, double rho) { return {Kind::Geometric, eta, rho}; }
StepSizePolicy StepSizePolicy::constant(double eta) { return {Kind::Constant, eta, 0.99}; }
StepSizePolicy StepSizePolicy::expected_oracle(double eta) { return {Kind::ExpectedOracle, eta, 0.99}; }

std::optional<double> step_size(const StepSizePolicy& policy, long t, const StepState& state) {
    policy.validate();
    switch (policy.kind) {
    case StepSizePolicy::Kind::AdaptiveLoss:
        return 0.5 * policy.eta * state.loss;
    case StepSizePolicy::Kind::Geometric: {
        if (state.q_norm <= 1e-14) return std::nullopt;
        return policy.eta * std::pow(policy.rho, static_cast<double>(t)) / state.q_norm;
    }
    case StepSizePolicy::Kind::Constant:
        return policy.eta;
    case StepSizePolicy::Kind::ExpectedOracle:
        return 0.5 * policy.eta * state.delta_fro;
    }
    throw std::logic_error("step_size: unknown policy");
}

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;
constexpr double kMonitorTol = 1e-10;
// the "small enough step" gate for the one-step dynamics checks; matches the
// default oracle step eta = 0.1 / sigma_1
constexpr double kMonitorEtaCap = 0.1;

struct MonitorQuantities {
    double lam_min = 0.0;  // lambda_min(S S^T)
    double sst_norm = 0.0; // ||S S^T||
    double signal = 0.0;   // ||Sigma - S S^T||
    double cross = 0.0;    // ||S E^T||
    double residual = 0.0; // ||E E^T||
};

MonitorQuantities monitor_quantities(const GroundTruth& gt, const Factor& u) {
    MonitorQuantities q;
    const Matrix s = matmul_tn(gt.v, u.u);
    const Matrix e = matmul_tn(gt.vperp, u.u);
    Matrix sst = matmul_nt(s, s);
    const SymEig eig = sym_eig(sst);
    q.lam_min = eig.values.back();
    q.sst_norm = std::max(0.0, eig.values.front());
    for (int i = 0; i < gt.r; ++i) sst(i, i) -= gt.sigma[i];
    q.signal = sym_operator_norm(sst);
    q.cross = operator_norm(matmul_nt(s, e));
    q.residual = (e.rows() > 0) ? sym_operator_norm(matmul_nt(e, e)) : 0.0;
    return q;
}

class DynamicsMonitor {
public:
    DynamicsMonitor(const GroundTruth& gt, double eta) : gt_(gt), eta_(eta) {
        checks_.push_back({"min_eig_growth", 0, 0, 0, 0.0});
        checks_.push_back({"signal_step", 0, 0, 0, 0.0});
        checks_.push_back({"cross_step", 0, 0, 0, 0.0});
        checks_.push_back({"residual_step", 0, 0, 0, 0.0});
        checks_.push_back({"signal_cap", 0, 0, 0, 0.0});
    }

    void step(const MonitorQuantities& pre, const MonitorQuantities& post) {
        const double s1 = gt_.sigma1();
        const double sr = gt_.sigma_r();
        const bool eta_ok = eta_ <= kMonitorEtaCap / s1 + 1e-15;

        // growth of the smallest signal eigenvalue
        if (eta_ok && pre.lam_min > 0.0 && pre.residual <= s1 && pre.sst_norm <= 2.0 * s1) {
            const double bound = ((1.0 + eta_ * sr) * (1.0 + eta_ * sr) - 2.0 * eta_ * pre.residual) * pre.lam_min -
                                 2.0 * eta_ * (1.0 + eta_ * sr) * pre.lam_min * pre.lam_min;
            tally(0, post.lam_min >= bound - kMonitorTol, bound - post.lam_min);
        } else {
            ++checks_[0].skipped;
        }

        const bool decay_pre = eta_ok && pre.sst_norm <= 1.01 * s1 && pre.residual <= s1;
        if (decay_pre) {
            const double signal_bound =
                (1.0 - eta_ * pre.lam_min) * pre.signal + 5.0 * eta_ * pre.cross * pre.cross;
            tally(1, post.signal <= signal_bound + kMonitorTol, post.signal - signal_bound);

            const double cross_bound =
                (1.0 - eta_ * pre.lam_min + 2.0 * eta_ * pre.signal + 2.0 * eta_ * pre.residual) * pre.cross;
            tally(2, post.cross <= cross_bound + kMonitorTol, post.cross - cross_bound);

            const double residual_bound = pre.residual - eta_ * pre.residual * pre.residual;
            tally(3, post.residual <= residual_bound + kMonitorTol, post.residual - residual_bound);

            tally(4, post.sst_norm <= 1.01 * s1 + kMonitorTol, post.sst_norm - 1.01 * s1);
        } else {
            for (int k = 1; k <= 4; ++k) ++checks_[k].skipped;
        }
    }

    std::vector<MonitorCheck> take() { return std::move(checks_); }

private:
    void tally(int idx, bool ok, double violation) {
        ++checks_[idx].checked;
        if (!ok) {
            ++checks_[idx].violations;
            checks_[idx].worst_violation = std::max(checks_[idx].worst_violation, violation);
        }
    }

    const GroundTruth& gt_;
    double eta_;
    std::vector<MonitorCheck> checks_;
};

IterateRecord divergence_record(long t, int r) {
    IterateRecord rec;
    rec.t = t;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.loss = rec.eta_t = rec.err_op = rec.err_fro = nan;
    rec.signal = rec.cross = rec.residual = rec.f_term = rec.g_term = rec.lambda_min_signal = nan;
    rec.eig_signal.assign(r, nan);
    return rec;
}

void validate_config(const RunConfig& cfg, const MeasurementEnsemble* ens) {
    if (cfg.max_iters < 1) throw std::invalid_argument("run: max_iters must be >= 1");
    if (cfg.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
    if (cfg.stop_error && !(*cfg.stop_error >= 0.0))
        throw std::invalid_argument("run: stop_error must be nonnegative");
    if (std::fabs(cfg.sign.at_zero) > 1.0)
        throw std::invalid_argument("run: sign.at_zero must be in [-1, 1]");
    cfg.policy.validate();
    if (cfg.algorithm != Algorithm::SubgmExpected && ens == nullptr)
        throw std::invalid_argument("run: measurement ensemble required");
    if (cfg.policy.kind == StepSizePolicy::Kind::Geometric && cfg.algorithm != Algorithm::SubgmL1)
        throw std::invalid_argument("run: geometric step-size applies to the l1 sub-gradient method");
    if (cfg.algorithm == Algorithm::GdL2 && cfg.policy.kind != StepSizePolicy::Kind::Constant)
        throw std::invalid_argument("run: the l2 baseline uses a constant step-size");
}

} // namespace

Trajectory run(const GroundTruth& gt, const MeasurementEnsemble* ens, const Factor& u0,
               const RunConfig& cfg) {
    validate_config(cfg, ens);
    if (u0.dim() != gt.d) throw std::invalid_argument("run: initial point dimension mismatch");
    if (ens && ens->d() != gt.d) throw std::invalid_argument("run: ensemble dimension mismatch");

    const bool monitored = cfg.monitors && cfg.algorithm == Algorithm::SubgmExpected &&
                           cfg.policy.kind == StepSizePolicy::Kind::ExpectedOracle;
    const double diverge_cap = 1e6 * (1.0 + std::sqrt(gt.xstar_fro()));

    Trajectory traj;
    Factor u = u0;
    DynamicsMonitor monitor(gt, cfg.policy.eta);
    MonitorQuantities pre;
    if (monitored) pre = monitor_quantities(gt, u);

    long t = 0;
    bool error_stop = false;
    while (true) {
        // direction and per-iterate scalars
        Matrix direction;
        StepState state;
        switch (cfg.algorithm) {
        case Algorithm::SubgmL1: {
            SubgradientResult sg = l1_subgradient(*ens, u, cfg.sign);
            state.loss = sg.loss;
            if (cfg.policy.kind == StepSizePolicy::Kind::Geometric)
                state.q_norm = operator_norm_auto(sg.q);
            if (cfg.policy.kind == StepSizePolicy::Kind::ExpectedOracle)
                state.delta_fro = reconstruction_error(u, gt, NormKind::Frobenius);
            direction = std::move(sg.d);
            break;
        }
        case Algorithm::GdL2: {
            state.loss = l2_loss(*ens, u);
            direction = l2_gradient(*ens, u);
            break;
        }
        case Algorithm::SubgmExpected: {
            state.delta_fro = reconstruction_error(u, gt, NormKind::Frobenius);
            state.loss = kSqrt2OverPi * state.delta_fro;
            std::optional<Matrix> d = expected_subgradient(gt, u);
            direction = d ? std::move(*d) : Matrix(gt.d, u.search_rank());
            break;
        }
        }

        const std::optional<double> eta_t = step_size(cfg.policy, t, state);
        const bool last = (t == cfg.max_iters) || !eta_t || error_stop;
        if (t % cfg.record_every == 0 || last)
            traj.records.push_back(record(gt, u, t, state.loss, eta_t.value_or(0.0)));
        if (last) {
            traj.termination = !eta_t          ? Termination::DegenerateStep
                               : error_stop    ? Termination::ErrorThreshold
                                               : Termination::MaxIters;
            break;
        }

        axpy(u.u, -*eta_t, direction);
        ++t;

        if (!u.u.all_finite() || frobenius_norm(u.u) > diverge_cap) {
            traj.records.push_back(divergence_record(t, gt.r));
            traj.final_u = u;
            traj.final_iter = t;
            throw DivergenceError(t, std::move(traj));
        }

        if (monitored) {
            const MonitorQuantities post = monitor_quantities(gt, u);
            monitor.step(pre, post);
            pre = post;
        }

        if (cfg.stop_error &&
            reconstruction_error(u, gt, NormKind::Frobenius) <= *cfg.stop_error)
            error_stop = true;
    }

    traj.final_u = std::move(u);
    traj.final_iter = t;
    if (monitored) traj.monitor = monitor.take();
    return traj;
}

PhaseBoundaries detect_phases(const Trajectory& traj, const GroundTruth& gt) {
    return detect_phases(traj.records, gt);
}

} // namespace subgm
