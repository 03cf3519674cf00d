#include "subgm/signrip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subgm/linalg.hpp"
#include "subgm/loss.hpp"
#include "subgm/rng.hpp"

namespace subgm {

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

// E[exp(-s^2 / (2 v))] for s ~ N(mu, var), in closed form
double gaussian_damp(double v, double var, double mu) {
    const double scale = std::sqrt(v / (v + var));
    return scale * std::exp(-mu * mu / (2.0 * (v + var)));
}

} // namespace

ScalingSpec ScalingSpec::from_noise(const NoiseModel& noise) {
    switch (noise.kind) {
    case NoiseModel::Kind::None:
        return noiseless();
    case NoiseModel::Kind::Outlier:
        return outlier(noise.p, noise.magnitude);
    case NoiseModel::Kind::Gaussian:
        return gaussian(noise.nu_g);
    case NoiseModel::Kind::Mixed:
        throw std::invalid_argument("ScalingSpec: no closed form wired up for the mixed model");
    }
    throw std::logic_error("ScalingSpec::from_noise");
}

double scaling_phi(const ScalingSpec& spec, double x_fro) {
    if (!(x_fro > 0.0)) throw std::invalid_argument("scaling_phi: ||X||_F must be positive");
    const double v = x_fro * x_fro;
    switch (spec.kind) {
    case ScalingSpec::Kind::Noiseless:
        return kSqrt2OverPi;
    case ScalingSpec::Kind::Outlier: {
        const double damp = (spec.magnitude.kind == OutlierMagnitude::Kind::Gaussian)
                                ? gaussian_damp(v, spec.magnitude.value * spec.magnitude.value, 0.0)
                                : std::exp(-spec.magnitude.value * spec.magnitude.value / (2.0 * v));
        return kSqrt2OverPi * (1.0 - spec.p + spec.p * damp);
    }
    case ScalingSpec::Kind::Gaussian:
        return kSqrt2OverPi * x_fro / std::sqrt(v + spec.nu_g * spec.nu_g);
    }
    throw std::logic_error("scaling_phi");
}

Matrix random_low_rank_probe(int d, int k, double target_fro, rng::Stream& stream) {
    if (k < 1 || k > d) throw std::invalid_argument("random_low_rank_probe: need 1 <= k <= d");
    Matrix b(d, k);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < k; ++j) b(i, j) = stream.next_gaussian();
    // modified Gram-Schmidt, two passes
    for (int j = 0; j < k; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (int p = 0; p < j; ++p) {
                double dot = 0.0;
                for (int i = 0; i < d; ++i) dot += b(i, p) * b(i, j);
                for (int i = 0; i < d; ++i) b(i, j) -= dot * b(i, p);
            }
        double norm = 0.0;
        for (int i = 0; i < d; ++i) norm += b(i, j) * b(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) throw std::runtime_error("random_low_rank_probe: degenerate draw");
        for (int i = 0; i < d; ++i) b(i, j) /= norm;
    }
    std::vector<double> lam(k);
    double lam_norm = 0.0;
    for (int j = 0; j < k; ++j) {
        lam[j] = stream.next_gaussian();
        lam_norm += lam[j] * lam[j];
    }
    lam_norm = std::sqrt(lam_norm);
    if (lam_norm < 1e-300) {
        lam[0] = 1.0;
        lam_norm = 1.0;
    }
    for (double& l : lam) l *= target_fro / lam_norm;

    Matrix x(d, d);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < d; ++i) {
            const double w = lam[j] * b(i, j);
            for (int c = 0; c < d; ++c) x(i, c) += w * b(c, j);
        }
    return x;
}

SignRipEstimate estimate_signrip(const MeasurementEnsemble& ens, const ScalingSpec& spec, int k,
                                 double zeta, double big_r, int num_probes, std::uint64_t seed,
                                 double epsilon) {
    if (k < 1 || k > ens.d()) throw std::invalid_argument("estimate_signrip: need 1 <= k <= d");
    if (!(zeta > 0.0) || !(big_r >= zeta))
        throw std::invalid_argument("estimate_signrip: need 0 < zeta <= R");
    if (num_probes < 1) throw std::invalid_argument("estimate_signrip: need at least one probe");
    if (epsilon < 0.0 || (epsilon > 0.0 && 2.0 * epsilon >= big_r - zeta))
        throw std::invalid_argument("estimate_signrip: epsilon too large for [zeta, R]");

    const int d = ens.d();
    const int m = ens.m();
    SignRipEstimate est;
    est.k = k;
    est.epsilon = epsilon;
    est.zeta = zeta;
    est.big_r = big_r;
    est.num_probes = num_probes;
    est.per_probe.resize(num_probes);

    // core norms stay in [zeta + eps, R - eps] so the bumped probe never
    // leaves [zeta, R]
    const double lo = std::log(zeta + epsilon);
    const double hi = std::log(big_r - epsilon);

#pragma omp parallel for schedule(static)
    for (int j = 0; j < num_probes; ++j) {
        rng::Stream stream(rng::substream(seed, rng::kTagProbe, static_cast<std::uint64_t>(j)));
        const double tau = std::exp(lo + (hi - lo) * stream.next_unit());
        Matrix x = random_low_rank_probe(d, k, tau, stream);
        if (epsilon > 0.0) {
            Matrix bump(d, d);
            for (std::size_t c = 0; c < bump.size(); ++c) bump.data()[c] = stream.next_gaussian();
            const double bn = frobenius_norm(bump);
            axpy(x, epsilon / bn, bump);
        }
        const Matrix y = random_low_rank_probe(d, k, 1.0, stream);

        // one element of the sign-weighted average at X, using the stored
        // noise realization
        std::vector<double> ax(m);
        kernels::apply_all(ens.view(), x.data(), ax.data());
        std::vector<double> coeffs(m);
        const double inv_m = 1.0 / static_cast<double>(m);
        const SignConvention sc{};
        for (int i = 0; i < m; ++i) coeffs[i] = inv_m * sign_of(ax[i] - ens.s()[i], sc);
        const Matrix q = kernels::weighted_sum(ens.view(), coeffs.data());

        const double x_fro = frobenius_norm(x);
        const double phi = scaling_phi(spec, x_fro);
        Matrix dev = q;
        axpy(dev, -phi / x_fro, x);

        const double dev_rand = std::fabs(inner(dev, y)) / phi;
        // worst admissible probe: the best rank-k approximation of the
        // deviation matrix, so <dev, Y*> = sqrt(top-k spectral mass)
        const SymEig gram = sym_eig(matmul_tn(dev, dev));
        double mass = 0.0;
        for (int c = 0; c < k; ++c) mass += std::max(0.0, gram.values[c]);
        const double dev_adv = std::sqrt(mass) / phi;

        est.per_probe[j] = {x_fro, std::max(dev_rand, dev_adv)};
    }

    for (const auto& [fro, dev] : est.per_probe) est.delta_hat = std::max(est.delta_hat, dev);
    return est;
}

double l2_rip_deviation(const MeasurementEnsemble& ens, int k, int num_probes, std::uint64_t seed) {
    if (k < 1 || k > ens.d()) throw std::invalid_argument("l2_rip_deviation: need 1 <= k <= d");
    if (num_probes < 1) throw std::invalid_argument("l2_rip_deviation: need at least one probe");
    std::vector<double> devs(num_probes);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < num_probes; ++j) {
        rng::Stream stream(rng::substream(seed, rng::kTagProbe, static_cast<std::uint64_t>(j)));
        const Matrix m = random_low_rank_probe(ens.d(), k, 1.0, stream);
        std::vector<double> am(ens.m());
        kernels::apply_all(ens.view(), m.data(), am.data());
        double energy = 0.0;
        for (double v : am) energy += v * v;
        energy /= static_cast<double>(ens.m());
        devs[j] = std::fabs(energy - 1.0);
    }
    return *std::max_element(devs.begin(), devs.end());
}

double l2_q_deviation(int d, int m, double p, double sigma, int num_probes, std::uint64_t seed) {
    if (num_probes < 1) throw std::invalid_argument("l2_q_deviation: need at least one probe");
    const NoiseModel noise = (p > 0.0 && sigma > 0.0)
                                 ? NoiseModel::outlier(p, {OutlierMagnitude::Kind::Gaussian, sigma})
                                 : NoiseModel::none();
    const MeasurementEnsemble ens = MeasurementEnsemble::build_unattached(d, m, noise, seed);
    std::vector<double> devs(num_probes);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < num_probes; ++j) {
        rng::Stream stream(rng::substream(seed, rng::kTagProbe, static_cast<std::uint64_t>(j)));
        Matrix g(d, d);
        for (std::size_t c = 0; c < g.size(); ++c) g.data()[c] = stream.next_gaussian();
        Matrix probe = symmetric_part(g);
        const double fro = frobenius_norm(probe);
        for (std::size_t c = 0; c < probe.size(); ++c) probe.data()[c] /= fro;

        Matrix q = l2_q_operator(ens, probe);
        axpy(q, -4.0, probe);
        devs[j] = frobenius_norm(q);
    }
    return *std::max_element(devs.begin(), devs.end());
}

} // namespace subgm
