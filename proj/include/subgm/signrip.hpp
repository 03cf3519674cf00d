#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "subgm/measure.hpp"
#include "subgm/rng.hpp"

namespace subgm {

/// Noise model seen by the scaling function phi. Closed forms:
///   noiseless        sqrt(2/pi)
///   outlier          sqrt(2/pi) (1 - p + p E[exp(-s^2 / (2 x^2))])
///   gaussian         sqrt(2/pi) x / sqrt(x^2 + nu_g^2)
/// where x = ||X||_F and the outlier expectation is exact for both magnitude
/// distributions.
struct ScalingSpec {
    enum class Kind { Noiseless, Outlier, Gaussian };
    Kind kind = Kind::Noiseless;
    double p = 0.0;
    OutlierMagnitude magnitude{};
    double nu_g = 0.0;

    static ScalingSpec noiseless() { return {}; }
    static ScalingSpec outlier(double p, OutlierMagnitude mag = {}) {
        return {Kind::Outlier, p, mag, 0.0};
    }
    static ScalingSpec gaussian(double nu_g) {
        return {Kind::Gaussian, 0.0, {}, nu_g};
    }
    // phi oracle matching an ensemble's noise model
    static ScalingSpec from_noise(const NoiseModel& noise);
};

double scaling_phi(const ScalingSpec& spec, double x_fro);

/// Max observed deviation of the sign-weighted measurement average from its
/// ideal direction, over random low-rank probes plus a worst-case-seeking
/// probe per sample. A statistical lower bound on the true uniform deviation.
struct SignRipEstimate {
    int k = 0;
    double epsilon = 0.0;
    double zeta = 0.0;
    double big_r = 0.0;
    int num_probes = 0;
    double delta_hat = 0.0;
    std::vector<std::pair<double, double>> per_probe; // (||X||_F, deviation)
};

SignRipEstimate estimate_signrip(const MeasurementEnsemble& ens, const ScalingSpec& spec, int k,
                                 double zeta, double big_r, int num_probes, std::uint64_t seed,
                                 double epsilon = 0.0);

// max over random rank-k unit-Frobenius probes M of
// |(1/m) ||A(M)||^2 - ||M||_F^2| / ||M||_F^2; ignores the noise entirely
double l2_rip_deviation(const MeasurementEnsemble& ens, int k, int num_probes, std::uint64_t seed);

// max over random unit-Frobenius symmetric probes M of ||Q(M) - 4 M||_F for
// the quadratic-loss operator Q under sparse Gaussian noise (probability p,
// std sigma); builds its own ensemble
double l2_q_deviation(int d, int m, double p, double sigma, int num_probes, std::uint64_t seed);

// exact rank-k symmetric probe with prescribed Frobenius norm (orthonormal
// basis times a signed Gaussian spectrum); exposed for tests
Matrix random_low_rank_probe(int d, int k, double target_fro, rng::Stream& stream);

} // namespace subgm
