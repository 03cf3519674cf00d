#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "subgm/linalg.hpp"
#include "subgm/loss.hpp"
#include "subgm/signrip.hpp"

using namespace subgm;

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

TEST_CASE("scaling function closed forms") {
    CHECK(scaling_phi(ScalingSpec::noiseless(), 1.0) == doctest::Approx(kSqrt2OverPi));
    CHECK(scaling_phi(ScalingSpec::outlier(0.0), 3.0) == doctest::Approx(kSqrt2OverPi));
    // gaussian noise with nu = ||X||_F halves the variance ratio
    CHECK(scaling_phi(ScalingSpec::gaussian(2.0), 2.0) ==
          doctest::Approx(std::sqrt(1.0 / 3.14159265358979323846)));
    // half outliers at sigma = ||X||_F
    CHECK(scaling_phi(ScalingSpec::outlier(0.5, {OutlierMagnitude::Kind::Gaussian, 2.0}), 2.0) ==
          doctest::Approx(kSqrt2OverPi * (0.5 + 0.5 / std::sqrt(2.0))));
    // point mass has the exact exponential damp
    CHECK(scaling_phi(ScalingSpec::outlier(0.3, {OutlierMagnitude::Kind::PointMass, 2.0}), 1.0) ==
          doctest::Approx(kSqrt2OverPi * (0.7 + 0.3 * std::exp(-2.0))));
    CHECK_THROWS(scaling_phi(ScalingSpec::noiseless(), 0.0));
}

TEST_CASE("scaling function bounds and monotonicity on a grid") {
    const std::vector<ScalingSpec> specs = {
        ScalingSpec::outlier(0.4, {OutlierMagnitude::Kind::Gaussian, 5.0}),
        ScalingSpec::outlier(0.9, {OutlierMagnitude::Kind::PointMass, 3.0}),
        ScalingSpec::gaussian(1.5),
    };
    for (const ScalingSpec& spec : specs) {
        double prev = 0.0;
        for (double x = 0.05; x < 50.0; x *= 1.3) {
            const double phi = scaling_phi(spec, x);
            CHECK(phi > 0.0);
            CHECK(phi <= kSqrt2OverPi + 1e-15);
            CHECK(phi >= prev - 1e-15); // nondecreasing in ||X||_F
            prev = phi;
        }
    }
    // outlier floor (1 - p) holds for any magnitude scale
    const ScalingSpec huge = ScalingSpec::outlier(0.7, {OutlierMagnitude::Kind::Gaussian, 1e6});
    CHECK(scaling_phi(huge, 0.01) >= kSqrt2OverPi * 0.3 - 1e-12);
}

TEST_CASE("low-rank probes have the requested rank and norm") {
    rng::Stream s(8);
    const Matrix x = random_low_rank_probe(9, 3, 2.5, s);
    CHECK(frobenius_norm(x) == doctest::Approx(2.5));
    CHECK(max_abs(sub(x, transpose(x))) < 1e-12);
    const SymEig eig = sym_eig(x);
    int nonzero = 0;
    for (double v : eig.values)
        if (std::fabs(v) > 1e-10) ++nonzero;
    CHECK(nonzero == 3);
}

TEST_CASE("self-probe identity links the deviation to the mean absolute measurement") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build_unattached(6, 800, NoiseModel::none(), 41);
    rng::Stream s(4);
    const Matrix x = random_low_rank_probe(6, 2, 1.7, s);
    const double x_fro = frobenius_norm(x);
    const double phi = scaling_phi(ScalingSpec::noiseless(), x_fro);

    const std::vector<double> ax = apply_operator(ens, x);
    std::vector<double> coeffs(ens.m());
    double mean_abs = 0.0;
    for (int i = 0; i < ens.m(); ++i) {
        mean_abs += std::fabs(ax[i]);
        coeffs[i] = (ax[i] > 0 ? 1.0 : ax[i] < 0 ? -1.0 : 0.0) / ens.m();
    }
    mean_abs /= ens.m();
    const Matrix q = kernels::weighted_sum(ens.view(), coeffs.data());
    Matrix dev = q;
    axpy(dev, -phi / x_fro, x);
    const double lhs = inner(dev, scale(x, 1.0 / x_fro)) / phi;
    const double rhs = mean_abs / (phi * x_fro) - 1.0;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("well-sampled noiseless deviation estimate is small") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build_unattached(8, 20000, NoiseModel::none(), 51, /*lazy=*/true);
    const SignRipEstimate est =
        estimate_signrip(ens, ScalingSpec::noiseless(), 2, 0.5, 5.0, 40, 3);
    CHECK(est.delta_hat <= 0.15);
    CHECK(est.delta_hat > 0.0);
    CHECK(static_cast<int>(est.per_probe.size()) == 40);
    double max_dev = 0.0;
    for (const auto& [fro, dev] : est.per_probe) {
        CHECK(fro >= 0.5 - 1e-12);
        CHECK(fro <= 5.0 + 1e-12);
        max_dev = std::max(max_dev, dev);
    }
    CHECK(est.delta_hat == doctest::Approx(max_dev));
}

TEST_CASE("estimates shrink when the sample count doubles") {
    for (const NoiseModel& noise :
         {NoiseModel::none(), NoiseModel::outlier(0.3), NoiseModel::gaussian(0.5)}) {
        std::vector<double> small, large;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const MeasurementEnsemble a =
                MeasurementEnsemble::build_unattached(8, 1000, noise, 100 + seed);
            const MeasurementEnsemble b =
                MeasurementEnsemble::build_unattached(8, 2000, noise, 200 + seed);
            const ScalingSpec spec = ScalingSpec::from_noise(noise);
            small.push_back(estimate_signrip(a, spec, 2, 0.5, 5.0, 30, seed).delta_hat);
            large.push_back(estimate_signrip(b, spec, 2, 0.5, 5.0, 30, seed).delta_hat);
        }
        CHECK(median(large) < median(small));
    }
}

TEST_CASE("epsilon-approximate probes stay inside the norm shell") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build_unattached(8, 500, NoiseModel::none(), 61);
    const SignRipEstimate est =
        estimate_signrip(ens, ScalingSpec::noiseless(), 2, 0.5, 5.0, 30, 9, /*epsilon=*/0.1);
    for (const auto& [fro, dev] : est.per_probe) {
        CHECK(fro >= 0.5 - 1e-12);
        CHECK(fro <= 5.0 + 1e-12);
        (void)dev;
    }
    CHECK_THROWS(estimate_signrip(ens, ScalingSpec::noiseless(), 2, 0.5, 5.0, 30, 9, 3.0));
}

TEST_CASE("l2 isometry deviation is small when well sampled and ignores noise") {
    const MeasurementEnsemble big =
        MeasurementEnsemble::build_unattached(8, 20000, NoiseModel::none(), 71, /*lazy=*/true);
    CHECK(l2_rip_deviation(big, 2, 40, 5) <= 0.15);

    // bit-identical across noise models at the same seed
    const MeasurementEnsemble none =
        MeasurementEnsemble::build_unattached(8, 800, NoiseModel::none(), 81);
    const MeasurementEnsemble outl =
        MeasurementEnsemble::build_unattached(8, 800, NoiseModel::outlier(0.5), 81);
    const MeasurementEnsemble gauss =
        MeasurementEnsemble::build_unattached(8, 800, NoiseModel::gaussian(2.0), 81);
    const double a = l2_rip_deviation(none, 2, 20, 7);
    CHECK(a == l2_rip_deviation(outl, 2, 20, 7));
    CHECK(a == l2_rip_deviation(gauss, 2, 20, 7));
}

TEST_CASE("scaled probes see the same relative energy deviation") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build_unattached(6, 400, NoiseModel::none(), 91);
    rng::Stream s(17);
    const Matrix m1 = random_low_rank_probe(6, 2, 1.0, s);
    const Matrix m10 = scale(m1, 10.0);
    auto rel_dev = [&](const Matrix& m) {
        const std::vector<double> am = apply_operator(ens, m);
        double energy = 0.0;
        for (double v : am) energy += v * v;
        energy /= ens.m();
        const double f2 = frobenius_norm(m) * frobenius_norm(m);
        return std::fabs(energy - f2) / f2;
    };
    CHECK(rel_dev(m1) == doctest::Approx(rel_dev(m10)).epsilon(1e-12));
}

TEST_CASE("quadratic-loss operator deviation shrinks like one over sqrt m") {
    std::vector<double> at_m, at_4m;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        at_m.push_back(l2_q_deviation(8, 1000, 0.0, 0.0, 10, 300 + seed));
        at_4m.push_back(l2_q_deviation(8, 4000, 0.0, 0.0, 10, 400 + seed));
    }
    const double ratio = median(at_4m) / median(at_m);
    CHECK(ratio >= 0.4);
    CHECK(ratio <= 0.6);
}

TEST_CASE("quadratic-loss operator at the zero probe reproduces the noise average") {
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build_unattached(5, 40, NoiseModel::outlier(0.5), 13);
    const Matrix q0 = l2_q_operator(ens, Matrix(5, 5));
    Matrix manual(5, 5);
    for (int i = 0; i < ens.m(); ++i) {
        const Matrix a = ens.matrix_at(i);
        axpy(manual, -2.0 * ens.s()[i] / ens.m(), add(a, transpose(a)));
    }
    CHECK(max_abs(sub(q0, manual)) < 1e-12);
    CHECK(frobenius_norm(q0) > 0.0);
}

TEST_CASE("sign-weighted expectation identity holds per noise model") {
    // mean of Sign(<A, X> - s) <A, Y> over fresh draws vs phi(X) <X/||X||_F, Y>
    struct Case {
        ScalingSpec spec;
        NoiseModel noise;
    };
    const std::vector<Case> cases = {
        {ScalingSpec::outlier(0.4, {OutlierMagnitude::Kind::Gaussian, 3.0}),
         NoiseModel::outlier(0.4, {OutlierMagnitude::Kind::Gaussian, 3.0})},
        {ScalingSpec::gaussian(1.2), NoiseModel::gaussian(1.2)},
    };
    const int d = 4, n = 100000;
    for (const Case& c : cases) {
        for (std::uint64_t pair = 0; pair < 4; ++pair) {
            rng::Stream setup(900 + pair);
            const Matrix x = random_low_rank_probe(d, 2, 0.5 + setup.next_unit() * 2.0, setup);
            Matrix y = random_low_rank_probe(d, 2, 1.0, setup);
            const double x_fro = frobenius_norm(x);

            rng::Stream s(7000 + pair);
            double mean = 0.0, sq = 0.0;
            for (int i = 0; i < n; ++i) {
                double ax = 0.0, ay = 0.0;
                for (int rr = 0; rr < d; ++rr)
                    for (int cc = 0; cc < d; ++cc) {
                        const double g = s.next_gaussian();
                        ax += g * x(rr, cc);
                        ay += g * y(rr, cc);
                    }
                double noise = 0.0;
                if (c.noise.kind == NoiseModel::Kind::Outlier) {
                    if (s.next_unit() < c.noise.p)
                        noise = c.noise.magnitude.value * s.next_gaussian();
                } else {
                    noise = c.noise.nu_g * s.next_gaussian();
                }
                const double arg = ax - noise;
                const double v = (arg > 0 ? 1.0 : arg < 0 ? -1.0 : 0.0) * ay;
                mean += v;
                sq += v * v;
            }
            mean /= n;
            const double se = std::sqrt((sq / n - mean * mean) / n);
            const double target = scaling_phi(c.spec, x_fro) * inner(x, y) / x_fro;
            CHECK(std::fabs(mean - target) <= 3.0 * se);
        }
    }
}
