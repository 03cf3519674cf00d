#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subgm/measure.hpp"
#include "subgm/rng.hpp"

using namespace subgm;

TEST_CASE("noiseless ensemble reproduces y_i = <A_i, X*> exactly") {
    const GroundTruth gt = random_ground_truth(10, 2, 2.0, 3);
    const MeasurementEnsemble ens = MeasurementEnsemble::build(gt, 200, NoiseModel::none(), 8);
    for (double si : ens.s()) CHECK(si == 0.0);
    const std::vector<double> ax = apply_operator(ens, gt.xstar);
    for (int i = 0; i < 200; ++i)
        CHECK(std::fabs(ens.y()[i] - ax[i]) <= 1e-12 * (1.0 + std::fabs(ax[i])));
}

TEST_CASE("outlier fraction concentrates near p (binomial bound)") {
    const GroundTruth gt = random_ground_truth(20, 3, 2.0, 1);
    for (std::uint64_t seed : {2ULL, 77ULL, 12345ULL}) {
        const MeasurementEnsemble ens =
            MeasurementEnsemble::build(gt, 500, NoiseModel::outlier(0.1), seed);
        int nonzero = 0;
        for (double si : ens.s())
            if (si != 0.0) ++nonzero;
        const double frac = nonzero / 500.0;
        CHECK(frac >= 0.05);
        CHECK(frac <= 0.15);
    }
}

TEST_CASE("gaussian noise sample std within 1% at m = 1e5") {
    const int m = 100000;
    const std::vector<double> s = realize_noise(NoiseModel::gaussian(1.0), m, 4);
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (m - 1));
    CHECK(sd >= 0.99);
    CHECK(sd <= 1.01);
}

TEST_CASE("point-mass outliers take only the two allowed values") {
    const NoiseModel noise = NoiseModel::outlier(0.5, {OutlierMagnitude::Kind::PointMass, 3.0});
    const std::vector<double> s = realize_noise(noise, 2000, 9);
    int plus = 0, minus = 0;
    for (double v : s) {
        if (v == 0.0) continue;
        CHECK(std::fabs(std::fabs(v) - 3.0) < 1e-15);
        (v > 0 ? plus : minus) += 1;
    }
    CHECK(plus > 300);
    CHECK(minus > 300);
}

TEST_CASE("mixed noise adds the two parts") {
    const NoiseModel mixed = NoiseModel::mixed(0.3, {OutlierMagnitude::Kind::Gaussian, 5.0}, 0.1);
    const std::vector<double> s = realize_noise(mixed, 5000, 6);
    int big = 0;
    for (double v : s)
        if (std::fabs(v) > 1.0) ++big;
    // roughly the corrupted fraction lands beyond the small-noise scale
    CHECK(big > 900);
    CHECK(big < 2100);
}

TEST_CASE("ensembles regenerate bit-identically from the seed tuple") {
    const GroundTruth gt = random_ground_truth(8, 2, 2.0, 5);
    const NoiseModel noise = NoiseModel::outlier(0.2);
    const MeasurementEnsemble a = MeasurementEnsemble::build(gt, 123, noise, 31);
    const MeasurementEnsemble b = MeasurementEnsemble::build(gt, 123, noise, 31);
    for (int i = 0; i < 123; ++i) {
        CHECK(a.y()[i] == b.y()[i]);
        CHECK(a.s()[i] == b.s()[i]);
    }
    const Matrix ma = a.matrix_at(7);
    const Matrix mb = b.matrix_at(7);
    for (std::size_t k = 0; k < ma.size(); ++k) CHECK(ma.data()[k] == mb.data()[k]);
}

TEST_CASE("apply_operator is linear and exact on a crafted matrix") {
    // single measurement matrix with a 1 at (0, 1)
    Matrix e01(2, 2);
    e01(0, 1) = 1.0;
    Matrix x(2, 2);
    x(0, 1) = 3.0;
    const MeasurementEnsemble ens = MeasurementEnsemble::from_parts({e01}, {0.0}, {0.0});
    CHECK(apply_operator(ens, x)[0] == doctest::Approx(3.0));
    CHECK(apply_operator(ens, Matrix(2, 2))[0] == 0.0);

    const GroundTruth gt = random_ground_truth(6, 2, 2.0, 8);
    const MeasurementEnsemble rens = MeasurementEnsemble::build(gt, 64, NoiseModel::none(), 15);
    rng::Stream s(12);
    Matrix u(6, 6), v(6, 6);
    for (std::size_t k = 0; k < u.size(); ++k) u.data()[k] = s.next_gaussian();
    for (std::size_t k = 0; k < v.size(); ++k) v.data()[k] = s.next_gaussian();
    const std::vector<double> lhs = apply_operator(rens, add(u, v));
    const std::vector<double> au = apply_operator(rens, u);
    const std::vector<double> av = apply_operator(rens, v);
    for (int i = 0; i < 64; ++i)
        CHECK(lhs[i] == doctest::Approx(au[i] + av[i]).epsilon(1e-12));
}

TEST_CASE("residual hand case and fixed points") {
    const int d = 3;
    GroundTruth gt;
    gt.d = d;
    gt.r = 1;
    gt.v = Matrix(d, 1, {1.0, 0.0, 0.0});
    gt.vperp = Matrix(d, 2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0});
    gt.sigma = {1.0};
    gt.xstar = Matrix::diag(std::vector<double>{1.0, 0.0, 0.0});

    const MeasurementEnsemble ens =
        MeasurementEnsemble::from_parts({Matrix::identity(d)}, {1.0}, {0.0});
    Matrix u(d, 1, {std::sqrt(2.0), 0.0, 0.0});
    CHECK(residual(ens, Factor{u})[0] == doctest::Approx(-1.0));
    CHECK(residual(ens, Factor{Matrix(d, 1)})[0] == doctest::Approx(1.0)); // U = 0 gives y
}

TEST_CASE("monte-carlo near-isometry of the scaled operator") {
    const GroundTruth gt = random_ground_truth(10, 2, 2.0, 2);
    const MeasurementEnsemble ens = MeasurementEnsemble::build(gt, 2000, NoiseModel::none(), 55);
    rng::Stream s(91);
    int in_range = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
        Matrix m(10, 10);
        for (std::size_t k = 0; k < m.size(); ++k) m.data()[k] = s.next_gaussian();
        const double fro = frobenius_norm(m);
        for (std::size_t k = 0; k < m.size(); ++k) m.data()[k] /= fro;
        const std::vector<double> am = apply_operator(ens, m);
        double energy = 0.0;
        for (double v : am) energy += v * v;
        energy /= ens.m();
        if (energy >= 0.8 && energy <= 1.2) ++in_range;
    }
    CHECK(in_range >= 38); // 95%
}

TEST_CASE("mean absolute measurement matches sqrt(2/pi) times the Frobenius norm") {
    rng::Stream s(14);
    Matrix m(6, 6);
    for (std::size_t k = 0; k < m.size(); ++k) m.data()[k] = s.next_gaussian();
    const double fro = frobenius_norm(m);
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build_unattached(6, 100000, NoiseModel::none(), 23, /*lazy=*/true);
    const std::vector<double> am = apply_operator(ens, m);
    double mean = 0.0;
    for (double v : am) mean += std::fabs(v);
    mean /= ens.m();
    const double expect = std::sqrt(2.0 / 3.14159265358979323846) * fro;
    CHECK(mean == doctest::Approx(expect).epsilon(0.01));
}

TEST_CASE("invalid parameters are rejected") {
    const GroundTruth gt = random_ground_truth(4, 1, 1.0, 0);
    CHECK_THROWS(MeasurementEnsemble::build(gt, 0, NoiseModel::none(), 0));
    CHECK_THROWS(NoiseModel::outlier(1.0).validate());
    CHECK_THROWS(NoiseModel::gaussian(-0.1).validate());
    const MeasurementEnsemble ens = MeasurementEnsemble::build(gt, 3, NoiseModel::none(), 0);
    CHECK_THROWS(apply_operator(ens, Matrix(3, 3)));
}
