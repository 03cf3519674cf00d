#include "subgm/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace subgm {

namespace {

constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

double mean_abs(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s / static_cast<double>(v.size());
}

} // namespace

double l1_loss(const MeasurementEnsemble& ens, const Factor& u) {
    return mean_abs(residual(ens, u));
}

Matrix q_matrix(const MeasurementEnsemble& ens, const Factor& u, const SignConvention& sc) {
    const std::vector<double> res = residual(ens, u);
    std::vector<double> coeffs(res.size());
    const double inv_m = 1.0 / static_cast<double>(ens.m());
    for (std::size_t i = 0; i < res.size(); ++i) coeffs[i] = inv_m * sign_of(-res[i], sc);
    return kernels::weighted_sum(ens.view(), coeffs.data());
}

SubgradientResult l1_subgradient(const MeasurementEnsemble& ens, const Factor& u,
                                 const SignConvention& sc) {
    const std::vector<double> res = residual(ens, u);
    const double inv_m = 1.0 / static_cast<double>(ens.m());
    double loss = 0.0;
    std::vector<double> coeffs(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) {
        loss += std::fabs(res[i]);
        coeffs[i] = inv_m * sign_of(-res[i], sc);
    }
    loss *= inv_m;
    Matrix q = kernels::weighted_sum(ens.view(), coeffs.data());
    Matrix d = matmul(add(q, transpose(q)), u.u);
    return {std::move(d), std::move(q), loss};
}

double expected_loss(const GroundTruth& gt, const Factor& u) {
    return kSqrt2OverPi * frobenius_norm(error_matrix(u, gt));
}

std::optional<Matrix> expected_subgradient(const GroundTruth& gt, const Factor& u) {
    Matrix delta = error_matrix(u, gt);
    const double nf = frobenius_norm(delta);
    if (nf <= 1e-14) return std::nullopt;
    Matrix d = matmul(delta, u.u);
    for (std::size_t k = 0; k < d.size(); ++k) d.data()[k] *= 2.0 / nf;
    return d;
}

double l2_loss(const MeasurementEnsemble& ens, const Factor& u) {
    const std::vector<double> res = residual(ens, u);
    double s = 0.0;
    for (double x : res) s += x * x;
    return s / static_cast<double>(ens.m());
}

Matrix l2_q_operator(const MeasurementEnsemble& ens, const Matrix& x) {
    if (x.rows() != ens.d() || x.cols() != ens.d())
        throw std::invalid_argument("l2_q_operator: X must be d x d");
    const std::vector<double> ax = apply_operator(ens, x);
    std::vector<double> coeffs(ax.size());
    const double two_over_m = 2.0 / static_cast<double>(ens.m());
    for (std::size_t i = 0; i < ax.size(); ++i) coeffs[i] = two_over_m * (ax[i] - ens.s()[i]);
    const Matrix w = kernels::weighted_sum(ens.view(), coeffs.data());
    return add(w, transpose(w));
}

Matrix l2_gradient(const MeasurementEnsemble& ens, const Factor& u) {
    const std::vector<double> res = residual(ens, u);
    std::vector<double> coeffs(res.size());
    const double two_over_m = 2.0 / static_cast<double>(ens.m());
    for (std::size_t i = 0; i < res.size(); ++i) coeffs[i] = -two_over_m * res[i];
    const Matrix w = kernels::weighted_sum(ens.view(), coeffs.data());
    return matmul(add(w, transpose(w)), u.u);
}

} // namespace subgm
