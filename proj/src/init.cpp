#include "subgm/init.hpp"

#include <cmath>
#include <stdexcept>

#include "subgm/linalg.hpp"

namespace subgm {

InitResult init_from_surrogate(const Matrix& c, int r_prime, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("spectral_init: alpha must be positive");
    if (r_prime < 1 || r_prime > c.rows())
        throw std::invalid_argument("spectral_init: need 1 <= r' <= d");
    const SymEig eig = sym_eig(c);

    InitResult out;
    out.c = c;
    out.kept.resize(r_prime);
    bool any_positive = false;
    for (int j = 0; j < r_prime; ++j) {
        out.kept[j] = std::max(0.0, eig.values[j]);
        any_positive = any_positive || out.kept[j] > 0.0;
    }
    out.degenerate = !any_positive;

    Matrix u0(c.rows(), r_prime);
    for (int j = 0; j < r_prime; ++j) {
        const double w = alpha * std::sqrt(out.kept[j]);
        for (int i = 0; i < c.rows(); ++i) u0(i, j) = w * eig.vectors(i, j);
    }
    out.u0 = Factor{std::move(u0)};
    return out;
}

InitResult spectral_init(const MeasurementEnsemble& ens, int r_prime, double alpha,
                         const SignConvention& sc) {
    std::vector<double> coeffs(ens.m());
    const double half_inv_m = 0.5 / static_cast<double>(ens.m());
    for (int i = 0; i < ens.m(); ++i) coeffs[i] = half_inv_m * sign_of(ens.y()[i], sc);
    const Matrix w = kernels::weighted_sum(ens.view(), coeffs.data());
    return init_from_surrogate(add(w, transpose(w)), r_prime, alpha);
}

InitResult oracle_spectral_init(const GroundTruth& gt, int r_prime, double alpha) {
    constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;
    const Matrix c = scale(gt.xstar, kSqrt2OverPi / gt.xstar_fro());
    return init_from_surrogate(c, r_prime, alpha);
}

} // namespace subgm
