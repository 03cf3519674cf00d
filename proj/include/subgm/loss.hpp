#pragma once

#include <optional>
#include <vector>

#include "subgm/measure.hpp"

namespace subgm {

/// Which element of the sign set at zero residual is used. Zero keeps exact
/// minimizers stationary; any value in [-1, 1] is admissible.
struct SignConvention {
    double at_zero = 0.0;
};

inline double sign_of(double x, const SignConvention& sc) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return sc.at_zero;
}

struct SubgradientResult {
    Matrix d;    // d x r' descent direction (Q + Q^T) U
    Matrix q;    // d x d sign-weighted measurement average
    double loss; // l1 objective at U
};

// (1/m) || y - A(U U^T) ||_1
double l1_loss(const MeasurementEnsemble& ens, const Factor& u);

// (1/m) sum_i Sign(<A_i, U U^T> - y_i) A_i, with Sign(0) -> sc.at_zero
Matrix q_matrix(const MeasurementEnsemble& ens, const Factor& u, const SignConvention& sc);

// loss, Q, and (Q + Q^T) U from a single residual pass
SubgradientResult l1_subgradient(const MeasurementEnsemble& ens, const Factor& u,
                                 const SignConvention& sc);

// sqrt(2/pi) ||U U^T - X*||_F
double expected_loss(const GroundTruth& gt, const Factor& u);

// 2 (U U^T - X*) U / ||U U^T - X*||_F; nullopt when the iterate already sits
// at the minimizer (Frobenius distance <= 1e-14), which is convergence, not a
// numeric fault
std::optional<Matrix> expected_subgradient(const GroundTruth& gt, const Factor& u);

// (1/m) || y - A(U U^T) ||^2
double l2_loss(const MeasurementEnsemble& ens, const Factor& u);

// gradient of l2_loss: [(2/m) sum_i (<A_i, U U^T> - y_i)(A_i + A_i^T)] U
Matrix l2_gradient(const MeasurementEnsemble& ens, const Factor& u);

// the bracketed d x d operator above, exposed for the verifier paths
Matrix l2_q_operator(const MeasurementEnsemble& ens, const Matrix& x);

} // namespace subgm
