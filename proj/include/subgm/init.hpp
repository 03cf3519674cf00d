#pragma once

#include <vector>

#include "subgm/loss.hpp"

namespace subgm {

struct InitResult {
    Factor u0;
    Matrix c;                 // d x d spectral surrogate
    std::vector<double> kept; // r' retained eigenvalues after clamping at 0
    bool degenerate = false;  // every retained eigenvalue was nonpositive
};

/// alpha-scaled spectral start: C = (1/m) sum_i Sign(y_i) (A_i + A_i^T)/2,
/// then U_0 = alpha * Q[:, :r'] * diag(sqrt(max(lambda, 0))).
InitResult spectral_init(const MeasurementEnsemble& ens, int r_prime, double alpha,
                         const SignConvention& sc);

// same clamping/scaling applied to an explicitly supplied surrogate
InitResult init_from_surrogate(const Matrix& c, int r_prime, double alpha);

/// Infinite-sample surrogate for noiseless Gaussian sensing,
/// sqrt(2/pi) X* / ||X*||_F, evaluated directly from the ground truth. Used by
/// the ensemble-free oracle mode.
InitResult oracle_spectral_init(const GroundTruth& gt, int r_prime, double alpha);

} // namespace subgm
