#pragma once

#include <optional>
#include <vector>

#include "subgm/model.hpp"

namespace subgm {

/// Split of the iterate against the ground-truth eigenbasis:
/// U = V S + Vperp E with E = F + G, where F lives on the row space of S and
/// G on its orthogonal complement.
struct Decomposition {
    Matrix s; // r x r'
    Matrix e; // (d - r) x r'
    Matrix f; // (d - r) x r'
    Matrix g; // (d - r) x r'
};

Decomposition decompose(const GroundTruth& gt, const Factor& u);

/// Per-iteration metrics. Operator norms throughout; eig_signal holds the r
/// eigenvalues of S S^T in descending order.
struct IterateRecord {
    long t = 0;
    double loss = 0.0;
    double eta_t = 0.0;
    double err_op = 0.0;            // ||U U^T - X*||
    double err_fro = 0.0;           // ||U U^T - X*||_F
    double signal = 0.0;            // ||Sigma - S S^T||
    double cross = 0.0;             // ||S E^T||
    double residual = 0.0;          // ||E E^T||
    double f_term = 0.0;            // ||F F^T||
    double g_term = 0.0;            // ||G G^T||
    double lambda_min_signal = 0.0; // lambda_min(S S^T)
    std::vector<double> eig_signal;
};

IterateRecord record(const GroundTruth& gt, const Factor& u, long t, double loss, double eta_t);

/// Heuristic phase boundaries of a recorded trajectory. The first phase ends
/// when lambda_min(S S^T) reaches 0.9 sigma_r; the linear phase ends when the
/// windowed decay rate of err_op drops below half the running median of the
/// rates seen since the first boundary. Either may be absent.
struct PhaseBoundaries {
    std::optional<long> eigenvalue_learning_end;
    std::optional<long> global_convergence_end;
};

PhaseBoundaries detect_phases(const std::vector<IterateRecord>& records, const GroundTruth& gt);

} // namespace subgm
