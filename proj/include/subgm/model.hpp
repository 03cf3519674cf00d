#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "subgm/matrix.hpp"

namespace subgm {

/// Rank-r PSD target X* = V diag(sigma) V^T together with an orthonormal
/// complement of V. Immutable after construction.
struct GroundTruth {
    int d = 0;
    int r = 0;
    Matrix v;                  // d x r, orthonormal columns
    Matrix vperp;              // d x (d - r), orthonormal complement
    std::vector<double> sigma; // descending, strictly positive
    std::uint64_t seed = 0;
    Matrix xstar;              // cached V diag(sigma) V^T

    double sigma1() const { return sigma.front(); }
    double sigma_r() const { return sigma.back(); }
    double kappa() const { return sigma.front() / sigma.back(); }
    double xstar_fro() const;
};

/// Factored iterate U of the low-rank parameterization X = U U^T.
struct Factor {
    Matrix u; // d x r'
    int search_rank() const { return u.cols(); }
    int dim() const { return u.rows(); }
};

/// Either explicit eigenvalues or a condition-number target. For a target
/// kappa the spectrum is pinned at sigma_1 = 1 and sigma_r = 1/kappa with the
/// interior values log-uniform in [1/kappa, 1], so kappa is exact and the
/// eigenvalues are spread out.
using SpectrumSpec = std::variant<std::vector<double>, double>;

GroundTruth random_ground_truth(int d, int r, const SpectrumSpec& spectrum, std::uint64_t seed);

enum class NormKind { Operator, Frobenius };

// ||U U^T - X*|| in the requested norm
double reconstruction_error(const Factor& u, const GroundTruth& gt, NormKind norm);

// U U^T - X*
Matrix error_matrix(const Factor& u, const GroundTruth& gt);

// deterministic orthonormal completion of a d x r orthonormal basis
Matrix orthonormal_complement(const Matrix& v);

// Text container with hexfloat payload; round-trips bit-exactly.
void save_ground_truth(const std::string& path, const GroundTruth& gt);
GroundTruth load_ground_truth(const std::string& path);
void save_factor(const std::string& path, const Factor& f);
Factor load_factor(const std::string& path);

} // namespace subgm
