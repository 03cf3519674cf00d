#pragma once

#include <utility>
#include <vector>

#include "subgm/matrix.hpp"

namespace subgm {

/// Eigendecomposition of a symmetric matrix. Eigenvalues descending,
/// eigenvectors are the matching orthonormal columns of `vectors`. Each
/// eigenvector is flipped so that its first entry of largest magnitude is
/// nonnegative; together with the descending order this makes the
/// decomposition a deterministic function of the input bytes.
struct SymEig {
    std::vector<double> values;
    Matrix vectors;
};

// Cyclic Jacobi. Input must be square with relative asymmetry <= 1e-12; it is
// symmetrized as (X + X^T)/2 before iterating.
SymEig sym_eig(const Matrix& x);

// Largest singular value via the eigenvalues of the smaller Gram matrix.
double operator_norm(const Matrix& x);

// Power iteration on X^T X with a fixed deterministic start vector, for sizes
// where the full decomposition is not worth it.
double operator_norm_power(const Matrix& x, double tol = 1e-8, int max_sweeps = 500);

// Full decomposition up to 64 rows/cols, power iteration above.
double operator_norm_auto(const Matrix& x);

/// Orthogonal projection onto the row space of `s` and its complement, both
/// cols(s) x cols(s). Rank is decided by the singular values of `s`: anything
/// below 1e-10 * sigma_max is treated as zero, so a numerically vanishing
/// input yields P = 0, P_perp = I.
std::pair<Matrix, Matrix> row_space_projector(const Matrix& s);

// operator norm of a matrix known to be symmetric (skips the Gram detour)
double sym_operator_norm(const Matrix& x);

} // namespace subgm
