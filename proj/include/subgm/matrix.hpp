#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace subgm {

/// Dense real matrix, row-major. Small sizes only (d <= ~256); everything is
/// value-semantic and kept deliberately simple.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}
    Matrix(int rows, int cols, std::vector<double> entries);

    static Matrix identity(int n);
    static Matrix diag(std::span<const double> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return a_.size(); }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    bool all_finite() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix transpose(const Matrix& x);
Matrix add(const Matrix& x, const Matrix& y);
Matrix sub(const Matrix& x, const Matrix& y);
Matrix scale(const Matrix& x, double c);

// z += c * x, in place
void axpy(Matrix& z, double c, const Matrix& x);

Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// trace inner product <x, y> = sum_ij x_ij y_ij
double inner(const Matrix& x, const Matrix& y);
double frobenius_norm(const Matrix& x);

// (x + x^T) / 2; x must be square
Matrix symmetric_part(const Matrix& x);

double max_abs(const Matrix& x);

// throws std::invalid_argument when x has a NaN/Inf entry
void require_finite(const Matrix& x, const std::string& what);

} // namespace subgm
