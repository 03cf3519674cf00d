#include "subgm/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace subgm {

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (rows_ < 0 || cols_ < 0 || a_.size() != static_cast<std::size_t>(rows_) * cols_)
        throw std::invalid_argument("Matrix: entry count does not match rows x cols");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diag(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = values[i];
    return m;
}

bool Matrix::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Matrix& x, const std::string& what) {
    if (!x.all_finite())
        throw std::invalid_argument(what + ": non-finite entry");
}

static void require_same_shape(const Matrix& x, const Matrix& y, const char* op) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

Matrix transpose(const Matrix& x) {
    Matrix t(x.cols(), x.rows());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) t(j, i) = x(i, j);
    return t;
}

Matrix add(const Matrix& x, const Matrix& y) {
    require_same_shape(x, y, "add");
    Matrix z = x;
    for (std::size_t k = 0; k < z.size(); ++k) z.data()[k] += y.data()[k];
    return z;
}

Matrix sub(const Matrix& x, const Matrix& y) {
    require_same_shape(x, y, "sub");
    Matrix z = x;
    for (std::size_t k = 0; k < z.size(); ++k) z.data()[k] -= y.data()[k];
    return z;
}

Matrix scale(const Matrix& x, double c) {
    Matrix z = x;
    for (std::size_t k = 0; k < z.size(); ++k) z.data()[k] *= c;
    return z;
}

void axpy(Matrix& z, double c, const Matrix& x) {
    require_same_shape(z, x, "axpy");
    for (std::size_t k = 0; k < z.size(); ++k) z.data()[k] += c * x.data()[k];
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: shape mismatch");
    Matrix c(a.cols(), b.cols());
    for (int k = 0; k < a.rows(); ++k) {
        for (int i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: shape mismatch");
    Matrix c(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
            c(i, j) = s;
        }
    return c;
}

double inner(const Matrix& x, const Matrix& y) {
    require_same_shape(x, y, "inner");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x.data()[k] * y.data()[k];
    return s;
}

double frobenius_norm(const Matrix& x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x.data()[k] * x.data()[k];
    return std::sqrt(s);
}

Matrix symmetric_part(const Matrix& x) {
    if (x.rows() != x.cols()) throw std::invalid_argument("symmetric_part: square input required");
    Matrix s(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) s(i, j) = 0.5 * (x(i, j) + x(j, i));
    return s;
}

double max_abs(const Matrix& x) {
    double m = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::fabs(x.data()[k]));
    return m;
}

} // namespace subgm
