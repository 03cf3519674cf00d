#include "subgm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subgm {

namespace {

// off-diagonal Frobenius mass
double off_norm(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

void apply_sign_convention(Matrix& q) {
    for (int j = 0; j < q.cols(); ++j) {
        int lead = 0;
        double best = -1.0;
        for (int i = 0; i < q.rows(); ++i) {
            const double m = std::fabs(q(i, j));
            if (m > best) {
                best = m;
                lead = i;
            }
        }
        if (q(lead, j) < 0.0)
            for (int i = 0; i < q.rows(); ++i) q(i, j) = -q(i, j);
    }
}

} // namespace

SymEig sym_eig(const Matrix& x) {
    if (x.rows() != x.cols()) throw std::invalid_argument("sym_eig: square input required");
    require_finite(x, "sym_eig");
    const int n = x.rows();

    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) asym = std::max(asym, std::fabs(x(i, j) - x(j, i)));
    if (asym > 1e-12 * (1.0 + max_abs(x)))
        throw std::invalid_argument("sym_eig: input asymmetric beyond tolerance");

    Matrix a = symmetric_part(x);
    Matrix q = Matrix::identity(n);

    const double stop = 1e-14 * (1.0 + frobenius_norm(a));
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_norm(a) > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int qi = p + 1; qi < n; ++qi) {
                const double apq = a(p, qi);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(qi, qi);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, qi);
                    a(k, p) = c * akp - s * akq;
                    a(k, qi) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(qi, k);
                    a(p, k) = c * apk - s * aqk;
                    a(qi, k) = s * apk + c * aqk;
                }
                a(p, qi) = 0.0;
                a(qi, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double qkp = q(k, p);
                    const double qkq = q(k, qi);
                    q(k, p) = c * qkp - s * qkq;
                    q(k, qi) = s * qkp + c * qkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i) > a(j, j); });

    SymEig out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int jj = 0; jj < n; ++jj) {
        const int src = order[jj];
        out.values[jj] = a(src, src);
        for (int i = 0; i < n; ++i) out.vectors(i, jj) = q(i, src);
    }
    apply_sign_convention(out.vectors);
    return out;
}

double sym_operator_norm(const Matrix& x) {
    if (x.rows() == 0) return 0.0;
    if (x.rows() == 1) return std::fabs(x(0, 0));
    const SymEig e = sym_eig(x);
    return std::max(std::fabs(e.values.front()), std::fabs(e.values.back()));
}

double operator_norm(const Matrix& x) {
    require_finite(x, "operator_norm");
    if (x.size() == 0) return 0.0;
    // eigenvalues of the smaller Gram matrix
    const Matrix gram = (x.rows() <= x.cols()) ? matmul_nt(x, x) : matmul_tn(x, x);
    if (gram.rows() == 1) return std::sqrt(std::max(0.0, gram(0, 0)));
    const SymEig e = sym_eig(gram);
    return std::sqrt(std::max(0.0, e.values.front()));
}

double operator_norm_power(const Matrix& x, double tol, int max_sweeps) {
    require_finite(x, "operator_norm_power");
    const int n = x.cols();
    if (n == 0 || x.rows() == 0) return 0.0;
    // fixed start with unequal components so it is never orthogonal to the
    // leading eigenvector by symmetry
    std::vector<double> v(n);
    double nv = 0.0;
    for (int i = 0; i < n; ++i) {
        v[i] = 1.0 + static_cast<double>(i) / (n + 1.0);
        nv += v[i] * v[i];
    }
    nv = std::sqrt(nv);
    for (double& c : v) c /= nv;

    std::vector<double> xv(x.rows()), w(n);
    double lambda = 0.0;
    for (int it = 0; it < max_sweeps; ++it) {
        for (int i = 0; i < x.rows(); ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += x(i, j) * v[j];
            xv[i] = s;
        }
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < x.rows(); ++i) s += x(i, j) * xv[i];
            w[j] = s;
        }
        double nw = 0.0;
        for (double c : w) nw += c * c;
        nw = std::sqrt(nw);
        if (nw == 0.0) return 0.0;
        const double prev = lambda;
        lambda = nw; // Rayleigh quotient of X^T X at unit v
        for (int j = 0; j < n; ++j) v[j] = w[j] / nw;
        if (it > 0 && std::fabs(lambda - prev) <= tol * std::max(1.0, lambda)) break;
    }
    return std::sqrt(lambda);
}

double operator_norm_auto(const Matrix& x) {
    if (std::max(x.rows(), x.cols()) <= 64) return operator_norm(x);
    return operator_norm_power(x);
}

std::pair<Matrix, Matrix> row_space_projector(const Matrix& s) {
    require_finite(s, "row_space_projector");
    const int n = s.cols();
    Matrix p(n, n);
    if (s.rows() > 0 && n > 0) {
        const Matrix gram = matmul_nt(s, s); // rows x rows
        const SymEig e = sym_eig(gram);
        const double smax = std::sqrt(std::max(0.0, e.values.empty() ? 0.0 : e.values.front()));
        const double cut = 1e-10 * smax;
        for (int k = 0; k < s.rows(); ++k) {
            const double sv = std::sqrt(std::max(0.0, e.values[k]));
            if (sv <= cut || sv == 0.0) continue;
            // direction S^T u_k / sigma_k in row space
            std::vector<double> dir(n, 0.0);
            for (int i = 0; i < s.rows(); ++i) {
                const double uik = e.vectors(i, k);
                if (uik == 0.0) continue;
                for (int j = 0; j < n; ++j) dir[j] += uik * s(i, j);
            }
            for (double& c : dir) c /= sv;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) p(i, j) += dir[i] * dir[j];
        }
    }
    Matrix pperp = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pperp(i, j) -= p(i, j);
    return {std::move(p), std::move(pperp)};
}

} // namespace subgm
