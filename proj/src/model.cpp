#include "subgm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "subgm/linalg.hpp"
#include "subgm/rng.hpp"

namespace subgm {

double GroundTruth::xstar_fro() const {
    // eigenvalues give it directly
    double s = 0.0;
    for (double v : sigma) s += v * v;
    return std::sqrt(s);
}

namespace {

// Modified Gram-Schmidt with one re-orthogonalization pass. Columns of `m`
// are orthonormalized in place; returns false if a column is numerically
// dependent.
bool mgs_column(Matrix& m, int col, int against) {
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < against; ++j) {
            double dot = 0.0;
            for (int i = 0; i < m.rows(); ++i) dot += m(i, j) * m(i, col);
            for (int i = 0; i < m.rows(); ++i) m(i, col) -= dot * m(i, j);
        }
    }
    double norm = 0.0;
    for (int i = 0; i < m.rows(); ++i) norm += m(i, col) * m(i, col);
    norm = std::sqrt(norm);
    if (norm < 1e-8) return false;
    for (int i = 0; i < m.rows(); ++i) m(i, col) /= norm;
    return true;
}

std::vector<double> resolve_spectrum(int r, const SpectrumSpec& spec, std::uint64_t seed) {
    if (const auto* given = std::get_if<std::vector<double>>(&spec)) {
        if (static_cast<int>(given->size()) != r)
            throw std::invalid_argument("random_ground_truth: spectrum length != r");
        std::vector<double> s = *given;
        for (double v : s)
            if (!(v > 0.0)) throw std::invalid_argument("random_ground_truth: nonpositive eigenvalue");
        std::sort(s.begin(), s.end(), std::greater<>());
        return s;
    }
    const double kappa = std::get<double>(spec);
    if (!(kappa >= 1.0)) throw std::invalid_argument("random_ground_truth: condition target must be >= 1");
    if (r == 1) {
        if (kappa != 1.0)
            throw std::invalid_argument("random_ground_truth: rank-1 spectrum cannot have kappa > 1");
        return {1.0};
    }
    std::vector<double> s(r);
    s[0] = 1.0;
    s[r - 1] = 1.0 / kappa;
    rng::Stream stream(rng::substream(seed, rng::kTagSpectrum, 0));
    for (int i = 1; i + 1 < r; ++i)
        s[i] = std::exp(-std::log(kappa) * stream.next_unit());
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

} // namespace

Matrix orthonormal_complement(const Matrix& v) {
    const int d = v.rows();
    const int r = v.cols();
    Matrix basis(d, d);
    for (int j = 0; j < r; ++j)
        for (int i = 0; i < d; ++i) basis(i, j) = v(i, j);
    int have = r;
    // extend with canonical vectors, skipping dependent ones
    for (int e = 0; e < d && have < d; ++e) {
        for (int i = 0; i < d; ++i) basis(i, have) = (i == e) ? 1.0 : 0.0;
        if (mgs_column(basis, have, have)) ++have;
    }
    if (have < d) throw std::runtime_error("orthonormal_complement: completion failed");
    Matrix out(d, d - r);
    for (int j = r; j < d; ++j)
        for (int i = 0; i < d; ++i) out(i, j - r) = basis(i, j);
    return out;
}

GroundTruth random_ground_truth(int d, int r, const SpectrumSpec& spectrum, std::uint64_t seed) {
    if (r < 1 || r > d) throw std::invalid_argument("random_ground_truth: need 1 <= r <= d");
    GroundTruth gt;
    gt.d = d;
    gt.r = r;
    gt.seed = seed;
    gt.sigma = resolve_spectrum(r, spectrum, seed);

    // orthonormal basis from a seeded Gaussian block
    Matrix g(d, r);
    rng::Stream stream(rng::substream(seed, rng::kTagGroundTruth, 0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = stream.next_gaussian();
    for (int j = 0; j < r; ++j)
        if (!mgs_column(g, j, j))
            throw std::runtime_error("random_ground_truth: degenerate Gaussian draw");
    // fix each column's sign so the basis is reproducible
    for (int j = 0; j < r; ++j) {
        int lead = 0;
        double best = -1.0;
        for (int i = 0; i < d; ++i)
            if (std::fabs(g(i, j)) > best) {
                best = std::fabs(g(i, j));
                lead = i;
            }
        if (g(lead, j) < 0.0)
            for (int i = 0; i < d; ++i) g(i, j) = -g(i, j);
    }
    gt.v = g;
    gt.vperp = orthonormal_complement(g);

    gt.xstar = Matrix(d, d);
    for (int k = 0; k < r; ++k)
        for (int i = 0; i < d; ++i) {
            const double w = gt.sigma[k] * gt.v(i, k);
            for (int j = 0; j < d; ++j) gt.xstar(i, j) += w * gt.v(j, k);
        }
    return gt;
}

Matrix error_matrix(const Factor& u, const GroundTruth& gt) {
    if (u.dim() != gt.d) throw std::invalid_argument("error_matrix: dimension mismatch");
    Matrix delta = matmul_nt(u.u, u.u);
    for (int i = 0; i < gt.d; ++i)
        for (int j = 0; j < gt.d; ++j) delta(i, j) -= gt.xstar(i, j);
    return delta;
}

double reconstruction_error(const Factor& u, const GroundTruth& gt, NormKind norm) {
    const Matrix delta = error_matrix(u, gt);
    return norm == NormKind::Frobenius ? frobenius_norm(delta) : sym_operator_norm(delta);
}

namespace {

void write_values(std::ostream& os, const char* name, const double* v, std::size_t n) {
    os << name << ' ' << n << '\n';
    char buf[40];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%a", v[i]);
        os << buf << '\n';
    }
}

std::vector<double> read_values(std::istream& is, const std::string& name) {
    std::string key;
    std::size_t n = 0;
    if (!(is >> key >> n) || key != name)
        throw std::runtime_error("state file: expected section '" + name + "'");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string tok;
        if (!(is >> tok)) throw std::runtime_error("state file: truncated section '" + name + "'");
        v[i] = std::strtod(tok.c_str(), nullptr);
    }
    return v;
}

} // namespace

void save_ground_truth(const std::string& path, const GroundTruth& gt) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_ground_truth: cannot open " + path);
    os << "subgm-ground-truth 1\n";
    os << "d " << gt.d << "\nr " << gt.r << "\nseed " << gt.seed << '\n';
    write_values(os, "sigma", gt.sigma.data(), gt.sigma.size());
    write_values(os, "V", gt.v.data(), gt.v.size());
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_ground_truth: cannot open " + path);
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "subgm-ground-truth" || version != 1)
        throw std::runtime_error("load_ground_truth: bad header in " + path);
    GroundTruth gt;
    std::string key;
    is >> key >> gt.d;
    is >> key >> gt.r;
    is >> key >> gt.seed;
    gt.sigma = read_values(is, "sigma");
    std::vector<double> v = read_values(is, "V");
    gt.v = Matrix(gt.d, gt.r, std::move(v));
    gt.vperp = orthonormal_complement(gt.v);
    gt.xstar = Matrix(gt.d, gt.d);
    for (int k = 0; k < gt.r; ++k)
        for (int i = 0; i < gt.d; ++i) {
            const double w = gt.sigma[k] * gt.v(i, k);
            for (int j = 0; j < gt.d; ++j) gt.xstar(i, j) += w * gt.v(j, k);
        }
    return gt;
}

void save_factor(const std::string& path, const Factor& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_factor: cannot open " + path);
    os << "subgm-factor 1\n";
    os << "d " << f.dim() << "\nr_prime " << f.search_rank() << '\n';
    write_values(os, "U", f.u.data(), f.u.size());
}

Factor load_factor(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_factor: cannot open " + path);
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "subgm-factor" || version != 1)
        throw std::runtime_error("load_factor: bad header in " + path);
    int d = 0, rp = 0;
    std::string key;
    is >> key >> d;
    is >> key >> rp;
    std::vector<double> u = read_values(is, "U");
    return Factor{Matrix(d, rp, std::move(u))};
}

} // namespace subgm
