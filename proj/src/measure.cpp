#include "subgm/measure.hpp"

#include <cstring>
#include <stdexcept>

#include "subgm/rng.hpp"

namespace subgm {

void NoiseModel::validate() const {
    if (kind == Kind::Outlier || kind == Kind::Mixed) {
        if (!(p >= 0.0 && p < 1.0))
            throw std::invalid_argument("NoiseModel: corruption probability must be in [0, 1)");
        if (!(magnitude.value > 0.0))
            throw std::invalid_argument("NoiseModel: outlier magnitude parameter must be positive");
    }
    if (kind == Kind::Gaussian || kind == Kind::Mixed) {
        if (!(nu_g >= 0.0)) throw std::invalid_argument("NoiseModel: nu_g must be nonnegative");
    }
}

std::vector<double> realize_noise(const NoiseModel& noise, int m, std::uint64_t seed) {
    noise.validate();
    std::vector<double> s(m, 0.0);
    if (noise.kind == NoiseModel::Kind::None) return s;
    for (int i = 0; i < m; ++i) {
        rng::Stream stream(rng::substream(seed, rng::kTagNoise, static_cast<std::uint64_t>(i)));
        double v = 0.0;
        if (noise.kind == NoiseModel::Kind::Outlier || noise.kind == NoiseModel::Kind::Mixed) {
            const double u = stream.next_unit();
            if (u < noise.p) {
                if (noise.magnitude.kind == OutlierMagnitude::Kind::Gaussian)
                    v += noise.magnitude.value * stream.next_gaussian();
                else
                    v += (stream.next_unit() < 0.5 ? -1.0 : 1.0) * noise.magnitude.value;
            }
        }
        if (noise.kind == NoiseModel::Kind::Gaussian || noise.kind == NoiseModel::Kind::Mixed)
            v += noise.nu_g * stream.next_gaussian();
        s[i] = v;
    }
    return s;
}

MeasurementEnsemble MeasurementEnsemble::build_unattached(int d, int m, const NoiseModel& noise,
                                                          std::uint64_t seed, bool lazy) {
    if (m < 1) throw std::invalid_argument("MeasurementEnsemble: m must be >= 1");
    if (d < 1) throw std::invalid_argument("MeasurementEnsemble: d must be >= 1");
    MeasurementEnsemble ens;
    ens.m_ = m;
    ens.d_ = d;
    ens.seed_ = seed;
    ens.noise_ = noise;
    ens.lazy_ = lazy;
    if (!lazy) {
        ens.mats_.resize(static_cast<std::size_t>(m) * d * d);
        kernels::SensingView gen{m, d, nullptr, seed};
        const std::size_t n = static_cast<std::size_t>(d) * d;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < m; ++i) kernels::materialize_block(gen, i, ens.mats_.data() + n * i);
    }
    ens.s_ = realize_noise(noise, m, seed);
    ens.y_ = ens.s_; // no signal component
    return ens;
}

MeasurementEnsemble MeasurementEnsemble::build(const GroundTruth& gt, int m, const NoiseModel& noise,
                                               std::uint64_t seed, bool lazy) {
    MeasurementEnsemble ens = build_unattached(gt.d, m, noise, seed, lazy);
    std::vector<double> ax(m);
    kernels::apply_all(ens.view(), gt.xstar.data(), ax.data());
    for (int i = 0; i < m; ++i) ens.y_[i] = ax[i] + ens.s_[i];
    return ens;
}

MeasurementEnsemble MeasurementEnsemble::from_parts(std::vector<Matrix> matrices, std::vector<double> y,
                                                    std::vector<double> s) {
    if (matrices.empty()) throw std::invalid_argument("from_parts: need at least one matrix");
    const int d = matrices.front().rows();
    for (const Matrix& a : matrices)
        if (a.rows() != d || a.cols() != d) throw std::invalid_argument("from_parts: inconsistent shapes");
    if (y.size() != matrices.size() || s.size() != matrices.size())
        throw std::invalid_argument("from_parts: y/s length mismatch");
    MeasurementEnsemble ens;
    ens.m_ = static_cast<int>(matrices.size());
    ens.d_ = d;
    ens.mats_.resize(static_cast<std::size_t>(ens.m_) * d * d);
    const std::size_t n = static_cast<std::size_t>(d) * d;
    for (int i = 0; i < ens.m_; ++i)
        std::memcpy(ens.mats_.data() + n * i, matrices[i].data(), n * sizeof(double));
    ens.y_ = std::move(y);
    ens.s_ = std::move(s);
    return ens;
}

kernels::SensingView MeasurementEnsemble::view() const {
    return {m_, d_, lazy_ ? nullptr : mats_.data(), seed_};
}

Matrix MeasurementEnsemble::matrix_at(int i) const {
    if (i < 0 || i >= m_) throw std::out_of_range("matrix_at");
    Matrix a(d_, d_);
    kernels::materialize_block(view(), i, a.data());
    return a;
}

std::vector<double> apply_operator(const MeasurementEnsemble& ens, const Matrix& x) {
    if (x.rows() != ens.d() || x.cols() != ens.d())
        throw std::invalid_argument("apply_operator: X must be d x d");
    std::vector<double> out(ens.m());
    kernels::apply_all(ens.view(), x.data(), out.data());
    return out;
}

std::vector<double> residual(const MeasurementEnsemble& ens, const Factor& u) {
    if (u.dim() != ens.d()) throw std::invalid_argument("residual: dimension mismatch");
    const Matrix p = matmul_nt(u.u, u.u);
    std::vector<double> r(ens.m());
    kernels::apply_all(ens.view(), p.data(), r.data());
    for (int i = 0; i < ens.m(); ++i) r[i] = ens.y()[i] - r[i];
    return r;
}

} // namespace subgm
