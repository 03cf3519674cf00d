#pragma once

#include <cstdint>
#include <vector>

#include "subgm/kernels.hpp"
#include "subgm/matrix.hpp"
#include "subgm/model.hpp"

namespace subgm {

/// How the nonzero entries of an outlier noise vector are drawn: zero-mean
/// Gaussian with std sigma, or a symmetric point mass at +-c.
struct OutlierMagnitude {
    enum class Kind { Gaussian, PointMass };
    Kind kind = Kind::Gaussian;
    double value = 10.0; // sigma_out or c
};

struct NoiseModel {
    enum class Kind { None, Outlier, Gaussian, Mixed };
    Kind kind = Kind::None;
    double p = 0.0;               // corruption probability (Outlier/Mixed)
    OutlierMagnitude magnitude{}; // Outlier/Mixed
    double nu_g = 0.0;            // Gaussian/Mixed std dev

    void validate() const;
    static NoiseModel none() { return {}; }
    static NoiseModel outlier(double p, OutlierMagnitude mag = {}) {
        NoiseModel n;
        n.kind = Kind::Outlier;
        n.p = p;
        n.magnitude = mag;
        return n;
    }
    static NoiseModel gaussian(double nu_g) {
        NoiseModel n;
        n.kind = Kind::Gaussian;
        n.nu_g = nu_g;
        return n;
    }
    static NoiseModel mixed(double p, OutlierMagnitude mag, double nu_g) {
        NoiseModel n;
        n.kind = Kind::Mixed;
        n.p = p;
        n.magnitude = mag;
        n.nu_g = nu_g;
        return n;
    }
};

/// m Gaussian sensing matrices, a realized noise vector s, and the
/// measurements y_i = <A_i, X*> + s_i. Matrices are stored by default; with
/// `lazy` they are regenerated from per-index substreams on every use, which
/// is bit-identical to the stored mode. Immutable after construction.
class MeasurementEnsemble {
public:
    static MeasurementEnsemble build(const GroundTruth& gt, int m, const NoiseModel& noise,
                                     std::uint64_t seed, bool lazy = false);

    // sensing matrices and s only; noise realization without any ground truth,
    // for the verifier paths that probe arbitrary directions
    static MeasurementEnsemble build_unattached(int d, int m, const NoiseModel& noise,
                                                std::uint64_t seed, bool lazy = false);

    // explicit matrices/noise for handcrafted cases
    static MeasurementEnsemble from_parts(std::vector<Matrix> matrices, std::vector<double> y,
                                          std::vector<double> s);

    int m() const { return m_; }
    int d() const { return d_; }
    std::uint64_t seed() const { return seed_; }
    const NoiseModel& noise_model() const { return noise_; }
    bool lazy() const { return lazy_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& s() const { return s_; }

    kernels::SensingView view() const;
    Matrix matrix_at(int i) const;

private:
    int m_ = 0;
    int d_ = 0;
    std::uint64_t seed_ = 0;
    NoiseModel noise_{};
    bool lazy_ = false;
    std::vector<double> mats_; // empty in lazy mode
    std::vector<double> s_;
    std::vector<double> y_;
};

// noise vector for (model, seed); index i uses its own substream
std::vector<double> realize_noise(const NoiseModel& noise, int m, std::uint64_t seed);

// [<A_1, X>, ..., <A_m, X>]
std::vector<double> apply_operator(const MeasurementEnsemble& ens, const Matrix& x);

// y - A(U U^T)
std::vector<double> residual(const MeasurementEnsemble& ens, const Factor& u);

} // namespace subgm
