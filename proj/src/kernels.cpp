#include "subgm/kernels.hpp"

#include <cstring>

#include "subgm/rng.hpp"

namespace subgm::kernels {

void materialize_block(const SensingView& view, int i, double* buf) {
    const std::size_t n = static_cast<std::size_t>(view.d) * view.d;
    if (view.stored) {
        std::memcpy(buf, view.stored + n * i, n * sizeof(double));
        return;
    }
    rng::Stream stream(rng::substream(view.seed, rng::kTagMeasurementMatrix, static_cast<std::uint64_t>(i)));
    for (std::size_t k = 0; k < n; ++k) buf[k] = stream.next_gaussian();
}

namespace {

double block_inner(const double* a, const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * x[k];
    return s;
}

} // namespace

void apply_all(const SensingView& view, const double* x, double* out) {
    const std::size_t n = static_cast<std::size_t>(view.d) * view.d;
    if (view.stored) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < view.m; ++i) out[i] = block_inner(view.stored + n * i, x, n);
    } else {
#pragma omp parallel
        {
            std::vector<double> buf(n);
#pragma omp for schedule(static)
            for (int i = 0; i < view.m; ++i) {
                materialize_block(view, i, buf.data());
                out[i] = block_inner(buf.data(), x, n);
            }
        }
    }
}

Matrix weighted_sum(const SensingView& view, const double* coeffs) {
    const std::size_t n = static_cast<std::size_t>(view.d) * view.d;
    const int nchunks = (view.m + kChunk - 1) / kChunk;
    std::vector<double> partials(static_cast<std::size_t>(nchunks) * n, 0.0);

#pragma omp parallel
    {
        std::vector<double> buf(view.stored ? 0 : n);
#pragma omp for schedule(static)
        for (int c = 0; c < nchunks; ++c) {
            double* acc = partials.data() + static_cast<std::size_t>(c) * n;
            const int lo = c * kChunk;
            const int hi = std::min(view.m, lo + kChunk);
            for (int i = lo; i < hi; ++i) {
                const double w = coeffs[i];
                if (w == 0.0) continue;
                const double* a;
                if (view.stored) {
                    a = view.stored + n * i;
                } else {
                    materialize_block(view, i, buf.data());
                    a = buf.data();
                }
                for (std::size_t k = 0; k < n; ++k) acc[k] += w * a[k];
            }
        }
    }

    Matrix out(view.d, view.d);
    for (int c = 0; c < nchunks; ++c) {
        const double* acc = partials.data() + static_cast<std::size_t>(c) * n;
        for (std::size_t k = 0; k < n; ++k) out.data()[k] += acc[k];
    }
    return out;
}

namespace serial {

void apply_all(const SensingView& view, const double* x, double* out) {
    const std::size_t n = static_cast<std::size_t>(view.d) * view.d;
    std::vector<double> buf(view.stored ? 0 : n);
    for (int i = 0; i < view.m; ++i) {
        const double* a;
        if (view.stored) {
            a = view.stored + n * i;
        } else {
            materialize_block(view, i, buf.data());
            a = buf.data();
        }
        out[i] = block_inner(a, x, n);
    }
}

Matrix weighted_sum(const SensingView& view, const double* coeffs) {
    const std::size_t n = static_cast<std::size_t>(view.d) * view.d;
    Matrix out(view.d, view.d);
    std::vector<double> buf(view.stored ? 0 : n);
    for (int i = 0; i < view.m; ++i) {
        const double w = coeffs[i];
        if (w == 0.0) continue;
        const double* a;
        if (view.stored) {
            a = view.stored + n * i;
        } else {
            materialize_block(view, i, buf.data());
            a = buf.data();
        }
        for (std::size_t k = 0; k < n; ++k) out.data()[k] += w * a[k];
    }
    return out;
}

} // namespace serial

} // namespace subgm::kernels
