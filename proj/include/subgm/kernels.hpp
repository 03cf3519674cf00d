#pragma once

#include <cstdint>
#include <vector>

#include "subgm/matrix.hpp"

namespace subgm::kernels {

/// What the hot loops need to know about a sensing ensemble: either a pointer
/// to the stored m x (d*d) blocks, or the substream root to regenerate block i
/// on the fly (lazy mode). Both modes produce bit-identical matrices.
struct SensingView {
    int m = 0;
    int d = 0;
    const double* stored = nullptr; // nullptr => lazy
    std::uint64_t seed = 0;
};

// regenerate block i into buf (d*d doubles); works in both modes
void materialize_block(const SensingView& view, int i, double* buf);

// out[i] = <A_i, X> for all i. Parallel over i; each slot written once, so the
// result is independent of scheduling.
void apply_all(const SensingView& view, const double* x, double* out);

// sum_i coeffs[i] * A_i with a fixed chunk decomposition: chunk partials are
// accumulated independently and combined in chunk order, so the result is
// bit-identical for any thread count.
Matrix weighted_sum(const SensingView& view, const double* coeffs);

// chunk width of the deterministic reduction (fixed, not tied to threads)
inline constexpr int kChunk = 256;

namespace serial {

// straight single-pass loops, kept as the reference the parallel kernels are
// tested and benchmarked against
void apply_all(const SensingView& view, const double* x, double* out);
Matrix weighted_sum(const SensingView& view, const double* coeffs);

} // namespace serial

} // namespace subgm::kernels
