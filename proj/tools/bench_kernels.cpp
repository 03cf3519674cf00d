// Timing harness for the parallel measurement kernels against the serial
// reference, across problem sizes typical for the experiments.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "subgm/kernels.hpp"
#include "subgm/measure.hpp"
#include "subgm/model.hpp"

using namespace subgm;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

void bench_case(int d, int m, int reps) {
    const GroundTruth gt = random_ground_truth(d, 3 > d ? 1 : 3, 2.0, 7);
    const MeasurementEnsemble ens =
        MeasurementEnsemble::build(gt, m, NoiseModel::none(), 11);
    const kernels::SensingView view = ens.view();

    std::vector<double> out(m), coeffs(m);
    for (int i = 0; i < m; ++i) coeffs[i] = (i % 2 ? 1.0 : -1.0) / m;
    const Matrix& x = gt.xstar;

    const double apply_par = time_best_of(reps, [&] { kernels::apply_all(view, x.data(), out.data()); });
    const double apply_ser =
        time_best_of(reps, [&] { kernels::serial::apply_all(view, x.data(), out.data()); });
    volatile double sink = 0.0;
    const double wsum_par = time_best_of(reps, [&] {
        const Matrix w = kernels::weighted_sum(view, coeffs.data());
        sink = w(0, 0);
    });
    const double wsum_ser = time_best_of(reps, [&] {
        const Matrix w = kernels::serial::weighted_sum(view, coeffs.data());
        sink = w(0, 0);
    });
    (void)sink;

    const double flops = 2.0 * m * d * d;
    std::printf("%6d %7d | %9.3f %9.3f %6.2fx | %9.3f %9.3f %6.2fx\n", d, m,
                1e-6 * flops / apply_ser, 1e-6 * flops / apply_par, apply_ser / apply_par,
                1e-6 * flops / wsum_ser, 1e-6 * flops / wsum_par, wsum_ser / wsum_par);
}

} // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%6s %7s | %-29s | %-29s\n", "", "", "apply_all (MFLOP/s)",
                "weighted_sum (MFLOP/s)");
    std::printf("%6s %7s | %9s %9s %8s | %9s %9s %8s\n", "d", "m", "serial", "parallel",
                "speedup", "serial", "parallel", "speedup");
    bench_case(10, 2000, 5);
    bench_case(20, 500, 5);
    bench_case(20, 5000, 3);
    bench_case(64, 2000, 3);
    return 0;
}
