#include "subgm/diag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subgm/linalg.hpp"

namespace subgm {

Decomposition decompose(const GroundTruth& gt, const Factor& u) {
    if (u.dim() != gt.d) throw std::invalid_argument("decompose: dimension mismatch");
    Decomposition out;
    out.s = matmul_tn(gt.v, u.u);
    out.e = matmul_tn(gt.vperp, u.u);
    const auto [p, pperp] = row_space_projector(out.s);
    out.f = matmul(out.e, p);
    out.g = matmul(out.e, pperp);
    return out;
}

IterateRecord record(const GroundTruth& gt, const Factor& u, long t, double loss, double eta_t) {
    const Decomposition dec = decompose(gt, u);
    IterateRecord rec;
    rec.t = t;
    rec.loss = loss;
    rec.eta_t = eta_t;

    const Matrix delta = error_matrix(u, gt);
    rec.err_op = sym_operator_norm(delta);
    rec.err_fro = frobenius_norm(delta);

    Matrix sst = matmul_nt(dec.s, dec.s);
    const SymEig sig_eig = sym_eig(sst);
    rec.eig_signal = sig_eig.values;
    rec.lambda_min_signal = sig_eig.values.back();

    for (int i = 0; i < gt.r; ++i) sst(i, i) -= gt.sigma[i]; // S S^T is in the V basis
    rec.signal = sym_operator_norm(sst);
    rec.cross = operator_norm(matmul_nt(dec.s, dec.e));
    rec.residual = sym_operator_norm(matmul_nt(dec.e, dec.e));
    rec.f_term = sym_operator_norm(matmul_nt(dec.f, dec.f));
    rec.g_term = sym_operator_norm(matmul_nt(dec.g, dec.g));
    return rec;
}

PhaseBoundaries detect_phases(const std::vector<IterateRecord>& records, const GroundTruth& gt) {
    PhaseBoundaries out;
    if (records.empty()) throw std::invalid_argument("detect_phases: empty trajectory");

    const double lambda_gate = 0.9 * gt.sigma_r();
    std::size_t learn_idx = records.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].lambda_min_signal >= lambda_gate) {
            out.eigenvalue_learning_end = records[i].t;
            learn_idx = i;
            break;
        }
    }
    if (!out.eigenvalue_learning_end) return out;

    // windowed decay rate of err_op after the first boundary, compared against
    // the running median of the rates seen so far in the linear phase
    constexpr std::size_t window = 20;
    std::vector<double> rates;
    for (std::size_t i = learn_idx + window; i < records.size(); ++i) {
        const IterateRecord& a = records[i - window];
        const IterateRecord& b = records[i];
        if (!(a.err_op > 0.0) || !(b.err_op > 0.0) || b.t == a.t) continue;
        const double rate = std::log(a.err_op / b.err_op) / static_cast<double>(b.t - a.t);
        if (!rates.empty()) {
            std::vector<double> sorted = rates;
            std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
            const double median = sorted[sorted.size() / 2];
            if (median > 0.0 && rate < 0.5 * median) {
                out.global_convergence_end = b.t;
                break;
            }
        }
        rates.push_back(rate);
    }
    return out;
}

} // namespace subgm
