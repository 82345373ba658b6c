#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "epsqca/decay.hpp"
#include "epsqca/parallel.hpp"
#include "epsqca/patch.hpp"
#include "epsqca/spinchain.hpp"

namespace epsqca {

/// The two staggered partitions of the chain. P1 tiles [0, n) with blocks of
/// `block_size` sites (a short remainder block at the right end); P2 holds
/// the same blocks translated right by block_size/2 and clipped, plus the
/// leading stub. Each interior P1 boundary is a cut, patched by a unitary on
/// the P2 block that straddles it.
struct CutPlan {
    int n = 0;
    int block_size = 0;
    std::vector<SiteInterval> partition_p1;
    std::vector<SiteInterval> partition_p2;
    std::vector<int> cuts;

    /// The P2 block covering both bridging sites of `cut`.
    SiteInterval patch_window(int cut) const {
        for (const auto &block : partition_p2)
            if (block.contains(SiteInterval{cut - 1, cut + 1})) return block;
        throw ComputationError("no staggered block covers cut " + std::to_string(cut));
    }

    /// Union of the two P1 blocks meeting at `cut`.
    SiteInterval pair_interval(int cut) const {
        for (std::size_t k = 0; k + 1 < partition_p1.size(); ++k)
            if (partition_p1[k].last == cut)
                return SiteInterval::hull(partition_p1[k], partition_p1[k + 1]);
        throw ComputationError("cut " + std::to_string(cut) + " is not a block boundary");
    }
};

inline CutPlan plan_cuts(int n, int block_size) {
    if (block_size < 2)
        throw InputError("plan_cuts: block size " + std::to_string(block_size) +
                         " cannot hold a bridging term");
    if (n < 2) throw InputError("plan_cuts: need n >= 2");
    CutPlan plan;
    plan.n = n;
    plan.block_size = std::min(block_size, n);
    const int w = plan.block_size;

    for (int a = 0; a < n; a += w)
        plan.partition_p1.push_back({a, std::min(a + w, n)});
    for (std::size_t k = 0; k + 1 < plan.partition_p1.size(); ++k)
        plan.cuts.push_back(plan.partition_p1[k].last);

    const int shift = w / 2;
    if (shift > 0) plan.partition_p2.push_back({0, shift});
    for (int a = shift; a < n; a += w)
        plan.partition_p2.push_back({a, std::min(a + w, n)});
    return plan;
}

struct LayeredGate {
    SiteInterval block;
    DenseOperator gate;  // supported exactly on block
};

struct PerCutError {
    int cut = 0;
    SiteInterval window;
    std::optional<double> error_exact;
    double error_bound = 0.0;
    long integrator_steps = 0;
};

/// Two-layer block circuit approximating e^{itH}: a layer of block
/// propagators on P1 applied after a layer of patch unitaries on P2.
/// Contraction order is (u_layer) * (v_layer).
struct LayeredCircuit {
    int n = 0;
    double t = 0.0;
    int block_size = 0;
    std::vector<LayeredGate> u_layer;
    std::vector<LayeredGate> v_layer;
    std::vector<PerCutError> per_cut_errors;
};

struct QcaOptions {
    /// Measure each cut's exact patch error whenever the adjacent block pair
    /// fits the dense cap. The bound column always uses the analytic series
    /// integral; direct patch_windowed calls are the quadrature route.
    bool want_error_exact = true;
};

namespace detail {

inline void check_gate_unitary(const DenseOperator &gate, const std::string &name) {
    const Matrix &u = gate.matrix();
    const double defect =
        spectral_norm_dense(Matrix(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())));
    if (defect > 1e-8)
        throw ComputationError(name + " on " + gate.support().str() +
                               " failed the unitarity check (defect " + std::to_string(defect) +
                               ")");
}

} // namespace detail

/// Builds the circuit: block propagators on P1, and one windowed patch per
/// cut computed against the chain restricted to the two adjacent P1 blocks
/// (every patch is local and they are independent across cuts).
inline LayeredCircuit build_qca(const SpinChainHamiltonian &h, double t, int block_size,
                                double tol, const QcaOptions &opts = {}) {
    const int n = h.size();
    if (block_size < 2) throw InputError("build_qca: block size must be at least 2");
    if (std::min(block_size, n) > kMaxDenseSites)
        throw ResourceError("build_qca: gates on " + std::to_string(block_size) +
                            " sites exceed the dense cap");
    const CutPlan plan = plan_cuts(n, block_size);

    LayeredCircuit circuit;
    circuit.n = n;
    circuit.t = t;
    circuit.block_size = plan.block_size;

    for (const auto &block : plan.partition_p1) {
        DenseOperator gate = block.size() >= 2
                                 ? propagator(build_dense_hamiltonian(h, block), t)
                                 : DenseOperator::identity(block);
        detail::check_gate_unitary(gate, "u-layer gate");
        circuit.u_layer.push_back({block, std::move(gate)});
    }

    struct CutResult {
        LayeredGate gate;
        PerCutError error;
    };
    std::vector<CutResult> patched = parallel_map<CutResult>(
        plan.cuts.size(), [&](std::size_t k) {
            const int cut = plan.cuts[k];
            const SiteInterval pair = plan.pair_interval(cut);
            const SiteInterval window = plan.patch_window(cut);
            const SpinChainHamiltonian sub = h.restricted(pair);
            const CutSpec local_cut(sub, cut - pair.first);
            PatchOptions patch_options;
            patch_options.bound_method = ErrorBoundMethod::analytic;
            patch_options.want_error_exact =
                opts.want_error_exact && pair.size() <= kMaxDenseSites;
            const PatchResult pr = patch_windowed(sub, local_cut, window.shifted(-pair.first), t,
                                                  tol, patch_options);
            DenseOperator gate = pr.v_windowed.shifted(pair.first);
            detail::check_gate_unitary(gate, "v-layer gate (cut " + std::to_string(cut) + ")");
            return CutResult{{window, std::move(gate)},
                             {cut, window, pr.error_exact, pr.error_bound, pr.integrator_steps}};
        });
    for (auto &cr : patched) {
        circuit.v_layer.push_back(std::move(cr.gate));
        circuit.per_cut_errors.push_back(std::move(cr.error));
    }
    return circuit;
}

namespace detail {

/// Tensor product of disjoint gates over [0, n), identity on uncovered sites.
inline Matrix assemble_layer(const std::vector<LayeredGate> &gates, int n) {
    std::vector<const LayeredGate *> sorted;
    for (const auto &g : gates) sorted.push_back(&g);
    std::sort(sorted.begin(), sorted.end(),
              [](const LayeredGate *a, const LayeredGate *b) {
                  return a->block.first < b->block.first;
              });
    Matrix acc = Matrix::Identity(1, 1);
    int pos = 0;
    for (const auto *g : sorted) {
        if (g->block.first < pos)
            throw InputError("layer gates overlap at site " + std::to_string(g->block.first));
        if (g->block.first > pos)
            acc = kron(acc, Matrix::Identity(dense_dim(g->block.first - pos),
                                             dense_dim(g->block.first - pos)));
        acc = kron(acc, g->gate.matrix());
        pos = g->block.last;
    }
    if (pos < n) acc = kron(acc, Matrix::Identity(dense_dim(n - pos), dense_dim(n - pos)));
    return acc;
}

} // namespace detail

/// Dense contraction of the circuit, for oracle comparisons.
inline DenseOperator contract_circuit(const LayeredCircuit &circuit) {
    require_dense_sites(circuit.n, "contract_circuit");
    const Matrix u = detail::assemble_layer(circuit.u_layer, circuit.n);
    const Matrix v = detail::assemble_layer(circuit.v_layer, circuit.n);
    return DenseOperator(SiteInterval{0, circuit.n}, u * v);
}

/// Window size needed for target accuracy eps at time t on an n-site chain:
/// ceil(c0 |t| + c1 ln(n/eps)), clamped to [2, n].
inline int window_size_for(int n, double t, double epsilon, const DecayConstants &constants) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw InputError("window_size_for: epsilon must lie in (0, 1]");
    if (n < 2) throw InputError("window_size_for: need n >= 2");
    const double raw = constants.c0() * std::abs(t) +
                       constants.c1() * std::log(static_cast<double>(n) / epsilon);
    const int w = static_cast<int>(std::ceil(raw));
    return std::clamp(w, 2, n);
}

} // namespace epsqca
