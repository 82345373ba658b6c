#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "epsqca/lieb_robinson.hpp"
#include "epsqca/spinchain.hpp"

namespace epsqca {

/// A chain bisected between sites cut-1 and cut, together with the one
/// interaction term that spans the boundary.
struct CutSpec {
    int cut;
    LocalTerm bridge;
    SiteInterval left_block;
    SiteInterval right_block;

    CutSpec(const SpinChainHamiltonian &h, int cut_)
        : cut(cut_), bridge(h.bridge_term(cut_)), left_block{0, cut_},
          right_block{cut_, h.size()} {}
};

/// The correction unitary relating the full propagator to the two decoupled
/// block propagators: V(t) = e^{-it(H - h_I)} e^{itH}, where H - h_I is
/// exactly the sum of both blocks' interior terms.
inline DenseOperator patch_exact(const SpinChainHamiltonian &h, const CutSpec &cut, double t) {
    const SiteInterval chain{0, h.size()};
    require_dense_sites(h.size(), "patch_exact");
    const DenseOperator full = build_dense_hamiltonian(h, chain);
    const DenseOperator decoupled = full - term_as_operator(cut.bridge).embedded(chain);
    return propagator(decoupled, -t) * propagator(full, t);
}

/// Effective generator of the patch: the bridging term in the Heisenberg
/// picture. Full chain when `window` is empty, otherwise evolved under the
/// window-restricted Hamiltonian and supported on the window alone.
inline DenseOperator generator_L(const SpinChainHamiltonian &h, const CutSpec &cut, double s,
                                 std::optional<SiteInterval> window = std::nullopt) {
    const SiteInterval region = window.value_or(SiteInterval{0, h.size()});
    const DenseOperator bridge = term_as_operator(cut.bridge);
    if (!region.contains(bridge.support()))
        throw InputError("generator window " + region.str() +
                         " excludes the bridging term at cut " + std::to_string(cut.cut));
    require_dense_sites(region.size(), "generator_L");
    return heisenberg_evolve(bridge, build_dense_hamiltonian(h, region), s);
}

// ---------------------------------------------------------------------------
// Time-ordered integration
// ---------------------------------------------------------------------------
//
// V(t) solves dV/dt = i V G(t), V(0) = I; the generator multiplies on the
// right, so the product runs earliest factor leftmost:
//   V(t) = lim prod_{j=0}^{m-1} exp(i G(s_j) t/m),  s_j = (j + 1/2) t/m.
// The midpoint sampling makes each level second order; the step is halved
// until two consecutive levels agree to `tol` in operator norm.

struct IntegrationResult {
    Matrix matrix;
    long steps = 0;
};

namespace detail {

constexpr int kIntegratorBaseSteps = 16;

inline ComputationError integrator_divergence(double distance, long steps) {
    return ComputationError("time-ordered integration did not converge: last two iterates differ "
                            "by " +
                            std::to_string(distance) + " at " + std::to_string(steps) + " steps");
}

/// Halving loop shared by the integrator variants. The first comparison also
/// estimates the second-order convergence constant and jumps the step count
/// near the target, so converged levels are reached in O(1) evaluations
/// instead of walking every doubling.
template <typename LevelFn>
IntegrationResult run_step_halving(const LevelFn &level, double tol, int max_halvings) {
    long m = kIntegratorBaseSteps;
    Matrix previous = level(m);
    double distance = std::numeric_limits<double>::infinity();
    bool jumped = false;
    for (int halving = 0; halving < max_halvings; ++halving) {
        Matrix current = level(2 * m);
        distance = spectral_norm_auto(current - previous);
        if (distance < tol) return {std::move(current), 2 * m};
        if (!jumped && distance > 0.0) {
            jumped = true;
            // distance ~ B / m^2; pick m with predicted distance at tol/4.
            const double target =
                static_cast<double>(m) * std::sqrt(distance / (0.25 * tol));
            long m_jump = m;
            while (static_cast<double>(m_jump) < target && m_jump < (1L << 40)) m_jump *= 2;
            if (m_jump > 2 * m) {
                m = m_jump / 2;
                previous = level(m);
                continue;
            }
        }
        m *= 2;
        previous = std::move(current);
    }
    throw integrator_divergence(distance, m);
}

} // namespace detail

/// Generic form: `gen` may be any map s -> Hermitian matrix on a fixed
/// support. Each factor costs one eigendecomposition, so this is meant for
/// small dimensions; evolutions of a fixed kernel should use the
/// ConjugatedGenerator overload, which computes the identical product.
inline IntegrationResult integrate_time_ordered(const std::function<Matrix(double)> &gen,
                                                double t, double tol, int max_halvings = 20) {
    if (tol <= 0) throw InputError("integrate_time_ordered: tol must be positive");
    const Matrix probe = gen(t / 2.0);
    if (probe.rows() != probe.cols() || hermiticity_defect(probe) > 1e-10)
        throw InputError("integrate_time_ordered: generator is not Hermitian on a fixed support");
    const Eigen::Index d = probe.rows();
    if (t == 0.0) return {Matrix::Identity(d, d), 0};

    auto level = [&](long m) {
        const double dt = t / static_cast<double>(m);
        Matrix v = Matrix::Identity(d, d);
        for (long j = 0; j < m; ++j) {
            const double s = (static_cast<double>(j) + 0.5) * dt;
            const auto g = SpectralDecomposition::compute(gen(s), 1e-8);
            v = v * g.exp_it(dt);
        }
        return v;
    };
    return detail::run_step_halving(level, tol, max_halvings);
}

/// Generator of the form G(s) = e^{-isB} K e^{isB} with fixed Hermitian B
/// and K. Every factor is then a phase-conjugated copy of exp(i dt K), and
/// the whole level collapses to one matrix power:
///   prod_j P(-s_j) E P(s_j) = P(-s_0) E (P(-dt) E)^{m-1} P(s_{m-1})
/// in the eigenbasis of B, with P(x) = diag(e^{ix lambda}) and
/// E = exp(i dt K). Levels cost O(log m) multiplies instead of O(m).
struct ConjugatedGenerator {
    SpectralDecomposition base;  // B
    Matrix kernel;               // K, in the computational basis

    Matrix operator()(double s) const {
        return base.from_eigenbasis(evaluate_in_eigenbasis(s));
    }
    Matrix evaluate_in_eigenbasis(double s) const {
        const Vector p = base.phases(s);
        return p.conjugate().asDiagonal() * base.to_eigenbasis(kernel) * p.asDiagonal();
    }
};

inline IntegrationResult integrate_time_ordered(const ConjugatedGenerator &gen, double t,
                                                double tol, int max_halvings = 20) {
    if (tol <= 0) throw InputError("integrate_time_ordered: tol must be positive");
    const Eigen::Index d = gen.base.dim();
    if (gen.kernel.rows() != d || gen.kernel.cols() != d)
        throw InputError("integrate_time_ordered: kernel/base dimension mismatch");
    if (hermiticity_defect(gen.kernel) > 1e-10)
        throw InputError("integrate_time_ordered: kernel is not Hermitian");
    if (t == 0.0) return {Matrix::Identity(d, d), 0};

    const Matrix k_tilde = gen.base.to_eigenbasis(gen.kernel);
    const auto k_decomposition = SpectralDecomposition::compute(
        (k_tilde + k_tilde.adjoint().eval()) / 2.0, 1e-8);

    // Returns the level-m product in the eigenbasis of B.
    auto level = [&](long m) {
        const double dt = t / static_cast<double>(m);
        const Matrix e = k_decomposition.exp_it(dt);
        const Vector step_phase = gen.base.phases(-dt);
        Matrix g = step_phase.asDiagonal() * e;
        Matrix power = Matrix::Identity(d, d);
        long exponent = m - 1;
        Matrix square = g;
        while (exponent > 0) {
            if (exponent & 1) power = power * square;
            square = square * square;
            exponent >>= 1;
        }
        const Vector first = gen.base.phases((0.5) * dt);
        const Vector last = gen.base.phases((static_cast<double>(m) - 0.5) * dt);
        return Matrix(first.conjugate().asDiagonal() * e * power * last.asDiagonal());
    };
    IntegrationResult result = detail::run_step_halving(level, tol, max_halvings);
    result.matrix = gen.base.from_eigenbasis(result.matrix);
    return result;
}

// ---------------------------------------------------------------------------
// Windowed patch
// ---------------------------------------------------------------------------

struct PatchResult {
    DenseOperator v_windowed;
    SiteInterval window;
    long integrator_steps = 0;
    std::optional<double> error_exact;  // ||V - I (x) V'||, when dense work fits
    double error_bound = 0.0;           // upper bound on the same quantity
};

enum class ErrorBoundMethod {
    automatic,  // midpoint quadrature of ||L - L'|| when the chain fits densely
    analytic,   // closed-form series integral (valid, weaker, much cheaper)
};

struct PatchOptions {
    double hermiticity_tol = 1e-10;
    ErrorBoundMethod bound_method = ErrorBoundMethod::automatic;
    bool want_error_exact = true;
};

namespace detail {

/// Applies a dense operator living on window sites [first, first+w) of an
/// n-site chain to a full-chain vector.
inline Vector apply_on_window(const Matrix &wmat, int first, int w, int n, const Vector &v) {
    const Eigen::Index inner = dense_dim(n - first - w);
    const Eigen::Index mid = dense_dim(w);
    const Eigen::Index outer = dense_dim(first);
    Vector out(v.size());
    for (Eigen::Index o = 0; o < outer; ++o) {
        const Eigen::Index base = o * mid * inner;
        // slice (mid x inner) laid out row-major in v
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            block(v.data() + base, mid, inner);
        Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            result(out.data() + base, mid, inner);
        result = wmat * block;
    }
    return out;
}

/// ||L(s) - L'(s)|| with everything precomputed: the full-chain and window
/// decompositions. Dense below 512; matrix-free Lanczos above.
struct GeneratorGap {
    const SpectralDecomposition &full;
    const SpectralDecomposition &windowed;
    Matrix bridge_full;    // h_I embedded on the chain
    Matrix bridge_window;  // h_I embedded on the window
    int win_first;
    int win_size;
    int n;

    double norm_at(double s) const {
        const Eigen::Index d = full.dim();
        const Matrix lw = window_generator(s);
        if (d <= 512) {
            const Matrix e = full.exp_it(s);
            const Matrix l_full = e.adjoint() * bridge_full * e;
            Matrix diff = l_full;
            DenseOperator lw_op(SiteInterval{win_first, win_first + win_size}, lw);
            diff -= lw_op.embedded(SiteInterval{0, n}).matrix();
            return hermitian_norm_dense(diff);
        }
        auto apply = [&](const Vector &v) {
            Vector a = full.apply_exp_it(s, v);
            a = apply_on_window(bridge_full_local(), bridge_site(), 2, n, a);
            a = full.apply_exp_it(-s, a);
            a -= apply_on_window(lw, win_first, win_size, n, v);
            return a;
        };
        return hermitian_norm_lanczos(apply, d);
    }

    Matrix window_generator(double s) const {
        const Matrix e = windowed.exp_it(s);
        return e.adjoint() * bridge_window * e;
    }

    // The bridging term as a 4x4 block for the matrix-free path.
    Matrix bridge_local;
    int bridge_first = 0;
    const Matrix &bridge_full_local() const { return bridge_local; }
    int bridge_site() const { return bridge_first; }
};

/// Composite midpoint with node doubling; stops once the Richardson check
/// passes at 1e-3 relative and returns the extrapolated value.
inline double quadrature_bound(const GeneratorGap &gap, double t) {
    const double span = std::abs(t);
    if (span == 0.0) return 0.0;
    const double direction = t > 0 ? 1.0 : -1.0;
    auto midpoint = [&](long nodes) {
        const double step = span / static_cast<double>(nodes);
        double acc = 0.0;
        for (long j = 0; j < nodes; ++j)
            acc += gap.norm_at(direction * (static_cast<double>(j) + 0.5) * step);
        return acc * step;
    };
    long nodes = 32;
    double previous = midpoint(nodes);
    for (;;) {
        nodes *= 2;
        const double current = midpoint(nodes);
        const double extrapolated = current + (current - previous) / 3.0;
        if (std::abs(current - previous) <= 1e-3 * std::max(std::abs(current), 1e-14) ||
            nodes >= 1024)
            return extrapolated;
        previous = current;
    }
}

/// Closed form of the integrated series bound: integrating sum_l
/// norm_hI (2 norm_h s)^l / l! from 0 to |t| shifts every order up by one.
inline double analytic_integral_bound(double norm_hI, double norm_h, int start_order, double t) {
    if (start_order == std::numeric_limits<int>::max() || norm_h == 0.0) return 0.0;
    return analytic_lr_bound(norm_hI, norm_h, start_order + 1, t) / (2.0 * norm_h);
}

} // namespace detail

/// V'(t): the patch generated by the window-restricted effective Hamiltonian,
/// supported on `window` only. error_exact compares against the exact patch
/// whenever the whole chain fits the dense cap; error_bound is the integral
/// of ||L - L'|| (quadrature by default, analytic series integral otherwise).
inline PatchResult patch_windowed(const SpinChainHamiltonian &h, const CutSpec &cut,
                                  const SiteInterval &window, double t, double tol,
                                  const PatchOptions &opts = {}) {
    const int n = h.size();
    const SiteInterval chain{0, n};
    require_valid_interval(window, "patch_windowed");
    if (!chain.contains(window))
        throw InputError("patch window " + window.str() + " outside the chain");
    require_dense_sites(window.size(), "patch_windowed");
    const DenseOperator bridge = term_as_operator(cut.bridge);
    if (!window.contains(bridge.support()))
        throw InputError("patch window " + window.str() +
                         " excludes the bridging term at cut " + std::to_string(cut.cut));

    const auto window_decomposition = SpectralDecomposition::compute(
        build_dense_hamiltonian(h, window).matrix(), opts.hermiticity_tol);
    const Matrix bridge_on_window = bridge.embedded(window).matrix();

    ConjugatedGenerator generator{window_decomposition, bridge_on_window};
    IntegrationResult integrated = integrate_time_ordered(generator, t, tol);

    PatchResult result{DenseOperator(window, std::move(integrated.matrix)), window,
                       integrated.steps, std::nullopt, 0.0};

    const bool dense_ok = n <= kMaxDenseSites;
    const int start = lr_series_start(window, cut.cut, n);
    const double norm_hI = spectral_norm_dense(cut.bridge.matrix);

    if (dense_ok && opts.want_error_exact) {
        const DenseOperator exact = patch_exact(h, cut, t);
        result.error_exact =
            operator_norm(exact - result.v_windowed.embedded(chain));
    }

    if (start == std::numeric_limits<int>::max()) {
        result.error_bound = 0.0;  // window holds every term, so L' == L identically
    } else if (dense_ok && opts.bound_method == ErrorBoundMethod::automatic) {
        const auto full_decomposition =
            SpectralDecomposition::compute(build_dense_hamiltonian(h, chain).matrix(),
                                           opts.hermiticity_tol);
        detail::GeneratorGap gap{full_decomposition,
                                 window_decomposition,
                                 bridge.embedded(chain).matrix(),
                                 bridge_on_window,
                                 window.first,
                                 window.size(),
                                 n};
        gap.bridge_local = cut.bridge.matrix;
        gap.bridge_first = cut.bridge.site;
        result.error_bound = detail::quadrature_bound(gap, t);
    } else {
        result.error_bound =
            detail::analytic_integral_bound(norm_hI, h.max_term_norm(), start, t);
    }
    return result;
}

} // namespace epsqca
