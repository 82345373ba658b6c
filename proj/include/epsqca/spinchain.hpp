#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "epsqca/errors.hpp"
#include "epsqca/intervals.hpp"
#include "epsqca/linalg.hpp"

namespace epsqca {

/// Dense matrices are capped at 2^12 x 2^12. The dense layer is the accuracy
/// oracle, not the scalable representation; memory is the binding constraint.
inline constexpr int kMaxDenseSites = 12;

inline Eigen::Index dense_dim(int sites) { return Eigen::Index(1) << sites; }

inline void require_dense_sites(int sites, const char *what) {
    if (sites > kMaxDenseSites)
        throw ResourceError(std::string(what) + ": " + std::to_string(sites) +
                            " sites exceed the dense cap of " + std::to_string(kMaxDenseSites));
}

// ---------------------------------------------------------------------------
// Pauli basis
// ---------------------------------------------------------------------------

/// sigma^0 = I, sigma^1 = X, sigma^2 = Y, sigma^3 = Z.
inline const Eigen::Matrix2cd &pauli(int alpha) {
    static const std::array<Eigen::Matrix2cd, 4> sigma = [] {
        std::array<Eigen::Matrix2cd, 4> s;
        const Complex i(0, 1);
        s[0] << 1, 0, 0, 1;
        s[1] << 0, 1, 1, 0;
        s[2] << 0, -i, i, 0;
        s[3] << 1, 0, 0, -1;
        return s;
    }();
    return sigma[static_cast<std::size_t>(alpha)];
}

/// sigma^a sigma^b = phase * sigma^c; returns (c, phase).
inline std::pair<int, Complex> pauli_product(int a, int b) {
    static const Complex i(0, 1);
    if (a == 0) return {b, 1.0};
    if (b == 0) return {a, 1.0};
    if (a == b) return {0, 1.0};
    // cyclic: XY = iZ, YZ = iX, ZX = iY; swapped order flips the sign.
    const int c = 6 - a - b;
    const bool cyclic = (b - a + 3) % 3 == 1;
    return {c, cyclic ? i : -i};
}

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// One nearest-neighbour coupling: a 4x4 Hermitian matrix acting on sites
/// (site, site+1), with site `site` carried by the more significant qubit.
struct LocalTerm {
    int site = 0;
    Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
};

/// H = sum_j h_j on an n-site open chain, one term per bond j = 0..n-2.
/// Terms are validated Hermitian on construction and immutable afterwards.
class SpinChainHamiltonian {
  public:
    SpinChainHamiltonian(int n, std::vector<LocalTerm> terms) : n_(n), terms_(std::move(terms)) {
        if (n_ < 2) throw InputError("chain needs at least 2 sites");
        if (terms_.size() != static_cast<std::size_t>(n_ - 1))
            throw InputError("expected " + std::to_string(n_ - 1) + " bond terms, got " +
                             std::to_string(terms_.size()));
        max_term_norm_ = 0.0;
        for (int j = 0; j < n_ - 1; ++j) {
            const auto &term = terms_[static_cast<std::size_t>(j)];
            if (term.site != j)
                throw InputError("term " + std::to_string(j) + " claims site " +
                                 std::to_string(term.site));
            const double defect = (term.matrix - term.matrix.adjoint()).cwiseAbs().maxCoeff();
            if (defect > 1e-12)
                throw InputError("term at site " + std::to_string(j) +
                                 " is not Hermitian (defect " + std::to_string(defect) + ")");
            max_term_norm_ = std::max(max_term_norm_, spectral_norm_dense(term.matrix));
        }
    }

    int size() const { return n_; }
    const std::vector<LocalTerm> &terms() const { return terms_; }
    const LocalTerm &term(int j) const { return terms_.at(static_cast<std::size_t>(j)); }

    /// max_j ||h_j||, the model's coupling scale.
    double max_term_norm() const { return max_term_norm_; }

    /// The term bridging the cut between sites cut-1 and cut.
    const LocalTerm &bridge_term(int cut) const {
        if (cut < 1 || cut > n_ - 1)
            throw InputError("cut " + std::to_string(cut) + " outside [1, " +
                             std::to_string(n_ - 1) + "]");
        return terms_[static_cast<std::size_t>(cut - 1)];
    }

    /// Chain restricted to `block`, with sites relabelled to start at 0.
    /// Keeps exactly the terms acting inside the block.
    SpinChainHamiltonian restricted(const SiteInterval &block) const {
        require_valid_interval(block, "restricted");
        if (!(SiteInterval{0, n_}.contains(block)))
            throw InputError("restricted: block " + block.str() + " outside chain");
        if (block.size() < 2) throw InputError("restricted: block shorter than one bond");
        std::vector<LocalTerm> sub;
        for (int j = block.first; j + 1 < block.last; ++j)
            sub.push_back({j - block.first, terms_[static_cast<std::size_t>(j)].matrix});
        return SpinChainHamiltonian(block.size(), std::move(sub));
    }

  private:
    int n_;
    std::vector<LocalTerm> terms_;
    double max_term_norm_;
};

// ---------------------------------------------------------------------------
// Dense operators
// ---------------------------------------------------------------------------

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Explicit complex matrix on a contiguous site interval. Site `support.first`
/// is the most significant qubit of the matrix index. Immutable value type.
class DenseOperator {
  public:
    DenseOperator(SiteInterval support, Matrix matrix)
        : support_(support), matrix_(std::move(matrix)) {
        require_valid_interval(support_, "DenseOperator");
        require_dense_sites(support_.size(), "DenseOperator");
        if (matrix_.rows() != dense_dim(support_.size()) || matrix_.rows() != matrix_.cols())
            throw InputError("matrix dimension " + std::to_string(matrix_.rows()) +
                             " does not match 2^" + std::to_string(support_.size()) +
                             " for support " + support_.str());
    }

    static DenseOperator identity(SiteInterval support) {
        return DenseOperator(support, Matrix::Identity(dense_dim(support.size()),
                                                       dense_dim(support.size())));
    }
    static DenseOperator zero(SiteInterval support) {
        return DenseOperator(support,
                             Matrix::Zero(dense_dim(support.size()), dense_dim(support.size())));
    }

    const SiteInterval &support() const { return support_; }
    int sites() const { return support_.size(); }
    Eigen::Index dim() const { return matrix_.rows(); }
    const Matrix &matrix() const { return matrix_; }

    /// Identity-pad onto a larger interval.
    DenseOperator embedded(const SiteInterval &target) const {
        if (target == support_) return *this;
        if (!target.contains(support_))
            throw InputError("embedded: target " + target.str() + " does not contain support " +
                             support_.str());
        require_dense_sites(target.size(), "embedded");
        const Eigen::Index left = dense_dim(support_.first - target.first);
        const Eigen::Index right = dense_dim(target.last - support_.last);
        Matrix out = Matrix::Zero(dense_dim(target.size()), dense_dim(target.size()));
        // I_left (x) M (x) I_right, written blockwise to avoid forming krons of
        // identities.
        for (Eigen::Index bl = 0; bl < left; ++bl) {
            const Eigen::Index base = bl * matrix_.rows() * right;
            for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
                for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
                    if (matrix_(i, j) == Complex(0)) continue;
                    for (Eigen::Index br = 0; br < right; ++br)
                        out(base + i * right + br, base + j * right + br) = matrix_(i, j);
                }
        }
        return DenseOperator(target, std::move(out));
    }

    DenseOperator shifted(int offset) const { return DenseOperator(support_.shifted(offset), matrix_); }

    DenseOperator adjoint() const { return DenseOperator(support_, matrix_.adjoint()); }

    friend DenseOperator operator*(const DenseOperator &a, const DenseOperator &b) {
        const SiteInterval common = SiteInterval::hull(a.support_, b.support_);
        require_dense_sites(common.size(), "operator*");
        if (a.support_ == b.support_) return DenseOperator(common, a.matrix_ * b.matrix_);
        return DenseOperator(common, a.embedded(common).matrix_ * b.embedded(common).matrix_);
    }
    friend DenseOperator operator+(const DenseOperator &a, const DenseOperator &b) {
        const SiteInterval common = SiteInterval::hull(a.support_, b.support_);
        require_dense_sites(common.size(), "operator+");
        if (a.support_ == b.support_) return DenseOperator(common, a.matrix_ + b.matrix_);
        return DenseOperator(common, a.embedded(common).matrix_ + b.embedded(common).matrix_);
    }
    friend DenseOperator operator-(const DenseOperator &a, const DenseOperator &b) {
        const SiteInterval common = SiteInterval::hull(a.support_, b.support_);
        require_dense_sites(common.size(), "operator-");
        if (a.support_ == b.support_) return DenseOperator(common, a.matrix_ - b.matrix_);
        return DenseOperator(common, a.embedded(common).matrix_ - b.embedded(common).matrix_);
    }
    friend DenseOperator operator*(Complex s, const DenseOperator &a) {
        return DenseOperator(a.support_, s * a.matrix_);
    }

  private:
    SiteInterval support_;
    Matrix matrix_;
};

/// Alias for DenseOperator::embedded as a free function.
inline DenseOperator tensor_embed(const DenseOperator &op, const SiteInterval &target) {
    return op.embedded(target);
}

inline DenseOperator embed_single_site(const Eigen::Matrix2cd &m, int site,
                                       const SiteInterval &target) {
    return DenseOperator(SiteInterval{site, site + 1}, m).embedded(target);
}

inline DenseOperator term_as_operator(const LocalTerm &term) {
    return DenseOperator(SiteInterval{term.site, term.site + 2}, term.matrix);
}

/// Sum of the terms lying entirely inside `support`, embedded on `support`.
/// An interval shorter than one bond holds no term and yields zero.
inline DenseOperator build_dense_hamiltonian(const SpinChainHamiltonian &h,
                                             const SiteInterval &support) {
    require_valid_interval(support, "build_dense_hamiltonian");
    if (!(SiteInterval{0, h.size()}.contains(support)))
        throw InputError("build_dense_hamiltonian: support " + support.str() +
                         " outside chain [0, " + std::to_string(h.size()) + ")");
    require_dense_sites(support.size(), "build_dense_hamiltonian");
    DenseOperator acc = DenseOperator::zero(support);
    for (int j = support.first; j + 1 < support.last; ++j)
        acc = acc + term_as_operator(h.term(j)).embedded(support);
    return acc;
}

/// e^{+it H} via the Hermitian eigendecomposition of H. Rejects inputs that
/// are not Hermitian to 1e-10: a silently symmetrized matrix is how sign
/// convention bugs hide.
inline DenseOperator propagator(const DenseOperator &hmat, double t) {
    const auto decomposition = SpectralDecomposition::compute(hmat.matrix(), 1e-10);
    return DenseOperator(hmat.support(), decomposition.exp_it(t));
}

/// Largest singular value (largest |eigenvalue| for Hermitian inputs).
inline double operator_norm(const DenseOperator &a) { return spectral_norm_dense(a.matrix()); }

// ---------------------------------------------------------------------------
// Pauli-string expansion
// ---------------------------------------------------------------------------
//
// Operators on k sites expand as W = sum_alpha c_alpha sigma^{alpha_0} (x) ...
// (x) sigma^{alpha_{k-1}} with c_alpha = tr(sigma^alpha W) / 2^k. Coefficients
// are stored base-4, digit of site 0 most significant, matching the qubit
// order of DenseOperator. Both directions are mode-wise 4x4 transforms and
// cost O(k 4^k).

namespace detail {

/// Inserts a zero bit between the bits of x: bit j of x -> bit 2j of result.
inline std::vector<Eigen::Index> spread_table(int sites) {
    std::vector<Eigen::Index> table(static_cast<std::size_t>(Eigen::Index(1) << sites));
    for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(table.size()); ++x) {
        Eigen::Index s = 0;
        for (int j = 0; j < sites; ++j)
            if (x & (Eigen::Index(1) << j)) s |= Eigen::Index(1) << (2 * j);
        table[static_cast<std::size_t>(x)] = s;
    }
    return table;
}

/// In-place 4x4 transform along base-4 digit `mode` of an array of length 4^k.
inline void apply_mode_transform(std::vector<Complex> &data, int sites, int mode,
                                 const Eigen::Matrix4cd &q) {
    const Eigen::Index stride = Eigen::Index(1) << (2 * (sites - 1 - mode));
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    std::array<Complex, 4> in;
    for (Eigen::Index base = 0; base < n; base += 4 * stride)
        for (Eigen::Index off = 0; off < stride; ++off) {
            const Eigen::Index i0 = base + off;
            for (int m = 0; m < 4; ++m) in[static_cast<std::size_t>(m)] = data[static_cast<std::size_t>(i0 + m * stride)];
            for (int a = 0; a < 4; ++a) {
                Complex acc = 0;
                for (int m = 0; m < 4; ++m) acc += q(a, m) * in[static_cast<std::size_t>(m)];
                data[static_cast<std::size_t>(i0 + a * stride)] = acc;
            }
        }
}

inline Eigen::Matrix4cd pauli_analysis_matrix() {
    // Q(alpha, 2x+y) = sigma^alpha[x, y] / 2
    Eigen::Matrix4cd q;
    for (int a = 0; a < 4; ++a)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) q(a, 2 * x + y) = pauli(a)(x, y) / 2.0;
    return q;
}

inline Eigen::Matrix4cd pauli_synthesis_matrix() {
    // R(2x+y, alpha) = sigma^alpha[x, y]
    Eigen::Matrix4cd r;
    for (int a = 0; a < 4; ++a)
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) r(2 * x + y, a) = pauli(a)(x, y);
    return r;
}

} // namespace detail

inline std::vector<Complex> pauli_coefficients(const DenseOperator &w) {
    const int k = w.sites();
    const auto spread = detail::spread_table(k);
    const Eigen::Index d = w.dim();
    std::vector<Complex> data(static_cast<std::size_t>(d * d));
    for (Eigen::Index x = 0; x < d; ++x)
        for (Eigen::Index y = 0; y < d; ++y)
            data[static_cast<std::size_t>(2 * spread[static_cast<std::size_t>(x)] +
                                          spread[static_cast<std::size_t>(y)])] = w.matrix()(y, x);
    const Eigen::Matrix4cd q = detail::pauli_analysis_matrix();
    for (int j = 0; j < k; ++j) detail::apply_mode_transform(data, k, j, q);
    return data;
}

inline DenseOperator from_pauli_coefficients(const std::vector<Complex> &coeffs,
                                             SiteInterval support) {
    const int k = support.size();
    if (coeffs.size() != static_cast<std::size_t>(Eigen::Index(1) << (2 * k)))
        throw InputError("from_pauli_coefficients: expected 4^" + std::to_string(k) +
                         " coefficients");
    std::vector<Complex> data = coeffs;
    const Eigen::Matrix4cd r = detail::pauli_synthesis_matrix();
    for (int j = 0; j < k; ++j) detail::apply_mode_transform(data, k, j, r);
    const auto spread = detail::spread_table(k);
    const Eigen::Index d = dense_dim(k);
    Matrix out(d, d);
    for (Eigen::Index x = 0; x < d; ++x)
        for (Eigen::Index y = 0; y < d; ++y)
            out(x, y) = data[static_cast<std::size_t>(2 * spread[static_cast<std::size_t>(x)] +
                                                      spread[static_cast<std::size_t>(y)])];
    return DenseOperator(support, std::move(out));
}

} // namespace epsqca
