#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "epsqca/errors.hpp"

namespace epsqca {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double max_abs_entry(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const Matrix &m) {
    return max_abs_entry(m - m.adjoint().eval());
}

/// Eigendecomposition of a Hermitian matrix, kept around so that e^{itH} for
/// many t (and Heisenberg conjugations) cost two multiplies instead of a
/// fresh factorization each time.
class SpectralDecomposition {
  public:
    static SpectralDecomposition compute(const Matrix &hermitian, double tol = 1e-10) {
        if (hermitian.rows() != hermitian.cols())
            throw InputError("spectral decomposition requires a square matrix");
        const double defect = hermiticity_defect(hermitian);
        if (defect > tol)
            throw InputError("matrix is not Hermitian: max |A - A^dag| entry = " +
                             std::to_string(defect));
        Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
        if (solver.info() != Eigen::Success)
            throw ComputationError("Hermitian eigendecomposition failed to converge");
        SpectralDecomposition d;
        d.eigenvalues_ = solver.eigenvalues();
        d.eigenvectors_ = solver.eigenvectors();
        return d;
    }

    Eigen::Index dim() const { return eigenvalues_.size(); }
    const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }
    const Matrix &eigenvectors() const { return eigenvectors_; }

    /// e^{itH} as a dense matrix.
    Matrix exp_it(double t) const {
        return eigenvectors_ * phases(t).asDiagonal() * eigenvectors_.adjoint();
    }

    /// e^{itH} v without forming the dense exponential.
    Vector apply_exp_it(double t, const Vector &v) const {
        Vector w = eigenvectors_.adjoint() * v;
        w.array() *= phases(t).array();
        return eigenvectors_ * w;
    }

    Vector phases(double t) const {
        return (Complex(0, t) * eigenvalues_.cast<Complex>().array()).exp();
    }

    Matrix to_eigenbasis(const Matrix &m) const {
        return eigenvectors_.adjoint() * m * eigenvectors_;
    }
    Matrix from_eigenbasis(const Matrix &m) const {
        return eigenvectors_ * m * eigenvectors_.adjoint();
    }

  private:
    Eigen::VectorXd eigenvalues_;
    Matrix eigenvectors_;
};

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
inline double hermitian_norm_dense(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ComputationError("eigenvalue computation failed in hermitian_norm_dense");
    const auto &ev = solver.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// Largest singular value of a general matrix, via the largest eigenvalue of
/// A^dag A. For the top singular value this is as accurate as an SVD, and it
/// reuses the Hermitian solver that everything else is built on.
inline double spectral_norm_dense(const Matrix &m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (hermiticity_defect(m) <= 1e-12 * std::max(1.0, max_abs_entry(m)) && m.rows() == m.cols())
        return hermitian_norm_dense(m);
    Matrix gram = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ComputationError("eigenvalue computation failed in spectral_norm_dense");
    const double lmax = std::max(0.0, solver.eigenvalues().maxCoeff());
    return std::sqrt(lmax);
}

/// Largest singular value with a cost cutover: dense solvers up to dim 512,
/// Lanczos on A^dag A (or on A itself when Hermitian) above. Used where norms
/// are consumed by iteration-control logic; operator_norm on DenseOperator
/// stays fully dense.
double spectral_norm_auto(const Matrix &m);

/// Operator norm of a Hermitian operator given only as a matvec closure.
/// Lanczos with full reorthogonalization and a fixed deterministic start
/// vector; converges to the extreme eigenvalues long before max_iter at the
/// dimensions used here. Accurate to ~1e-11 relative, which is far below
/// every tolerance this estimate feeds.
inline double hermitian_norm_lanczos(const std::function<Vector(const Vector &)> &apply,
                                     Eigen::Index dim, double rel_tol = 1e-11,
                                     int max_iter = 220) {
    if (dim == 0) return 0.0;
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v(i) = Complex(1.0 + 0.25 * std::cos(0.7 * static_cast<double>(i)),
                       0.25 * std::sin(1.3 * static_cast<double>(i)));
    v.normalize();

    std::vector<Vector> basis;
    std::vector<double> alpha, beta;
    basis.push_back(v);

    double previous = 0.0;
    const int iters = static_cast<int>(std::min<Eigen::Index>(max_iter, dim));
    for (int k = 0; k < iters; ++k) {
        Vector w = apply(basis[static_cast<std::size_t>(k)]);
        const double a = std::real(basis[static_cast<std::size_t>(k)].dot(w));
        alpha.push_back(a);
        w -= a * basis[static_cast<std::size_t>(k)];
        if (k > 0) w -= beta[static_cast<std::size_t>(k - 1)] * basis[static_cast<std::size_t>(k - 1)];
        for (const auto &b : basis) w -= b.dot(w) * b; // full reorthogonalization
        const double nb = w.norm();

        // Ritz extremes of the current tridiagonal matrix.
        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            tri(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tds(tri, Eigen::EigenvaluesOnly);
        const double current = std::max(std::abs(tds.eigenvalues()(0)),
                                        std::abs(tds.eigenvalues()(m - 1)));

        if (nb < 1e-14 * std::max(1.0, current)) return current; // invariant subspace found
        if (k > 2 && std::abs(current - previous) <= rel_tol * std::max(current, 1e-300))
            return current;
        previous = current;

        beta.push_back(nb);
        basis.push_back(w / nb);
    }
    return previous;
}

inline double spectral_norm_auto(const Matrix &m) {
    if (m.rows() <= 512 || m.rows() != m.cols()) return spectral_norm_dense(m);
    if (hermiticity_defect(m) <= 1e-12 * std::max(1.0, max_abs_entry(m)))
        return hermitian_norm_lanczos([&m](const Vector &v) { return Vector(m * v); }, m.rows(),
                                      1e-9, 160);
    const double lmax = hermitian_norm_lanczos(
        [&m](const Vector &v) { return Vector(m.adjoint() * (m * v)); }, m.rows(), 1e-9, 160);
    return std::sqrt(std::max(0.0, lmax));
}

} // namespace epsqca
