#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "epsqca/rng.hpp"
#include "epsqca/spinchain.hpp"

namespace epsqca {

using ModelParams = std::map<std::string, double>;

namespace detail {

inline double param_or(const ModelParams &params, const std::string &key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

/// Rescales every term by 1/max_j ||h_j||, so the coupling scale is exactly 1.
inline SpinChainHamiltonian normalized(int n, std::vector<LocalTerm> terms) {
    double max_norm = 0.0;
    for (const auto &term : terms) max_norm = std::max(max_norm, spectral_norm_dense(term.matrix));
    if (max_norm > 0.0)
        for (auto &term : terms) term.matrix /= max_norm;
    return SpinChainHamiltonian(n, std::move(terms));
}

inline Eigen::Matrix4cd random_hermitian_term(GaussianStream &gauss) {
    Eigen::Matrix4cd g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = Complex(gauss.next(), gauss.next());
    Eigen::Matrix4cd h = (g + g.adjoint()) / 2.0;
    return h / spectral_norm_dense(h);
}

} // namespace detail

/// Named chains, all with max_j ||h_j|| = 1:
///   tfim          h_j = -( Z_j Z_{j+1} + (g/2)(X_j + X_{j+1}) ),   param g (default 1)
///   heisenberg-xxz h_j = X X + Y Y + delta Z Z,                    param delta (default 1)
///   ising-zz      h_j = -Z_j Z_{j+1}   (all terms commute)
///   random-seeded independent Hermitian terms, ||h_j|| = 1,        param seed (default 0)
inline SpinChainHamiltonian preset_model(const std::string &name, int n,
                                         const ModelParams &params = {}) {
    if (n < 2) throw InputError("preset_model: need n >= 2");
    std::vector<LocalTerm> terms;
    terms.reserve(static_cast<std::size_t>(n - 1));

    if (name == "tfim") {
        const double g = detail::param_or(params, "g", 1.0);
        Eigen::Matrix4cd m = -kron(pauli(3), pauli(3)) -
                             (g / 2.0) * (kron(pauli(1), pauli(0)) + kron(pauli(0), pauli(1)));
        for (int j = 0; j < n - 1; ++j) terms.push_back({j, m});
        return detail::normalized(n, std::move(terms));
    }
    if (name == "heisenberg-xxz") {
        const double delta = detail::param_or(params, "delta", 1.0);
        Eigen::Matrix4cd m = kron(pauli(1), pauli(1)) + kron(pauli(2), pauli(2)) +
                             delta * kron(pauli(3), pauli(3));
        for (int j = 0; j < n - 1; ++j) terms.push_back({j, m});
        return detail::normalized(n, std::move(terms));
    }
    if (name == "ising-zz") {
        Eigen::Matrix4cd m = -kron(pauli(3), pauli(3));
        for (int j = 0; j < n - 1; ++j) terms.push_back({j, m});
        return detail::normalized(n, std::move(terms));
    }
    if (name == "random-seeded") {
        const auto seed = static_cast<std::uint64_t>(detail::param_or(params, "seed", 0.0));
        GaussianStream gauss(seed);
        for (int j = 0; j < n - 1; ++j) terms.push_back({j, detail::random_hermitian_term(gauss)});
        return SpinChainHamiltonian(n, std::move(terms));
    }
    throw InputError("unknown model '" + name +
                     "'; valid presets: tfim, heisenberg-xxz, ising-zz, random-seeded");
}

} // namespace epsqca
