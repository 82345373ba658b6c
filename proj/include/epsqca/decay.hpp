#pragma once

#include <string>

namespace epsqca {

/// Fitted constants of the patch-error decay model
///   error(t, w) ~ omega * e^{kappa |t|} * e^{-mu w}.
/// Inverting the model for a target accuracy gives the window sizing rule
/// w >= c0 |t| + c1 log(n/eps) with c0 = kappa/mu and c1 = 1/mu.
struct DecayConstants {
    double omega = 1.0;
    double kappa = 2.0;
    double mu = 0.5;

    // fit diagnostics
    double r2 = 0.0;
    double residual_rms = 0.0;
    int sample_count = 0;
    std::string provenance;

    double c0() const { return kappa / mu; }
    double c1() const { return 1.0 / mu; }

    /// Deliberately conservative fallback (c0 = 4, c1 = 2) for use before any
    /// fit exists; experiments always override it with fitted values.
    static DecayConstants conservative_default() {
        DecayConstants c;
        c.omega = 1.0;
        c.kappa = 2.0;
        c.mu = 0.5;
        c.provenance = "conservative-default";
        return c;
    }
};

} // namespace epsqca
