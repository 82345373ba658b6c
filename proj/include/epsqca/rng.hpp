#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace epsqca {

/// Deterministic Gaussian stream. mt19937_64 has a standard-mandated
/// sequence, and the Box-Muller transform below is coded explicitly, so the
/// same seed yields identical draws on every platform. (std::normal_distribution
/// is implementation-defined and would break frozen regression values.)
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1): 53-bit mantissa draws.
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace epsqca
