#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sleq {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

/// Square root branch taking values in the closed upper half-plane.
/// The branch cut sits on the positive real axis; arguments approaching the
/// cut from below map to the negative real half-line.
inline cplx sqrt_upper(cplx z) {
    cplx r = std::sqrt(z);
    return (r.imag() < 0.0) ? -r : r;
}

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline double sq(double x) { return x * x; }

/// Liouville coordinate-change charge for parameter gamma.
inline double liouville_q(double gamma) { return 0.5 * gamma + 2.0 / gamma; }

// Error taxonomy. Preconditions throw; recoverable numerical conditions are
// reported through flags on the result types instead.
class error : public std::runtime_error {
  public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class invalid_parameter : public error {
  public:
    using error::error;
};

class grid_error : public error {
  public:
    using error::error;
};

class hull_error : public error {
  public:
    using error::error;
};

class kernel_error : public error {
  public:
    using error::error;
};

class alignment_error : public error {
  public:
    using error::error;
};

class resolution_error : public error {
  public:
    using error::error;
};

class capacity_error : public error {
  public:
    using error::error;
};

class model_error : public error {
  public:
    using error::error;
};

/// Half-disk window in the closed upper half-plane: |z| <= radius,
/// Im z >= 0, optionally excluding a small ball around the origin.
struct Window {
    double radius = 1.0;
    double inner = 0.0;

    bool contains(cplx z) const {
        double a = std::abs(z);
        return z.imag() >= 0.0 && a <= radius && a >= inner;
    }
};

}  // namespace sleq
