#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "sleq/core.hpp"
#include "sleq/rng.hpp"

namespace sleq {

/// Half-plane kernel with zero boundary values.
inline double k_dirichlet(cplx z, cplx w) {
    double d = std::abs(z - w);
    if (d == 0.0) throw kernel_error("kernel evaluated on the diagonal");
    return -std::log(d) + std::log(std::abs(z - std::conj(w)));
}

/// Half-plane kernel with free boundary values (defined modulo constants).
inline double g_free(cplx z, cplx w) {
    double d = std::abs(z - w);
    if (d == 0.0) throw kernel_error("kernel evaluated on the diagonal");
    return -std::log(d) - std::log(std::abs(z - std::conj(w)));
}

/// Uniform probability density on a disk; the default normalization density
/// for the free-boundary field (unit area, centered on the imaginary axis).
struct DiskRho {
    cplx center{0.0, 2.0};
    double radius = 0.5641895835477563;  // unit-area disk

    static DiskRho unit_area_at(cplx c) { return DiskRho{c, 1.0 / std::sqrt(pi)}; }
};

/// Exact mean of log|x - p| over the uniform disk.
inline double disk_mean_log(const DiskRho& rho, cplx p) {
    double d = std::abs(p - rho.center);
    if (d >= rho.radius) return std::log(d);
    return std::log(rho.radius) - (sq(rho.radius) - sq(d)) / (2.0 * sq(rho.radius));
}

/// Exact mean of log|x - y| over two independent uniform draws from the disk.
inline double disk_self_mean_log(const DiskRho& rho) {
    return std::log(rho.radius) - 0.25;
}

/// Exact corner integral F(X,Y) = int_0^X int_0^Y log sqrt(u^2+v^2) du dv.
inline double rect_corner_log(double X, double Y) {
    if (X == 0.0 || Y == 0.0) return 0.0;
    return 0.5 * (X * Y * std::log(X * X + Y * Y) - 3.0 * X * Y +
                  X * X * std::atan(Y / X) + Y * Y * std::atan(X / Y));
}

/// Exact mean of log|x - p| over an axis-aligned rectangle.
inline double rect_mean_log(cplx lo, cplx hi, cplx p) {
    double u0 = lo.real() - p.real(), u1 = hi.real() - p.real();
    double v0 = lo.imag() - p.imag(), v1 = hi.imag() - p.imag();
    double I = rect_corner_log(u1, v1) - rect_corner_log(u0, v1) -
               rect_corner_log(u1, v0) + rect_corner_log(u0, v0);
    return I / ((u1 - u0) * (v1 - v0));
}

/// Midpoint cells covering the disk, with cell weights normalized to one.
struct DiskQuad {
    std::vector<cplx> centers;
    std::vector<double> weights;
    double cell = 0.0;

    static DiskQuad build(const DiskRho& rho, int n) {
        DiskQuad q;
        q.cell = 2.0 * rho.radius / n;
        double wsum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx a = rho.center + cplx((i + 0.5) * q.cell - rho.radius,
                                           (j + 0.5) * q.cell - rho.radius);
                if (std::abs(a - rho.center) <= rho.radius) {
                    q.centers.push_back(a);
                    q.weights.push_back(1.0);
                    wsum += 1.0;
                }
            }
        for (double& w : q.weights) w /= wsum;
        return q;
    }

    /// Quadrature mean of log|x - p|, with exact log moments on cells whose
    /// center is within a cell diagonal of p.
    double mean_log(cplx p) const {
        double s = 0.0;
        double close = 1.5 * cell;
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (std::abs(centers[k] - p) < close) {
                cplx lo = centers[k] - cplx(0.5 * cell, 0.5 * cell);
                cplx hi = centers[k] + cplx(0.5 * cell, 0.5 * cell);
                s += weights[k] * rect_mean_log(lo, hi, p);
            } else {
                s += weights[k] * std::log(std::abs(centers[k] - p));
            }
        }
        return s;
    }
};

/// Mean of log|x - y| for x, y uniform on circles of radii a and b whose
/// centers are s apart. Exact except when the circles properly overlap, in
/// which case the reduced 1d integral is evaluated by midpoint quadrature.
inline double mean_log_circle_pair(double s, double a, double b, int nodes = 160) {
    s = std::abs(s);
    if (s >= a + b) return std::log(s);
    if (a >= s + b) return std::log(a);
    if (b >= s + a) return std::log(b);
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        double phi = pi * (k + 0.5) / nodes;  // symmetric, half range suffices
        double y = std::hypot(s + b * std::cos(phi), b * std::sin(phi));
        acc += std::log(std::max(a, y));
    }
    return acc / nodes;
}

enum class FieldKind { dirichlet, neumann, wedge };

enum class MollifierKind { circle, bump };

/// Field law on (a window of) the closed upper half-plane. Exposes the point
/// kernel, the deterministic mean, and the free-boundary normalization data.
class CovarianceModel {
  public:
    static CovarianceModel dirichlet(Window win = {1e9, 0.0}) {
        CovarianceModel m;
        m.kind_ = FieldKind::dirichlet;
        m.window_ = win;
        return m;
    }

    static CovarianceModel neumann(DiskRho rho, int quad_res = 32,
                                   Window win = {1e9, 0.0}) {
        if (rho.center.imag() <= rho.radius)
            throw invalid_parameter("normalization disk must sit inside the bulk");
        CovarianceModel m;
        m.kind_ = FieldKind::neumann;
        m.rho_ = rho;
        m.quad_res_ = quad_res;
        m.window_ = win;
        m.quad_ = DiskQuad::build(rho, quad_res);
        m.c_rr_ = m.rho_g_rho_quad();
        return m;
    }

    /// Free-boundary field with radial drift; valid on the unit half-disk,
    /// where the conditioned outer radial branch never enters.
    static CovarianceModel wedge(double alpha, double gamma) {
        if (gamma <= 0.0 || gamma >= 2.0)
            throw invalid_parameter("gamma must lie in (0, 2)");
        if (alpha >= liouville_q(gamma))
            throw invalid_parameter("wedge drift must stay below the charge Q");
        CovarianceModel m;
        m.kind_ = FieldKind::wedge;
        m.alpha_ = alpha;
        m.gamma_ = gamma;
        m.window_ = Window{1.0, 0.0};
        return m;
    }

    FieldKind kind() const { return kind_; }
    const Window& window() const { return window_; }
    const DiskRho& rho() const { return rho_; }
    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    int quad_res() const { return quad_res_; }
    double rho_pair_term() const { return c_rr_; }

    MollifierKind mollifier = MollifierKind::circle;
    int bump_shells = 8;

    /// Pointwise kernel value; the free-boundary variant carries the four
    /// normalization corrections.
    double kernel(cplx z, cplx w) const {
        check_window(z);
        check_window(w);
        switch (kind_) {
            case FieldKind::dirichlet:
                return k_dirichlet(z, w);
            case FieldKind::wedge:
                return g_free(z, w);
            case FieldKind::neumann:
                return g_free(z, w) - rho_potential(z) - rho_potential(w) + c_rr_;
        }
        return 0.0;
    }

    /// Deterministic mean of the field (zero except for the wedge drift).
    double mean(cplx z) const {
        if (kind_ != FieldKind::wedge) return 0.0;
        double r = std::abs(z);
        return -alpha_ * std::log(std::max(r, 1e-300));
    }

    /// Quadrature value of int rho(x) G(x, p) dx.
    double rho_potential(cplx p) const {
        if (kind_ != FieldKind::neumann) return 0.0;
        return -quad_.mean_log(p) - quad_.mean_log(std::conj(p));
    }

    /// Closed-form version of the same integral (test oracle path).
    double rho_potential_exact(cplx p) const {
        return -disk_mean_log(rho_, p) - disk_mean_log(rho_, std::conj(p));
    }

    double rho_g_rho_exact() const {
        return -disk_self_mean_log(rho_) -
               std::log(2.0 * rho_.center.imag());
    }

    void check_window(cplx z) const {
        if (z.imag() < -1e-12 || std::abs(z) > window_.radius * (1.0 + 1e-12))
            throw kernel_error("point outside the model window");
    }

  private:
    double rho_g_rho_quad() const {
        // -log|x-y| term with exact log moments on singular cell pairs,
        // -log|x-conj y| term by plain midpoint.
        const auto& q = quad_;
        double close = 2.5 * q.cell;
        double acc = 0.0;
        for (std::size_t i = 0; i < q.centers.size(); ++i) {
            for (std::size_t j = 0; j < q.centers.size(); ++j) {
                double wij = q.weights[i] * q.weights[j];
                cplx a = q.centers[i], b = q.centers[j];
                double lg;
                if (std::abs(a - b) < close) {
                    cplx lo = b - cplx(0.5 * q.cell, 0.5 * q.cell);
                    cplx hi = b + cplx(0.5 * q.cell, 0.5 * q.cell);
                    // outer 3x3 refinement of the singular inner moment
                    double s = 0.0;
                    for (int u = 0; u < 3; ++u)
                        for (int v = 0; v < 3; ++v) {
                            cplx p = a + cplx((u - 1) * q.cell / 3.0,
                                              (v - 1) * q.cell / 3.0);
                            s += rect_mean_log(lo, hi, p);
                        }
                    lg = s / 9.0;
                } else {
                    lg = std::log(std::abs(a - b));
                }
                acc += wij * (-lg - std::log(std::abs(a - std::conj(b))));
            }
        }
        return acc;
    }

    FieldKind kind_ = FieldKind::dirichlet;
    Window window_{1e9, 0.0};
    DiskRho rho_;
    DiskQuad quad_;
    double c_rr_ = 0.0;
    double alpha_ = 0.0;
    double gamma_ = 0.0;
    int quad_res_ = 32;
};

/// Sampled radial process A_t of the drifted field, t > 0 inward. The
/// negative branch is conditioned to stay above Qt by rejection from a small
/// entrance level.
struct RadialPath {
    std::vector<double> t;
    std::vector<double> a;
};

inline RadialPath wedge_radial_path(double alpha, double gamma,
                                    const std::vector<double>& t_grid,
                                    std::uint64_t seed) {
    double Q = liouville_q(gamma);
    if (alpha >= Q) throw invalid_parameter("wedge drift must stay below Q");

    std::vector<double> pos, neg;
    for (double t : t_grid) {
        if (t > 0.0)
            pos.push_back(t);
        else if (t < 0.0)
            neg.push_back(-t);
    }
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    Rng rng(seed);
    std::vector<double> apos(pos.size());
    {
        double prev_t = 0.0, prev_b = 0.0;
        for (std::size_t k = 0; k < pos.size(); ++k) {
            prev_b += std::sqrt(2.0 * (pos[k] - prev_t)) * rng.normal();
            prev_t = pos[k];
            apos[k] = prev_b + alpha * pos[k];
        }
    }

    std::vector<double> aneg(neg.size());
    if (!neg.empty()) {
        const double entrance = 1e-3;
        const int max_attempts = 200000;
        bool ok = false;
        for (int attempt = 0; attempt < max_attempts && !ok; ++attempt) {
            double prev_t = 0.0, b = entrance;
            ok = true;
            for (std::size_t k = 0; k < neg.size(); ++k) {
                b += std::sqrt(2.0 * (neg[k] - prev_t)) * rng.normal();
                prev_t = neg[k];
                double at = b - alpha * neg[k];  // value at t = -neg[k]
                if (at + Q * neg[k] <= 0.0) {    // A_t - Q t > 0 for t < 0
                    ok = false;
                    break;
                }
                aneg[k] = at;
            }
        }
        if (!ok) throw model_error("radial conditioning rejection exhausted");
    }

    RadialPath out;
    for (std::size_t k = neg.size(); k > 0; --k) {
        out.t.push_back(-neg[k - 1]);
        out.a.push_back(aneg[k - 1]);
    }
    out.t.push_back(0.0);
    out.a.push_back(0.0);
    for (std::size_t k = 0; k < pos.size(); ++k) {
        out.t.push_back(pos[k]);
        out.a.push_back(apos[k]);
    }
    return out;
}

}  // namespace sleq
