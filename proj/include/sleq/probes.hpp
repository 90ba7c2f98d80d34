#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "sleq/core.hpp"
#include "sleq/gauss.hpp"
#include "sleq/kernels.hpp"
#include "sleq/loewner.hpp"

namespace sleq {

enum class Regime { bulk, boundary };

/// Mollified pairing site: uniform circle (bulk) or upper semicircle
/// (boundary) average at the given center and scale.
struct Probe {
    cplx center;
    double eps;
    Regime regime;
};

/// Nodes are transported through a chain segment (src picture to dst
/// picture) before kernel evaluation.
struct ChainMapRef {
    const MapChain* chain;
    std::size_t src;
    std::size_t dst;
};

/// Affine transport z -> scale * z + offset with scale > 0.
struct SimilarityRef {
    double scale;
    cplx offset;
};

using MapRef = std::variant<std::monostate, ChainMapRef, SimilarityRef>;

struct ProbeSet {
    std::vector<Probe> probes;
    MapRef map{};
    /// Added to the mean as q_charge * (probe average of log |map'|); the
    /// coordinate-change charge enters the mean, never the covariance.
    double q_charge = 0.0;
    int angular_nodes = 24;

    bool mapped() const { return !std::holds_alternative<std::monostate>(map); }
};

/// Radial shell decomposition of the mollifier; a plain circle average is a
/// single unit shell, the polynomial bump a weighted mixture.
struct Shells {
    std::vector<double> s;
    std::vector<double> w;
};

inline Shells mollifier_shells(MollifierKind kind, int n = 8) {
    Shells sh;
    if (kind == MollifierKind::circle) {
        sh.s = {1.0};
        sh.w = {1.0};
        return sh;
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        double s = (k + 0.5) / n;
        double w = 6.0 * s * sq(1.0 - s * s) / n;
        sh.s.push_back(s);
        sh.w.push_back(w);
        total += w;
    }
    for (double& w : sh.w) w /= total;
    return sh;
}

struct ProbeCloud {
    std::vector<cplx> src;
    std::vector<cplx> pos;
    std::vector<double> wt;
    std::vector<double> logd;
    double mean_logderiv = 0.0;
    bool mapped = false;
    bool near_hull = false;
    bool bad = false;
};

inline ProbeCloud build_cloud(const Probe& p, const MapRef& map,
                              const Shells& sh, int angular_nodes) {
    ProbeCloud c;
    c.mapped = !std::holds_alternative<std::monostate>(map);
    int m = angular_nodes;
    for (std::size_t k = 0; k < sh.s.size(); ++k) {
        for (int a = 0; a < m; ++a) {
            double th = (p.regime == Regime::bulk) ? 2.0 * pi * (a + 0.5) / m
                                                   : pi * (a + 0.5) / m;
            cplx node = p.center + p.eps * sh.s[k] * cplx(std::cos(th), std::sin(th));
            c.src.push_back(node);
            c.wt.push_back(sh.w[k] / m);
        }
    }
    c.pos = c.src;
    c.logd.assign(c.src.size(), 0.0);
    if (auto* cm = std::get_if<ChainMapRef>(&map)) {
        for (std::size_t i = 0; i < c.src.size(); ++i) {
            MapEval e = cm->chain->map(cm->src, cm->dst, c.src[i]);
            if (e.swallowed || !finite(e.value) || std::abs(e.deriv) == 0.0) {
                c.bad = true;
                return c;
            }
            c.near_hull = c.near_hull || e.near_hull;
            c.pos[i] = e.value;
            c.logd[i] = std::log(std::abs(e.deriv));
        }
    } else if (auto* sm = std::get_if<SimilarityRef>(&map)) {
        for (std::size_t i = 0; i < c.src.size(); ++i) {
            c.pos[i] = sm->scale * c.src[i] + sm->offset;
            c.logd[i] = std::log(sm->scale);
        }
    }
    for (std::size_t i = 0; i < c.src.size(); ++i)
        c.mean_logderiv += c.wt[i] * c.logd[i];
    return c;
}

/// Semicircle-pair constant: the mean of log|e^{i a} - e^{i b}| over the
/// upper half-circle in both angles, equal to -7 zeta(3) / (2 pi^2).
inline constexpr double semicircle_log_constant = -0.4262783988175058;

struct ProbeGaussian {
    Eigen::MatrixXd cov;
    Eigen::VectorXd mean;
    std::vector<std::uint8_t> near_hull;
    std::vector<std::uint8_t> bad;
    int bad_count = 0;
};

namespace detail {

inline double base_kernel(const CovarianceModel& model, cplx a, cplx b) {
    return model.kind() == FieldKind::dirichlet ? k_dirichlet(a, b) : g_free(a, b);
}

/// Probe-average of the normalization potential; exact at the center when
/// the probe support clears the disk and its reflection.
inline double rho_probe_average(const CovarianceModel& model, const Probe& p,
                                const ProbeCloud& cloud) {
    if (model.kind() != FieldKind::neumann) return 0.0;
    const DiskRho& rho = model.rho();
    if (!cloud.mapped &&
        std::abs(p.center - rho.center) > p.eps + rho.radius + 1e-12 &&
        std::abs(p.center - std::conj(rho.center)) > p.eps + rho.radius + 1e-12)
        return model.rho_potential(p.center);
    double s = 0.0;
    for (std::size_t i = 0; i < cloud.pos.size(); ++i)
        s += cloud.wt[i] * model.rho_potential(cloud.pos[i]);
    return s;
}

/// Shell-pair mean of log distance between two probes, exact via circle
/// averages of the harmonic pieces.
inline double shell_mean_log(double dist, const Probe& a, const Probe& b,
                             const Shells& sa, const Shells& sb) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.s.size(); ++i)
        for (std::size_t j = 0; j < sb.s.size(); ++j)
            acc += sa.w[i] * sb.w[j] *
                   mean_log_circle_pair(dist, a.eps * sa.s[i], b.eps * sb.s[j]);
    return acc;
}

}  // namespace detail

/// Covariance and mean of the jointly Gaussian probe pairings under the
/// model, including optional transport of the probes by a conformal map.
/// Closed forms are used whenever both probes are untransported and the
/// kernel pieces are harmonic across the relevant circles; otherwise the
/// entries fall back to node quadrature with the logarithmic singularity
/// integrated exactly.
inline ProbeGaussian probe_gaussian(const CovarianceModel& model,
                                    const ProbeSet& set) {
    const std::size_t n = set.probes.size();
    ProbeGaussian out;
    out.cov.resize(n, n);
    out.mean.resize(n);
    out.near_hull.assign(n, 0);
    out.bad.assign(n, 0);
    if (n == 0) return out;

    const bool dirichlet = model.kind() == FieldKind::dirichlet;
    const Shells shells = mollifier_shells(model.mollifier, model.bump_shells);
    if (model.mollifier == MollifierKind::bump && set.mapped())
        throw invalid_parameter("bump mollifier requires untransported probes");

    std::vector<ProbeCloud> clouds;
    clouds.reserve(n);
    for (const auto& p : set.probes) {
        if (p.regime == Regime::bulk && p.center.imag() - p.eps < -1e-12)
            throw invalid_parameter("bulk probe must keep a support margin");
        if (p.regime == Regime::boundary && p.center.imag() != 0.0)
            throw invalid_parameter("boundary probe center must be real");
        if (p.eps <= 0.0) throw invalid_parameter("probe scale must be positive");
        clouds.push_back(build_cloud(p, set.map, shells, set.angular_nodes));
        out.near_hull[clouds.size() - 1] = clouds.back().near_hull ? 1 : 0;
        out.bad[clouds.size() - 1] = clouds.back().bad ? 1 : 0;
        if (clouds.back().bad) ++out.bad_count;
    }

    std::vector<double> qbar(n, 0.0);
    if (model.kind() == FieldKind::neumann)
        for (std::size_t i = 0; i < n; ++i)
            if (!clouds[i].bad)
                qbar[i] = detail::rho_probe_average(model, set.probes[i], clouds[i]);

    auto needs_nodal = [&](std::size_t i, std::size_t j) {
        if (clouds[i].mapped || clouds[j].mapped) return true;
        if (dirichlet && (set.probes[i].regime == Regime::boundary ||
                          set.probes[j].regime == Regime::boundary))
            return true;  // the zero-boundary kernel is odd across the axis
        return false;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const Probe& pi = set.probes[i];
        const ProbeCloud& ci = clouds[i];
        if (ci.bad) {
            out.cov.row(i).setZero();
            out.cov.col(i).setZero();
            out.mean[i] = 0.0;
            continue;
        }

        // mean: drift term plus coordinate-change charge
        double mval = 0.0;
        if (model.kind() == FieldKind::wedge) {
            if (!ci.mapped) {
                for (std::size_t k = 0; k < shells.s.size(); ++k)
                    mval += shells.w[k] *
                            std::log(std::max(std::abs(pi.center), pi.eps * shells.s[k]));
                mval *= -model.alpha();
            } else {
                for (std::size_t a = 0; a < ci.pos.size(); ++a)
                    mval += ci.wt[a] * model.mean(ci.pos[a]);
            }
        }
        if (ci.mapped) mval += set.q_charge * ci.mean_logderiv;
        out.mean[i] = mval;

        for (std::size_t j = i; j < n; ++j) {
            const Probe& pj = set.probes[j];
            const ProbeCloud& cj = clouds[j];
            if (cj.bad) continue;
            double v;
            if (!needs_nodal(i, j)) {
                double ml = detail::shell_mean_log(std::abs(pi.center - pj.center),
                                                   pi, pj, shells, shells);
                double mr = detail::shell_mean_log(
                    std::abs(pi.center - std::conj(pj.center)), pi, pj, shells, shells);
                v = dirichlet ? (-ml + mr) : (-ml - mr);
            } else if (i != j) {
                double acc = 0.0;
                for (std::size_t a = 0; a < ci.pos.size(); ++a)
                    for (std::size_t b = 0; b < cj.pos.size(); ++b)
                        acc += ci.wt[a] * cj.wt[b] *
                               detail::base_kernel(model, ci.pos[a], cj.pos[b]);
                v = acc;
            } else {
                // same probe: exact average of -log|source distance| plus node
                // quadrature of the smooth remainder
                double sing = -std::log(pi.eps);
                if (pi.regime == Regime::boundary) sing -= semicircle_log_constant;
                double acc = 0.0;
                for (std::size_t a = 0; a < ci.pos.size(); ++a)
                    for (std::size_t b = 0; b < ci.pos.size(); ++b) {
                        double r;
                        if (a == b) {
                            double refl =
                                std::log(std::max(2.0 * ci.pos[a].imag(), 1e-300));
                            r = -ci.logd[a] + (dirichlet ? refl : -refl);
                        } else {
                            r = detail::base_kernel(model, ci.pos[a], ci.pos[b]) +
                                std::log(std::abs(ci.src[a] - ci.src[b]));
                        }
                        acc += ci.wt[a] * ci.wt[b] * r;
                    }
                v = sing + acc;
            }
            if (model.kind() == FieldKind::neumann)
                v += -qbar[i] - qbar[j] + model.rho_pair_term();
            out.cov(i, j) = v;
            out.cov(j, i) = v;
        }
    }
    return out;
}

/// Vector of pairing values for one field realization restricted to probes.
struct FieldSample {
    Eigen::VectorXd values;
    std::uint64_t seed = 0;
};

inline FieldSample sample_probes(const Eigen::MatrixXd& cov,
                                 const Eigen::VectorXd& means, std::uint64_t seed) {
    GaussianSampler g(cov, means);
    Rng rng(seed);
    return FieldSample{g.sample(rng), seed};
}

inline FieldSample sample_field(const CovarianceModel& model, const ProbeSet& set,
                                std::uint64_t seed) {
    ProbeGaussian pg = probe_gaussian(model, set);
    if (pg.bad_count > 0) throw hull_error("probe transported into the hull");
    return sample_probes(pg.cov, pg.mean, seed);
}

struct KhatResult {
    double value = 0.0;
    bool converged = false;
    std::vector<double> history;
};

/// Finite part of the pairing variance after removing the logarithmic
/// divergence: Var + log(eps) in the bulk, Var + 2 log(eps) on the boundary.
inline KhatResult khat(const CovarianceModel& model, cplx z, Regime regime,
                       const std::vector<double>& eps_schedule,
                       double tol = 5e-3) {
    if (eps_schedule.size() < 2)
        throw invalid_parameter("schedule needs at least two scales");
    for (std::size_t k = 1; k < eps_schedule.size(); ++k)
        if (eps_schedule[k] >= eps_schedule[k - 1])
            throw invalid_parameter("schedule must be strictly decreasing");
    KhatResult r;
    double nlog = (regime == Regime::bulk) ? 1.0 : 2.0;
    for (double eps : eps_schedule) {
        ProbeSet set;
        set.probes.push_back({z, eps, regime});
        ProbeGaussian pg = probe_gaussian(model, set);
        r.history.push_back(pg.cov(0, 0) + nlog * std::log(eps));
    }
    r.value = r.history.back();
    double last_change =
        std::abs(r.history.back() - r.history[r.history.size() - 2]);
    r.converged = last_change < tol;
    return r;
}

/// Covariance of the correction field between the whole-domain law and the
/// law pulled back from the complement of the hull at capacity s.
inline Eigen::MatrixXd markov_split_covariance(const CovarianceModel& model,
                                               const MapChain& chain,
                                               std::size_t s_idx,
                                               ProbeSet probes) {
    probes.map = std::monostate{};
    ProbeGaussian direct = probe_gaussian(model, probes);
    probes.map = ChainMapRef{&chain, 0, s_idx};
    probes.q_charge = 0.0;
    ProbeGaussian pulled = probe_gaussian(model, probes);
    if (pulled.bad_count > 0)
        throw hull_error("probe does not fit inside the sub-domain");
    Eigen::MatrixXd diff = direct.cov - pulled.cov;
    return psd_clip(diff).first;
}

}  // namespace sleq
