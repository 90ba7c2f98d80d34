#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "sleq/core.hpp"
#include "sleq/driving.hpp"

namespace sleq {

/// One elementary vertical-slit map of capacity `dt` rooted at driving
/// position `u`: z -> u + sqrt((z-u)^2 + 4 dt) with the upper branch.
struct SlitStep {
    double dt;
    double u;
};

struct MapEval {
    cplx value{0.0, 0.0};
    cplx deriv{1.0, 0.0};
    bool near_hull = false;
    bool swallowed = false;
};

/// Tip positions eta(t_k) recovered from the backward flow.
struct TraceSample {
    std::vector<double> times;
    std::vector<cplx> tips;
    std::vector<std::uint8_t> resolved;

    std::size_t size() const { return times.size(); }
    std::size_t unresolved_count() const {
        std::size_t n = 0;
        for (auto r : resolved)
            if (!r) ++n;
        return n;
    }
};

/// Composable discrete Loewner chain for piecewise-constant driving. The
/// forward composition of steps 1..k realizes g_{t_k}; the normalized maps
/// between pictures subtract the driving value of the target picture.
class MapChain {
  public:
    MapChain() = default;

    static MapChain from_driving(const DrivingPath& path) {
        path.validate();
        MapChain c;
        c.dt_ = path.dt;
        c.w_ = path.w;
        c.steps_.reserve(path.steps());
        for (std::size_t k = 1; k < path.w.size(); ++k)
            c.steps_.push_back({path.dt, path.w[k]});
        return c;
    }

    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    double dt() const { return dt_; }
    double capacity() const { return dt_ * static_cast<double>(steps_.size()); }
    double driving_at(std::size_t k) const { return w_.at(k); }
    const std::vector<double>& driving() const { return w_; }

    double clearance() const { return clearance_; }
    void set_clearance(double c) { clearance_ = c; }

    /// Grid index of a capacity time; throws if not grid-aligned.
    std::size_t index_of_time(double t) const {
        double k = t / dt_;
        auto ik = static_cast<long long>(std::llround(k));
        if (ik < 0 || std::abs(k - static_cast<double>(ik)) > 1e-6)
            throw alignment_error("time not on the capacity grid");
        if (static_cast<std::size_t>(ik) > size())
            throw capacity_error("time exceeds chain capacity");
        return static_cast<std::size_t>(ik);
    }

    /// Raw forward composition of steps from+1 .. to (g-flow, no offsets).
    MapEval forward_raw(cplx z, std::size_t from, std::size_t to) const {
        MapEval e;
        e.value = z;
        for (std::size_t k = from; k < to; ++k) {
            const SlitStep& s = steps_[k];
            cplx w = e.value - s.u;
            double half = 2.0 * std::sqrt(s.dt);
            double d = dist_to_slit(w, half);
            if (d < swallow_tol_) {
                e.swallowed = true;
                e.near_hull = true;
                return e;
            }
            if (d < clearance_) e.near_hull = true;
            cplx root = sqrt_upper(w * w + 4.0 * s.dt);
            e.deriv *= w / root;
            e.value = s.u + root;
            if (!finite(e.value)) {
                e.swallowed = true;
                return e;
            }
        }
        return e;
    }

    /// Raw backward composition of inverse steps from .. to+1.
    MapEval backward_raw(cplx z, std::size_t from, std::size_t to) const {
        MapEval e;
        e.value = z;
        for (std::size_t k = from; k > to; --k) {
            const SlitStep& s = steps_[k - 1];
            cplx w = e.value - s.u;
            double half = 2.0 * std::sqrt(s.dt);
            double d = dist_to_base_segment(w, half);
            if (d < clearance_) e.near_hull = true;
            cplx zeta = w * w - 4.0 * s.dt;
            cplx root = sqrt_upper(zeta);
            if (std::abs(root) < swallow_tol_) {
                // exact tip preimage; derivative degenerates
                e.near_hull = true;
                e.value = s.u;
                e.deriv = cplx(0.0, 0.0);
                continue;
            }
            e.deriv *= w / root;
            e.value = s.u + root;
            if (!finite(e.value)) {
                e.swallowed = true;
                return e;
            }
        }
        return e;
    }

    /// Normalized map between pictures: phi_s^t with phi_s^t(z) = z + O(1)
    /// at infinity and the time-t tip sent to 0. Works in both directions.
    MapEval map(std::size_t s, std::size_t t, cplx z) const {
        check_idx(s);
        check_idx(t);
        MapEval e;
        if (s == t) {
            e.value = z;
            return e;
        }
        if (s < t)
            e = forward_raw(z + w_[s], s, t);
        else
            e = backward_raw(z + w_[s], s, t);
        e.value -= w_[t];
        return e;
    }

    /// Boundary variant with a side tag (+1 right prime end, -1 left) used
    /// to disambiguate points sitting exactly at a slit base. Unzipping a
    /// boundary point keeps it on the boundary; zipping may lift it onto
    /// the hull, after which evaluation continues in the bulk.
    MapEval map_boundary(std::size_t s, std::size_t t, double x, int side) const {
        check_idx(s);
        check_idx(t);
        MapEval e;
        e.value = cplx(x, 0.0);
        if (s == t) return e;

        double xr = x + w_[s];
        double deriv = 1.0;
        bool nh = false;
        if (s < t) {
            for (std::size_t k = s; k < t; ++k) {
                const SlitStep& st = steps_[k];
                double rel = xr - st.u;
                double root = std::sqrt(rel * rel + 4.0 * st.dt);
                int sgn = rel > 0.0 ? 1 : (rel < 0.0 ? -1 : side);
                if (std::abs(rel) < clearance_) nh = true;
                deriv *= std::abs(rel) / root;
                xr = st.u + sgn * root;
            }
            e.value = cplx(xr - w_[t], 0.0);
            e.deriv = cplx(deriv, 0.0);
            e.near_hull = nh;
            return e;
        }

        // zip direction: track the real line until the point lifts off
        cplx zc(0.0, 0.0);
        cplx dcv(1.0, 0.0);
        bool lifted = false;
        std::size_t k = s;
        for (; k > t && !lifted; --k) {
            const SlitStep& st = steps_[k - 1];
            double rel = xr - st.u;
            double zeta = rel * rel - 4.0 * st.dt;
            if (std::abs(rel) - 2.0 * std::sqrt(st.dt) < clearance_) nh = true;
            if (zeta > 0.0) {
                double root = std::sqrt(zeta);
                int sgn = rel > 0.0 ? 1 : (rel < 0.0 ? -1 : side);
                deriv *= std::abs(rel) / root;
                xr = st.u + sgn * root;
            } else {
                double root = std::sqrt(-zeta);
                if (root < swallow_tol_) {
                    zc = cplx(st.u, 0.0);
                    dcv = cplx(0.0, 0.0);
                } else {
                    zc = cplx(st.u, root);
                    dcv = cplx(rel, 0.0) / cplx(0.0, root);
                }
                dcv *= deriv;
                lifted = true;
            }
        }
        if (!lifted) {
            e.value = cplx(xr - w_[t], 0.0);
            e.deriv = cplx(deriv, 0.0);
            e.near_hull = nh;
            return e;
        }
        MapEval tail = backward_raw(zc, k, t);
        e.value = tail.value - w_[t];
        e.deriv = dcv * tail.deriv;
        e.near_hull = nh || tail.near_hull;
        e.swallowed = tail.swallowed;
        return e;
    }

    /// Half-plane capacity estimate from the hydrodynamic expansion at iR.
    double capacity_estimate(double R = 0.0) const {
        if (empty()) return 0.0;
        if (R <= 0.0) R = 1000.0 * hull_diameter_estimate();
        cplx g = forward_raw(cplx(0.0, R), 0, size()).value;
        return -std::imag(g - cplx(0.0, R)) * R / 2.0;
    }

    double hull_diameter_estimate() const {
        double lo = w_[0], hi = w_[0];
        for (double v : w_) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return std::max(1.0, hi - lo + 4.0 * std::sqrt(capacity()));
    }

  private:
    static double dist_to_slit(cplx w, double half_height) {
        double y = std::clamp(w.imag(), 0.0, half_height);
        return std::hypot(w.real(), w.imag() - y);
    }

    static double dist_to_base_segment(cplx w, double half_width) {
        double dx = std::max(0.0, std::abs(w.real()) - half_width);
        return std::hypot(dx, w.imag());
    }

    void check_idx(std::size_t k) const {
        if (k > size()) throw capacity_error("picture index exceeds chain");
    }

    std::vector<SlitStep> steps_;
    std::vector<double> w_{0.0};
    double dt_ = 0.0;
    double clearance_ = 1e-3;
    static constexpr double swallow_tol_ = 1e-13;
};

/// Tip recovery by pulling W_t + i*eps back through the inverted chain.
inline TraceSample compute_trace_indices(const MapChain& chain,
                                         const std::vector<std::size_t>& indices,
                                         double eps_lift) {
    if (eps_lift <= 0.0) throw invalid_parameter("eps_lift must be positive");
    TraceSample tr;
    tr.times.reserve(indices.size());
    tr.tips.reserve(indices.size());
    tr.resolved.reserve(indices.size());
    for (std::size_t k : indices) {
        cplx z0(chain.driving_at(k), eps_lift);
        MapEval e = chain.backward_raw(z0, k, 0);
        bool ok = !e.swallowed && finite(e.value) && e.value.imag() > -1e-9;
        tr.times.push_back(chain.dt() * static_cast<double>(k));
        tr.tips.push_back(e.value);
        tr.resolved.push_back(ok ? 1 : 0);
    }
    return tr;
}

inline TraceSample compute_trace(const MapChain& chain,
                                 const std::vector<double>& times,
                                 double eps_lift) {
    std::vector<std::size_t> idx;
    idx.reserve(times.size());
    for (double t : times) idx.push_back(chain.index_of_time(t));
    return compute_trace_indices(chain, idx, eps_lift);
}

/// Trace with dyadic index refinement until consecutive tips are closer
/// than max_gap (or adjacent on the grid).
inline TraceSample trace_adaptive(const MapChain& chain, std::size_t t_idx,
                                  double max_gap, double eps_lift,
                                  std::size_t initial_stride = 16) {
    std::map<std::size_t, cplx> memo;
    auto tip = [&](std::size_t k) {
        auto it = memo.find(k);
        if (it != memo.end()) return it->second;
        cplx z0(chain.driving_at(k), eps_lift);
        cplx v = chain.backward_raw(z0, k, 0).value;
        memo.emplace(k, v);
        return v;
    };

    std::vector<std::pair<std::size_t, std::size_t>> stack;
    std::size_t stride = std::max<std::size_t>(1, initial_stride);
    for (std::size_t a = 0; a < t_idx; a += stride)
        stack.emplace_back(a, std::min(a + stride, t_idx));
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        if (b - a <= 1) continue;
        if (std::abs(tip(a) - tip(b)) <= max_gap) continue;
        std::size_t m = a + (b - a) / 2;
        tip(m);
        stack.emplace_back(a, m);
        stack.emplace_back(m, b);
    }
    tip(0);
    tip(t_idx);

    TraceSample tr;
    tr.times.reserve(memo.size());
    for (auto& [k, v] : memo) {
        tr.times.push_back(chain.dt() * static_cast<double>(k));
        tr.tips.push_back(v);
        tr.resolved.push_back(finite(v) && v.imag() > -1e-9 ? 1 : 0);
    }
    return tr;
}

/// Monotone table of boundary images x(u) = phi_u^t(0+) for grid indices
/// u = 0..t. The table maps curve capacity to the unzipped right-side
/// boundary coordinate; it is strictly decreasing in u.
struct BoundaryCapacityMap {
    std::vector<std::size_t> idx;
    std::vector<double> x;
    const MapChain* chain = nullptr;
    std::size_t t_idx = 0;

    /// Capacity time at which the unzipped right side passes through xq.
    double capacity_at(double xq) const {
        if (x.empty()) return 0.0;
        if (xq >= x.front()) return 0.0;
        if (xq <= x.back()) return chain->dt() * static_cast<double>(t_idx);
        // table bracket (x decreasing)
        std::size_t lo = 0, hi = x.size() - 1;
        while (hi - lo > 1) {
            std::size_t m = (lo + hi) / 2;
            if (x[m] > xq)
                lo = m;
            else
                hi = m;
        }
        // refine on the grid between idx[lo] and idx[hi]
        std::size_t a = idx[lo], b = idx[hi];
        double xa = x[lo], xb = x[hi];
        while (b - a > 1) {
            std::size_t m = a + (b - a) / 2;
            double xm = chain->map_boundary(m, t_idx, 0.0, +1).value.real();
            if (xm > xq) {
                a = m;
                xa = xm;
            } else {
                b = m;
                xb = xm;
            }
        }
        // linear interpolation within one grid cell
        double f = (xa - xq) / std::max(1e-300, xa - xb);
        return chain->dt() * (static_cast<double>(a) + std::clamp(f, 0.0, 1.0));
    }
};

inline BoundaryCapacityMap boundary_capacity_map(const MapChain& chain,
                                                 std::size_t t_idx,
                                                 std::size_t stride = 8) {
    BoundaryCapacityMap m;
    m.chain = &chain;
    m.t_idx = t_idx;
    for (std::size_t u = 0;; u += stride) {
        std::size_t k = std::min(u, t_idx);
        m.idx.push_back(k);
        m.x.push_back(chain.map_boundary(k, t_idx, 0.0, +1).value.real());
        if (k == t_idx) break;
    }
    return m;
}

}  // namespace sleq
