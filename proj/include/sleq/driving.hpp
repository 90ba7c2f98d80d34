#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sleq/core.hpp"
#include "sleq/rng.hpp"

namespace sleq {

/// Real-valued driving function sampled on a uniform capacity-time grid.
struct DrivingPath {
    double dt = 0.0;
    double kappa = 0.0;
    std::vector<double> w;  // values at 0, dt, ..., N*dt

    std::size_t steps() const { return w.empty() ? 0 : w.size() - 1; }
    double total_capacity() const { return dt * static_cast<double>(steps()); }

    double time_at(std::size_t k) const { return dt * static_cast<double>(k); }

    void validate() const {
        if (dt <= 0.0) throw grid_error("driving grid step must be positive");
        if (w.size() < 2) throw grid_error("driving path needs at least one step");
        if (kappa < 0.0 || kappa >= 4.0)
            throw invalid_parameter("kappa must lie in [0, 4)");
        for (double v : w)
            if (!finite(v)) throw invalid_parameter("driving value not finite");
    }

    static DrivingPath constant(double level, double dt, std::size_t steps) {
        DrivingPath p;
        p.dt = dt;
        p.kappa = 0.0;
        p.w.assign(steps + 1, level);
        return p;
    }
};

/// Brownian driving with variance kappa*dt per step; deterministic per seed.
inline DrivingPath sample_sle_driving(double kappa, double dt, double T,
                                      std::uint64_t seed) {
    if (kappa < 0.0 || kappa >= 4.0)
        throw invalid_parameter("kappa must lie in [0, 4)");
    if (dt <= 0.0) throw grid_error("dt must be positive");
    if (T < dt) throw grid_error("horizon shorter than one step");

    std::size_t n = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
    DrivingPath p;
    p.dt = dt;
    p.kappa = kappa;
    p.w.resize(n + 1);
    p.w[0] = 0.0;
    Rng rng(seed);
    double scale = std::sqrt(kappa * dt);
    for (std::size_t k = 1; k <= n; ++k) p.w[k] = p.w[k - 1] + scale * rng.normal();
    p.validate();
    return p;
}

/// Keep every `factor`-th grid point; used for grid-refinement comparisons.
inline DrivingPath subsample(const DrivingPath& fine, std::size_t factor) {
    DrivingPath p;
    p.dt = fine.dt * static_cast<double>(factor);
    p.kappa = fine.kappa;
    for (std::size_t k = 0; k < fine.w.size(); k += factor) p.w.push_back(fine.w[k]);
    return p;
}

/// Brownian-scaling companion path t -> W(lambda^2 t) / lambda on the
/// grid dt / lambda^2.
inline DrivingPath scaled(const DrivingPath& path, double lambda) {
    DrivingPath p;
    p.dt = path.dt / (lambda * lambda);
    p.kappa = path.kappa;
    p.w.reserve(path.w.size());
    for (double v : path.w) p.w.push_back(v / lambda);
    return p;
}

}  // namespace sleq
