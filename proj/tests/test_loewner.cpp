#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "sleq/driving.hpp"
#include "sleq/loewner.hpp"
#include "sleq/rng.hpp"
#include "sleq/stats.hpp"

using namespace sleq;
using Catch::Approx;

namespace {

MapChain zero_chain(double dt, std::size_t steps) {
    return MapChain::from_driving(DrivingPath::constant(0.0, dt, steps));
}

}  // namespace

TEST_CASE("driving sampler basics") {
    SECTION("kappa = 0 gives the zero path") {
        auto p = sample_sle_driving(0.0, 0.01, 1.0, 7);
        REQUIRE(p.w.size() == 101);
        for (double v : p.w) REQUIRE(v == 0.0);
    }

    SECTION("same seed twice gives bitwise-identical paths") {
        auto a = sample_sle_driving(2.0, 0.001, 1.0, 42);
        auto b = sample_sle_driving(2.0, 0.001, 1.0, 42);
        REQUIRE(a.w == b.w);
        auto c = sample_sle_driving(2.0, 0.001, 1.0, 43);
        REQUIRE(a.w != c.w);
    }

    SECTION("terminal variance matches kappa T over seeds") {
        const int n = 10000;
        std::vector<double> endpoints;
        endpoints.reserve(n);
        for (int s = 0; s < n; ++s)
            endpoints.push_back(sample_sle_driving(2.0, 0.001, 1.0, 1000 + s).w.back());
        double v = variance(endpoints);
        // sampling SE of the variance of a Gaussian: var * sqrt(2/(n-1))
        double se = 2.0 * std::sqrt(2.0 / (n - 1.0));
        REQUIRE(std::abs(v - 2.0) < 3.0 * se);
    }

    SECTION("disjoint-block increments are uncorrelated") {
        const int n = 10000;
        std::vector<double> first, second;
        for (int s = 0; s < n; ++s) {
            auto p = sample_sle_driving(2.0, 0.01, 1.0, 50000 + s);
            first.push_back(p.w[50] - p.w[0]);
            second.push_back(p.w[100] - p.w[50]);
        }
        REQUIRE(std::abs(correlation(first, second)) < 3.0 / std::sqrt(double(n)));
    }

    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(sample_sle_driving(4.0, 0.01, 1.0, 1), invalid_parameter);
        REQUIRE_THROWS_AS(sample_sle_driving(5.0, 0.01, 1.0, 1), invalid_parameter);
        REQUIRE_THROWS_AS(sample_sle_driving(2.0, 0.0, 1.0, 1), grid_error);
        REQUIRE_THROWS_AS(sample_sle_driving(2.0, -0.1, 1.0, 1), grid_error);
    }
}

TEST_CASE("forward flow closed forms") {
    SECTION("zero driving: g_1(3i) = i sqrt 5") {
        auto c = zero_chain(1e-3, 1000);
        cplx g = c.forward_raw(cplx(0.0, 3.0), 0, c.size()).value;
        REQUIRE(std::abs(g - cplx(0.0, std::sqrt(5.0))) < 1e-12);
    }

    SECTION("constant driving translates the picture") {
        double cc = 1.7;
        auto c = MapChain::from_driving(DrivingPath::constant(cc, 1e-3, 1000));
        cplx g = c.forward_raw(cplx(cc, 3.0), 0, c.size()).value;
        REQUIRE(std::abs(g - cplx(cc, std::sqrt(5.0))) < 1e-12);
    }

    SECTION("grid refinement self-convergence at z = 5i") {
        auto fine = sample_sle_driving(2.0, 2.5e-4, 1.0, 7);
        auto coarse = subsample(fine, 4);
        auto cf = MapChain::from_driving(fine);
        auto cc = MapChain::from_driving(coarse);
        cplx gf = cf.forward_raw(cplx(0.0, 5.0), 0, cf.size()).value;
        cplx gc = cc.forward_raw(cplx(0.0, 5.0), 0, cc.size()).value;
        REQUIRE(std::abs(gf - gc) < 1e-3);
    }

    SECTION("point on the hull is reported swallowed") {
        auto c = zero_chain(1e-3, 1000);
        auto e = c.forward_raw(cplx(0.0, 0.5), 0, c.size());
        REQUIRE(e.swallowed);
    }
}

TEST_CASE("trace recovery") {
    SECTION("zero driving tip is 2 i sqrt t") {
        auto c = zero_chain(1e-3, 1000);
        for (double t : {0.1, 0.25, 0.5, 0.75, 1.0}) {
            auto tr = compute_trace(c, {t}, 1e-4);
            REQUIRE(tr.resolved[0] == 1);
            REQUIRE(std::abs(tr.tips[0] - cplx(0.0, 2.0 * std::sqrt(t))) < 1e-2);
        }
    }

    SECTION("constant driving translates the slit") {
        auto c = MapChain::from_driving(DrivingPath::constant(1.0, 1e-3, 4000));
        auto tr = compute_trace(c, {4.0}, 1e-4);
        REQUIRE(std::abs(tr.tips[0] - cplx(1.0, 4.0)) < 1e-2);
    }

    SECTION("lift refinement self-convergence for kappa = 2") {
        auto path = sample_sle_driving(2.0, 1e-3, 1.0, 11);
        auto c = MapChain::from_driving(path);
        std::vector<double> times;
        for (int k = 1; k <= 20; ++k) times.push_back(0.05 * k);
        auto a = compute_trace(c, times, 1e-3);
        auto b = compute_trace(c, times, 1e-4);
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            worst = std::max(worst, std::abs(a.tips[i] - b.tips[i]));
        REQUIRE(worst < 1e-2);
    }

    SECTION("Brownian-scaling covariance of the slit composition") {
        double lambda = 2.0;
        auto path = sample_sle_driving(2.0, 4e-3, 1.0, 19);
        auto cpath = scaled(path, lambda);
        auto c1 = MapChain::from_driving(path);
        auto c2 = MapChain::from_driving(cpath);
        std::vector<std::size_t> idx;
        for (std::size_t k = 25; k <= path.steps(); k += 25) idx.push_back(k);
        auto t1 = compute_trace_indices(c1, idx, 1e-4);
        auto t2 = compute_trace_indices(c2, idx, 1e-4 / lambda);
        for (std::size_t i = 0; i < idx.size(); ++i)
            REQUIRE(std::abs(t2.tips[i] - t1.tips[i] / lambda) < 1e-10);
    }
}

TEST_CASE("capacity bookkeeping") {
    SECTION("unit slit capacity from the expansion") {
        auto c = zero_chain(1e-3, 1000);
        REQUIRE(std::abs(c.capacity_estimate(1e3) - 1.0) < 1e-4);
    }

    SECTION("empty chain has zero capacity") {
        MapChain c;
        REQUIRE(c.capacity_estimate() == 0.0);
        REQUIRE(c.capacity() == 0.0);
    }

    SECTION("kappa = 2 capacity via two-radius extrapolation") {
        auto path = sample_sle_driving(2.0, 1e-3, 0.5, 23);
        auto c = MapChain::from_driving(path);
        double R = 1000.0 * c.hull_diameter_estimate();
        double a1 = c.capacity_estimate(R);
        double a2 = c.capacity_estimate(2.0 * R);
        double extrap = 2.0 * a2 - a1;
        REQUIRE(std::abs(extrap - 0.5) < 1e-3);
        REQUIRE(std::abs(c.capacity_estimate() - 0.5) < 1e-3);
    }
}

TEST_CASE("picture maps") {
    SECTION("s = t is the identity") {
        auto path = sample_sle_driving(2.0, 1e-3, 1.0, 3);
        auto c = MapChain::from_driving(path);
        auto e = c.map(350, 350, cplx(0.3, 0.9));
        REQUIRE(e.value == cplx(0.3, 0.9));
        REQUIRE(e.deriv == cplx(1.0, 0.0));
    }

    SECTION("zero driving closed form with derivative") {
        auto c = zero_chain(1e-3, 1000);
        auto e = c.map(0, c.size(), cplx(0.0, 3.0));
        REQUIRE(std::abs(e.value - cplx(0.0, std::sqrt(5.0))) < 1e-12);
        REQUIRE(std::abs(e.deriv - cplx(3.0 / std::sqrt(5.0), 0.0)) < 1e-12);
    }

    SECTION("composition identity phi_0^t = phi_s^t o phi_0^s") {
        auto path = sample_sle_driving(2.0, 1e-3, 1.0, 29);
        auto c = MapChain::from_driving(path);
        Rng rng(5);
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            std::size_t s = 1 + static_cast<std::size_t>(rng.uniform() * 500);
            std::size_t t = s + static_cast<std::size_t>(rng.uniform() * 499) + 1;
            for (int gx = 0; gx < 10; ++gx)
                for (int gy = 1; gy <= 10; ++gy) {
                    cplx z(-2.0 + 0.45 * gx, 0.4 * gy);
                    auto whole = c.map(0, t, z);
                    auto half = c.map(0, s, z);
                    if (half.swallowed) continue;
                    auto rest = c.map(s, t, half.value);
                    if (whole.swallowed || rest.swallowed) continue;
                    worst = std::max(worst, std::abs(whole.value - rest.value));
                }
        }
        REQUIRE(worst < 1e-6);
    }

    SECTION("zip inverts unzip on bulk points") {
        auto path = sample_sle_driving(2.0, 1e-3, 1.0, 31);
        auto c = MapChain::from_driving(path);
        cplx z(0.7, 1.3);
        auto up = c.map(0, 800, z);
        auto back = c.map(800, 0, up.value);
        REQUIRE(std::abs(back.value - z) < 1e-9);
        REQUIRE(std::abs(back.deriv * up.deriv - 1.0) < 1e-9);
    }

    SECTION("derivative matches central finite differences") {
        auto path = sample_sle_driving(2.0, 1e-3, 1.0, 37);
        auto c = MapChain::from_driving(path);
        double h = 1e-6;
        for (cplx z : {cplx(1.2, 0.8), cplx(-0.9, 1.4), cplx(0.2, 2.0)}) {
            auto e = c.map(0, 1000, z);
            auto ep = c.map(0, 1000, z + h);
            auto em = c.map(0, 1000, z - h);
            cplx fd = (ep.value - em.value) / (2.0 * h);
            REQUIRE(std::abs(fd - e.deriv) / std::abs(e.deriv) < 1e-4);
        }
    }

    SECTION("time alignment is enforced") {
        auto path = sample_sle_driving(2.0, 1e-3, 1.0, 3);
        auto c = MapChain::from_driving(path);
        REQUIRE_THROWS_AS(c.index_of_time(0.01037), alignment_error);
        REQUIRE_THROWS_AS(c.index_of_time(2.0), capacity_error);
        REQUIRE(c.index_of_time(0.25) == 250);
    }
}

TEST_CASE("boundary evaluation") {
    SECTION("unzipped base point of the slit") {
        auto c = zero_chain(1e-3, 1000);
        auto e = c.map_boundary(0, c.size(), 0.0, +1);
        REQUIRE(e.value.imag() == 0.0);
        REQUIRE(e.value.real() == Approx(2.0).margin(1e-9));
        auto el = c.map_boundary(0, c.size(), 0.0, -1);
        REQUIRE(el.value.real() == Approx(-2.0).margin(1e-9));
    }

    SECTION("zipping a boundary point onto the slit") {
        auto c = zero_chain(1e-5, 100000);
        auto e = c.map_boundary(c.size(), 0, 1.0, +1);
        REQUIRE(std::abs(e.value - cplx(0.0, std::sqrt(3.0))) < 1e-3);
    }

    SECTION("capacity map inverts the boundary image") {
        auto c = zero_chain(1e-4, 10000);
        auto bm = boundary_capacity_map(c, c.size(), 16);
        for (double u : {0.1, 0.35, 0.62, 0.9}) {
            double xq = 2.0 * std::sqrt(1.0 - u);
            REQUIRE(bm.capacity_at(xq) == Approx(u).margin(2e-4));
        }
    }
}

TEST_CASE("adaptive trace refinement") {
    auto path = sample_sle_driving(2.0, 1e-3, 0.5, 41);
    auto c = MapChain::from_driving(path);
    auto tr = trace_adaptive(c, c.size(), 0.02, 1e-4);
    REQUIRE(tr.size() > 100);
    for (std::size_t i = 1; i < tr.size(); ++i) {
        bool adjacent = (tr.times[i] - tr.times[i - 1]) <= c.dt() * 1.5;
        bool close = std::abs(tr.tips[i] - tr.tips[i - 1]) <= 0.02 + 1e-12;
        REQUIRE((adjacent || close));
    }
}
