#pragma once

// Independent brute-force oracles used by the tests. These deliberately use
// different discretizations than the library paths they check.

#include <cmath>
#include <functional>

#include "sleq/core.hpp"

namespace oracles {

using sleq::cplx;
using sleq::pi;

/// Mean of f over two mollifier circles by a dense midpoint double sum. The
/// kernel is assumed smooth on the node set (disjoint circles).
inline double pair_mean(const std::function<double(cplx, cplx)>& f, cplx c1,
                        double e1, bool semi1, cplx c2, double e2, bool semi2,
                        int m = 600) {
    double span1 = semi1 ? pi : 2.0 * pi;
    double span2 = semi2 ? pi : 2.0 * pi;
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
        cplx x = c1 + e1 * std::exp(cplx(0.0, span1 * (a + 0.5) / m));
        for (int b = 0; b < m; ++b) {
            cplx y = c2 + e2 * std::exp(cplx(0.0, span2 * (b + 0.5) / m));
            acc += f(x, y);
        }
    }
    return acc / (double(m) * double(m));
}

/// Same-circle mean of K with a -log|x-y| singularity: off-diagonal cells by
/// midpoint, diagonal cells by the exact log moment of a flat segment.
inline double self_mean(const std::function<double(cplx, cplx)>& smooth_part,
                        cplx c, double e, bool semi, int m = 2000) {
    double span = semi ? pi : 2.0 * pi;
    double h = span / m;
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
        double ta = span * (a + 0.5) / m;
        cplx x = c + e * std::exp(cplx(0.0, ta));
        for (int b = 0; b < m; ++b) {
            if (a == b) {
                // int over a diagonal cell of -log(e |t - s|), exact:
                // mean = -log(e h) + 3/2
                acc += -std::log(e * h) + 1.5 + smooth_part(x, x);
            } else {
                double tb = span * (b + 0.5) / m;
                cplx y = c + e * std::exp(cplx(0.0, tb));
                acc += -std::log(std::abs(x - y)) + smooth_part(x, y);
            }
        }
    }
    return acc / (double(m) * double(m));
}

}  // namespace oracles
