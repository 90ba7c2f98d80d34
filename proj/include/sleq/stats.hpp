#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sleq/core.hpp"

namespace sleq {

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += sq(v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

inline double standard_error(std::span<const double> x) {
    return x.empty() ? 0.0 : stddev(x) / std::sqrt(static_cast<double>(x.size()));
}

inline double median(std::vector<double> x) {
    if (x.empty()) return 0.0;
    std::size_t n = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + n, x.end());
    double hi = x[n];
    if (x.size() % 2 == 1) return hi;
    std::nth_element(x.begin(), x.begin() + n - 1, x.end());
    return 0.5 * (hi + x[n - 1]);
}

/// Coefficient of variation (population SD over mean).
inline double coeff_of_variation(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double m = mean(x);
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double v : x) s += sq(v - m);
    return std::sqrt(s / static_cast<double>(x.size())) / std::abs(m);
}

inline double correlation(std::span<const double> x, std::span<const double> y) {
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += sq(x[i] - mx);
        syy += sq(y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    LinearFit f;
    if (x.size() < 2) return f;
    double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += sq(x[i] - mx);
        syy += sq(y[i] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy == 0.0) ? 1.0 : sq(sxy) / (sxx * syy);
    return f;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double va = a[i], vb = b[j];
        double v = std::min(va, vb);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * std::exp(-2.0 * sq(static_cast<double>(j) * lambda));
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

inline double ks_pvalue(double stat, std::size_t n, std::size_t m) {
    double ne = static_cast<double>(n) * static_cast<double>(m) /
                static_cast<double>(n + m);
    double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * stat;
    return kolmogorov_tail(lambda);
}

struct TailIndexEstimate {
    double index = 0.0;
    std::size_t order_statistics = 0;
};

/// Hill estimator over the top k order statistics.
inline TailIndexEstimate hill_tail_index(std::vector<double> x, std::size_t k = 0) {
    TailIndexEstimate e;
    std::sort(x.begin(), x.end(), std::greater<>());
    if (k == 0) k = std::clamp<std::size_t>(x.size() / 20, 10, 500);
    if (x.size() < k + 1 || x[k] <= 0.0) return e;
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(x[i] / x[k]);
    if (s <= 0.0) return e;
    e.index = static_cast<double>(k) / s;
    e.order_statistics = k;
    return e;
}

/// Chi-square statistic for uniformity of values in [0,1) over `bins` bins.
inline double chi_square_uniform(std::span<const double> unit_values, int bins) {
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double u : unit_values) {
        int b = std::clamp(static_cast<int>(u * bins), 0, bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    double expect = static_cast<double>(unit_values.size()) / bins;
    double stat = 0.0;
    for (double c : counts) stat += sq(c - expect) / expect;
    return stat;
}

}  // namespace sleq
