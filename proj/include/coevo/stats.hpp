#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "coevo/errors.hpp"

namespace coevo::stats {

/// Pairwise (cascade) summation: deterministic regardless of how many threads
/// produced the inputs, and far more accurate than a running sum.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t mid = x.size() / 2;
    return pairwise_sum(x.first(mid)) + pairwise_sum(x.subspan(mid));
}

inline double mean(std::span<const double> x) {
    return x.empty() ? 0.0 : pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased sample variance via pairwise-summed centered squares.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
    return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

inline double stderr_of_mean(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

/// Survival function of the chi-squared distribution.
inline double chi_squared_sf(double stat, double dof) {
    if (stat <= 0.0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

struct Chi2Result {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Goodness of fit of observed counts against expected counts (same total).
/// Bins with expected count below `min_expected` are pooled into the last bin.
inline Chi2Result chi2_gof(std::span<const double> observed,
                           std::span<const double> expected,
                           double min_expected = 5.0) {
    std::vector<double> obs, exp;
    double pool_o = 0.0, pool_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < min_expected) {
            pool_o += observed[i];
            pool_e += expected[i];
        } else {
            obs.push_back(observed[i]);
            exp.push_back(expected[i]);
        }
    }
    if (pool_e > 0.0) {
        obs.push_back(pool_o);
        exp.push_back(pool_e);
    }
    Chi2Result r;
    if (obs.size() < 2) return r;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (exp[i] > 0.0) r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    }
    r.dof = static_cast<double>(obs.size() - 1);
    r.p_value = chi_squared_sf(r.statistic, r.dof);
    return r;
}

/// Two-sample homogeneity test on a pair of count histograms over shared bins
/// (2 x B contingency table, dof = B - 1). Bins whose pooled expected count is
/// below `min_expected` on either side are merged rightward.
inline Chi2Result chi2_two_sample(std::span<const double> counts_a,
                                  std::span<const double> counts_b,
                                  double min_expected = 5.0) {
    const double na = pairwise_sum(counts_a);
    const double nb = pairwise_sum(counts_b);
    const double total = na + nb;
    std::vector<double> a, b;
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        pa += counts_a[i];
        pb += counts_b[i];
        const double col = pa + pb;
        if (na * col / total >= min_expected && nb * col / total >= min_expected) {
            a.push_back(pa);
            b.push_back(pb);
            pa = pb = 0.0;
        }
    }
    if (pa + pb > 0.0) {
        // Leftover small tail: fold into the previous bin.
        if (!a.empty()) {
            a.back() += pa;
            b.back() += pb;
        } else {
            a.push_back(pa);
            b.push_back(pb);
        }
    }
    Chi2Result r;
    if (a.size() < 2) return r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double col = a[i] + b[i];
        const double ea = na * col / total;
        const double eb = nb * col / total;
        r.statistic += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    r.dof = static_cast<double>(a.size() - 1);
    r.p_value = chi_squared_sf(r.statistic, r.dof);
    return r;
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a CDF given as sorted
/// theoretical values F(x_i) for the sorted sample x_i.
template <typename Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const auto n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    KsResult r;
    r.statistic = d;
    // Stephens' small-sample correction, then the Kolmogorov series.
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * j * j * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    r.p_value = std::clamp(p, 0.0, 1.0);
    return r;
}

}  // namespace coevo::stats
