#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/tree.hpp"

namespace coevo {

/// Children adjacency, built on demand (simulators store parents only).
inline std::vector<std::vector<std::uint64_t>> build_children(const TreeState& t) {
    std::vector<std::vector<std::uint64_t>> ch(t.n());
    for (std::uint64_t v = 1; v < t.n(); ++v) ch[t.parent[v]].push_back(v);
    return ch;
}

/// degree(v) = #children + (1 unless root). Returns counts[k] = #vertices of
/// degree k.
inline std::vector<std::uint64_t> degree_histogram(const TreeState& t) {
    std::vector<std::uint64_t> deg(t.n(), 0);
    for (std::uint64_t v = 1; v < t.n(); ++v) {
        ++deg[t.parent[v]];
        ++deg[v];
    }
    std::vector<std::uint64_t> counts;
    for (std::uint64_t v = 0; v < t.n(); ++v) {
        if (deg[v] >= counts.size()) counts.resize(deg[v] + 1, 0);
        ++counts[deg[v]];
    }
    return counts;
}

inline std::vector<std::uint64_t> degree_sequence(const TreeState& t) {
    std::vector<std::uint64_t> deg(t.n(), 0);
    for (std::uint64_t v = 1; v < t.n(); ++v) {
        ++deg[t.parent[v]];
        ++deg[v];
    }
    return deg;
}

inline std::uint64_t root_degree(const TreeState& t) {
    std::uint64_t d = 0;
    for (std::uint64_t v = 1; v < t.n(); ++v)
        if (t.parent[v] == 0) ++d;
    return d;
}

inline std::uint32_t height(const TreeState& t) {
    std::uint32_t h = 0;
    for (auto d : t.depth) h = std::max(h, d);
    return h;
}

/// counts[i] = #vertices at depth i.
struct ProfileVector {
    std::vector<std::uint64_t> counts;
};

inline ProfileVector depth_profile(const TreeState& t) {
    ProfileVector p;
    p.counts.assign(static_cast<std::size_t>(height(t)) + 1, 0);
    for (auto d : t.depth) ++p.counts[d];
    return p;
}

/// P*_s functional: sum_{i>=1} s^{-i} * counts[i].
inline double weighted_profile(const TreeState& t, double s) {
    if (!(s > 0.0)) throw ParamOutOfRange("weighted_profile: s > 0");
    const ProfileVector p = depth_profile(t);
    double acc = 0.0;
    for (std::size_t i = p.counts.size(); i-- > 1;)
        acc = acc / s + static_cast<double>(p.counts[i]);
    return acc / s;
}

// ---------------------------------------------------------------------------
// PageRank.
// ---------------------------------------------------------------------------

struct PageRankVector {
    double damping = 0.5;
    std::vector<double> scores;  // graph-normalized R_{v,c}(n)
};

/// Graph-normalized scores by one bottom-up pass in reverse arrival order:
/// R_v = (1-c) + c * sum_{children} R_u.
inline PageRankVector pagerank_scores(const TreeState& t, double c) {
    if (!(c > 0.0 && c < 1.0)) throw ParamOutOfRange("pagerank: c in (0,1)");
    PageRankVector pr;
    pr.damping = c;
    pr.scores.assign(t.n(), 1.0 - c);
    for (std::uint64_t v = t.n(); v-- > 1;)
        pr.scores[t.parent[v]] += c * pr.scores[v];
    return pr;
}

/// Oracle: R_v = (1-c)(1 + sum_l c^l P_l(v)) with the path counts P_l(v)
/// (descendants of v at distance l) enumerated explicitly. O(n^2); small n only.
inline PageRankVector pagerank_bruteforce(const TreeState& t, double c) {
    if (!(c > 0.0 && c < 1.0)) throw ParamOutOfRange("pagerank: c in (0,1)");
    PageRankVector pr;
    pr.damping = c;
    pr.scores.assign(t.n(), 0.0);
    for (std::uint64_t v = 0; v < t.n(); ++v) {
        double acc = 1.0;  // l = 0 term
        // every descendant u of v contributes c^(depth(u)-depth(v))
        for (std::uint64_t u = v + 1; u < t.n(); ++u) {
            std::uint64_t a = u;
            while (a > v) a = t.parent[a];
            if (a == v)
                acc += std::pow(c, static_cast<double>(t.depth[u] - t.depth[v]));
        }
        pr.scores[v] = (1.0 - c) * acc;
    }
    return pr;
}

/// Stationarity check: the restart walk's probabilities sum to one, i.e.
/// sum_v R_v + c/(1-c) * R_root == n. Returns the absolute defect / n.
inline double pagerank_total_defect(const TreeState& t, const PageRankVector& pr) {
    double sum = 0.0;
    for (double s : pr.scores) sum += s;
    const double c = pr.damping;
    const double adjusted = sum + c / (1.0 - c) * pr.scores[0];
    return std::abs(adjusted - static_cast<double>(t.n())) / static_cast<double>(t.n());
}

// ---------------------------------------------------------------------------
// Fringe histograms (AHU canonical codes).
// ---------------------------------------------------------------------------

namespace detail {

/// AHU code of the subtree at v, children codes sorted lexicographically.
/// Only called on subtrees of bounded size.
inline std::string ahu_code(const std::vector<std::vector<std::uint64_t>>& ch,
                            std::uint64_t v) {
    std::vector<std::string> parts;
    parts.reserve(ch[v].size());
    for (auto u : ch[v]) parts.push_back(ahu_code(ch, u));
    std::sort(parts.begin(), parts.end());
    std::string code = "(";
    for (const auto& p : parts) code += p;
    code += ")";
    return code;
}

/// AHU code of the subtree at v with one child branch removed (the extended
/// fringe pieces f_i, i >= 1).
inline std::string ahu_code_excluding(const std::vector<std::vector<std::uint64_t>>& ch,
                                      std::uint64_t v, std::uint64_t excluded_child) {
    std::vector<std::string> parts;
    for (auto u : ch[v])
        if (u != excluded_child) parts.push_back(ahu_code(ch, u));
    std::sort(parts.begin(), parts.end());
    std::string code = "(";
    for (const auto& p : parts) code += p;
    code += ")";
    return code;
}

}  // namespace detail

/// Empirical fringe proportions: counts of canonical fringe-subtree codes over
/// all vertices, with fringes larger than max_size pooled into `overflow`.
/// When extended_k > 0, also counts extended-fringe tuples (f_0,...,f_k) over
/// vertices of depth >= k whose pieces all fit under max_size.
struct FringeHistogram {
    int max_size = 8;
    int extended_k = 0;
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t overflow = 0;
    std::map<std::string, std::uint64_t> extended_counts;
    std::uint64_t extended_skipped = 0;

    std::uint64_t total() const {
        std::uint64_t s = overflow;
        for (const auto& [_, c] : counts) s += c;
        return s;
    }
};

inline FringeHistogram fringe_histogram(const TreeState& t, int max_size = 8,
                                        int extended_k = 0) {
    if (max_size < 1 || max_size > 12)
        throw ParamOutOfRange("fringe_histogram: max_size in [1,12]");
    if (extended_k < 0 || extended_k > 3)
        throw ParamOutOfRange("fringe_histogram: extended_k in [0,3]");
    const auto ch = build_children(t);
    std::vector<std::uint64_t> sub(t.n(), 1);
    for (std::uint64_t v = t.n(); v-- > 1;) sub[t.parent[v]] += sub[v];

    FringeHistogram h;
    h.max_size = max_size;
    h.extended_k = extended_k;
    for (std::uint64_t v = 0; v < t.n(); ++v) {
        if (sub[v] <= static_cast<std::uint64_t>(max_size))
            ++h.counts[detail::ahu_code(ch, v)];
        else
            ++h.overflow;
    }
    if (extended_k > 0) {
        for (std::uint64_t v = 0; v < t.n(); ++v) {
            if (t.depth[v] < static_cast<std::uint32_t>(extended_k)) continue;
            bool fits = sub[v] <= static_cast<std::uint64_t>(max_size);
            std::uint64_t below = v;
            std::string key;
            if (fits) key = detail::ahu_code(ch, v);
            for (int i = 1; i <= extended_k && fits; ++i) {
                const std::uint64_t anc = t.parent[below];
                if (sub[anc] - sub[below] > static_cast<std::uint64_t>(max_size)) {
                    fits = false;
                    break;
                }
                key += "|" + detail::ahu_code_excluding(ch, anc, below);
                below = anc;
            }
            if (fits)
                ++h.extended_counts[key];
            else
                ++h.extended_skipped;
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Tail exponent estimation.
// ---------------------------------------------------------------------------

enum class TailMethod { Hill, LogLogLS };

struct TailFitResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double threshold = 0.0;  // order-statistic count m (Hill) or k_min (LS)
    TailMethod method = TailMethod::Hill;
};

/// Hill estimator on the top-m order statistics. For P(X >= x) ~ x^{-alpha},
/// returns alpha with std error alpha/sqrt(m).
inline TailFitResult hill_estimator(std::vector<double> samples, std::size_t m) {
    if (samples.size() < 1000)
        throw ParamOutOfRange("hill_estimator: need at least 1e3 samples");
    if (m < 10 || m >= samples.size())
        throw ParamOutOfRange("hill_estimator: need 10 <= m < n");
    std::nth_element(samples.begin(), samples.begin() + m, samples.end(),
                     std::greater<>());
    std::sort(samples.begin(), samples.begin() + m, std::greater<>());
    const double x_m = samples[m];  // (m+1)-th largest: the threshold
    if (!(x_m > 0.0)) throw DegenerateSample("hill_estimator: nonpositive threshold");
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += std::log(samples[i] / x_m);
    if (acc <= 0.0) throw DegenerateSample("hill_estimator: constant top order stats");
    TailFitResult r;
    r.method = TailMethod::Hill;
    r.estimate = static_cast<double>(m) / acc;
    r.std_error = r.estimate / std::sqrt(static_cast<double>(m));
    r.threshold = static_cast<double>(m);
    return r;
}

/// Least-squares slope of log empirical CCDF against log value, above k_min.
inline TailFitResult loglog_ls(std::vector<double> samples, double k_min) {
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < k_min) continue;
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        const double ccdf = static_cast<double>(samples.size() - i) / n;
        xs.push_back(std::log(samples[i]));
        ys.push_back(std::log(ccdf));
    }
    if (xs.size() < 3) throw DegenerateSample("loglog_ls: too few distinct values");
    const auto m = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = m * sxx - sx * sx;
    if (denom <= 0.0) throw DegenerateSample("loglog_ls: degenerate abscissae");
    const double slope = (m * sxy - sx * sy) / denom;
    double ss_res = 0.0;
    const double intercept = (sy - slope * sx) / m;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (slope * xs[i] + intercept);
        ss_res += e * e;
    }
    TailFitResult r;
    r.method = TailMethod::LogLogLS;
    r.estimate = -slope;
    r.std_error = std::sqrt(ss_res / (m - 2.0) / denom * m);
    r.threshold = k_min;
    return r;
}

/// Yule martingale value n * e^{-T} at the last birth time; converges to
/// W ~ Exp(1) for the continuous embedding.
inline double martingale_w(const TreeState& t) {
    if (!t.has_birth_times())
        throw MissingBirthTimes("martingale_w: tree has no birth times");
    return static_cast<double>(t.n()) * std::exp(-t.birth_time.back());
}

}  // namespace coevo
