#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/extended.hpp"
#include "coevo/step_distribution.hpp"

namespace coevo {

enum class Regime { Fringe, NonFringe };

inline const char* regime_name(Regime r) {
    return r == Regime::Fringe ? "fringe" : "non-fringe";
}

/// A predicted tail exponent: a point value when lo == hi (the fringe regime),
/// otherwise an interval. Either end may be infinite (e.g. R for det:0).
struct ExponentPrediction {
    ExtReal lo;
    ExtReal hi;
    bool exact() const {
        return (lo.is_infinite() && hi.is_infinite()) ||
               (lo.is_finite() && hi.is_finite() &&
                std::abs(lo.value() - hi.value()) < 1e-12);
    }
};

struct Tolerances {
    double root = 1e-10;      // bracketing bisection
    double minimize = 1e-8;   // grid + golden section
    double rayleigh = 1e-10;  // power iteration stop
};

struct ModelConstants {
    double mean_z = 0.0;
    ExtReal s0;
    ExtReal R;
    double q_star = 1.0;
    double kappa0 = 0.0;
    double kappa0_minimizer = 0.0;
    Regime regime = Regime::Fringe;
    ExponentPrediction degree_exponent;
    std::vector<std::string> assumption_flags;
    Tolerances tol;
};

namespace detail {

/// pgf as a plain double with +inf outside the radius.
inline double f_of(const StepDistribution& d, double s) { return d.pgf(s).as_double(); }

/// h(s) = s f'(s) - f(s); strictly increasing on (0, r_f) when p0 > 0,
/// p0 + p1 < 1. +inf/-inf propagate harmlessly through the bisection.
inline double s0_objective(const StepDistribution& d, double s) {
    const ExtReal fp = d.pgf_prime(s);
    const ExtReal f = d.pgf(s);
    if (fp.is_infinite() || f.is_infinite())
        return std::numeric_limits<double>::infinity();
    return s * fp.value() - f.value();
}

}  // namespace detail

/// Unique positive root of s f'(s) = f(s); the radius of convergence when the
/// root does not exist (then possibly +inf).
inline ExtReal solve_s0(const StepDistribution& d, double tol = 1e-10) {
    if (!(d.prob(0) > 0.0))
        throw NoPositiveMassAtZero("solve_s0 requires p_0 > 0");
    const ExtReal rf = d.radius();

    double lo = 0.0;  // h(0) = -p0 < 0
    double hi = 0.0;
    bool bracketed = false;
    if (rf.is_finite()) {
        // Approach the radius geometrically until the objective turns positive.
        for (int j = 1; j <= 64; ++j) {
            const double s = rf.value() * (1.0 - std::pow(0.5, j));
            if (detail::s0_objective(d, s) > 0.0) {
                hi = s;
                bracketed = true;
                break;
            }
            lo = s;
        }
        if (!bracketed) return rf;
    } else {
        for (double s = 1.0; s <= 1e18; s *= 2.0) {
            if (detail::s0_objective(d, s) > 0.0) {
                hi = s;
                bracketed = true;
                break;
            }
            lo = s;
        }
        if (!bracketed) return ExtReal::infinity();  // affine / deterministic(0)
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (detail::s0_objective(d, mid) > 0.0 ? hi : lo) = mid;
    }
    return ExtReal::finite(0.5 * (lo + hi));
}

/// R = lim_{s -> s0} s / f(s). Finite s0 gives s0/f(s0); s0 = inf happens only
/// for supports inside {0,1}, where the limit is 1/p_1 (inf when p_0 = 1).
inline ExtReal compute_R(const StepDistribution& d, const ExtReal& s0) {
    if (s0.is_finite()) {
        const ExtReal f = d.pgf(s0.value());
        if (f.is_infinite())
            throw Error("compute_R: f(s0) infinite; s0 is not a valid root/radius");
        return ExtReal::finite(s0.value() / f.value());
    }
    const double p1 = d.prob(1);
    if (p1 > 0.0) return ExtReal::finite(1.0 / p1);
    return ExtReal::infinity();
}

/// Smallest root of f(q) = q in (0,1]: the extinction probability of the
/// Galton-Watson process with offspring law p. Monotone fixed-point iteration
/// from 0 cannot overshoot the smallest root; for E[Z] <= 1 that root is 1.
inline double solve_qstar(const StepDistribution& d, double tol = 1e-10) {
    if (!(d.prob(0) > 0.0))
        throw NoPositiveMassAtZero("solve_qstar requires p_0 > 0");
    if (d.mean() <= 1.0) return 1.0;
    double q = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
        const double next = d.pgf(q).value();
        if (std::abs(next - q) <= tol * 1e-3) return next;
        q = next;
    }
    return q;
}

namespace detail {

/// Coarse grid then golden-section refinement around the grid argmin. The grid
/// guards against flat shoulders near 0+ and 1-. Endpoints clipped to
/// [1e-9, 1 - 1e-9].
template <typename Fn>
inline std::pair<double, double> minimize_on_unit(Fn&& g, double tol,
                                                  int grid_points = 1024) {
    const double a = 1e-9, b = 1.0 - 1e-9;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> xs(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / (grid_points - 1);
        const double v = g(xs[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = xs[std::max(0, best - 1)];
    double hi = xs[std::min(grid_points - 1, best + 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = g(x2);
        }
    }
    const double xm = 0.5 * (lo + hi);
    return {g(xm), xm};
}

}  // namespace detail

struct Kappa0Result {
    double value = 0.0;
    double minimizer = 0.0;
};

/// kappa0 = inf_{s in (0,1)} f(s) / (s log(1/s)); the height and BRW-speed
/// constant. Also returns the minimizer.
inline Kappa0Result compute_kappa0(const StepDistribution& d, double tol = 1e-8) {
    if (!(d.prob(0) > 0.0))
        throw NoPositiveMassAtZero("compute_kappa0 requires p_0 > 0");
    auto g = [&](double s) { return detail::f_of(d, s) / (s * std::log(1.0 / s)); };
    auto [val, arg] = detail::minimize_on_unit(g, tol);
    return {val, arg};
}

/// BRW mean-growth rate alpha(theta) = f(e^theta) / e^theta.
inline double brw_rate(const StepDistribution& d, double theta) {
    const double s = std::exp(theta);
    return detail::f_of(d, s) / s;
}

/// Legendre-type rate alpha*(x) = inf_{s in (0,1)} { x log s + f(s)/s }.
/// Negative exactly when x > kappa0.
inline double alpha_star(const StepDistribution& d, double x, double tol = 1e-8) {
    auto g = [&](double s) { return x * std::log(s) + detail::f_of(d, s) / s; };
    return detail::minimize_on_unit(g, tol).first;
}

namespace detail {

inline ExponentPrediction nonfringe_interval(const ExtReal& R, double q_star,
                                             const ExtReal& s0) {
    // exponent in [R /\ log(q*)/log(s0), R]
    const double ratio = std::log(q_star) / std::log(s0.value());
    const double lo = std::min(R.as_double(), ratio);
    ExponentPrediction e;
    e.lo = std::isinf(lo) ? ExtReal::infinity() : ExtReal::finite(lo);
    e.hi = R;
    return e;
}

}  // namespace detail

/// Degree-tail exponent: exactly R in the fringe regime; the interval
/// [R /\ log q*/log s0, R] in the non-fringe regime.
inline ExponentPrediction predicted_degree_exponent(const ModelConstants& c) {
    if (c.regime == Regime::Fringe) return {c.R, c.R};
    return detail::nonfringe_interval(c.R, c.q_star, c.s0);
}

/// PageRank-tail exponent at damping c. Fringe: R for c <= 1/s0, otherwise
/// 1/(c f(1/c)) (the heavier-tail phase). Non-fringe: same interval as degrees.
inline ExponentPrediction predicted_pagerank_exponent(const StepDistribution& d,
                                                      const ModelConstants& c,
                                                      double damping) {
    if (!(damping > 0.0 && damping < 1.0))
        throw ParamOutOfRange("damping must be in (0,1)");
    if (c.regime == Regime::NonFringe)
        return detail::nonfringe_interval(c.R, c.q_star, c.s0);
    const double inv_s0 = c.s0.is_infinite() ? 0.0 : 1.0 / c.s0.value();
    if (damping <= inv_s0) return {c.R, c.R};
    const double val = 1.0 / (damping * detail::f_of(d, 1.0 / damping));
    return {ExtReal::finite(val), ExtReal::finite(val)};
}

/// All limit constants for a step law, with assumption flags for the cases the
/// theorems exclude but the simulators accept.
inline ModelConstants compute_constants(const StepDistribution& d,
                                        Tolerances tol = {}) {
    ModelConstants c;
    c.tol = tol;
    c.mean_z = d.mean();
    const double p0 = d.prob(0);
    if (!(p0 > 0.0 && p0 < 1.0))
        c.assumption_flags.push_back("p0 outside (0,1)");
    if (!d.aperiodic()) c.assumption_flags.push_back("periodic support");
    if (p0 > 0.0 && p0 + d.prob(1) >= 1.0 - 1e-15 && p0 < 1.0)
        c.assumption_flags.push_back("affine case p0+p1=1");

    c.s0 = solve_s0(d, tol.root);
    c.R = compute_R(d, c.s0);
    c.q_star = solve_qstar(d, tol.root);
    const auto k = compute_kappa0(d, tol.minimize);
    c.kappa0 = k.value;
    c.kappa0_minimizer = k.minimizer;
    c.regime = c.mean_z > 1.0 ? Regime::NonFringe : Regime::Fringe;
    c.degree_exponent = predicted_degree_exponent(c);
    return c;
}

// ---------------------------------------------------------------------------
// Truncated level-transition kernels and their Perron eigenvalues.
// ---------------------------------------------------------------------------

/// k x k truncation of the infinite level-transition matrices. Rows/columns
/// are stored 0-based but correspond to levels 1..k: entry (i,j) = p_{j-i+1},
/// and kind B replaces row 0 with the tail sums (c_1 .. c_k).
struct TruncatedKernel {
    enum class Kind { A, B };
    Kind kind = Kind::A;
    int k = 0;
    std::vector<double> entries;  // row-major k*k

    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * k + j]; }
};

inline TruncatedKernel truncated_kernel(const StepDistribution& d,
                                        TruncatedKernel::Kind kind, int k) {
    if (k < 1) throw ParamOutOfRange("truncated_kernel: k must be >= 1");
    TruncatedKernel m;
    m.kind = kind;
    m.k = k;
    m.entries.assign(static_cast<std::size_t>(k) * k, 0.0);
    const std::vector<double> p = d.materialize();
    for (int i = 0; i < k; ++i) {
        for (int j = std::max(0, i - 1); j < k; ++j) {
            const int idx = j - i + 1;
            if (idx >= 0 && idx < static_cast<int>(p.size()))
                m.entries[static_cast<std::size_t>(i) * k + j] = p[idx];
        }
    }
    if (kind == TruncatedKernel::Kind::B) {
        for (int j = 0; j < k; ++j)
            m.entries[j] = d.tail(static_cast<std::uint64_t>(j) + 1);
    }
    return m;
}

struct PerronResult {
    double eigenvalue = 0.0;
    std::vector<double> right_vector;  // L1-normalized, strictly positive
    int iterations = 0;
};

/// Power iteration on the (shifted) kernel. The +1 diagonal shift makes the
/// iteration immune to periodic supports (srw's bipartite band structure)
/// without changing eigenvectors. Stops when successive Rayleigh quotients
/// differ by <= tol and the residual is below 10*tol. An optional warm-start
/// vector (e.g. the eigenvector of a smaller truncation) cuts the iteration
/// count when scanning alpha_k over k.
inline PerronResult perron_eigen(const TruncatedKernel& m, double tol = 1e-10,
                                 int max_iters = 500000,
                                 const std::vector<double>* warm_start = nullptr) {
    const int k = m.k;
    std::vector<double> x(static_cast<std::size_t>(k), 1.0 / k), y(k);
    if (warm_start && !warm_start->empty()) {
        for (int i = 0; i < k && i < static_cast<int>(warm_start->size()); ++i)
            x[i] = std::max((*warm_start)[i], 1e-300);
        double l1 = 0.0;
        for (double v : x) l1 += v;
        for (auto& v : x) v /= l1;
    }
    // Row sparsity: entries live in columns [i-1, i-1+width]; row 0 of kind B
    // is dense.
    int width = 1;
    for (int j = 0; j < k; ++j)
        if (m.at(std::min(1, k - 1), j) != 0.0) width = std::max(width, j + 2);
    double rayleigh_prev = -1.0;
    for (int it = 1; it <= max_iters; ++it) {
        for (int i = 0; i < k; ++i) {
            double acc = x[i];  // +1 shift
            const double* row = &m.entries[static_cast<std::size_t>(i) * k];
            const int lo = (m.kind == TruncatedKernel::Kind::B && i == 0)
                               ? 0
                               : std::max(0, i - 1);
            const int hi = (m.kind == TruncatedKernel::Kind::B && i == 0)
                               ? k
                               : std::min(k, i - 1 + width);
            for (int j = lo; j < hi; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        double xy = 0.0, xx = 0.0;
        for (int i = 0; i < k; ++i) {
            xy += x[i] * y[i];
            xx += x[i] * x[i];
        }
        const double rayleigh = xy / xx;
        double resid = 0.0;
        for (int i = 0; i < k; ++i) resid = std::max(resid, std::abs(y[i] - rayleigh * x[i]));
        double l1 = 0.0;
        for (double v : y) l1 += std::abs(v);
        for (int i = 0; i < k; ++i) x[i] = y[i] / l1;
        if (std::abs(rayleigh - rayleigh_prev) <= tol && resid <= 10.0 * tol) {
            PerronResult r;
            r.eigenvalue = rayleigh - 1.0;
            r.right_vector = x;
            r.iterations = it;
            return r;
        }
        rayleigh_prev = rayleigh;
    }
    throw NoConvergence("perron_eigen: no convergence in " +
                        std::to_string(max_iters) + " iterations");
}

/// First level with positive step mass; truncations of A are irreducible from
/// this dimension on (given p_0 > 0).
inline int min_irreducible_dim(const StepDistribution& d) {
    const auto p = d.materialize();
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] > 0.0) return static_cast<int>(k);
    throw ParamOutOfRange("kernel is nilpotent: no p_k > 0 for k >= 1");
}

/// Left sub-invariance check of v_i = s^{-i} against eigenvalue f(s)/s:
/// max over complete columns j (all but the last) of
///   sum_i s^{-i} M_ij - (f(s)/s) s^{-j}.
/// Expected <= 0 up to roundoff.
inline double verify_subinvariant(const StepDistribution& d,
                                  const TruncatedKernel& m, double s) {
    const ExtReal f = d.pgf(s);
    if (f.is_infinite()) throw PgfInfinite("verify_subinvariant: f(s) infinite");
    if (m.kind == TruncatedKernel::Kind::B && s < 1.0)
        throw ParamOutOfRange("verify_subinvariant: kind B requires s >= 1");
    const double lam = f.value() / s;
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < m.k; ++j) {
        double col = 0.0;
        for (int i = 0; i < m.k; ++i)
            col += std::pow(s, -static_cast<double>(i + 1)) * m.at(i, j);
        const double bound = lam * std::pow(s, -static_cast<double>(j + 1));
        worst = std::max(worst, col - bound);
    }
    return worst;
}

}  // namespace coevo
