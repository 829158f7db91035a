#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "coevo/constants.hpp"
#include "coevo/errors.hpp"
#include "coevo/rng.hpp"
#include "coevo/step_distribution.hpp"

namespace coevo {

/// Grid q[k][i] = P(hitting time of 0 from start k equals i) for the walk with
/// increments Z - 1, computed by a forward DP over the time-reversed dual walk
/// (increments 1 - Z, constrained positive): P(T_k = i) = P(S~_i = k, tau~ > i).
struct HittingTimeTable {
    int max_start = 0;   // K
    int max_steps = 0;   // N
    double trunc_error = 0.0;
    std::vector<double> grid;  // (K+1) x (N+1), row k, col i; row 0 unused

    double at(int k, int i) const {
        return grid[static_cast<std::size_t>(k) * (max_steps + 1) + i];
    }
};

inline HittingTimeTable hitting_time_table(const StepDistribution& d, int K, int N,
                                           double support_eps = 1e-12) {
    if (K < 1 || N < 1) throw ParamOutOfRange("hitting_time_table: K, N >= 1");
    const std::vector<double> p = d.materialize(support_eps);
    double pmass = 0.0;
    for (double w : p) pmass += w;
    const double step_tail = 1.0 - pmass;
    const int pmax = static_cast<int>(p.size()) - 1;

    // dp[m] = P(S~_j = m, all partial positions >= 1); increments are at most
    // +1 so states never exceed the step count j <= N.
    std::vector<double> dp(static_cast<std::size_t>(N) + 1, 0.0);
    std::vector<double> nxt(static_cast<std::size_t>(N) + 1, 0.0);
    HittingTimeTable t;
    t.max_start = K;
    t.max_steps = N;
    t.grid.assign(static_cast<std::size_t>(K + 1) * (N + 1), 0.0);

    dp[1] = p[0];  // first step: only Z = 0 keeps the dual walk positive
    if (K >= 1) t.grid[static_cast<std::size_t>(1) * (N + 1) + 1] = dp[1];
    for (int j = 2; j <= N; ++j) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        const int top = std::min(j - 1, N);
        for (int m = 1; m <= top; ++m) {
            const double w = dp[m];
            if (w == 0.0) continue;
            // state m -> m + 1 - z for z = 0..min(pmax, m)
            const int zmax = std::min(pmax, m);
            for (int z = 0; z <= zmax; ++z) {
                const int m2 = m + 1 - z;
                if (m2 >= 1 && m2 <= N) nxt[m2] += w * p[z];
            }
        }
        dp.swap(nxt);
        for (int k = 1; k <= std::min(K, j); ++k)
            t.grid[static_cast<std::size_t>(k) * (N + 1) + j] = dp[k];
    }
    // Each of the <= N steps can fall in the discarded tail of the step law.
    t.trunc_error = static_cast<double>(N) * step_tail;
    return t;
}

struct ProfileValue {
    double value = 0.0;
    double error_bound = 0.0;
};

/// E[P_k(t)] = sum_i (t^i / i!) P(T_k = i), evaluated as e^t times a
/// Poisson-weighted average of the DP row so no intermediate exceeds 1.
/// Throws when the Poisson mass beyond the table cannot meet the 1e-12 e^t
/// truncation budget.
inline ProfileValue expected_profile(const HittingTimeTable& t, int k, double time) {
    if (k < 1 || k > t.max_start) throw ParamOutOfRange("expected_profile: bad k");
    if (time < 0.0) throw ParamOutOfRange("expected_profile: t >= 0");
    const int N = t.max_steps;
    double w = std::exp(-time);  // Pois(time, 0)
    double acc = 0.0, wsum = w;
    for (int i = 1; i <= N; ++i) {
        w *= time / static_cast<double>(i);
        wsum += w;
        acc += w * t.at(k, i);
    }
    const double pois_tail = std::max(0.0, 1.0 - wsum);
    if (pois_tail >= 1e-12)
        throw TruncationBudgetExceeded(
            "expected_profile: Poisson tail beyond N contributes " +
            std::to_string(pois_tail) + " of e^t; enlarge the table");
    ProfileValue r;
    r.value = std::exp(time) * acc;
    r.error_bound = std::exp(time) * (pois_tail + t.trunc_error);
    return r;
}

struct RatioPoint {
    int n = 0;
    double ratio = 0.0;
};

/// Diagnostic trace q[k][n + stride] / q[k][n]; converges to (1/R)^stride.
/// Entries with a zero denominator are skipped (parity of srw-type laws).
inline std::vector<RatioPoint> hitting_ratio_trace(const HittingTimeTable& t, int k,
                                                   int n_lo, int n_hi,
                                                   int stride = 1) {
    std::vector<RatioPoint> out;
    for (int n = n_lo; n + stride <= std::min(n_hi, t.max_steps); ++n) {
        const double den = t.at(k, n);
        if (den <= 0.0) continue;
        out.push_back({n, t.at(k, n + stride) / den});
    }
    return out;
}

/// Increment law of the tilted walk S*_s: P(increment = 1 - j) = s^j p_j / f(s).
/// State-independent; drift (f(s) - s f'(s)) / f(s).
struct TiltedStepLaw {
    double s = 1.0;
    std::vector<double> j_probs;  // law of J; increment is 1 - J
    AliasSampler sampler;

    double mean_increment() const {
        double m = 0.0;
        for (std::size_t j = 0; j < j_probs.size(); ++j)
            m += (1.0 - static_cast<double>(j)) * j_probs[j];
        return m;
    }
    std::int64_t sample_increment(Rng& rng) const {
        const std::uint64_t j = j_probs.size() > 1 ? sampler.sample(rng) : 0;
        return 1 - static_cast<std::int64_t>(j);
    }
};

inline TiltedStepLaw tilted_step_pmf(const StepDistribution& d, double s) {
    if (!(s > 0.0)) throw ParamOutOfRange("tilted_step_pmf: s > 0");
    const ExtReal f = d.pgf(s);
    if (f.is_infinite()) throw PgfInfinite("tilted_step_pmf: f(s) infinite");
    TiltedStepLaw law;
    law.s = s;
    // The tilt reweights the tail by s^j, so truncation must be decided on the
    // tilted masses, not on the base law's quantiles. Finite supports are
    // exact; for the geometric family s < 1/q guarantees a geometric tilted
    // tail that we cut at 1e-15.
    if (d.has_finite_support()) {
        const std::size_t kmax = d.materialized_support_max();
        law.j_probs.resize(kmax + 1);
        for (std::size_t j = 0; j <= kmax; ++j)
            law.j_probs[j] = std::pow(s, static_cast<double>(j)) * d.prob(j) / f.value();
    } else {
        double term_tail = 1.0;  // remaining tilted mass
        for (std::size_t j = 0; term_tail > 1e-15 && j < 100000; ++j) {
            const double term = std::pow(s, static_cast<double>(j)) * d.prob(j) / f.value();
            law.j_probs.push_back(term);
            term_tail -= term;
        }
    }
    double mass = 0.0;
    for (double x : law.j_probs) mass += x;
    for (auto& x : law.j_probs) x /= mass;
    if (law.j_probs.size() > 1) law.sampler = AliasSampler(law.j_probs);
    return law;
}

struct SurvivalEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    // Finite horizon can only overestimate survival: walks that would die
    // later are counted as survivors.
    double horizon_bias_sign = +1.0;
};

/// Monte-Carlo estimate of P(tau*_s = inf) for the tilted walk started at 0.
/// Requires the subcritical regime E[Z] < 1 and tilt s in [1, s0).
inline SurvivalEstimate survival_prob_estimate(const StepDistribution& d, double s,
                                               int horizon_steps, int replicas,
                                               Rng& rng) {
    if (!(d.mean() < 1.0))
        throw ParamOutOfRange("survival_prob_estimate: requires E[Z] < 1");
    const ExtReal s0 = solve_s0(d);
    if (!(s >= 1.0) || !(ExtReal::finite(s) < s0))
        throw ParamOutOfRange("survival_prob_estimate: requires 1 <= s < s0");
    const TiltedStepLaw law = tilted_step_pmf(d, s);
    int survived = 0;
    for (int r = 0; r < replicas; ++r) {
        std::int64_t pos = 0;
        bool alive = true;
        for (int step = 0; step < horizon_steps; ++step) {
            pos += law.sample_increment(rng);
            if (pos <= 0) {
                alive = false;
                break;
            }
        }
        survived += alive ? 1 : 0;
    }
    SurvivalEstimate e;
    e.estimate = static_cast<double>(survived) / replicas;
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / replicas);
    return e;
}

}  // namespace coevo
