#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "coevo/constants.hpp"
#include "coevo/growth.hpp"
#include "coevo/observables.hpp"
#include "coevo/random_walk.hpp"
#include "coevo/serialize.hpp"
#include "coevo/stats.hpp"
#include "coevo/step_distribution.hpp"
#include "coevo/tree.hpp"

namespace coevo {

enum class ExperimentKind {
    Constants,
    AlphaK,
    ProfileSeries,
    MeanDegree,
    RootCondensation,
    FringeConvergence,
    Height,
    BrwSpeed,
    DegreeTail,
    PageRankTail,
    PagerankOracle,
    Equivalence,
    MomentBound,
    Determinism,
};

inline const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Constants: return "Constants";
        case ExperimentKind::AlphaK: return "AlphaK";
        case ExperimentKind::ProfileSeries: return "ProfileSeries";
        case ExperimentKind::MeanDegree: return "MeanDegree";
        case ExperimentKind::RootCondensation: return "RootCondensation";
        case ExperimentKind::FringeConvergence: return "FringeConvergence";
        case ExperimentKind::Height: return "Height";
        case ExperimentKind::BrwSpeed: return "BrwSpeed";
        case ExperimentKind::DegreeTail: return "DegreeTail";
        case ExperimentKind::PageRankTail: return "PageRankTail";
        case ExperimentKind::PagerankOracle: return "PagerankOracle";
        case ExperimentKind::Equivalence: return "Equivalence";
        case ExperimentKind::MomentBound: return "MomentBound";
        case ExperimentKind::Determinism: return "Determinism";
    }
    return "?";
}

inline ExperimentKind kind_from_name(const std::string& s) {
    static const std::map<std::string, ExperimentKind> m = {
        {"Constants", ExperimentKind::Constants},
        {"AlphaK", ExperimentKind::AlphaK},
        {"ProfileSeries", ExperimentKind::ProfileSeries},
        {"MeanDegree", ExperimentKind::MeanDegree},
        {"RootCondensation", ExperimentKind::RootCondensation},
        {"FringeConvergence", ExperimentKind::FringeConvergence},
        {"Height", ExperimentKind::Height},
        {"BrwSpeed", ExperimentKind::BrwSpeed},
        {"DegreeTail", ExperimentKind::DegreeTail},
        {"PageRankTail", ExperimentKind::PageRankTail},
        {"PagerankOracle", ExperimentKind::PagerankOracle},
        {"Equivalence", ExperimentKind::Equivalence},
        {"MomentBound", ExperimentKind::MomentBound},
        {"Determinism", ExperimentKind::Determinism},
    };
    const auto it = m.find(s);
    if (it == m.end()) throw ParamOutOfRange("unknown experiment kind '" + s + "'");
    return it->second;
}

/// Config for one ensemble run. Presets carry the defaults; JSON configs can
/// override sizes, replica counts, seeds, and tolerances.
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Constants;
    std::vector<std::string> pmfs;      // pmf grammar strings
    std::uint64_t n = 0;                // vertex target
    std::vector<std::uint64_t> sizes;   // multi-size kinds (Height)
    double t = 0.0;                     // time horizon
    int replicas = 1;
    std::uint64_t seed = 1;
    double damping = 0.5;
    double damping_alt = 0.15;          // PageRankTail comparison point
    double tolerance = 0.0;             // kind-specific main tolerance
    double band_lo = 0.0, band_hi = 0.0;  // absolute band (Height, det laws)

    void validate() const {
        if (replicas < 1) throw ParamOutOfRange("experiment: replicas >= 1");
    }
};

struct ExperimentReport {
    ordered_json doc;        // deterministic given (spec, seed)
    double wall_time_s = 0;  // excluded from the determinism contract
    bool pass = false;
    std::map<std::string, std::string> csv;  // filename stem -> contents

    ordered_json full_doc() const {
        ordered_json j = doc;
        j["wall_time_s"] = wall_time_s;
        return j;
    }
};

namespace detail {

inline int thread_budget() {
    if (const char* env = std::getenv("COEVO_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Replica fan-out with deterministic, order-fixed collection: results land in
/// a vector indexed by replica, reductions run single-threaded afterwards.
template <typename T, typename F>
std::vector<T> parallel_map(int count, F&& f) {
    std::vector<T> out(static_cast<std::size_t>(count));
    const int threads = std::min(thread_budget(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                out[static_cast<std::size_t>(i)] = f(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
    std::uint64_t s = master ^ (0xA24BAED4963EE407ull * (replica + 1));
    return splitmix64(s);
}

inline ordered_json spec_echo(const ExperimentSpec& s) {
    ordered_json j;
    j["kind"] = kind_name(s.kind);
    j["pmfs"] = s.pmfs;
    j["n"] = s.n;
    j["sizes"] = s.sizes;
    j["t"] = s.t;
    j["replicas"] = s.replicas;
    j["seed"] = s.seed;
    j["damping"] = s.damping;
    j["damping_alt"] = s.damping_alt;
    j["tolerance"] = s.tolerance;
    j["band_lo"] = s.band_lo;
    j["band_hi"] = s.band_hi;
    return j;
}

inline std::vector<std::uint64_t> replica_seed_list(const ExperimentSpec& s,
                                                    int count) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    for (int r = 0; r < count; ++r)
        seeds[static_cast<std::size_t>(r)] = replica_seed(s.seed, static_cast<std::uint64_t>(r));
    return seeds;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kind runners. Predicted values always come from analytic_constants at run
// time; the harness hard-codes no theorem constants.
// ---------------------------------------------------------------------------

namespace runners {

inline ExperimentReport constants(const ExperimentSpec& spec) {
    struct Row {
        std::string pmf;
        ExtReal s0, R;
        double q_star;
    };
    std::vector<Row> expected;
    for (double p : {0.1, 0.3, 0.7, 0.9}) {
        const double q = 1.0 - p;
        expected.push_back({"geometric:" + std::to_string(p),
                            ExtReal::finite(1.0 / (2.0 * q)),
                            ExtReal::finite(1.0 / (4.0 * p * q)),
                            std::min(p / q, 1.0)});
    }
    for (double p : {0.3, 0.4, 0.6}) {
        const double q = 1.0 - p;
        expected.push_back({"srw:" + std::to_string(p),
                            ExtReal::finite(std::sqrt(p / q)),
                            ExtReal::finite(1.0 / (2.0 * std::sqrt(p * q))),
                            std::min(p / q, 1.0)});
    }
    for (double p : {0.4, 0.5}) {
        expected.push_back({"affine:" + std::to_string(p), ExtReal::infinity(),
                            ExtReal::finite(1.0 / p), 1.0});
    }

    double worst = 0.0;
    ordered_json rows = ordered_json::array();
    for (const auto& row : expected) {
        const StepDistribution d = parse_pmf_spec(row.pmf);
        const ModelConstants c = compute_constants(d);
        double err = 0.0;
        if (row.s0.is_infinite() != c.s0.is_infinite())
            err = std::numeric_limits<double>::infinity();
        else if (row.s0.is_finite())
            err = std::max(err, std::abs(row.s0.value() - c.s0.value()));
        if (row.R.is_infinite() != c.R.is_infinite())
            err = std::numeric_limits<double>::infinity();
        else if (row.R.is_finite())
            err = std::max(err, std::abs(row.R.value() - c.R.value()));
        err = std::max(err, std::abs(row.q_star - c.q_star));
        worst = std::max(worst, err);
        ordered_json rj;
        rj["pmf"] = row.pmf;
        rj["s0"] = ext_to_json(c.s0);
        rj["R"] = ext_to_json(c.R);
        rj["q_star"] = c.q_star;
        rj["closed_form_s0"] = ext_to_json(row.s0);
        rj["closed_form_R"] = ext_to_json(row.R);
        rj["closed_form_q_star"] = row.q_star;
        rj["max_abs_error"] = err;
        rows.push_back(rj);
    }

    ExperimentReport rep;
    rep.pass = worst <= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "closed-form"},
                            {"description", "remark formulas for s0, R, q*"}};
    rep.doc["rows"] = rows;
    rep.doc["estimate"] = worst;
    rep.doc["dispersion"] = 0.0;
    rep.doc["pass"] = rep.pass;
    return rep;
}

inline ExperimentReport alpha_k(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const ModelConstants c = compute_constants(d);
    const double limit = 1.0 / c.R.as_double();  // alpha_k increases to 1/R
    const int k_max = spec.n > 0 ? static_cast<int>(spec.n) : 200;
    std::vector<int> ks;
    for (int k = 5; k <= k_max; k += 5) ks.push_back(k);

    // Sequential with warm starts: each truncation's eigenvector seeds the
    // next, which beats the embarrassingly-parallel cold starts by far.
    std::vector<double> alphas;
    std::vector<double> warm;
    for (int k : ks) {
        const auto kern = truncated_kernel(d, TruncatedKernel::Kind::A, k);
        const auto p = perron_eigen(kern, c.tol.rayleigh, 500000, &warm);
        alphas.push_back(p.eigenvalue);
        warm = p.right_vector;
    }

    bool monotone = true;
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i] < alphas[i - 1] - 1e-9) monotone = false;
    const double gap = std::abs(alphas.back() - limit);

    std::ostringstream csv;
    csv << "k,alpha_k\n";
    for (std::size_t i = 0; i < ks.size(); ++i)
        csv << ks[i] << "," << alphas[i] << "\n";

    ExperimentReport rep;
    rep.pass = monotone && gap <= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"}, {"value", limit},
                            {"description", "1/R: limit of alpha_k"}};
    rep.doc["estimate"] = alphas.back();
    rep.doc["dispersion"] = gap;
    rep.doc["monotone"] = monotone;
    rep.doc["trace"] = alphas;
    rep.doc["pass"] = rep.pass;
    rep.csv["alpha_k"] = csv.str();
    return rep;
}

inline ExperimentReport profile_series(const ExperimentSpec& spec) {
    ordered_json rows = ordered_json::array();
    bool all_pass = true;
    for (const auto& pmf : spec.pmfs) {
        const StepDistribution d = parse_pmf_spec(pmf);
        const auto table = hitting_time_table(d, 1, 256);
        const ProfileValue series = expected_profile(table, 1, spec.t);
        const auto stats_vec = detail::parallel_map<double>(spec.replicas, [&](int r) {
            Rng attach = Rng::stream(detail::replica_seed(spec.seed, r), kAttachStream);
            Rng clock = Rng::stream(detail::replica_seed(spec.seed, r), kClockStream);
            const TreeState tr = grow_killed_with(d, spec.t, attach, clock);
            std::uint64_t depth1 = 0;
            for (auto dep : tr.depth)
                if (dep == 1) ++depth1;
            return static_cast<double>(depth1);
        });
        const double mc = stats::mean(stats_vec);
        const double se = stats::stderr_of_mean(stats_vec);
        const bool pass = std::abs(series.value - mc) <= 3.0 * se;
        all_pass = all_pass && pass;
        ordered_json rj;
        rj["pmf"] = pmf;
        rj["series_value"] = series.value;
        rj["series_error_bound"] = series.error_bound;
        rj["mc_mean"] = mc;
        rj["mc_stderr"] = se;
        rj["pass"] = pass;
        rows.push_back(rj);
    }
    ExperimentReport rep;
    rep.pass = all_pass;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"},
                            {"description", "E[P_1(t)] Poisson series over the hitting-time DP"}};
    rep.doc["rows"] = rows;
    rep.doc["pass"] = all_pass;
    return rep;
}

inline ExperimentReport mean_degree(const ExperimentSpec& spec) {
    ordered_json rows = ordered_json::array();
    bool all_pass = true;
    for (const auto& pmf : spec.pmfs) {
        const StepDistribution d = parse_pmf_spec(pmf);
        const double predicted = solve_qstar(d);  // P(T_1 < inf): 1 in the fringe regime
        const auto degs = detail::parallel_map<double>(spec.replicas, [&](int r) {
            Rng attach = Rng::stream(detail::replica_seed(spec.seed, r), kAttachStream);
            Rng clock = Rng::stream(detail::replica_seed(spec.seed, r), kClockStream);
            const TreeState tr = sample_fringe(d, attach, clock, 1u << 20);
            return static_cast<double>(root_degree(tr));
        });
        const double mean = stats::mean(degs);
        const double se = stats::stderr_of_mean(degs);
        const bool pass = std::abs(mean - predicted) <= spec.tolerance * predicted;
        all_pass = all_pass && pass;
        ordered_json rj;
        rj["pmf"] = pmf;
        rj["predicted_mean_root_degree"] = predicted;
        rj["mc_mean"] = mean;
        rj["mc_stderr"] = se;
        rj["pass"] = pass;
        rows.push_back(rj);
    }
    ExperimentReport rep;
    rep.pass = all_pass;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"},
                            {"description", "E[root degree of T*(tau)] = q*"}};
    rep.doc["rows"] = rows;
    rep.doc["pass"] = all_pass;
    return rep;
}

inline ExperimentReport root_condensation(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const double predicted = 1.0 - solve_qstar(d);
    const auto fracs = detail::parallel_map<double>(spec.replicas, [&](int r) {
        const TreeState tr = grow_discrete(d, spec.n, detail::replica_seed(spec.seed, r));
        return static_cast<double>(root_degree(tr)) / static_cast<double>(tr.n());
    });
    const double mean = stats::mean(fracs);
    ExperimentReport rep;
    rep.pass = std::abs(mean - predicted) <= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"}, {"value", predicted},
                            {"description", "deg(root)/n -> 1 - q*"}};
    rep.doc["estimate"] = mean;
    rep.doc["dispersion"] = stats::stderr_of_mean(fracs);
    rep.doc["replica_seeds"] = detail::replica_seed_list(spec, spec.replicas);
    rep.doc["pass"] = rep.pass;
    return rep;
}

/// Canonical codes of the rooted trees on <= 3 vertices.
inline const std::vector<std::string>& small_tree_codes() {
    static const std::vector<std::string> codes = {
        "()",        // singleton
        "(())",      // two-vertex path
        "((()))",    // three-vertex path
        "(()())",    // cherry
    };
    return codes;
}

inline ExperimentReport fringe_convergence(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const double p0 = d.prob(0);

    // Side 1: empirical fringe proportions of one grown tree.
    const TreeState tree = grow_discrete(d, spec.n, detail::replica_seed(spec.seed, 0));
    const FringeHistogram h = fringe_histogram(tree, 3);
    std::map<std::string, double> freq_tree;
    for (const auto& code : small_tree_codes()) {
        const auto it = h.counts.find(code);
        freq_tree[code] =
            it == h.counts.end()
                ? 0.0
                : static_cast<double>(it->second) / static_cast<double>(tree.n());
    }

    // Side 2: iid draws from pi_p; trees that reach 4 vertices are "other".
    const int draws = spec.replicas;
    const auto codes = detail::parallel_map<std::string>(draws, [&](int r) {
        Rng attach = Rng::stream(detail::replica_seed(spec.seed, r + 1), kAttachStream);
        Rng clock = Rng::stream(detail::replica_seed(spec.seed, r + 1), kClockStream);
        const TreeState s = sample_fringe(d, attach, clock, 4);
        if (s.n() > 3) return std::string("other");
        return detail::ahu_code(build_children(s), 0);
    });
    std::map<std::string, double> freq_iid;
    for (const auto& code : small_tree_codes()) freq_iid[code] = 0.0;
    for (const auto& code : codes)
        if (freq_iid.count(code)) freq_iid[code] += 1.0 / draws;

    double tv = 0.0;
    for (const auto& code : small_tree_codes())
        tv += 0.5 * std::abs(freq_tree[code] - freq_iid[code]);

    const double singleton_pred = 1.0 / (1.0 + p0);
    const double singleton_freq = freq_iid["()"];
    const double sigma = std::sqrt(singleton_pred * (1.0 - singleton_pred) /
                                   static_cast<double>(draws));
    const bool singleton_ok = std::abs(singleton_freq - singleton_pred) <= 3.0 * sigma;

    ExperimentReport rep;
    rep.pass = tv <= spec.tolerance && singleton_ok;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"},
                            {"singleton_mass", singleton_pred},
                            {"description", "H_n^0 -> pi_p on trees of size <= 3"}};
    rep.doc["tv_distance"] = tv;
    rep.doc["singleton_freq"] = singleton_freq;
    rep.doc["singleton_pass"] = singleton_ok;
    rep.doc["tree_freqs"] = freq_tree;
    rep.doc["iid_freqs"] = freq_iid;
    rep.doc["pass"] = rep.pass;
    return rep;
}

/// Height convergence is logarithmically slow, so the acceptance bands are
/// deliberately loose: det laws get a fixed absolute band plus a monotone
/// trend requirement across sizes; other laws are gated on the final size
/// being within a relative tolerance of kappa0.
inline ExperimentReport height_experiment(const ExperimentSpec& spec) {
    ordered_json pmf_rows = ordered_json::array();
    bool all_pass = true;
    for (std::size_t pi = 0; pi < spec.pmfs.size(); ++pi) {
        const StepDistribution d = parse_pmf_spec(spec.pmfs[pi]);
        const double kappa0 = compute_kappa0(d).value;
        const bool is_det = d.family() == StepDistribution::Family::Deterministic;
        std::vector<double> ratio_means;
        ordered_json rows = ordered_json::array();
        for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
            const std::uint64_t n = spec.sizes[si];
            const auto ratios = detail::parallel_map<double>(spec.replicas, [&](int r) {
                const TreeState tr = grow_discrete(
                    d, n,
                    detail::replica_seed(spec.seed, (pi * 100 + si) * 100000 + r));
                return static_cast<double>(height(tr)) /
                       std::log(static_cast<double>(n));
            });
            ratio_means.push_back(stats::mean(ratios));
            ordered_json rj;
            rj["n"] = n;
            rj["mean_ratio"] = ratio_means.back();
            rj["stderr"] = stats::stderr_of_mean(ratios);
            rows.push_back(rj);
        }
        bool monotone = true;
        for (std::size_t i = 1; i < ratio_means.size(); ++i)
            if (ratio_means[i] < ratio_means[i - 1] - 1e-3) monotone = false;
        const double final_ratio = ratio_means.back();
        const double rel_err = std::abs(final_ratio - kappa0) / kappa0;
        const bool pass = is_det
                              ? (monotone && final_ratio >= spec.band_lo &&
                                 final_ratio <= spec.band_hi)
                              : rel_err <= spec.tolerance;
        all_pass = all_pass && pass;
        ordered_json pj;
        pj["pmf"] = spec.pmfs[pi];
        pj["kappa0"] = kappa0;
        pj["estimate"] = final_ratio;
        pj["relative_error"] = rel_err;
        pj["monotone"] = monotone;
        pj["band"] = is_det ? ordered_json{{"lo", spec.band_lo}, {"hi", spec.band_hi}}
                            : ordered_json{{"relative", spec.tolerance}};
        pj["sizes"] = rows;
        pj["pass"] = pass;
        pmf_rows.push_back(pj);
    }
    ExperimentReport rep;
    rep.pass = all_pass;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"},
                            {"description", "height / log n -> kappa0 (slow convergence)"}};
    rep.doc["rows"] = pmf_rows;
    rep.doc["pass"] = all_pass;
    return rep;
}

inline ExperimentReport brw_speed(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const double kappa0 = compute_kappa0(d).value;
    const auto speeds = detail::parallel_map<double>(spec.replicas, [&](int r) {
        const BrwResult b =
            simulate_brw(d, spec.t, 5e7, detail::replica_seed(spec.seed, r));
        return static_cast<double>(b.final_max) / spec.t;
    });
    const double mean = stats::mean(speeds);
    const double rel_err = std::abs(mean - kappa0) / kappa0;
    ExperimentReport rep;
    rep.pass = rel_err <= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"}, {"value", kappa0},
                            {"description", "B(t)/t -> kappa0"}};
    rep.doc["estimate"] = mean;
    rep.doc["dispersion"] = stats::stderr_of_mean(speeds);
    rep.doc["relative_error"] = rel_err;
    rep.doc["pass"] = rep.pass;
    return rep;
}

inline ExperimentReport degree_tail(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const ModelConstants c = compute_constants(d);
    const TreeState tr = grow_discrete(d, spec.n, detail::replica_seed(spec.seed, 0));
    const auto degs = degree_sequence(tr);
    std::vector<double> samples(degs.begin(), degs.end());
    const auto m = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(samples.size()), 2.0 / 3.0)));
    const TailFitResult fit = hill_estimator(samples, m);
    // Sensitivity sweep m/2, m, 2m.
    const TailFitResult lo = hill_estimator(samples, m / 2);
    const TailFitResult hi = hill_estimator(samples, 2 * m);
    const double predicted = c.degree_exponent.hi.as_double();
    ExperimentReport rep;
    rep.pass = std::abs(fit.estimate - predicted) <= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"},
                            {"exponent", exponent_to_json(c.degree_exponent)}};
    rep.doc["estimate"] = fit.estimate;
    rep.doc["dispersion"] = fit.std_error;
    rep.doc["hill_m"] = m;
    rep.doc["sensitivity"] = {{"half_m", lo.estimate}, {"double_m", hi.estimate}};
    rep.doc["pass"] = rep.pass;

    std::ostringstream csv;
    csv << "k,count,ccdf\n";
    const auto hist = degree_histogram(tr);
    std::uint64_t above = tr.n();
    for (std::size_t k = 1; k < hist.size(); ++k) {
        csv << k << "," << hist[k] << ","
            << static_cast<double>(above) / static_cast<double>(tr.n()) << "\n";
        above -= hist[k];
    }
    rep.csv["degree_ccdf"] = csv.str();
    return rep;
}

inline ExperimentReport pagerank_tail(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const ModelConstants c = compute_constants(d);
    const TreeState tr = grow_discrete(d, spec.n, detail::replica_seed(spec.seed, 0));
    const auto m = static_cast<std::size_t>(
        std::floor(std::pow(static_cast<double>(tr.n()), 2.0 / 3.0)));
    auto fit_at = [&](double damping) {
        const PageRankVector pr = pagerank_scores(tr, damping);
        std::vector<double> samples(pr.scores);
        return hill_estimator(samples, m);
    };
    const TailFitResult heavy = fit_at(spec.damping);      // large c: heavier tail
    const TailFitResult light = fit_at(spec.damping_alt);  // small c: degree-like tail
    const auto pred_heavy = predicted_pagerank_exponent(d, c, spec.damping);
    const auto pred_light = predicted_pagerank_exponent(d, c, spec.damping_alt);
    const double separation = light.estimate - heavy.estimate;
    ExperimentReport rep;
    rep.pass = separation >= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {
        {"provenance", "numeric"},
        {"exponent_at_damping", exponent_to_json(pred_heavy)},
        {"exponent_at_damping_alt", exponent_to_json(pred_light)},
        {"description", "directional check only; absolute exponents reported"}};
    rep.doc["estimate_at_damping"] = heavy.estimate;
    rep.doc["estimate_at_damping_alt"] = light.estimate;
    rep.doc["separation"] = separation;
    rep.doc["hill_m"] = m;
    rep.doc["pass"] = rep.pass;
    return rep;
}

inline ExperimentReport pagerank_oracle(const ExperimentSpec& spec) {
    const std::vector<std::string> pool = {"geometric:0.3", "geometric:0.7", "det:0",
                                           "srw:0.4", "affine:0.5", "pmf:0.2,0.3,0.5"};
    const auto errs = detail::parallel_map<double>(spec.replicas, [&](int r) {
        const std::uint64_t s = detail::replica_seed(spec.seed, r);
        Rng pick(s);
        const StepDistribution d = parse_pmf_spec(pool[r % pool.size()]);
        const std::uint64_t n = 1 + pick.below(spec.n);
        const double c = 0.05 + 0.9 * pick.u01();
        const TreeState tr = grow_discrete(d, n, s);
        const PageRankVector fast = pagerank_scores(tr, c);
        const PageRankVector slow = pagerank_bruteforce(tr, c);
        double worst = 0.0;
        for (std::uint64_t v = 0; v < tr.n(); ++v)
            worst = std::max(worst, std::abs(fast.scores[v] - slow.scores[v]));
        return worst;
    });
    double worst = 0.0;
    for (double e : errs) worst = std::max(worst, e);
    ExperimentReport rep;
    rep.pass = worst <= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "closed-form"},
                            {"description", "recursive scores equal path-count scores"}};
    rep.doc["estimate"] = worst;
    rep.doc["dispersion"] = 0.0;
    rep.doc["pass"] = rep.pass;
    return rep;
}

inline ExperimentReport equivalence(const ExperimentSpec& spec) {
    const double c = spec.damping;
    const StepDistribution d = StepDistribution::geometric(1.0 - c);
    const int reps = spec.replicas;
    // Pool degree histograms over replicas on each side.
    const auto side = [&](bool pagerank_side) {
        return detail::parallel_map<std::vector<std::uint64_t>>(reps, [&](int r) {
            const std::uint64_t s =
                detail::replica_seed(spec.seed, (pagerank_side ? 1000000 : 0) + r);
            const TreeState tr = pagerank_side
                                     ? grow_pagerank_attachment(c, spec.n, s).tree
                                     : grow_discrete(d, spec.n, s);
            return degree_histogram(tr);
        });
    };
    const auto ha = side(true);
    const auto hb = side(false);
    std::size_t width = 0;
    for (const auto& h : ha) width = std::max(width, h.size());
    for (const auto& h : hb) width = std::max(width, h.size());
    std::vector<double> ca(width, 0.0), cb(width, 0.0);
    for (const auto& h : ha)
        for (std::size_t k = 0; k < h.size(); ++k) ca[k] += static_cast<double>(h[k]);
    for (const auto& h : hb)
        for (std::size_t k = 0; k < h.size(); ++k) cb[k] += static_cast<double>(h[k]);
    // Coarse tail binning keeps the homogeneity test honest about the mild
    // within-tree dependence of degree counts.
    const auto res = stats::chi2_two_sample(ca, cb, 500.0);
    ExperimentReport rep;
    rep.pass = res.p_value >= spec.tolerance;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {
        {"provenance", "closed-form"},
        {"description",
         "pagerank attachment at damping c is distributed as geometric(1-c) exploration"}};
    rep.doc["chi2"] = res.statistic;
    rep.doc["dof"] = res.dof;
    rep.doc["p_value"] = res.p_value;
    rep.doc["pass"] = rep.pass;
    return rep;
}

inline ExperimentReport moment_bound(const ExperimentSpec& spec) {
    const StepDistribution d = parse_pmf_spec(spec.pmfs.at(0));
    const ModelConstants c = compute_constants(d);
    const double s0 = c.s0.value();
    const double f_s0 = d.pgf(s0).value();
    const double p0 = d.prob(0);
    const double bound = (p0 / f_s0) * std::exp(spec.t / c.R.value());
    const auto vals = detail::parallel_map<double>(spec.replicas, [&](int r) {
        Rng attach = Rng::stream(detail::replica_seed(spec.seed, r), kAttachStream);
        Rng clock = Rng::stream(detail::replica_seed(spec.seed, r), kClockStream);
        const TreeState tr = grow_killed_with(d, spec.t, attach, clock);
        return weighted_profile(tr, s0);
    });
    const double mean = stats::mean(vals);
    const double se = stats::stderr_of_mean(vals);
    const double rel = se / mean;
    ExperimentReport rep;
    rep.pass = mean <= bound * (1.0 + 3.0 * rel);
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "numeric"}, {"upper_bound", bound},
                            {"description", "E[P*_s0(t)] <= (p0/f(s0)) e^{t/R}"}};
    rep.doc["estimate"] = mean;
    rep.doc["dispersion"] = se;
    rep.doc["pass"] = rep.pass;
    return rep;
}

inline ExperimentReport determinism(const ExperimentSpec& spec) {
    struct Case {
        std::string name;
        std::function<TreeState(std::uint64_t)> make;
    };
    const std::vector<Case> cases = {
        {"discrete geometric:0.3",
         [&](std::uint64_t s) {
             return grow_discrete(StepDistribution::geometric(0.3), spec.n, s);
         }},
        {"continuous geometric:0.5",
         [&](std::uint64_t s) {
             return grow_continuous(StepDistribution::geometric(0.5),
                                    {spec.n, std::nullopt}, s);
         }},
        {"killed geometric:0.5 t=6",
         [&](std::uint64_t s) {
             return grow_killed(StepDistribution::geometric(0.5), 6.0, s);
         }},
        {"pagerank c=0.7",
         [&](std::uint64_t s) {
             return grow_pagerank_attachment(0.7, spec.n, s).tree;
         }},
    };
    bool all_pass = true;
    ordered_json rows = ordered_json::array();
    for (const auto& kase : cases) {
        const std::uint64_t s = detail::replica_seed(spec.seed, 7);
        std::ostringstream b1, b2;
        save_tree_binary(kase.make(s), b1);
        save_tree_binary(kase.make(s), b2);
        const bool same = b1.str() == b2.str();
        all_pass = all_pass && same;
        ordered_json rj;
        rj["case"] = kase.name;
        rj["byte_identical"] = same;
        rows.push_back(rj);
    }
    ExperimentReport rep;
    rep.pass = all_pass;
    rep.doc["config"] = detail::spec_echo(spec);
    rep.doc["predicted"] = {{"provenance", "closed-form"},
                            {"description", "fixed seed reproduces byte-identical trees"}};
    rep.doc["rows"] = rows;
    rep.doc["pass"] = all_pass;
    return rep;
}

}  // namespace runners

/// Materialize a preset acceptance experiment A1..A14.
inline ExperimentSpec preset(const std::string& name) {
    ExperimentSpec s;
    s.seed = 20240901;
    if (name == "A1") {
        s.kind = ExperimentKind::Constants;
        s.tolerance = 1e-9;
    } else if (name == "A2") {
        s.kind = ExperimentKind::AlphaK;
        s.pmfs = {"geometric:0.3"};
        s.n = 200;
        s.tolerance = 1e-2;
    } else if (name == "A3") {
        s.kind = ExperimentKind::ProfileSeries;
        s.pmfs = {"geometric:0.5", "srw:0.4"};
        s.t = 2.0;
        s.replicas = 100000;
    } else if (name == "A4") {
        s.kind = ExperimentKind::MeanDegree;
        s.pmfs = {"geometric:0.9", "geometric:0.3"};
        s.replicas = 100000;
        s.tolerance = 0.02;
    } else if (name == "A5") {
        s.kind = ExperimentKind::RootCondensation;
        s.pmfs = {"geometric:0.3"};
        s.n = 1000000;
        s.replicas = 10;
        s.tolerance = 0.02;
    } else if (name == "A6") {
        s.kind = ExperimentKind::FringeConvergence;
        s.pmfs = {"geometric:0.5"};
        s.n = 100000;
        s.replicas = 100000;
        s.tolerance = 0.02;
    } else if (name == "A7") {
        s.kind = ExperimentKind::Height;
        s.pmfs = {"det:0", "geometric:0.5"};
        s.sizes = {10000, 100000, 1000000};
        s.replicas = 120;
        s.tolerance = 0.15;
        s.band_lo = 2.2;
        s.band_hi = 3.0;
    } else if (name == "A8") {
        s.kind = ExperimentKind::BrwSpeed;
        s.pmfs = {"geometric:0.5"};
        s.t = 14.0;
        s.replicas = 20;
        s.tolerance = 0.15;
    } else if (name == "A9") {
        s.kind = ExperimentKind::DegreeTail;
        s.pmfs = {"affine:0.5"};
        s.n = 1000000;
        s.tolerance = 0.2;
    } else if (name == "A10") {
        s.kind = ExperimentKind::PageRankTail;
        s.pmfs = {"geometric:0.9"};
        s.n = 1000000;
        s.damping = 0.9;
        s.damping_alt = 0.15;
        s.tolerance = 0.8;
    } else if (name == "A11") {
        s.kind = ExperimentKind::PagerankOracle;
        s.replicas = 500;
        s.n = 50;
        s.tolerance = 1e-12;
    } else if (name == "A12") {
        s.kind = ExperimentKind::Equivalence;
        s.n = 10000;
        s.replicas = 50;
        s.damping = 0.7;
        s.tolerance = 0.001;
    } else if (name == "A13") {
        s.kind = ExperimentKind::MomentBound;
        s.pmfs = {"geometric:0.3"};
        s.t = 2.0;
        s.replicas = 100000;
    } else if (name == "A14") {
        s.kind = ExperimentKind::Determinism;
        s.n = 10000;
    } else {
        throw ParamOutOfRange("unknown preset '" + name + "' (A1..A14)");
    }
    return s;
}

inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport rep;
    switch (spec.kind) {
        case ExperimentKind::Constants: rep = runners::constants(spec); break;
        case ExperimentKind::AlphaK: rep = runners::alpha_k(spec); break;
        case ExperimentKind::ProfileSeries: rep = runners::profile_series(spec); break;
        case ExperimentKind::MeanDegree: rep = runners::mean_degree(spec); break;
        case ExperimentKind::RootCondensation:
            rep = runners::root_condensation(spec);
            break;
        case ExperimentKind::FringeConvergence:
            rep = runners::fringe_convergence(spec);
            break;
        case ExperimentKind::Height: rep = runners::height_experiment(spec); break;
        case ExperimentKind::BrwSpeed: rep = runners::brw_speed(spec); break;
        case ExperimentKind::DegreeTail: rep = runners::degree_tail(spec); break;
        case ExperimentKind::PageRankTail: rep = runners::pagerank_tail(spec); break;
        case ExperimentKind::PagerankOracle: rep = runners::pagerank_oracle(spec); break;
        case ExperimentKind::Equivalence: rep = runners::equivalence(spec); break;
        case ExperimentKind::MomentBound: rep = runners::moment_bound(spec); break;
        case ExperimentKind::Determinism: rep = runners::determinism(spec); break;
    }
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// Parse an ExperimentSpec from JSON, starting from a preset when named.
inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
    ExperimentSpec s;
    if (j.contains("preset")) s = preset(j.at("preset").get<std::string>());
    if (j.contains("kind")) s.kind = kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("pmf")) s.pmfs = {j.at("pmf").get<std::string>()};
    if (j.contains("pmfs")) s.pmfs = j.at("pmfs").get<std::vector<std::string>>();
    if (j.contains("n")) s.n = j.at("n").get<std::uint64_t>();
    if (j.contains("sizes")) s.sizes = j.at("sizes").get<std::vector<std::uint64_t>>();
    if (j.contains("t")) s.t = j.at("t").get<double>();
    if (j.contains("replicas")) s.replicas = j.at("replicas").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("damping")) s.damping = j.at("damping").get<double>();
    if (j.contains("damping_alt")) s.damping_alt = j.at("damping_alt").get<double>();
    if (j.contains("tolerance")) s.tolerance = j.at("tolerance").get<double>();
    if (j.contains("band_lo")) s.band_lo = j.at("band_lo").get<double>();
    if (j.contains("band_hi")) s.band_hi = j.at("band_hi").get<double>();
    return s;
}

}  // namespace coevo
