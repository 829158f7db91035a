#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/rng.hpp"
#include "coevo/step_distribution.hpp"
#include "coevo/tree.hpp"

namespace coevo {

enum class GrowthVariant { Discrete, Continuous, Killed, PageRankAttach };

inline const char* variant_name(GrowthVariant v) {
    switch (v) {
        case GrowthVariant::Discrete: return "discrete";
        case GrowthVariant::Continuous: return "continuous";
        case GrowthVariant::Killed: return "killed";
        case GrowthVariant::PageRankAttach: return "pagerank";
    }
    return "?";
}

struct GrowthConfig {
    std::optional<StepDistribution> pmf;  // not used by PageRankAttach
    GrowthVariant variant = GrowthVariant::Discrete;
    std::optional<std::uint64_t> target_n;
    std::optional<double> target_t;
    double damping = 0.5;         // PageRankAttach only
    std::uint64_t seed = 1;
    double explosion_cap = 1e8;   // reject time horizons with e^t beyond this

    void validate() const {
        if (target_n.has_value() == target_t.has_value())
            throw ParamOutOfRange("growth config: exactly one of n / t targets");
        if (variant == GrowthVariant::PageRankAttach) {
            if (!(damping > 0.0 && damping < 1.0))
                throw ParamOutOfRange("pagerank attachment: c in (0,1)");
            if (!target_n)
                throw ParamOutOfRange("pagerank attachment: vertex-count target");
        } else if (!pmf) {
            throw ParamOutOfRange("growth config: pmf required");
        }
        if (variant == GrowthVariant::Discrete && !target_n)
            throw ParamOutOfRange("discrete growth: vertex-count target");
        if (variant == GrowthVariant::Killed && !target_t)
            throw ParamOutOfRange("killed growth: time horizon target");
    }
};

// Stream ids under one master seed; attachment draws are consumed in a fixed
// (vertex draw, Z draw) order so couplings replay exactly.
inline constexpr std::uint64_t kAttachStream = 0;
inline constexpr std::uint64_t kClockStream = 1;

namespace detail {

/// Ancestor of v at distance z (the root absorbs overshoot).
inline std::uint64_t ancestor_at(const TreeState& t, std::uint64_t v, std::uint64_t z) {
    while (z > 0 && v != 0) {
        v = t.parent[v];
        --z;
    }
    return v;
}

inline void append_vertex(TreeState& t, std::uint64_t parent) {
    t.parent.push_back(parent);
    t.depth.push_back(t.depth[parent] + 1);
}

}  // namespace detail

/// Discrete-time tree T_n: each arrival picks a uniform existing vertex, walks
/// Z steps toward the root, attaches there. n is the total vertex count.
inline TreeState grow_discrete(const StepDistribution& d, std::uint64_t n,
                               std::uint64_t seed) {
    if (n < 1) throw ParamOutOfRange("grow_discrete: n >= 1");
    Rng attach = Rng::stream(seed, kAttachStream);
    TreeState t;
    t.seed = seed;
    t.parent.reserve(n);
    t.depth.reserve(n);
    t.parent.push_back(TreeState::kRoot);
    t.depth.push_back(0);
    for (std::uint64_t v = 1; v < n; ++v) {
        const std::uint64_t pick = attach.below(v);
        const std::uint64_t z = d.sample(attach);
        detail::append_vertex(t, detail::ancestor_at(t, pick, z));
    }
    return t;
}

struct ContinuousTarget {
    std::optional<std::uint64_t> n;
    std::optional<double> t;
};

/// Continuous-time embedding T(t): same attachment law as grow_discrete (the
/// jump chain is the discrete process), inter-event times Exp(size). Records
/// birth times; starts from a single vertex.
inline TreeState grow_continuous(const StepDistribution& d, ContinuousTarget target,
                                 std::uint64_t seed, double explosion_cap = 1e8) {
    if (target.n.has_value() == target.t.has_value())
        throw ParamOutOfRange("grow_continuous: exactly one target");
    if (target.t && std::exp(*target.t) > explosion_cap)
        throw HorizonExplosion("grow_continuous: e^t exceeds memory budget");
    Rng attach = Rng::stream(seed, kAttachStream);
    Rng clock = Rng::stream(seed, kClockStream);
    TreeState t;
    t.seed = seed;
    t.parent.push_back(TreeState::kRoot);
    t.depth.push_back(0);
    t.birth_time.push_back(0.0);
    double now = 0.0;
    const std::uint64_t hard_cap =
        target.n ? *target.n : static_cast<std::uint64_t>(explosion_cap * 64);
    while (true) {
        const std::uint64_t size = t.n();
        if (target.n && size >= *target.n) break;
        now += clock.expo() / static_cast<double>(size);
        if (target.t && now > *target.t) break;
        if (size >= hard_cap)
            throw HorizonExplosion("grow_continuous: population exceeded cap");
        const std::uint64_t pick = attach.below(size);
        const std::uint64_t z = d.sample(attach);
        detail::append_vertex(t, detail::ancestor_at(t, pick, z));
        t.birth_time.push_back(now);
    }
    return t;
}

/// Killed process T*(t) on caller-owned streams (replica fan-out draws many
/// trees per stream): as grow_continuous but an event with Z > depth(v) is
/// discarded. Time still advances on discarded events (every vertex's attempt
/// clock runs at rate 1 regardless of acceptance).
inline TreeState grow_killed_with(const StepDistribution& d, double horizon,
                                  Rng& attach, Rng& clock,
                                  std::uint64_t max_vertices = 100000000ull) {
    TreeState t;
    t.parent.push_back(TreeState::kRoot);
    t.depth.push_back(0);
    t.birth_time.push_back(0.0);
    double now = 0.0;
    while (true) {
        const std::uint64_t size = t.n();
        now += clock.expo() / static_cast<double>(size);
        if (now > horizon) break;
        if (size >= max_vertices) break;  // truncated sample; caller checks size
        const std::uint64_t pick = attach.below(size);
        const std::uint64_t z = d.sample(attach);
        if (z <= t.depth[pick]) {
            t.parent.push_back(detail::ancestor_at(t, pick, z));
            t.depth.push_back(t.depth[pick] - static_cast<std::uint32_t>(z) + 1);
            t.birth_time.push_back(now);
        }
    }
    return t;
}

inline TreeState grow_killed(const StepDistribution& d, double horizon,
                             std::uint64_t seed,
                             std::uint64_t max_vertices = 100000000ull) {
    Rng attach = Rng::stream(seed, kAttachStream);
    Rng clock = Rng::stream(seed, kClockStream);
    TreeState t = grow_killed_with(d, horizon, attach, clock, max_vertices);
    t.seed = seed;
    return t;
}

/// One exact draw from the fringe limit pi_p: T*(tau) with tau ~ Exp(1).
inline TreeState sample_fringe(const StepDistribution& d, Rng& attach, Rng& clock,
                               std::uint64_t max_vertices = 100000000ull) {
    const double tau = clock.expo();
    return grow_killed_with(d, tau, attach, clock, max_vertices);
}

// ---------------------------------------------------------------------------
// PageRank-driven preferential attachment.
// ---------------------------------------------------------------------------

namespace detail {

/// Fenwick tree over nonnegative vertex weights with prefix-sum sampling.
class WeightedSampler {
public:
    void push_back(double w) {
        weights_.push_back(w);
        const std::size_t i = weights_.size();  // 1-based
        // New node covers (i - lowbit(i), i]; assemble it from its children.
        double acc = w;
        const std::size_t lower = i - (i & (~i + 1));
        for (std::size_t j = i - 1; j > lower; j -= j & (~j + 1))
            acc += tree_[j - 1];
        tree_.push_back(acc);
        total_ += w;
    }

    void add(std::size_t idx, double delta) {
        weights_[idx] += delta;
        total_ += delta;
        for (std::size_t i = idx + 1; i <= tree_.size(); i += i & (~i + 1))
            tree_[i - 1] += delta;
    }

    double total() const { return total_; }
    double weight(std::size_t idx) const { return weights_[idx]; }

    /// Index with prefix-sum straddling r in [0, total).
    std::size_t find(double r) const {
        std::size_t pos = 0;
        std::size_t mask = 1;
        while (mask * 2 <= tree_.size()) mask *= 2;
        for (; mask > 0; mask /= 2) {
            const std::size_t next = pos + mask;
            if (next <= tree_.size() && tree_[next - 1] <= r) {
                r -= tree_[next - 1];
                pos = next;
            }
        }
        return pos < weights_.size() ? pos : weights_.size() - 1;
    }

    /// Exact rebuild of the prefix sums from the stored weights, bounding
    /// accumulated float drift.
    void rebuild() {
        total_ = 0.0;
        for (std::size_t i = 1; i <= weights_.size(); ++i) {
            double acc = weights_[i - 1];
            const std::size_t lower = i - (i & (~i + 1));
            for (std::size_t j = i - 1; j > lower; j -= j & (~j + 1))
                acc += tree_[j - 1];
            tree_[i - 1] = acc;
            total_ += weights_[i - 1];
        }
    }

private:
    std::vector<double> weights_;
    std::vector<double> tree_;
    double total_ = 0.0;
};

}  // namespace detail

struct PageRankAttachResult {
    TreeState tree;
    std::vector<double> scores;  // graph-normalized scores maintained incrementally
};

/// Direct PageRank-driven preferential attachment: new vertices attach to v
/// with probability proportional to v's PageRank (damping c). Scores follow
/// the recursion R_v = (1-c) + c * sum_children R_u and are maintained
/// incrementally along the ancestor path; the root's *selection weight* is
/// R_root / (1-c), the stationary probability of the restart walk before the
/// dangling-vertex adjustment. With that weight the process is distributed
/// exactly as the geometric(p = 1-c) exploration tree.
inline PageRankAttachResult grow_pagerank_attachment(double c, std::uint64_t n,
                                                     std::uint64_t seed) {
    if (!(c > 0.0 && c < 1.0)) throw ParamOutOfRange("pagerank attachment: c in (0,1)");
    if (n < 1) throw ParamOutOfRange("pagerank attachment: n >= 1");
    Rng attach = Rng::stream(seed, kAttachStream);
    PageRankAttachResult out;
    TreeState& t = out.tree;
    t.seed = seed;
    t.parent.push_back(TreeState::kRoot);
    t.depth.push_back(0);
    out.scores.push_back(1.0 - c);
    detail::WeightedSampler sampler;
    sampler.push_back(1.0);  // root weight (1-c)/(1-c)

    for (std::uint64_t v = 1; v < n; ++v) {
        const double r = attach.u01() * sampler.total();
        const std::uint64_t target = sampler.find(r);
        detail::append_vertex(t, target);
        out.scores.push_back(1.0 - c);
        sampler.push_back(1.0 - c);
        // Each ancestor a at distance dist from the target gains a descendant
        // at distance dist + 1.
        double gain = (1.0 - c) * c;
        std::uint64_t a = target;
        while (true) {
            out.scores[a] += gain;
            sampler.add(a, a == 0 ? gain / (1.0 - c) : gain);
            if (a == 0) break;
            a = t.parent[a];
            gain *= c;
        }
        if ((v & 0xFFFFull) == 0) sampler.rebuild();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branching random walk.
// ---------------------------------------------------------------------------

struct BrwPoint {
    double time = 0.0;
    std::int64_t position = 0;
};

struct BrwResult {
    std::vector<BrwPoint> rightmost;  // running max B(t), recorded on change
    std::int64_t final_max = 0;
    std::uint64_t particles = 1;
};

/// Event-driven BRW: particles birth at rate 1, child displacement 1 - Z.
/// Tracks the rightmost particle B(t).
inline BrwResult simulate_brw(const StepDistribution& d, double horizon, double cap,
                              std::uint64_t seed) {
    if (std::exp(horizon) > cap)
        throw HorizonExplosion("simulate_brw: e^horizon exceeds cap");
    Rng attach = Rng::stream(seed, kAttachStream);
    Rng clock = Rng::stream(seed, kClockStream);
    std::vector<std::int64_t> pos{0};
    BrwResult out;
    out.rightmost.push_back({0.0, 0});
    std::int64_t best = 0;
    double now = 0.0;
    while (true) {
        now += clock.expo() / static_cast<double>(pos.size());
        if (now > horizon) break;
        if (static_cast<double>(pos.size()) > cap * 64)
            throw HorizonExplosion("simulate_brw: population exceeded cap");
        const std::uint64_t parent = attach.below(pos.size());
        const auto z = static_cast<std::int64_t>(d.sample(attach));
        const std::int64_t child = pos[parent] + 1 - z;
        pos.push_back(child);
        if (child > best) {
            best = child;
            out.rightmost.push_back({now, best});
        }
    }
    out.final_max = best;
    out.particles = pos.size();
    return out;
}

struct CoupledHeights {
    std::uint32_t killed = 0;      // height of T*(t)
    std::int64_t brw = 0;          // rightmost BRW particle
    std::uint32_t reflected = 0;   // height of T(t)
};

/// One genealogy, three displacement rules: the killed tree keeps a child only
/// if its prospective level stays >= 1, the BRW is free, the full tree
/// reflects at the root. Pathwise H*(t) <= B(t) <= H(t).
inline CoupledHeights coupled_heights(const StepDistribution& d, double horizon,
                                      double cap, std::uint64_t seed) {
    if (std::exp(horizon) > cap)
        throw HorizonExplosion("coupled_heights: e^horizon exceeds cap");
    Rng attach = Rng::stream(seed, kAttachStream);
    Rng clock = Rng::stream(seed, kClockStream);
    struct P {
        std::int64_t brw;
        std::uint32_t refl;
        bool alive;  // member of T*
    };
    std::vector<P> ps{{0, 0, true}};
    CoupledHeights h;
    double now = 0.0;
    while (true) {
        now += clock.expo() / static_cast<double>(ps.size());
        if (now > horizon) break;
        if (static_cast<double>(ps.size()) > cap * 64)
            throw HorizonExplosion("coupled_heights: population exceeded cap");
        const std::uint64_t parent = attach.below(ps.size());
        const auto z = static_cast<std::int64_t>(d.sample(attach));
        const P& par = ps[parent];
        P child;
        child.brw = par.brw + 1 - z;
        child.refl = static_cast<std::uint32_t>(
            std::max<std::int64_t>(static_cast<std::int64_t>(par.refl) + 1 - z, 1));
        child.alive = par.alive && child.brw >= 1;
        ps.push_back(child);
        h.brw = std::max(h.brw, child.brw);
        h.reflected = std::max(h.reflected, child.refl);
        if (child.alive)
            h.killed = std::max(h.killed, static_cast<std::uint32_t>(child.brw));
    }
    return h;
}

/// Dispatch a GrowthConfig to the right simulator.
inline TreeState grow(const GrowthConfig& cfg) {
    cfg.validate();
    TreeState t;
    switch (cfg.variant) {
        case GrowthVariant::Discrete:
            t = grow_discrete(*cfg.pmf, *cfg.target_n, cfg.seed);
            break;
        case GrowthVariant::Continuous:
            t = grow_continuous(*cfg.pmf, {cfg.target_n, cfg.target_t}, cfg.seed,
                                cfg.explosion_cap);
            break;
        case GrowthVariant::Killed:
            t = grow_killed(*cfg.pmf, *cfg.target_t, cfg.seed,
                            static_cast<std::uint64_t>(cfg.explosion_cap * 64));
            break;
        case GrowthVariant::PageRankAttach:
            t = grow_pagerank_attachment(cfg.damping, *cfg.target_n, cfg.seed).tree;
            break;
    }
    t.seed = cfg.seed;
    t.provenance = std::string(variant_name(cfg.variant)) +
                   (cfg.pmf ? " " + cfg.pmf->describe() : "") +
                   " seed=" + std::to_string(cfg.seed);
    t.validate();
    return t;
}

}  // namespace coevo
