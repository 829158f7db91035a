#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "coevo/errors.hpp"
#include "coevo/extended.hpp"
#include "coevo/rng.hpp"

namespace coevo {

/// Walker alias table: O(support) build, O(1) draws.
class AliasSampler {
public:
    AliasSampler() = default;

    explicit AliasSampler(std::span<const double> probs) {
        const std::size_t n = probs.size();
        prob_.assign(n, 0.0);
        alias_.assign(n, 0);
        const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = probs[i] * n / total;
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < n; ++i)
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        while (!small.empty() && !large.empty()) {
            const auto s = small.back();
            const auto l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (auto i : large) prob_[i] = 1.0;
        for (auto i : small) prob_[i] = 1.0;
    }

    std::uint32_t sample(Rng& rng) const {
        const auto i = static_cast<std::uint32_t>(rng.below(prob_.size()));
        return rng.u01() < prob_[i] ? i : alias_[i];
    }

    bool empty() const { return prob_.empty(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

/// Step law p = {p_k} of the exploration length Z, with its pgf f and a
/// constant-time sampler. Immutable after construction.
class StepDistribution {
public:
    enum class Family { Explicit, Geometric, BernoulliAffine, TwoPointSrw, Deterministic };

    static constexpr double kMassTol = 1e-12;
    static constexpr double kDefaultTruncEps = 1e-12;

    /// Explicit finite support. Rejects rather than renormalizes.
    static StepDistribution from_pmf(std::span<const double> weights) {
        if (weights.empty()) throw EmptySupport("from_pmf: empty weight list");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw NegativeWeight("from_pmf: weights must be finite and nonnegative");
            sum += w;
        }
        if (std::abs(sum - 1.0) > kMassTol)
            throw MassNotOne("from_pmf: total mass " + std::to_string(sum) + " != 1");
        StepDistribution d;
        d.family_ = Family::Explicit;
        d.probs_.assign(weights.begin(), weights.end());
        while (d.probs_.size() > 1 && d.probs_.back() == 0.0) d.probs_.pop_back();
        d.finish_explicit();
        return d;
    }

    /// p_k = p (1-p)^k, k >= 0. Exact pgf p/(1-qs) on s < 1/q.
    static StepDistribution geometric(double p) {
        if (!(p > 0.0 && p < 1.0)) throw ParamOutOfRange("geometric: p must be in (0,1)");
        StepDistribution d;
        d.family_ = Family::Geometric;
        d.param_ = p;
        return d;
    }

    /// p_0 = 1-p, p_1 = p (the affine preferential attachment driver).
    static StepDistribution bernoulli_affine(double p) {
        if (!(p > 0.0 && p < 1.0)) throw ParamOutOfRange("affine: p must be in (0,1)");
        StepDistribution d;
        d.family_ = Family::BernoulliAffine;
        d.param_ = p;
        d.probs_ = {1.0 - p, p};
        d.finish_explicit();
        return d;
    }

    /// p_0 = p, p_2 = 1-p: distance to the root moves like a +-1 random walk.
    static StepDistribution two_point_srw(double p) {
        if (!(p > 0.0 && p < 1.0)) throw ParamOutOfRange("srw: p must be in (0,1)");
        StepDistribution d;
        d.family_ = Family::TwoPointSrw;
        d.param_ = p;
        d.probs_ = {p, 0.0, 1.0 - p};
        d.finish_explicit();
        return d;
    }

    static StepDistribution deterministic(int k) {
        if (k < 0) throw ParamOutOfRange("deterministic: k must be >= 0");
        StepDistribution d;
        d.family_ = Family::Deterministic;
        d.param_ = static_cast<double>(k);
        d.probs_.assign(static_cast<std::size_t>(k) + 1, 0.0);
        d.probs_.back() = 1.0;
        d.finish_explicit();
        return d;
    }

    Family family() const { return family_; }
    double param() const { return param_; }

    /// P(Z = k). Closed form for geometric, table lookup otherwise.
    double prob(std::uint64_t k) const {
        if (family_ == Family::Geometric)
            return param_ * std::pow(1.0 - param_, static_cast<double>(k));
        return k < probs_.size() ? probs_[k] : 0.0;
    }

    /// Tail c_i = sum_{k>=i} p_k, with c_0 = 1.
    double tail(std::uint64_t i) const {
        if (i == 0) return 1.0;
        if (family_ == Family::Geometric)
            return std::pow(1.0 - param_, static_cast<double>(i));
        double s = 0.0;
        for (std::size_t k = i; k < probs_.size(); ++k) s += probs_[k];
        return s;
    }

    bool has_finite_support() const { return family_ != Family::Geometric; }

    /// Radius of convergence of the pgf.
    ExtReal radius() const {
        if (family_ == Family::Geometric) return ExtReal::finite(1.0 / (1.0 - param_));
        return ExtReal::infinity();
    }

    /// f(s) = sum p_k s^k; +inf is a value (s beyond the radius), not an error.
    ExtReal pgf(double s) const {
        if (family_ == Family::Geometric) {
            const double q = 1.0 - param_;
            if (s >= 1.0 / q) return ExtReal::infinity();
            return ExtReal::finite(param_ / (1.0 - q * s));
        }
        double acc = 0.0, sk = 1.0;
        for (double p : probs_) {
            acc += p * sk;
            sk *= s;
        }
        return std::isfinite(acc) ? ExtReal::finite(acc) : ExtReal::infinity();
    }

    /// f'(s) by closed form or term-wise differentiation.
    ExtReal pgf_prime(double s) const {
        if (family_ == Family::Geometric) {
            const double q = 1.0 - param_;
            if (s >= 1.0 / q) return ExtReal::infinity();
            const double den = 1.0 - q * s;
            return ExtReal::finite(param_ * q / (den * den));
        }
        double acc = 0.0, sk = 1.0;
        for (std::size_t k = 1; k < probs_.size(); ++k) {
            acc += static_cast<double>(k) * probs_[k] * sk;
            sk *= s;
        }
        return std::isfinite(acc) ? ExtReal::finite(acc) : ExtReal::infinity();
    }

    /// E[Z] = f'(1).
    double mean() const {
        if (family_ == Family::Geometric) return (1.0 - param_) / param_;
        double m = 0.0;
        for (std::size_t k = 1; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
        return m;
    }

    double variance() const {
        if (family_ == Family::Geometric) {
            const double q = 1.0 - param_;
            return q / (param_ * param_);
        }
        const double m = mean();
        double s2 = 0.0;
        for (std::size_t k = 0; k < probs_.size(); ++k) {
            const double d = static_cast<double>(k) - m;
            s2 += d * d * probs_[k];
        }
        return s2;
    }

    /// gcd{j : p_j > 0} == 1, treating gcd(0, x) = x. The two-point srw is the
    /// canonical periodic example (support {0,2} -> gcd 2).
    bool aperiodic() const {
        if (family_ == Family::Geometric) return true;
        std::uint64_t g = 0;
        for (std::size_t k = 0; k < probs_.size(); ++k)
            if (probs_[k] > 0.0) g = std::gcd(g, static_cast<std::uint64_t>(k));
        return g == 1;
    }

    /// Finite support representation, discarding tail mass <= eps for the
    /// geometric family. Returned weights are the exact p_k (not renormalized);
    /// 1 - sum(weights) is the discarded mass.
    std::vector<double> materialize(double eps = kDefaultTruncEps) const {
        if (family_ != Family::Geometric) return probs_;
        const double q = 1.0 - param_;
        // smallest K with q^(K+1) <= eps
        const auto cap = static_cast<std::size_t>(
            std::ceil(std::log(eps) / std::log(q)));
        std::vector<double> w(cap + 1);
        for (std::size_t k = 0; k <= cap; ++k) w[k] = prob(k);
        return w;
    }

    /// Tail mass discarded when this law is materialized with the default eps.
    double trunc_eps() const {
        if (family_ != Family::Geometric) return 0.0;
        const auto w = materialize();
        double s = 0.0;
        for (double x : w) s += x;
        return 1.0 - s;
    }

    /// One draw of Z: closed-form inversion for geometric, alias table otherwise.
    std::uint64_t sample(Rng& rng) const {
        if (family_ == Family::Geometric) {
            const double q = 1.0 - param_;
            // P(Z >= k) = q^k; invert the CDF on a (0,1] uniform.
            const double u = rng.u01_pos();
            if (u > q) return 0;
            return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(q)));
        }
        if (probs_.size() == 1) return 0;
        if (family_ == Family::Deterministic) return static_cast<std::uint64_t>(param_);
        return alias_.sample(rng);
    }

    /// Support max for finite-support laws; geometric reports its materialized cap.
    std::size_t materialized_support_max(double eps = kDefaultTruncEps) const {
        if (family_ == Family::Geometric) return materialize(eps).size() - 1;
        return probs_.size() - 1;
    }

    std::string describe() const {
        std::ostringstream os;
        switch (family_) {
            case Family::Geometric: os << "geometric:" << param_; break;
            case Family::BernoulliAffine: os << "affine:" << param_; break;
            case Family::TwoPointSrw: os << "srw:" << param_; break;
            case Family::Deterministic: os << "det:" << static_cast<int>(param_); break;
            case Family::Explicit: {
                os << "pmf:";
                for (std::size_t k = 0; k < probs_.size(); ++k) {
                    if (k) os << ",";
                    os << probs_[k];
                }
                break;
            }
        }
        return os.str();
    }

private:
    void finish_explicit() {
        if (probs_.size() > 1) alias_ = AliasSampler(probs_);
    }

    Family family_ = Family::Explicit;
    double param_ = 0.0;
    std::vector<double> probs_;  // empty for geometric (kept analytic)
    AliasSampler alias_;
};

/// Single parse point for the CLI pmf grammar:
///   geometric:0.3 | affine:0.4 | srw:0.4 | det:2 | pmf:0.4,0,0.6
inline StepDistribution parse_pmf_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ParamOutOfRange("pmf spec '" + spec + "': expected kind:params");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    try {
        if (kind == "geometric") return StepDistribution::geometric(std::stod(rest));
        if (kind == "affine") return StepDistribution::bernoulli_affine(std::stod(rest));
        if (kind == "srw") return StepDistribution::two_point_srw(std::stod(rest));
        if (kind == "det") return StepDistribution::deterministic(std::stoi(rest));
        if (kind == "pmf") {
            std::vector<double> w;
            std::stringstream ss(rest);
            std::string tok;
            while (std::getline(ss, tok, ',')) w.push_back(std::stod(tok));
            return StepDistribution::from_pmf(w);
        }
    } catch (const std::invalid_argument&) {
        throw ParamOutOfRange("pmf spec '" + spec + "': bad numeric parameter");
    }
    throw ParamOutOfRange("pmf spec '" + spec + "': unknown kind '" + kind + "'");
}

}  // namespace coevo
