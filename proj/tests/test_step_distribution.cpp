#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "coevo/rng.hpp"
#include "coevo/stats.hpp"
#include "coevo/step_distribution.hpp"

using namespace coevo;

namespace {

std::vector<StepDistribution> presets() {
    return {StepDistribution::geometric(0.3), StepDistribution::geometric(0.5),
            StepDistribution::geometric(0.9), StepDistribution::bernoulli_affine(0.4),
            StepDistribution::two_point_srw(0.4), StepDistribution::deterministic(0),
            StepDistribution::from_pmf(std::vector<double>{0.2, 0.3, 0.1, 0.4})};
}

}  // namespace

TEST_CASE("from_pmf validates without renormalizing") {
    const auto rrt = StepDistribution::from_pmf(std::vector<double>{1.0});
    CHECK(rrt.prob(0) == 1.0);
    CHECK(rrt.mean() == 0.0);

    const auto two = StepDistribution::from_pmf(std::vector<double>{0.4, 0.0, 0.6});
    CHECK(two.prob(0) == 0.4);
    CHECK(two.prob(1) == 0.0);
    CHECK(two.prob(2) == 0.6);

    CHECK_THROWS_AS(StepDistribution::from_pmf(std::vector<double>{0.5, 0.4}),
                    MassNotOne);
    CHECK_THROWS_AS(StepDistribution::from_pmf(std::vector<double>{-0.1, 1.1}),
                    NegativeWeight);
    CHECK_THROWS_AS(StepDistribution::from_pmf(std::vector<double>{}), EmptySupport);
}

TEST_CASE("presets carry exact closed forms") {
    const auto geo = StepDistribution::geometric(0.3);
    CHECK(geo.mean() == Catch::Approx(7.0 / 3.0).epsilon(1e-14));

    const auto aff = StepDistribution::bernoulli_affine(0.4);
    CHECK(aff.prob(0) == Catch::Approx(0.6));
    CHECK(aff.prob(1) == Catch::Approx(0.4));

    const auto det = StepDistribution::deterministic(0);
    const auto pm = StepDistribution::from_pmf(std::vector<double>{1.0});
    CHECK(det.prob(0) == pm.prob(0));
    CHECK(det.mean() == pm.mean());

    CHECK_THROWS_AS(StepDistribution::geometric(0.0), ParamOutOfRange);
    CHECK_THROWS_AS(StepDistribution::geometric(1.0), ParamOutOfRange);
    CHECK_THROWS_AS(StepDistribution::deterministic(-1), ParamOutOfRange);
}

TEST_CASE("pgf evaluation and radius") {
    const auto geo = StepDistribution::geometric(0.3);
    CHECK(geo.pgf(1.0).value() == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(geo.pgf(0.5).value() == Catch::Approx(0.3 / 0.65).epsilon(1e-14));
    CHECK(geo.pgf(2.0).is_infinite());  // s > 1/q = 10/7
    CHECK(geo.radius().value() == Catch::Approx(10.0 / 7.0));

    CHECK(StepDistribution::geometric(0.5).mean() == Catch::Approx(1.0));
    CHECK(StepDistribution::two_point_srw(0.4).tail(1) == Catch::Approx(0.6));
    CHECK(StepDistribution::bernoulli_affine(0.4).pgf_prime(1.0).value() ==
          Catch::Approx(0.4));
}

TEST_CASE("pgf normalization, monotonicity, convexity on every preset") {
    for (const auto& d : presets()) {
        // mass and pgf(1)
        double mass = 0.0;
        for (std::uint64_t k = 0; k <= d.materialized_support_max(); ++k)
            mass += d.prob(k);
        CHECK(mass == Catch::Approx(1.0).margin(1e-10));
        CHECK(d.pgf(1.0).value() == Catch::Approx(1.0).margin(1e-12));

        // finite-difference monotone + convex grid inside the radius
        const double hi = std::min(d.radius().as_double() * 0.95, 3.0);
        const int grid = 64;
        double prev = d.pgf(1e-9).value();
        double prev_diff = -1.0;
        for (int i = 1; i <= grid; ++i) {
            const double s = hi * i / grid;
            const double f = d.pgf(s).value();
            CHECK(f >= prev - 1e-12);
            const double diff = f - prev;
            if (i > 1) CHECK(diff >= prev_diff - 1e-9);
            prev = f;
            prev_diff = diff;
        }
    }
}

TEST_CASE("sampling matches the pmf") {
    SECTION("deterministic(0) always zero") {
        auto d = StepDistribution::deterministic(0);
        Rng rng(1);
        for (int i = 0; i < 1000; ++i) CHECK(d.sample(rng) == 0);
    }
    SECTION("two-point srw hits only {0,2}") {
        auto d = StepDistribution::two_point_srw(0.4);
        Rng rng(2);
        for (int i = 0; i < 10000; ++i) {
            const auto z = d.sample(rng);
            CHECK((z == 0 || z == 2));
        }
    }
    SECTION("geometric empirical mean within 3 sigma") {
        auto d = StepDistribution::geometric(0.3);
        Rng rng(3);
        const int n = 1000000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += static_cast<double>(d.sample(rng));
        const double mean = acc / n;
        const double sigma = std::sqrt(d.variance() / n);
        CHECK(std::abs(mean - 7.0 / 3.0) <= 3.0 * sigma);
    }
    SECTION("chi-squared goodness of fit at alpha=0.001, 1e6 draws per preset") {
        int preset_idx = 0;
        for (const auto& d : presets()) {
            Rng rng(100 + preset_idx++);
            const int n = 1000000;
            const std::size_t kmax = d.materialized_support_max();
            std::vector<double> observed(kmax + 2, 0.0);
            for (int i = 0; i < n; ++i) {
                const auto z = d.sample(rng);
                ++observed[std::min<std::uint64_t>(z, kmax + 1)];
            }
            std::vector<double> expected(kmax + 2, 0.0);
            for (std::uint64_t k = 0; k <= kmax; ++k) expected[k] = n * d.prob(k);
            expected[kmax + 1] = n * d.tail(kmax + 1);
            if (d.prob(0) == 1.0) continue;  // single-support law: nothing to test
            const auto res = stats::chi2_gof(observed, expected);
            INFO("preset " << d.describe() << " chi2=" << res.statistic
                           << " dof=" << res.dof);
            CHECK(res.p_value >= 0.001);
        }
    }
}

TEST_CASE("aperiodicity detection") {
    CHECK(StepDistribution::geometric(0.3).aperiodic());
    CHECK(StepDistribution::bernoulli_affine(0.4).aperiodic());
    CHECK_FALSE(StepDistribution::two_point_srw(0.4).aperiodic());  // gcd{0,2}=2
    CHECK_FALSE(StepDistribution::deterministic(0).aperiodic());    // gcd{0}=0
}

TEST_CASE("materialization records only tiny tail mass") {
    const auto d = StepDistribution::geometric(0.3);
    CHECK(d.trunc_eps() <= 1e-12);
    CHECK(d.trunc_eps() >= 0.0);
    const auto w = d.materialize();
    CHECK(w[0] == Catch::Approx(0.3));
    CHECK(w[5] == Catch::Approx(0.3 * std::pow(0.7, 5)).epsilon(1e-14));
}

TEST_CASE("pmf spec grammar") {
    CHECK(parse_pmf_spec("geometric:0.3").mean() == Catch::Approx(7.0 / 3.0));
    CHECK(parse_pmf_spec("affine:0.4").prob(1) == Catch::Approx(0.4));
    CHECK(parse_pmf_spec("srw:0.4").prob(2) == Catch::Approx(0.6));
    CHECK(parse_pmf_spec("det:2").prob(2) == 1.0);
    const auto d = parse_pmf_spec("pmf:0.4,0,0.6");
    CHECK(d.prob(0) == Catch::Approx(0.4));
    CHECK(d.prob(2) == Catch::Approx(0.6));
    CHECK_THROWS_AS(parse_pmf_spec("nonsense:1"), ParamOutOfRange);
    CHECK_THROWS_AS(parse_pmf_spec("geometric"), ParamOutOfRange);
}
