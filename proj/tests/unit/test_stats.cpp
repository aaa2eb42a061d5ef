#include <doctest.h>

#include <cmath>
#include <vector>

#include "orlicz/gibbs.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/samplers.hpp"
#include "orlicz/stats.hpp"

using namespace orlicz;

namespace {

double laplace_cdf_rate_sqrt2(double x) {
    const double r = 1.4142135623730951;
    return x < 0.0 ? 0.5 * std::exp(r * x) : 1.0 - 0.5 * std::exp(-r * x);
}

double uniform01_cdf(double x) {
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

}  // namespace

TEST_CASE("ks distance has the textbook value on a tiny sample") {
    // EDF of {0.25, 0.75} against U[0,1]: every corner gap is exactly 1/4.
    const std::vector<double> xs = {0.25, 0.75};
    const ComparisonStat st = ks_distance(xs, uniform01_cdf);
    CHECK(st.statistic == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(st.n1 == 2);
    CHECK(st.n2 == 0);
    CHECK(st.critical_value_1pct ==
          doctest::Approx(1.63 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("ks distance accepts its own law for almost every seed") {
    const GibbsMeasure1D g(OrliczFunction::power(2.0), -1.0);
    const auto cdf = [&](double x) { return g.cdf(x); };
    int passes = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const std::vector<double> xs =
            sample_gibbs_iid(OrliczFunction::power(2.0), -1.0, 1500, seed);
        if (ks_distance(xs, cdf).pass) ++passes;
    }
    // 1% level: about one rejection per hundred replications.
    CHECK(passes >= 95);
}

TEST_CASE("ks distance separates the normal from the laplace law") {
    // Variance-matched pair: N(0,1) against the rate-sqrt(2) Laplace; the
    // population sup-distance is 0.0620, so the statistic must exceed 0.04.
    Rng rng(20240817);
    std::vector<double> xs(20000);
    for (double& x : xs) x = rng.normal();
    const ComparisonStat st = ks_distance(xs, laplace_cdf_rate_sqrt2);
    CHECK(st.statistic >= 0.04);
    CHECK(st.statistic <= 0.09);
    CHECK(!st.pass);
}

TEST_CASE("two-sample ks accepts same-law pairs and maxes out on disjoint ones") {
    const std::vector<double> a =
        sample_gibbs_iid(OrliczFunction::power(1.0), -1.0, 4000, 11);
    const std::vector<double> b =
        sample_gibbs_iid(OrliczFunction::power(1.0), -1.0, 4000, 12);
    const ComparisonStat same = ks_two_sample(a, b);
    CHECK(same.pass);
    CHECK(same.n1 == 4000);
    CHECK(same.n2 == 4000);
    CHECK(same.critical_value_1pct ==
          doctest::Approx(1.63 * std::sqrt(2.0 / 4000.0)).epsilon(1e-12));

    // Disjoint supports: the statistic saturates at 1 and, once the samples
    // are large enough for the critical value to drop below 1, fails.
    std::vector<double> lo(50), hi(50);
    for (int i = 0; i < 50; ++i) {
        lo[i] = 0.01 * i;
        hi[i] = 10.0 + 0.01 * i;
    }
    const ComparisonStat apart = ks_two_sample(lo, hi);
    CHECK(apart.statistic == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!apart.pass);
}

TEST_CASE("ks helpers reject empty input") {
    const std::vector<double> empty;
    const std::vector<double> one = {0.5};
    CHECK_THROWS_AS(ks_distance(empty, uniform01_cdf), DomainError);
    CHECK_THROWS_AS(ks_two_sample(empty, one), DomainError);
    CHECK_THROWS_AS(ks_two_sample(one, empty), DomainError);
}

TEST_CASE("histogram tv is small against the generating density") {
    const GibbsMeasure1D g(OrliczFunction::power(2.0), -1.0);
    const std::vector<double> xs =
        sample_gibbs_iid(OrliczFunction::power(2.0), -1.0, 100000, 7);
    const double tv = tv_histogram(
        xs, [&](double x) { return g.density(x); }, 50, {-4.0, 4.0});
    CHECK(tv >= 0.0);
    CHECK(tv <= 0.02);
}

TEST_CASE("histogram tv saturates when supports are disjoint") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = 10.0 + 0.001 * double(i);
    const GibbsMeasure1D g(OrliczFunction::power(2.0), -1.0);
    const double tv = tv_histogram(
        xs, [&](double x) { return g.density(x); }, 50, {-4.0, 4.0});
    CHECK(tv == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("histogram masses sum to one and match direct integration") {
    const GibbsMeasure1D g(OrliczFunction::power(1.0), -1.0);
    const std::vector<double> masses = histogram_masses(
        [&](double x) { return g.density(x); }, 40, {-9.0, 9.0});
    REQUIRE(masses.size() == 40);
    double total = 0.0;
    for (double m : masses) {
        CHECK(m >= 0.0);
        total += m;
    }
    // The cells tile [-9, 9]; the rate-1 law leaves e^{-9} outside.
    CHECK(total == doctest::Approx(1.0 - std::exp(-9.0)).epsilon(1e-6));
    // Cell 20 of [-9, 9] with 40 cells is [0, 0.45): mass (1 - e^{-0.45})/2.
    CHECK(masses[20] ==
          doctest::Approx(0.5 * (1.0 - std::exp(-0.45))).epsilon(1e-6));
}

TEST_CASE("bootstrap interval brackets the estimate and the truth") {
    Rng rng(99);
    std::vector<double> xs(400);
    for (double& x : xs) x = 3.0 + rng.normal();
    const BootstrapMean bm = bootstrap_mean(xs, 0.95, 1000, 5);
    CHECK(bm.lo <= bm.estimate);
    CHECK(bm.estimate <= bm.hi);
    CHECK(bm.lo <= 3.0);
    CHECK(bm.hi >= 3.0);
    CHECK(bm.hi - bm.lo <= 4.0 * 1.96 / std::sqrt(400.0));

    CHECK_THROWS_AS(bootstrap_mean(xs, 1.5, 1000, 5), DomainError);
    CHECK_THROWS_AS(bootstrap_mean(xs, 0.95, 5, 5), DomainError);
    const std::vector<double> empty;
    CHECK_THROWS_AS(bootstrap_mean(empty, 0.95, 1000, 5), DomainError);
}

TEST_CASE("splitting estimate recovers the volume-ratio rate") {
    // X uniform on the euclidean-type ball, event: mean |x| below 0.5.
    // The asymptotic rate is (1/2) log 2 pi + 1/2 - 1 = 0.4189385332.
    const RareEventEstimate est =
        rare_event_rate(OrliczFunction::power(2.0), OrliczFunction::power(1.0),
                        0.5, 60, 8, 6, 424242);
    const double target = 0.4189385332046727;
    CHECK(std::fabs(est.rate - target) <= 0.2 * target);
    CHECK(est.stderr_rate >= 0.0);
    REQUIRE(!est.stage_probabilities.empty());
    for (double p : est.stage_probabilities) {
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("splitting shortcuts to one stage at a typical level") {
    // At R = 0.9 the event is no longer rare (typical mean |x| is 0.798):
    // a single direct stage estimates a near-unit probability.
    const RareEventEstimate est =
        rare_event_rate(OrliczFunction::power(2.0), OrliczFunction::power(1.0),
                        0.9, 60, 8, 6, 31337);
    CHECK(est.stage_probabilities.size() == 1);
    CHECK(est.rate >= 0.0);
    CHECK(est.rate <= 0.02);
}

TEST_CASE("splitting reports degeneracy instead of returning garbage") {
    // One giant leap from the typical level to an impossibly small one:
    // no chain lands a hit and the estimator must say so.
    CHECK_THROWS_AS(
        rare_event_rate(OrliczFunction::power(2.0), OrliczFunction::power(1.0),
                        0.02, 30, 1, 2, 5),
        DegenerateError);
    CHECK_THROWS_AS(
        rare_event_rate(OrliczFunction::power(2.0), OrliczFunction::power(1.0),
                        -1.0, 30, 1, 2, 5),
        DomainError);
    CHECK_THROWS_AS(
        rare_event_rate(OrliczFunction::power(2.0), OrliczFunction::power(1.0),
                        0.5, 0, 1, 2, 5),
        DomainError);
}
