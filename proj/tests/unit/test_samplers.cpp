#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/gibbs.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/samplers.hpp"
#include "orlicz/stats.hpp"

using namespace orlicz;

namespace {

double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730951);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows,
                           std::size_t j) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
    return out;
}

}  // namespace

TEST_CASE("rng streams are deterministic and seed-separated") {
    Rng a(5), b(5), c(6);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t x = a.next_u64();
        all_equal = all_equal && x == b.next_u64();
        any_diff = any_diff || x != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);

    const std::uint64_t m = 777;
    CHECK(derive_stream(m, 0) != derive_stream(m, 1));
    CHECK(derive_stream(m, 1) != derive_stream(m, 2));
    CHECK(derive_stream(m, 1) != m);
    Rng s1(derive_stream(m, 1)), s2(derive_stream(m, 2));
    CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("rng variates hit their first moments") {
    Rng rng(2024);
    const int m = 50000;
    double su = 0, sn = 0, snn = 0, se = 0, sg = 0;
    for (int i = 0; i < m; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        snn += z * z;
        se += rng.exponential();
        sg += rng.gamma(2.5);
    }
    CHECK(su / m == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::fabs(sn / m) <= 0.02);
    CHECK(snn / m == doctest::Approx(1.0).epsilon(0.03));
    CHECK(se / m == doctest::Approx(1.0).epsilon(0.03));
    CHECK(sg / m == doctest::Approx(2.5).epsilon(0.03));

    Rng r2(7);
    const double lo = 2.0, hi = 5.0;
    for (int i = 0; i < 1000; ++i) {
        const double x = r2.uniform(lo, hi);
        CHECK(x >= lo);
        CHECK(x < hi);
        const std::uint64_t k = r2.below(13);
        CHECK(k < 13);
    }
}

TEST_CASE("iid tilted draws follow their own law") {
    const GibbsMeasure1D g(OrliczFunction::power(2.0), -1.0);
    const std::vector<double> xs =
        sample_gibbs_iid(OrliczFunction::power(2.0), -1.0, 4000, 31);
    const ComparisonStat ks =
        ks_distance(xs, [&](double x) { return g.cdf(x); });
    CHECK(ks.pass);

    double s2 = 0.0;
    for (double x : xs) s2 += x * x;
    CHECK(s2 / double(xs.size()) == doctest::Approx(0.5).epsilon(0.05));

    const std::vector<double> again =
        sample_gibbs_iid(OrliczFunction::power(2.0), -1.0, 4000, 31);
    CHECK(xs == again);
}

TEST_CASE("ball radial mass matches the beta law") {
    // Under the uniform law on { sum |x_i|^p <= B },
    // P[ sum |x_i|^p <= u B ] = u^{n/p}.
    for (std::size_t n : {3u, 4u}) {
        CAPTURE(n);
        LpBallSampler sampler(2.0, 1.0, n, 99);
        std::vector<double> x;
        const int m = 20000;
        int inside = 0;
        for (int i = 0; i < m; ++i) {
            sampler.next(x);
            double s = 0.0;
            for (double xi : x) s += xi * xi;
            if (s <= 0.5 * double(n)) ++inside;
        }
        const double expected = std::pow(0.5, double(n) / 2.0);
        CHECK(std::fabs(double(inside) / m - expected) <= 0.01);
    }
}

TEST_CASE("high-dimensional ball coordinates are near gaussian") {
    // Budget sum x_i^2 <= n pins E x^2 = 1 in the limit: coordinate one
    // approaches the standard normal.
    const std::size_t n = 400;
    LpBallSampler sampler(2.0, 1.0, n, 5150);
    std::vector<double> x;
    std::vector<double> coord1(3000);
    for (double& c : coord1) {
        sampler.next(x);
        c = x[0];
    }
    const ComparisonStat ks = ks_distance(coord1, standard_normal_cdf);
    CHECK(ks.statistic <= 0.025);
}

TEST_CASE("one-dimensional ball draws are uniform on the interval") {
    LpBallSampler sampler(2.0, 1.0, 1, 8);
    std::vector<double> x;
    std::vector<double> xs(4000);
    for (double& v : xs) {
        sampler.next(x);
        REQUIRE(x.size() == 1);
        v = x[0];
        CHECK(std::fabs(v) <= 1.0);
    }
    const auto unif_cdf = [](double t) {
        return t < -1.0 ? 0.0 : (t > 1.0 ? 1.0 : 0.5 * (t + 1.0));
    };
    CHECK(ks_distance(xs, unif_cdf).pass);
}

TEST_CASE("ball coordinates are exchangeable") {
    const auto rows = sample_lp_ball_exact(2.0, 1.0, 2, 3000, 64);
    REQUIRE(rows.size() == 3000);
    REQUIRE(rows[0].size() == 2);
    CHECK(ks_two_sample(column(rows, 0), column(rows, 1)).pass);
}

TEST_CASE("sampler inputs are validated") {
    CHECK_THROWS_AS(LpBallSampler(0.5, 1.0, 3, 1), DomainError);
    CHECK_THROWS_AS(LpBallSampler(2.0, 0.0, 3, 1), DomainError);
    CHECK_THROWS_AS(LpBallSampler(2.0, 1.0, 0, 1), DomainError);
    CHECK_THROWS_AS(sample_lp_ball_exact(2.0, 1.0, 3, 0, 1), ConfigError);
    CHECK_THROWS_AS(OrliczBallChain({}, 5, 1), ConfigError);
    CHECK_THROWS_AS(
        OrliczBallChain({{OrliczFunction::power(2.0), 1.0},
                         {OrliczFunction::power(1.0), 1.0},
                         {OrliczFunction::power(4.0), 1.0}},
                        5, 1),
        ConfigError);
    CHECK_THROWS_AS(OrliczBallChain({{OrliczFunction::power(2.0), -1.0}}, 5, 1),
                    ConfigError);
    CHECK_THROWS_AS(
        mcmc_orlicz_ball({{OrliczFunction::power(2.0), 10.0}}, 5, 10, 20, 5, 1),
        ConfigError);
    CHECK_THROWS_AS(
        mcmc_orlicz_ball({{OrliczFunction::power(2.0), 10.0}}, 5, 30, 10, 0, 1),
        ConfigError);
    CHECK_THROWS_AS(
        conditional_marginal_samples(OrliczFunction::power(2.0),
                                     OrliczFunction::power(1.0), 0.5, 0.0, 10,
                                     11, 100, {}, 1),
        ConfigError);
}

TEST_CASE("the chain never leaves the intersection body") {
    const std::size_t n = 200;
    const double nd = double(n);
    OrliczBallChain chain(
        {{OrliczFunction::power(2.0), nd}, {OrliczFunction::power(1.0), 0.55 * nd}},
        n, 345);
    for (int s = 0; s < 50; ++s) {
        chain.sweep();
        double s2 = 0.0, s1 = 0.0;
        for (double xi : chain.state()) {
            s2 += xi * xi;
            s1 += std::fabs(xi);
        }
        // Fresh summation, independent of the chain's cached accumulators.
        CHECK(s2 <= nd * (1.0 + 1e-12));
        CHECK(s1 <= 0.55 * nd * (1.0 + 1e-12));
        CHECK(chain.potential_sum(0) == doctest::Approx(s2).epsilon(1e-9));
        CHECK(chain.potential_sum(1) == doctest::Approx(s1).epsilon(1e-9));
    }
    CHECK(chain.sweep_count() == 50);
}

TEST_CASE("a slack second constraint leaves the chain untouched") {
    const std::size_t n = 50;
    OrliczBallChain tight({{OrliczFunction::power(2.0), double(n)}}, n, 777);
    OrliczBallChain loose({{OrliczFunction::power(2.0), double(n)},
                           {OrliczFunction::power(1.0), 10.0 * double(n)}},
                          n, 777);
    for (int s = 0; s < 30; ++s) {
        tight.sweep();
        loose.sweep();
        CHECK(tight.state() == loose.state());
    }
}

TEST_CASE("chain marginals agree with the exact sampler") {
    const std::size_t n = 100;
    const auto kept = mcmc_orlicz_ball({{OrliczFunction::power(2.0), double(n)}},
                                       n, 2 * 100 + 1500 * 5, 2 * 100, 5, 2718);
    REQUIRE(kept.size() == 1500);
    const auto exact = sample_lp_ball_exact(2.0, 1.0, n, 1500, 282);
    const ComparisonStat two = ks_two_sample(column(kept, 0), column(exact, 0));
    CHECK(two.pass);

    const auto kept2 = mcmc_orlicz_ball({{OrliczFunction::power(2.0), double(n)}},
                                        n, 2 * 100 + 1500 * 5, 2 * 100, 5, 2718);
    CHECK(kept == kept2);
}

TEST_CASE("conditional samples follow the small-ball law at low radius") {
    // Constraint pair (x^2, |x|) with R = 0.5 sits below the first
    // threshold: the limit marginal is the |x| tilt with mean 0.5.
    const GibbsMeasure1D target(OrliczFunction::power(1.0), -2.0);
    const auto rows = conditional_marginal_samples(
        OrliczFunction::power(2.0), OrliczFunction::power(1.0), 0.5, 0.0, 60, 1,
        1000, {}, 90210);
    REQUIRE(rows.size() == 1000);
    REQUIRE(rows[0].size() == 1);
    const ComparisonStat ks = ks_distance(
        column(rows, 0), [&](double x) { return target.cdf(x); });
    CHECK(ks.statistic <= 0.05);
}

TEST_CASE("conditional samples follow the large-ball law at high radius") {
    // R = 1.5 is above the upper threshold: the enlarged constraint is
    // irrelevant and the marginal is the x^2 tilt at budget 1, i.e. N(0,1).
    const GibbsMeasure1D target(OrliczFunction::power(2.0), -0.5);
    const auto rows = conditional_marginal_samples(
        OrliczFunction::power(2.0), OrliczFunction::power(1.0), 1.5, 0.0, 60, 2,
        1000, {}, 1066);
    REQUIRE(rows[0].size() == 2);
    const ComparisonStat ks = ks_distance(
        column(rows, 0), [&](double x) { return target.cdf(x); });
    CHECK(ks.statistic <= 0.05);
}

TEST_CASE("sample csv carries metadata, header, and one row per state") {
    std::ostringstream out;
    write_samples_csv(out, {{1.0, 2.0}, {3.0, 4.5}}, "{\"n\": 2}");
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("# ", 0) == 0);
    CHECK(line.find("{\"n\": 2}") != std::string::npos);
    REQUIRE(std::getline(in, line));
    CHECK(line == "x1,x2");
    REQUIRE(std::getline(in, line));
    CHECK(line == "1,2");
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("3,4.5", 0) == 0);
    CHECK(!std::getline(in, line));
}
