#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "orlicz/gibbs.hpp"
#include "orlicz/maxent.hpp"
#include "orlicz/orlicz_function.hpp"

using namespace orlicz;

namespace {

const OrliczFunction kP1 = OrliczFunction::power(1.0);
const OrliczFunction kP2 = OrliczFunction::power(2.0);
const OrliczFunction kP4 = OrliczFunction::power(4.0);
const OrliczFunction kMix =
    OrliczFunction::mix({{1.0, 4.0}, {0.5, 1.0}});

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kSqrt2OverPi = 0.7978845608028654;

// Best value over two-point measures (1-t) delta_0 + t delta_y with
// t V1(y) <= 1, maximizing t V2(y) -- a primal lower bound for r_tilde
// that is tight because the extreme points of the moment set are exactly
// these measures.
double two_point_scan(const OrliczFunction& v1, const OrliczFunction& v2) {
    double best = 0.0;
    for (int i = 1; i <= 200000; ++i) {
        const double y = 1e-3 * double(i);
        const double t = std::min(1.0, 1.0 / v1.value(y));
        best = std::max(best, t * v2.value(y));
    }
    return best;
}

}  // namespace

TEST_CASE("growth separation accepts dominating pairs and rejects others") {
    CHECK_NOTHROW(check_growth_separation(kP2, kP1));
    CHECK_NOTHROW(check_growth_separation(kP4, kP2));
    CHECK_NOTHROW(check_growth_separation(kMix, kP1));
    CHECK_NOTHROW(check_growth_separation(kP2, OrliczFunction::huber(1.0)));
    CHECK_THROWS_AS(check_growth_separation(kP1, kP2), HypothesisError);
    CHECK_THROWS_AS(check_growth_separation(kP2, kP2), HypothesisError);
}

TEST_CASE("thresholds for (x^2, |x|) match the closed forms") {
    const Thresholds th = compute_thresholds(kP2, kP1);
    // E x^2 = 2/alpha^2 under the |x| tilt, so alpha_bar = -sqrt(2).
    CHECK(th.alpha_bar == doctest::Approx(-kSqrt2).epsilon(1e-8));
    // r_bar = E |x| = 1/sqrt(2).
    CHECK(th.r_bar == doctest::Approx(1.0 / kSqrt2).epsilon(1e-8));
    // r_tilde = sup { E|x| : E x^2 <= 1 } = 1 (Cauchy-Schwarz).
    CHECK(th.r_tilde == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("thresholds for (x^4, x^2) match the closed forms") {
    const Thresholds th = compute_thresholds(kP4, kP2);
    // Under the Gaussian tilt E x^4 = 3/(4 alpha^2) = 1 at alpha = -sqrt(3)/2.
    CHECK(th.alpha_bar == doctest::Approx(-0.8660254037844386).epsilon(1e-8));
    CHECK(th.r_bar == doctest::Approx(0.5773502691896258).epsilon(1e-8));
    CHECK(th.r_tilde == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("thresholds for the quartic mix over |x| match frozen values") {
    const Thresholds th = compute_thresholds(kMix, kP1);
    CHECK(th.alpha_bar == doctest::Approx(-2.3497921041152724).epsilon(1e-8));
    CHECK(th.r_bar == doctest::Approx(0.4255695634727282).epsilon(1e-8));
    // r_tilde is the root of y^4 + y/2 = 1: the best two-point measure puts
    // all mass at the feasibility boundary, where the value equals y itself.
    CHECK(th.r_tilde == doctest::Approx(0.8674707803110372).epsilon(1e-7));

    const auto [abar, rbar] =
        threshold_rbar(kMix, OrliczFunction::huber(1.0));
    CHECK(abar == doctest::Approx(-1.3884021766662172).epsilon(1e-8));
    CHECK(rbar == doctest::Approx(0.4021433136032756).epsilon(1e-8));
}

TEST_CASE("r_tilde agrees with the two-point-measure primal oracle") {
    const double scan_huber = two_point_scan(kP2, OrliczFunction::huber(1.0));
    const double dual_huber = threshold_rtilde(kP2, OrliczFunction::huber(1.0));
    CHECK(dual_huber == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(dual_huber >= scan_huber - 1e-9);
    CHECK(dual_huber - scan_huber <= 5e-3);

    const double scan_mix = two_point_scan(kMix, kP1);
    const double dual_mix = threshold_rtilde(kMix, kP1);
    CHECK(dual_mix >= scan_mix - 1e-9);
    CHECK(dual_mix - scan_mix <= 5e-3);
}

TEST_CASE("subcritical maxent reduces to the tilt of the second potential") {
    const MaxEntSolution s = maxent_two_constraints(
        kP2, 1.0, ConstraintType::LessEqual, kP1, 0.5,
        ConstraintType::LessEqual);
    CHECK(s.regime == Regime::Subcritical);
    CHECK(s.mu1_star == 0.0);
    // Laplace with E|x| = 0.5: multiplier 2, Z = 1, entropy 1.
    CHECK(s.mu2_star == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(s.mu2_star == doctest::Approx(-solve_alpha(kP1, 0.5)).epsilon(1e-8));
    CHECK(s.log_partition == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s.achieved_m1 == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(s.achieved_m2 == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(s.entropy == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.kkt_residual <= 1e-9);

    const ExpFamilyDensity law = maxent_law(s, kP2, kP1);
    CHECK(law.density(0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(law.density(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
    CHECK(law.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("both constraints bind strictly between the thresholds") {
    const MaxEntSolution s = maxent_two_constraints(
        kP2, 1.0, ConstraintType::LessEqual, kP1, 0.75,
        ConstraintType::LessEqual);
    CHECK(s.regime == Regime::Intermediate);
    CHECK(s.mu1_star == doctest::Approx(0.1702684750).epsilon(1e-7));
    CHECK(s.mu2_star == doctest::Approx(0.8792840434).epsilon(1e-7));
    CHECK(s.log_partition == doctest::Approx(0.5667905511).epsilon(1e-7));
    CHECK(s.achieved_m1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.achieved_m2 == doctest::Approx(0.75).epsilon(1e-8));
    CHECK(s.entropy == doctest::Approx(1.3965220711).epsilon(1e-7));
    CHECK(s.kkt_residual <= 1e-9);
}

TEST_CASE("supercritical maxent reduces to the tilt of the first potential") {
    for (double c2 : {2.0, 0.85}) {
        CAPTURE(c2);
        const MaxEntSolution s = maxent_two_constraints(
            kP2, 1.0, ConstraintType::LessEqual, kP1, c2,
            ConstraintType::LessEqual);
        // Once c2 clears E|x| of the standard normal the second constraint
        // goes slack and the optimum is N(0,1) regardless of c2.
        CHECK(s.regime == Regime::Supercritical);
        CHECK(s.mu1_star == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(s.mu2_star == 0.0);
        CHECK(s.mu1_star ==
              doctest::Approx(-solve_alpha(kP2, 1.0)).epsilon(1e-8));
        CHECK(s.log_partition ==
              doctest::Approx(0.5 * kLog2Pi).epsilon(1e-9));
        CHECK(s.achieved_m1 == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.achieved_m2 ==
              doctest::Approx(kSqrt2OverPi).epsilon(1e-8));
        CHECK(s.entropy ==
              doctest::Approx(0.5 * kLog2Pi + 0.5).epsilon(1e-8));
        CHECK(s.kkt_residual <= 1e-9);
    }
}

TEST_CASE("complementary slackness holds across the sweep") {
    for (double c2 : {0.3, 0.5, 0.72, 0.75, 0.78, 1.2, 3.0}) {
        CAPTURE(c2);
        const MaxEntSolution s = maxent_two_constraints(
            kP2, 1.0, ConstraintType::LessEqual, kP1, c2,
            ConstraintType::LessEqual);
        CHECK(s.mu1_star >= 0.0);
        CHECK(s.mu2_star >= 0.0);
        CHECK(std::fabs(s.mu1_star * (1.0 - s.achieved_m1)) <= 1e-7);
        CHECK(std::fabs(s.mu2_star * (c2 - s.achieved_m2)) <= 1e-7);
        CHECK(s.achieved_m1 <= 1.0 + 1e-8);
        CHECK(s.achieved_m2 <= c2 + 1e-8);
        CHECK(s.kkt_residual <= 1e-9);
        CHECK(s.entropy ==
              doctest::Approx(s.log_partition + s.mu1_star * s.achieved_m1 +
                              s.mu2_star * s.achieved_m2)
                  .epsilon(1e-10));
    }
}

TEST_CASE("the first multiplier fades out approaching the lower threshold") {
    const double r_bar = compute_thresholds(kP2, kP1).r_bar;
    const auto solve = [&](double c2) {
        return maxent_two_constraints(kP2, 1.0, ConstraintType::LessEqual, kP1,
                                      c2, ConstraintType::LessEqual);
    };
    const MaxEntSolution far = solve(r_bar + 0.01);
    const MaxEntSolution close = solve(r_bar + 0.001);
    const MaxEntSolution below = solve(r_bar - 0.01);
    CHECK(far.mu1_star > 0.0);
    CHECK(close.mu1_star > 0.0);
    CHECK(close.mu1_star < far.mu1_star);
    CHECK(far.mu1_star < 0.1);
    CHECK(below.mu1_star == 0.0);
    CHECK(below.regime == Regime::Subcritical);
}

TEST_CASE("equality constraints admit a negative multiplier") {
    // E x^2 = 1 with E |x| = 0.85 forced: above sqrt(2/pi) the |x| moment
    // must be pushed up, so its multiplier turns negative.
    const MaxEntSolution s = maxent_two_constraints(
        kP2, 1.0, ConstraintType::Equal, kP1, 0.85, ConstraintType::Equal);
    CHECK(s.mu1_star == doctest::Approx(1.1227854901774936).epsilon(1e-6));
    CHECK(s.mu2_star == doctest::Approx(-1.465377623947043).epsilon(1e-6));
    CHECK(s.log_partition == doctest::Approx(1.5065255449990962).epsilon(1e-6));
    CHECK(s.achieved_m1 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.achieved_m2 == doctest::Approx(0.85).epsilon(1e-8));
    CHECK(s.entropy == doctest::Approx(1.3837400548216034).epsilon(1e-6));
    // Strictly below the unconstrained-in-|x| optimum N(0,1).
    CHECK(s.entropy < 0.5 * kLog2Pi + 0.5);

    const ExpFamilyDensity law = maxent_law(s, kP2, kP1);
    CHECK(law.expectation(kP2) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(law.expectation(kP1) == doctest::Approx(0.85).epsilon(1e-7));
}

TEST_CASE("infeasible equality targets are reported as such") {
    // sup { E x^2 : E x^4 <= 1 } = 1, so E x^2 = 1.5 cannot be met.
    CHECK_THROWS_AS(maxent_two_constraints(kP2, 1.5, ConstraintType::Equal,
                                           kP4, 1.0,
                                           ConstraintType::LessEqual),
                    InfeasibleError);
}

TEST_CASE("regime classification follows the thresholds") {
    CHECK(classify_regime(kP2, kP1, 0.5) == Regime::Subcritical);
    CHECK(classify_regime(kP2, kP1, 0.705) == Regime::Subcritical);
    CHECK(classify_regime(kP2, kP1, 0.708) == Regime::Intermediate);
    CHECK(classify_regime(kP2, kP1, 0.75) == Regime::Intermediate);
    CHECK(classify_regime(kP2, kP1, 1.05) == Regime::Supercritical);
    CHECK(classify_regime(kP2, kP1, 1.5) == Regime::Supercritical);

    CHECK(to_string(Regime::Subcritical) == "Subcritical");
    CHECK(to_string(Regime::Intermediate) == "Intermediate");
    CHECK(to_string(Regime::Supercritical) == "Supercritical");
}

TEST_CASE("multiplier-based regime labels match the classifier off the cusp") {
    for (double c2 : {0.5, 0.75, 1.5}) {
        CAPTURE(c2);
        const MaxEntSolution s = maxent_two_constraints(
            kP2, 1.0, ConstraintType::LessEqual, kP1, c2,
            ConstraintType::LessEqual);
        CHECK(s.regime == classify_regime(kP2, kP1, c2));
    }
}

TEST_CASE("thin-shell rate vanishes at the typical radius") {
    // x_star = sqrt(E x^2) under the quartic tilt with budget 1.
    const double x_star = std::sqrt(moment(kP2, kP4, solve_alpha(kP4, 1.0)));
    CHECK(x_star == doctest::Approx(0.8221789586624585).epsilon(1e-8));

    const ThinshellPoint at_star = thinshell_rate(kP4, 1.0, 2.0, x_star);
    CHECK(!at_star.infeasible);
    CHECK(at_star.value >= 0.0);
    CHECK(at_star.value <= 1e-6);
}

TEST_CASE("thin-shell rate matches the frozen interior value") {
    const double x_star = 0.8221789586624585;
    const ThinshellPoint half = thinshell_rate(kP4, 1.0, 2.0, 0.5 * x_star);
    CHECK(!half.infeasible);
    // Gaussian closed form: the quartic constraint is slack at this point.
    CHECK(half.value == doctest::Approx(0.6614547781267963).epsilon(1e-6));
}

TEST_CASE("thin-shell rate is monotone on both sides of the minimum") {
    const double x_star = 0.8221789586624585;
    double prev = std::numeric_limits<double>::infinity();
    for (double f : {0.2, 0.4, 0.6, 0.8}) {
        CAPTURE(f);
        const ThinshellPoint pt = thinshell_rate(kP4, 1.0, 2.0, f * x_star);
        CHECK(!pt.infeasible);
        CHECK(pt.value < prev);
        CHECK(pt.value > 0.0);
        prev = pt.value;
    }
    prev = 0.0;
    for (double x : {0.88, 0.93, 0.97}) {
        CAPTURE(x);
        const ThinshellPoint pt = thinshell_rate(kP4, 1.0, 2.0, x);
        CHECK(!pt.infeasible);
        CHECK(pt.value > prev);
        prev = pt.value;
    }
}

TEST_CASE("thin-shell rate marks unreachable radii infeasible") {
    // sup { E x^2 : E x^4 <= 1 } = 1, so x > 1 cannot be realized.
    const double x_star = 0.8221789586624585;
    for (double f : {1.25, 1.5, 2.0}) {
        CAPTURE(f);
        const ThinshellPoint pt = thinshell_rate(kP4, 1.0, 2.0, f * x_star);
        CHECK(pt.infeasible);
        CHECK(std::isinf(pt.value));
    }
    // Negative radii are impossible but not an infeasibility of the
    // entropy problem; zero is achieved only by the point mass.
    const ThinshellPoint neg = thinshell_rate(kP4, 1.0, 2.0, -0.5);
    CHECK(std::isinf(neg.value));
    CHECK(!neg.infeasible);
    const ThinshellPoint zero = thinshell_rate(kP4, 1.0, 2.0, 0.0);
    CHECK(std::isinf(zero.value));
    CHECK(zero.infeasible);
}

TEST_CASE("thin-shell rate validates its hypotheses") {
    CHECK_THROWS_AS(thinshell_rate(kP2, 1.0, 4.0, 0.5), HypothesisError);
    CHECK_THROWS_AS(thinshell_rate(kP2, 1.0, 2.0, 0.5), HypothesisError);
    CHECK_THROWS_AS(thinshell_rate(kP4, 0.0, 2.0, 0.5), DomainError);
    CHECK_THROWS_AS(thinshell_rate(kP4, 1.0, 0.5, 0.5), DomainError);
    CHECK_THROWS_AS(
        thinshell_rate(kP4, 1.0, 2.0, std::numeric_limits<double>::infinity()),
        DomainError);
}
