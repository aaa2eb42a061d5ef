#include <doctest.h>

#include <array>
#include <cmath>

#include "orlicz/quadrature.hpp"

using namespace orlicz;

TEST_CASE("integrate matches closed forms to the configured tolerance") {
    QuadratureConfig q;
    // int_0^1 x^2 = 1/3
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, q) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // int_0^pi sin = 2
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0,
                    3.141592653589793, q) == doctest::Approx(2.0).epsilon(1e-12));
    // int_0^8 e^{-x} = 1 - e^{-8}
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 8.0, q) ==
          doctest::Approx(1.0 - std::exp(-8.0)).epsilon(1e-12));
    // Degenerate range integrates to zero.
    CHECK(integrate([](double x) { return x; }, 2.0, 2.0, q) == 0.0);
    CHECK(integrate([](double x) { return x; }, 3.0, 2.0, q) == 0.0);
}

TEST_CASE("interior break points let kinked integrands reach full accuracy") {
    QuadratureConfig q;
    // f(x) = |x - 1/3|: exact integral over [0,1] is (1/3)^2/2 + (2/3)^2/2.
    const auto f = [](double x) { return std::fabs(x - 1.0 / 3.0); };
    const double exact = 0.5 * (1.0 / 9.0) + 0.5 * (4.0 / 9.0);
    const std::array<double, 1> breaks = {1.0 / 3.0};
    CHECK(integrate(f, 0.0, 1.0, q, breaks) ==
          doctest::Approx(exact).epsilon(1e-13));
    // Breaks outside the range are ignored.
    const std::array<double, 2> outside = {-5.0, 5.0};
    CHECK(integrate([](double x) { return x; }, 0.0, 1.0, q, outside) ==
          doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("wide slow-decay ranges stay inside the subdivision budget") {
    QuadratureConfig q;
    // e^{-x/5} over [0, 300]: the kind of range a small |alpha| tilt creates.
    const double got =
        integrate([](double x) { return std::exp(-x / 5.0); }, 0.0, 300.0, q);
    CHECK(got == doctest::Approx(5.0 * (1.0 - std::exp(-60.0))).epsilon(1e-11));
}

TEST_CASE("non-finite integrands are rejected") {
    QuadratureConfig q;
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, q),
                    QuadratureError);
}

TEST_CASE("an exhausted budget raises instead of returning junk") {
    QuadratureConfig q;
    q.max_subdivisions = 8;
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-15;
    CHECK_THROWS_AS(
        integrate([](double x) { return std::exp(-x) * std::sin(40.0 * x); },
                  0.0, 50.0, q),
        QuadratureError);
}

TEST_CASE("config validation rejects nonsense tolerances") {
    QuadratureConfig q;
    q.abs_tol = 0.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = {};
    q.rel_tol = -1.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = {};
    q.log_tail_threshold = -5.0;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = {};
    q.max_subdivisions = 4;
    CHECK_THROWS_AS(q.validate(), ConfigError);
    q = {};
    CHECK_NOTHROW(q.validate());
}

TEST_CASE("tail radius doubling finds the crossing and flags non-decay") {
    const double t = detail::find_tail_radius(
        [](double x) { return -x * x; }, 1.0, -60.0);
    CHECK(t >= std::sqrt(60.0));
    CHECK(t <= 2.0 * std::sqrt(60.0) + 1.0);
    CHECK_THROWS_AS(
        detail::find_tail_radius([](double) { return -1.0; }, 1.0, -60.0),
        IntegrabilityError);
}
