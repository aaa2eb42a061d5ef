#include "orlicz/maxent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kActiveTol = 1e-7;  // multiplier this small counts as zero
constexpr double kKktTol = 1e-9;

QuadratureConfig tighten(const QuadratureConfig& q) {
    QuadratureConfig t = q;
    t.abs_tol = std::min(q.abs_tol, 1e-13);
    t.rel_tol = std::min(q.rel_tol, 1e-11);
    return t;
}

struct DualState {
    double log_z;
    double m1, m2;
    double var1, var2, cov;
};

// All integrals the dual needs at multiplier point (mu1, mu2). Throws
// IntegrabilityError when the exponent fails to grow, which callers treat
// as "outside the dual domain".
DualState dual_integrals(const OrliczFunction& v1, const OrliczFunction& v2,
                         double mu1, double mu2, const QuadratureConfig& q) {
    ExpFamilyDensity fam({{mu1, v1}, {mu2, v2}}, q, false);
    DualState s{};
    s.log_z = fam.log_partition();
    s.m1 = fam.expectation(v1);
    s.m2 = fam.expectation(v2);
    const double m11 = fam.expectation_product(v1, v1);
    const double m22 = fam.expectation_product(v2, v2);
    const double m12 = fam.expectation_product(v1, v2);
    s.var1 = m11 - s.m1 * s.m1;
    s.var2 = m22 - s.m2 * s.m2;
    s.cov = m12 - s.m1 * s.m2;
    return s;
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "Subcritical";
        case Regime::Intermediate: return "Intermediate";
        case Regime::Supercritical: return "Supercritical";
    }
    return "Intermediate";
}

void check_growth_separation(const OrliczFunction& v1, const OrliczFunction& v2) {
    const double x0 = 1e3 * v2.inverse_nonneg(1.0);
    const double r0 = v1.value(x0) / v2.value(x0);
    const double r1 = v1.value(100.0 * x0) / v2.value(100.0 * x0);
    if (!(r0 >= 2.0) || !(r1 >= 1.1 * r0))
        throw HypothesisError(
            "V1 does not dominate V2 at large arguments; thresholds are undefined");
}

std::pair<double, double> threshold_rbar(const OrliczFunction& v1,
                                         const OrliczFunction& v2,
                                         const QuadratureConfig& q) {
    check_growth_separation(v1, v2);
    const QuadratureConfig t = tighten(q);
    const auto g = [&](double a) {
        return ExpFamilyDensity({{-a, v2}}, t, false).expectation(v1);
    };
    const auto dg = [&](double a) {
        ExpFamilyDensity fam({{-a, v2}}, t, false);
        return fam.expectation_product(v1, v2) -
               fam.expectation(v1) * fam.expectation(v2);
    };
    const double alpha_bar = detail::solve_increasing_in_alpha(g, dg, 1.0, 1e-10);
    const double r_bar =
        ExpFamilyDensity({{-alpha_bar, v2}}, t, false).expectation(v2);
    return {alpha_bar, r_bar};
}

namespace {

// sup over x >= 0 of V2(x) - b V1(x); dense log grid then golden polish.
double inner_sup(const OrliczFunction& v1, const OrliczFunction& v2, double b) {
    const auto phi = [&](double x) { return v2.value(x) - b * v1.value(x); };

    // Find a right edge beyond which phi stays below zero for good: the
    // V2/V1 ratio must sit well under b and keep shrinking.
    double edge = 1.0;
    int ok = 0;
    for (int it = 0; it < 400 && ok < 3; ++it) {
        const double ratio = v2.value(edge) / v1.value(edge);
        if (ratio < 0.5 * b && phi(edge) < 0.0)
            ++ok;
        else
            ok = 0;
        edge *= 2.0;
    }
    if (ok < 3)
        throw HypothesisError("V2/V1 does not vanish; the threshold sup is infinite");

    double best_x = 0.0, best = 0.0;  // phi(0) = 0 is always available
    const double lo = edge * 1e-12;
    const int grid = 2000;
    for (int i = 0; i <= grid; ++i) {
        const double x = lo * std::pow(edge / lo, double(i) / grid);
        const double p = phi(x);
        if (p > best) {
            best = p;
            best_x = x;
        }
    }
    if (best_x > 0.0) {
        double a = best_x / 1.05, c = best_x * 1.05;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
        double p1 = phi(x1), p2 = phi(x2);
        for (int it = 0; it < 90 && (c - a) > 1e-14 * c; ++it) {
            if (p1 >= p2) {
                c = x2; x2 = x1; p2 = p1;
                x1 = c - gr * (c - a); p1 = phi(x1);
            } else {
                a = x1; x1 = x2; p1 = p2;
                x2 = a + gr * (c - a); p2 = phi(x2);
            }
        }
        best = std::max(best, std::max(p1, p2));
    }
    return best;
}

}  // namespace

double threshold_rtilde(const OrliczFunction& v1, const OrliczFunction& v2) {
    check_growth_separation(v1, v2);
    const auto g = [&](double b) { return b + inner_sup(v1, v2, b); };

    // b* <= g(b*) <= g(1), so [tiny, g(1) + 1] brackets the minimizer; g is
    // convex (sup of functions affine in b, plus b), so golden section finds
    // the global minimum.
    double a = 1e-9;
    double c = g(1.0) + 1.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
    double g1 = g(x1), g2 = g(x2);
    double best = std::min(g1, g2);
    for (int it = 0; it < 120 && (c - a) > 1e-10 * std::max(1.0, c); ++it) {
        if (g1 <= g2) {
            c = x2; x2 = x1; g2 = g1;
            x1 = c - gr * (c - a); g1 = g(x1);
        } else {
            a = x1; x1 = x2; g1 = g2;
            x2 = a + gr * (c - a); g2 = g(x2);
        }
        best = std::min(best, std::min(g1, g2));
    }
    return best;
}

Thresholds compute_thresholds(const OrliczFunction& v1, const OrliczFunction& v2,
                              const QuadratureConfig& q) {
    const auto [alpha_bar, r_bar] = threshold_rbar(v1, v2, q);
    const double r_tilde = threshold_rtilde(v1, v2);
    return {alpha_bar, r_bar, r_tilde};
}

namespace {

// Projected-gradient optimality measure: per coordinate, how far mu is from
// the fixed point of a unit projected-gradient step.
double kkt_measure(const std::array<double, 2>& mu,
                   const std::array<double, 2>& grad,
                   const std::array<ConstraintType, 2>& types) {
    double r = 0.0;
    for (int i = 0; i < 2; ++i) {
        if (types[i] == ConstraintType::Equal)
            r = std::max(r, std::fabs(grad[i]));
        else
            r = std::max(r, std::fabs(mu[i] - std::max(0.0, mu[i] - grad[i])));
    }
    return r;
}

}  // namespace

MaxEntSolution maxent_two_constraints(const OrliczFunction& v1, double c1,
                                      ConstraintType t1,
                                      const OrliczFunction& v2, double c2,
                                      ConstraintType t2,
                                      const QuadratureConfig& q) {
    if (!(c1 > 0.0) || !std::isfinite(c1) || !(c2 > 0.0) || !std::isfinite(c2))
        throw DomainError("moment targets must be finite and > 0");
    const QuadratureConfig tq = tighten(q);

    const std::array<ConstraintType, 2> types = {t1, t2};
    const std::array<double, 2> c = {c1, c2};
    std::array<double, 2> mu = {1.0, 1.0};

    // Dual objective D(mu) = log Z(mu) + mu . c; grad D = c - m(mu);
    // Hessian = covariance of (V1, V2). Returns nothing when mu sits outside
    // the dual domain (non-integrable exponent).
    const auto eval_dual = [&](const std::array<double, 2>& m)
        -> std::optional<double> {
        if (!std::isfinite(m[0]) || !std::isfinite(m[1])) return std::nullopt;
        try {
            ExpFamilyDensity fam({{m[0], v1}, {m[1], v2}}, tq, false);
            const double d = fam.log_partition() + m[0] * c[0] + m[1] * c[1];
            return std::isfinite(d) ? std::optional<double>(d) : std::nullopt;
        } catch (const NumericError&) {
            return std::nullopt;
        }
    };

    std::optional<double> d_cur = eval_dual(mu);
    if (!d_cur)
        throw DivergenceError(
            "constraints inactive at the initial multipliers, entropy unbounded");

    DualState st = dual_integrals(v1, v2, mu[0], mu[1], tq);
    std::array<double, 2> grad = {c[0] - st.m1, c[1] - st.m2};
    double kkt = kkt_measure(mu, grad, types);

    // Slackness |mu_i (m_i - c_i)| must end below 1e-8, so large multipliers
    // need a proportionally smaller gradient.
    const auto inner_tol = [&]() {
        const double mu_scale = std::max({1.0, std::fabs(mu[0]), std::fabs(mu[1])});
        return std::min(0.9 * kKktTol, 0.5e-8 / mu_scale);
    };

    // Empirical unbounded-dual detection, used only after the iteration cap:
    // an infeasible target leaves Newton crawling along a recession ray where
    // the dual keeps falling at a linear rate forever. Sample the ray at
    // three widening distances and call the problem infeasible when every
    // chord still descends at a per-unit rate above the noise floor. A
    // feasible-but-stalled solve sits near its finite minimum, so its chords
    // flatten out and the test cannot fire.
    const auto ray_descends_forever = [&](const std::array<double, 2>& dir) {
        const double norm = std::hypot(dir[0], dir[1]);
        if (!(norm > 0.0) || !d_cur) return false;
        double s_prev = 0.0;
        double d_prev = *d_cur;
        for (double s : {1e1, 1e2, 1e3}) {
            std::array<double, 2> probe = {mu[0] + s * dir[0] / norm,
                                           mu[1] + s * dir[1] / norm};
            for (int i = 0; i < 2; ++i)
                if (types[i] == ConstraintType::LessEqual)
                    probe[i] = std::max(probe[i], 0.0);
            const auto d_probe = eval_dual(probe);
            if (!d_probe || !(*d_probe < d_prev - 1e-5 * (s - s_prev)))
                return false;
            s_prev = s;
            d_prev = *d_probe;
        }
        return true;
    };

    const std::array<double, 2> mu_start = mu;
    std::array<double, 2> last_dir = {0.0, 0.0};

    // Try every direction that could witness an unbounded dual; the net
    // displacement of a crawling iterate tracks the recession ray far more
    // reliably than the (often degenerate) final Newton direction.
    const auto certify_infeasible_along =
        [&](const std::array<double, 2>& newton_dir) {
            const std::array<double, 2> travel = {mu[0] - mu_start[0],
                                                  mu[1] - mu_start[1]};
            const std::array<double, 2> descent = {-grad[0], -grad[1]};
            for (const auto& ray : {travel, newton_dir, descent})
                if (ray_descends_forever(ray))
                    throw InfeasibleError(
                        "entropy problem infeasible: the dual is unbounded below");
        };

    for (int iter = 0; iter < 400 && kkt > inner_tol(); ++iter) {
        std::array<bool, 2> pinned{};
        for (int i = 0; i < 2; ++i)
            pinned[i] = types[i] == ConstraintType::LessEqual &&
                        mu[i] <= kActiveTol && grad[i] >= 0.0;

        std::array<double, 2> dir{0.0, 0.0};
        if (!pinned[0] && !pinned[1]) {
            const double ridge = 1e-13 * (st.var1 + st.var2) + 1e-300;
            const double a = st.var1 + ridge, b = st.cov, d = st.var2 + ridge;
            const double det = a * d - b * b;
            if (det > 0.0) {
                dir[0] = -(d * grad[0] - b * grad[1]) / det;
                dir[1] = -(a * grad[1] - b * grad[0]) / det;
            } else {
                dir = {-grad[0], -grad[1]};
            }
        } else if (!pinned[0]) {
            dir[0] = st.var1 > 0.0 ? -grad[0] / st.var1 : -grad[0];
        } else if (!pinned[1]) {
            dir[1] = st.var2 > 0.0 ? -grad[1] / st.var2 : -grad[1];
        }
        // both pinned: dir stays zero and the loop exits via the kkt check

        // A nearly singular Hessian (measure collapsing onto the argmax of a
        // recession ray) can hand back overflow directions; fall back to
        // steepest descent on the unpinned coordinates.
        if (!std::isfinite(dir[0]) || !std::isfinite(dir[1]))
            dir = {pinned[0] ? 0.0 : -grad[0], pinned[1] ? 0.0 : -grad[1]};

        std::array<double, 2> next = mu;
        if (kkt > 1e-4) {
            // Global phase: backtracking so the dual never increases.
            const double slope = grad[0] * dir[0] + grad[1] * dir[1];
            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                std::array<double, 2> trial = {mu[0] + step * dir[0],
                                               mu[1] + step * dir[1]};
                for (int i = 0; i < 2; ++i)
                    if (types[i] == ConstraintType::LessEqual)
                        trial[i] = std::max(trial[i], 0.0);
                const auto d_trial = eval_dual(trial);
                if (d_trial &&
                    *d_trial <= *d_cur + 1e-4 * step * std::min(slope, 0.0)) {
                    next = trial;
                    d_cur = d_trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) {
                certify_infeasible_along(dir);
                throw NumericError("maxent dual line search failed to move");
            }
        } else {
            // Local phase: plain projected Newton; descent checks would
            // drown in quadrature noise at this scale. Keep the cached dual
            // value in sync so a later global-phase step compares against
            // the current point rather than a stale one.
            next = {mu[0] + dir[0], mu[1] + dir[1]};
            for (int i = 0; i < 2; ++i)
                if (types[i] == ConstraintType::LessEqual)
                    next[i] = std::max(next[i], 0.0);
            if (const auto d_next = eval_dual(next)) d_cur = d_next;
        }
        mu = next;
        last_dir = dir;
        if (std::fabs(mu[0]) + std::fabs(mu[1]) > 1e8 ||
            (d_cur && *d_cur < -1e10))
            throw InfeasibleError(
                "entropy problem infeasible: the dual is unbounded below");

        st = dual_integrals(v1, v2, mu[0], mu[1], tq);
        grad = {c[0] - st.m1, c[1] - st.m2};
        kkt = kkt_measure(mu, grad, types);
    }

    // Snap boundary multipliers to exact zero.
    for (int i = 0; i < 2; ++i)
        if (types[i] == ConstraintType::LessEqual && mu[i] <= kActiveTol &&
            grad[i] >= -kKktTol)
            mu[i] = 0.0;
    st = dual_integrals(v1, v2, mu[0], mu[1], tq);
    grad = {c[0] - st.m1, c[1] - st.m2};
    kkt = kkt_measure(mu, grad, types);
    if (kkt > kKktTol) {
        certify_infeasible_along(last_dir);
        throw NumericError("maxent dual solve stalled at KKT residual " +
                           std::to_string(kkt));
    }

    MaxEntSolution sol;
    sol.mu1_star = mu[0];
    sol.mu2_star = mu[1];
    sol.log_partition = st.log_z;
    sol.achieved_m1 = st.m1;
    sol.achieved_m2 = st.m2;
    sol.kkt_residual = kkt;
    sol.entropy = st.log_z + mu[0] * st.m1 + mu[1] * st.m2;
    const bool mu1_zero = std::fabs(mu[0]) <= kActiveTol;
    const bool mu2_zero = std::fabs(mu[1]) <= kActiveTol;
    if (mu1_zero && !mu2_zero)
        sol.regime = Regime::Subcritical;
    else if (mu2_zero && !mu1_zero)
        sol.regime = Regime::Supercritical;
    else
        sol.regime = Regime::Intermediate;
    return sol;
}

ExpFamilyDensity maxent_law(const MaxEntSolution& sol, const OrliczFunction& v1,
                            const OrliczFunction& v2, const QuadratureConfig& q) {
    return ExpFamilyDensity({{sol.mu1_star, v1}, {sol.mu2_star, v2}}, q, true);
}

Regime classify_regime(const OrliczFunction& v1, const OrliczFunction& v2,
                       double r, const QuadratureConfig& q) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("regime classification needs R > 0");
    const auto [alpha_bar, r_bar] = threshold_rbar(v1, v2, q);
    (void)alpha_bar;
    if (r <= r_bar) return Regime::Subcritical;
    const double r_tilde = threshold_rtilde(v1, v2);
    if (r >= r_tilde) return Regime::Supercritical;
    return Regime::Intermediate;
}

ThinshellPoint thinshell_rate(const OrliczFunction& v, double r, double p,
                              double x, const QuadratureConfig& q) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("thin-shell rate needs R > 0");
    if (!(p >= 1.0) || !std::isfinite(p))
        throw DomainError("thin-shell rate needs p >= 1");
    if (!std::isfinite(x)) throw DomainError("thin-shell point must be finite");

    // V must outgrow |x|^p or the constrained entropy sup is not attained.
    {
        const double q1 = v.value(1e3) / std::pow(1e3, p);
        const double q2 = v.value(1e6) / std::pow(1e6, p);
        if (!(q2 > 1.5 * q1))
            throw HypothesisError("V does not grow faster than |x|^p");
    }

    if (x < 0.0) return {kInf, false};

    const double base = log_volume_limit(v, r, q);
    if (x == 0.0) return {kInf, true};  // only the point mass has m_p = 0

    try {
        const MaxEntSolution sol = maxent_two_constraints(
            OrliczFunction::power(p), std::pow(x, p), ConstraintType::Equal, v, r,
            ConstraintType::LessEqual, q);
        return {std::max(0.0, base - sol.entropy), false};
    } catch (const InfeasibleError&) {
        return {kInf, true};
    }
}

}  // namespace orlicz
