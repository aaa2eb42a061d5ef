#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

// Tolerances shared by every integral and root solve in the library.
struct QuadratureConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    // Integration over the half line truncates where the log-integrand drops
    // below this value, then doubles the cut until the [T, 2T] residual is
    // below abs_tol.
    double log_tail_threshold = -60.0;
    int max_subdivisions = 200000;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw ConfigError("quadrature tolerances must be > 0");
        if (!(log_tail_threshold < -20.0))
            throw ConfigError("log tail threshold must be < -20");
        if (max_subdivisions < 8)
            throw ConfigError("max_subdivisions must be >= 8");
    }
};

namespace detail {

// Adaptive Simpson with Richardson correction. `budget` counts interval
// splits across the whole call and throws when exhausted.
template <class F>
double adaptive_simpson(F&& f, double a, double fa, double m, double fm,
                        double b, double fb, double whole, double tol,
                        int depth, int& budget) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth > 0 && std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (--budget <= 0)
        throw QuadratureError("adaptive quadrature exhausted its subdivision budget");
    if (depth > 60)
        throw QuadratureError("adaptive quadrature exceeded maximum recursion depth");
    return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, budget) +
           adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, budget);
}

template <class F>
double integrate_piece(F&& f, double a, double b, double tol, int& budget) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw QuadratureError("integrand is not finite inside the integration range");
    const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, 0, budget);
}

}  // namespace detail

// Integrates f over [a, b] to max(abs_tol, rel_tol * |integral|) accuracy.
// `breaks` lists interior points where the integrand loses smoothness; the
// range is split there so Simpson never straddles a kink.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureConfig& q,
                 std::span<const double> breaks = {}) {
    if (!(b > a)) return 0.0;

    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    // Cheap first pass to set the relative-tolerance scale.
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const double h = (hi - lo) / 16.0;
        double s = 0.5 * (f(lo) + f(hi));
        for (int k = 1; k < 16; ++k) s += f(lo + k * h);
        rough += std::fabs(s * h);
    }

    const double tol_total = std::max(q.abs_tol, q.rel_tol * rough);
    const double tol_piece = 0.5 * tol_total / static_cast<double>(cuts.size() - 1);
    int budget = q.max_subdivisions;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += detail::integrate_piece(f, cuts[i], cuts[i + 1], tol_piece, budget);
    return total;
}

namespace detail {

// Finds T >= start with log_weight(T) < threshold by doubling. log_weight
// must eventually decrease to -inf; if 300 doublings cannot get below the
// threshold the integrand is treated as non-integrable.
template <class F>
double find_tail_radius(F&& log_weight, double start, double threshold) {
    double t = std::max(start, 1e-8);
    for (int it = 0; it < 300; ++it) {
        if (log_weight(t) < threshold) return t;
        t *= 2.0;
    }
    throw IntegrabilityError("log-integrand never dropped below the tail threshold");
}

}  // namespace detail

}  // namespace orlicz
