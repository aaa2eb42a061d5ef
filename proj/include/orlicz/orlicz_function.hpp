#pragma once

#include <string>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

enum class PotentialKind { Power, Mix, Huber };

// Even convex potential V with V(0) = 0 and V > 0 away from the origin,
// strictly increasing on [0, inf). Three families:
//
//   Power  V(x) = |x|^p,                        p >= 1
//   Mix    V(x) = sum_i w_i |x|^{p_i},          w_i > 0, p_i >= 1
//   Huber  V(x) = x^2 for |x| <= t0,            t0 > 0
//               = t0 * (2|x| - t0) otherwise
//
// Instances are immutable and cheap to copy.
class OrliczFunction {
public:
    struct Term {
        double weight;
        double power;
    };

    static OrliczFunction power(double p);
    static OrliczFunction huber(double t0);
    static OrliczFunction mix(std::vector<Term> terms);

    double value(double x) const;

    // Right derivative at x >= 0 (the families are differentiable away from
    // the Huber knee; at the knee both one-sided derivatives coincide).
    double derivative(double x) const;

    // Inverse of the restriction to [0, inf). Exact for Power and Huber;
    // bisection to 1e-12 relative accuracy for Mix. y < 0 is a DomainError.
    double inverse_nonneg(double y) const;

    PotentialKind kind() const { return kind_; }
    const std::vector<Term>& terms() const { return terms_; }
    double huber_threshold() const { return huber_t0_; }

    // True when V(x) = |x|^p; used where a closed form exists for that case.
    bool is_pure_power() const;
    double pure_power_exponent() const;

    // Positive abscissae where the second derivative jumps (the Huber knee).
    // Quadrature splits integration intervals here.
    std::vector<double> kinks() const;

    // Canonical spec string that parse_potential maps back to this object.
    std::string spec_string() const;

    bool operator==(const OrliczFunction& other) const;

private:
    OrliczFunction() = default;

    PotentialKind kind_ = PotentialKind::Power;
    std::vector<Term> terms_;  // Power: exactly one unit-weight term.
    double huber_t0_ = 0.0;
};

// Parses "power:<p>", "huber:<t0>" or "mix:<w>*power:<p>+<w>*power:<p>+...".
// Throws ParseError (with position) on bad syntax and DomainError on valid
// syntax with out-of-range parameters.
OrliczFunction parse_potential(const std::string& text);

// Result of the axiom sweep run by verify_orlicz.
struct AxiomReport {
    bool zero_at_origin = false;
    bool symmetric = false;
    bool midpoint_convex = false;
    bool strictly_increasing = false;
    bool inverse_round_trip = false;

    // Largest midpoint-convexity excess max(0, V(m) - (V(a)+V(b))/2) seen.
    double convexity_excess = 0.0;
    // Largest amount by which any check exceeded its tolerance (0 if none).
    double worst_violation = 0.0;

    bool all_pass() const {
        return zero_at_origin && symmetric && midpoint_convex &&
               strictly_increasing && inverse_round_trip;
    }
};

// Checks the Orlicz axioms on the given grid of sample points:
// V(0) = 0, evenness, midpoint convexity over all grid pairs (tolerance
// 1e-12 * (1 + |V(a)| + |V(b)|)), strict increase over sorted non-negative
// points, and the inverse round trip |V(V^{-1}(y)) - y| <= 1e-10 * (1 + y).
AxiomReport verify_orlicz(const OrliczFunction& v, const std::vector<double>& grid);

// The potentials exercised by the self-check suite and the experiment
// presets. Order is stable.
const std::vector<std::string>& builtin_potential_specs();

}  // namespace orlicz
