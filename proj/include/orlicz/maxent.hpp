#pragma once

#include <string>
#include <utility>

#include "orlicz/gibbs.hpp"
#include "orlicz/orlicz_function.hpp"

namespace orlicz {

enum class Regime { Subcritical, Intermediate, Supercritical };
enum class ConstraintType { LessEqual, Equal };

std::string to_string(Regime r);

// Entropy maximizer under up to two moment constraints. The optimal law has
// density exp(-mu1 V1(x) - mu2 V2(x) - log_partition).
struct MaxEntSolution {
    double mu1_star = 0.0;
    double mu2_star = 0.0;
    double log_partition = 0.0;
    double achieved_m1 = 0.0;
    double achieved_m2 = 0.0;
    Regime regime = Regime::Intermediate;
    double kkt_residual = 0.0;
    double entropy = 0.0;  // log_partition + mu1 m1 + mu2 m2
};

// The optimal law itself, with a CDF table for sampling/comparison work.
ExpFamilyDensity maxent_law(const MaxEntSolution& sol, const OrliczFunction& v1,
                            const OrliczFunction& v2,
                            const QuadratureConfig& q = {});

struct Thresholds {
    double alpha_bar;  // solves E_{mu_{V2,alpha}} V1(X) = 1
    double r_bar;      // = E_{mu_{V2,alpha_bar}} V2(X)
    double r_tilde;    // = sup { E_nu V2 : E_nu V1 <= 1 }
};

// Growth separation needed by the threshold machinery: V1 must eventually
// dominate V2. Throws HypothesisError when the probe fails.
void check_growth_separation(const OrliczFunction& v1, const OrliczFunction& v2);

std::pair<double, double> threshold_rbar(const OrliczFunction& v1,
                                         const OrliczFunction& v2,
                                         const QuadratureConfig& q = {});

// sup of E_nu V2 over laws with E_nu V1 <= 1, through the dual
// min_{b >= 0} [ b + sup_x (V2(x) - b V1(x)) ]; the primal extreme points
// are two-point measures, which the unit tests use as an oracle.
double threshold_rtilde(const OrliczFunction& v1, const OrliczFunction& v2);

Thresholds compute_thresholds(const OrliczFunction& v1, const OrliczFunction& v2,
                              const QuadratureConfig& q = {});

// Maximizes differential entropy subject to E V1 (<=|=) c1 and
// E V2 (<=|=) c2, by projected Newton on the convex dual
//   D(mu) = log Z(mu) + mu1 c1 + mu2 c2,
// multipliers constrained to >= 0 for inequality constraints and free for
// equalities. Converges to projected-gradient norm <= 1e-9.
MaxEntSolution maxent_two_constraints(const OrliczFunction& v1, double c1,
                                      ConstraintType t1,
                                      const OrliczFunction& v2, double c2,
                                      ConstraintType t2,
                                      const QuadratureConfig& q = {});

// Subcritical iff R <= r_bar, Supercritical iff R >= r_tilde, else
// Intermediate.
Regime classify_regime(const OrliczFunction& v1, const OrliczFunction& v2,
                       double r, const QuadratureConfig& q = {});

// Thin-shell rate at x: the cost of seeing n^{-1/p} ||X||_p near x. Finite
// values carry infeasible=false; infeasible=true marks points where the
// entropy problem has no solution (the dual diverges).
struct ThinshellPoint {
    double value = 0.0;
    bool infeasible = false;
};

ThinshellPoint thinshell_rate(const OrliczFunction& v, double r, double p,
                              double x, const QuadratureConfig& q = {});

}  // namespace orlicz
