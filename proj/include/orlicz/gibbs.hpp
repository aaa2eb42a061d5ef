#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

// One-dimensional law with density proportional to exp(-sum_i c_i V_i(x)).
// Coefficients may be negative (equality-constrained entropy problems need
// that) as long as the combined exponent still grows without bound; failure
// of that growth raises IntegrabilityError.
//
// Construction computes the log-partition via adaptive quadrature with an
// automatic tail cut: the integrand is truncated at T once its log drops
// below QuadratureConfig::log_tail_threshold, and T doubles until the
// [T, 2T] remainder is negligible against abs_tol. With build_cdf_table a
// monotone 2048-cell CDF cache over [-T, T] is filled for cdf/quantile.
class ExpFamilyDensity {
public:
    struct WeightedTerm {
        double coef;
        OrliczFunction potential;
    };

    ExpFamilyDensity(std::vector<WeightedTerm> terms, QuadratureConfig q = {},
                     bool build_cdf_table = true);

    double log_partition() const { return log_z_; }
    double log_density(double x) const;
    double density(double x) const;

    // Distribution function and its inverse; quantile needs u in (0,1) and
    // refines until |cdf(result) - u| <= 1e-9. Both require the CDF cache.
    double cdf(double x) const;
    double quantile(double u) const;

    // E w(X), E a(X) b(X) and Var v(X) by dedicated quadrature (no table).
    double expectation(const OrliczFunction& w) const;
    double expectation_product(const OrliczFunction& a, const OrliczFunction& b) const;
    double variance(const OrliczFunction& v) const;

    // Differential entropy; for this family exactly
    // log Z + sum_i c_i E V_i(X).
    double entropy() const;

    double truncation_radius() const { return t_; }
    // |integral of the cached density - 1|; construction keeps it <= 1e-9.
    double normalization_gap() const { return norm_gap_; }
    bool has_cdf_table() const { return !cdf_nodes_.empty(); }
    const std::vector<WeightedTerm>& terms() const { return terms_; }

private:
    double exponent(double x) const;  // sum_i c_i V_i(|x|)
    double scaled_half_integral(const std::function<double(double)>& weight,
                                const std::vector<double>& breaks) const;
    void build_table();

    std::vector<WeightedTerm> terms_;
    QuadratureConfig q_;
    std::vector<double> kinks_;
    double shift_ = 0.0;  // min of the exponent, subtracted before exp()
    double t_ = 0.0;
    double half_mass_scaled_ = 0.0;  // int_0^T exp(-(U - shift))
    double log_z_ = 0.0;
    double norm_gap_ = 0.0;
    std::vector<double> cdf_nodes_;
    std::vector<double> cdf_values_;
};

// Gibbs measure mu_{V,alpha} with density exp(alpha V(x) - phi_V(alpha)),
// alpha < 0. Thin wrapper over ExpFamilyDensity with the sign convention of
// the tilt parameter.
class GibbsMeasure1D {
public:
    GibbsMeasure1D(OrliczFunction v, double alpha, QuadratureConfig q = {});

    double alpha() const { return alpha_; }
    const OrliczFunction& potential() const { return v_; }
    double log_partition() const { return law_.log_partition(); }
    double density(double x) const { return law_.density(x); }
    double cdf(double x) const { return law_.cdf(x); }
    double quantile(double u) const { return law_.quantile(u); }
    double moment() const;    // E V(X)
    double variance() const;  // Var V(X)
    const ExpFamilyDensity& law() const { return law_; }

private:
    OrliczFunction v_;
    double alpha_;
    ExpFamilyDensity law_;
};

// phi_V(alpha) = log int exp(alpha V(x)) dx, alpha < 0.
double log_partition(const OrliczFunction& v, double alpha,
                     const QuadratureConfig& q = {});

// E w(X) with X ~ mu_{V,alpha}.
double moment(const OrliczFunction& w, const OrliczFunction& v, double alpha,
              const QuadratureConfig& q = {});

// Var V(X) with X ~ mu_{V,alpha}; equals the second derivative of phi_V.
double variance_of_potential(const OrliczFunction& v, double alpha,
                             const QuadratureConfig& q = {});

// The unique alpha < 0 with E_{mu_{V,alpha}} V(X) = R, found by bracketing
// over -alpha in [1e-12, 1e12] plus bisection and Newton polish to
// |moment - R| <= 1e-10 * max(1, R).
double solve_alpha(const OrliczFunction& v, double r,
                   const QuadratureConfig& q = {});

namespace detail {

// Root solve for g(alpha) = target with g increasing on (-inf, 0),
// g -> 0 at -inf and g -> inf at 0-. dg may return a non-positive value,
// in which case the step falls back to bisection.
double solve_increasing_in_alpha(const std::function<double(double)>& g,
                                 const std::function<double(double)>& dg,
                                 double target, double tol);

}  // namespace detail

// Density on a finite grid, entered directly or loaded from "x,density"
// CSV rows. Values are renormalized to unit trapezoid mass; inputs whose
// raw mass is off by more than 1e-3 keep a warning flag.
class GridDensity {
public:
    GridDensity(std::vector<double> nodes, std::vector<double> values);

    static GridDensity from_csv(std::istream& in);
    static GridDensity from_csv_file(const std::string& path);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double raw_mass() const { return raw_mass_; }
    bool normalization_warning() const { return warn_; }

    double moment(const OrliczFunction& w) const;  // trapezoid of w * f
    double entropy() const;                        // trapezoid of -f log f

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    double raw_mass_ = 0.0;
    bool warn_ = false;
};

// Large-deviation cost of observing empirical law mu inside the ball with
// budget R: -h(mu) + phi_V(alpha(R)) - alpha(R) R when the mean-potential
// constraint holds, +inf otherwise. The constraint check allows relative
// slack 1e-6 to absorb grid discretization error in the moment.
double rate_function(const OrliczFunction& v, double r, const GridDensity& mu,
                     const QuadratureConfig& q = {});

// Limit of (1/n) log vol of the n-dimensional ball with potential V and
// budget R: phi_V(alpha(R)) - alpha(R) R.
double log_volume_limit(const OrliczFunction& v, double r,
                        const QuadratureConfig& q = {});

// (1/n) log vol of {x in R^n : sum |x_i|^p <= R n} in closed form.
double exact_lp_log_volume(double p, double r, long n);

}  // namespace orlicz
