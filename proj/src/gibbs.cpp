#include "orlicz/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace orlicz {

namespace {

constexpr int kCdfCells = 2048;
constexpr double kInf = std::numeric_limits<double>::infinity();

double trapezoid(const std::vector<double>& xs, const std::vector<double>& gs) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        s += 0.5 * (gs[i] + gs[i + 1]) * (xs[i + 1] - xs[i]);
    return s;
}

// Composite Simpson over [a, b] with 4 panels; used for sub-cell CDF pieces
// where the cell is already far below the quadrature length scale.
template <class F>
double simpson5(F&& f, double a, double b) {
    const double h = (b - a) / 4.0;
    return (h / 3.0) * (f(a) + 4.0 * f(a + h) + 2.0 * f(a + 2.0 * h) +
                        4.0 * f(a + 3.0 * h) + f(b));
}

}  // namespace

double ExpFamilyDensity::exponent(double x) const {
    double u = 0.0;
    for (const WeightedTerm& t : terms_)
        if (t.coef != 0.0) u += t.coef * t.potential.value(x);
    return u;
}

ExpFamilyDensity::ExpFamilyDensity(std::vector<WeightedTerm> terms,
                                   QuadratureConfig q, bool build_cdf_table)
    : terms_(std::move(terms)), q_(q) {
    q_.validate();
    if (terms_.empty())
        throw DomainError("exponential family needs at least one term");
    for (const WeightedTerm& t : terms_) {
        if (!std::isfinite(t.coef))
            throw DomainError("exponential family coefficient is not finite");
        for (double k : t.potential.kinks()) kinks_.push_back(k);
    }
    std::sort(kinks_.begin(), kinks_.end());
    kinks_.erase(std::unique(kinks_.begin(), kinks_.end()), kinks_.end());

    // First tail guess with no shift; diverging exponents die here.
    const double t0 = detail::find_tail_radius(
        [this](double t) { return -exponent(t); }, 1.0, q_.log_tail_threshold);

    // Locate the exponent minimum; negative coefficients can push it below
    // zero and the integrand must be rescaled by it before exponentiation.
    double best_x = 0.0;
    double best_u = 0.0;  // exponent(0) = 0
    {
        const double lo = t0 * 1e-12;
        const int probes = 512;
        for (int i = 0; i <= probes; ++i) {
            const double x = lo * std::pow(t0 / lo, double(i) / probes);
            const double u = exponent(x);
            if (u < best_u) {
                best_u = u;
                best_x = x;
            }
        }
        if (best_x > 0.0) {  // golden-section polish around the best probe
            double a = best_x / 1.2, b = best_x * 1.2;
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double u1 = exponent(x1), u2 = exponent(x2);
            for (int it = 0; it < 80 && (b - a) > 1e-13 * b; ++it) {
                if (u1 <= u2) {
                    b = x2; x2 = x1; u2 = u1;
                    x1 = b - gr * (b - a); u1 = exponent(x1);
                } else {
                    a = x1; x1 = x2; u1 = u2;
                    x2 = a + gr * (b - a); u2 = exponent(x2);
                }
            }
            best_u = std::min(best_u, std::min(u1, u2));
        }
        shift_ = std::min(0.0, best_u);
    }

    t_ = detail::find_tail_radius(
        [this](double t) { return -(exponent(t) - shift_); }, t0,
        q_.log_tail_threshold);

    const auto g = [this](double x) { return std::exp(-(exponent(x) - shift_)); };
    double main = integrate(g, 0.0, t_, q_, kinks_);
    for (int it = 0;; ++it) {
        const double residual = integrate(g, t_, 2.0 * t_, q_, kinks_);
        if (residual < q_.abs_tol * std::max(1.0, main)) break;
        if (it >= 60)
            throw IntegrabilityError("integrand tail refuses to become negligible");
        main += residual;
        t_ *= 2.0;
    }
    if (!(main > 0.0) || !std::isfinite(main))
        throw QuadratureError("partition integral is not finite and positive");
    half_mass_scaled_ = main;
    log_z_ = std::log(2.0 * main) - shift_;

    if (build_cdf_table) build_table();
}

void ExpFamilyDensity::build_table() {
    const auto g = [this](double x) { return std::exp(-(exponent(x) - shift_)); };
    const double width = 2.0 * t_ / kCdfCells;

    cdf_nodes_.resize(kCdfCells + 1);
    cdf_values_.resize(kCdfCells + 1);
    for (int k = 0; k <= kCdfCells; ++k) cdf_nodes_[k] = -t_ + k * width;
    cdf_nodes_[kCdfCells / 2] = 0.0;

    QuadratureConfig cell_q = q_;
    cell_q.abs_tol = std::min(q_.abs_tol, 1e-13);
    double cum = 0.0;
    cdf_values_[0] = 0.0;
    for (int k = 0; k < kCdfCells; ++k) {
        const double a = cdf_nodes_[k], b = cdf_nodes_[k + 1];
        bool kinked = false;
        for (double kk : kinks_)
            if ((kk > a && kk < b) || (-kk > a && -kk < b)) kinked = true;
        double piece;
        if (kinked) {
            std::vector<double> br;
            for (double kk : kinks_) { br.push_back(kk); br.push_back(-kk); }
            piece = integrate(g, a, b, cell_q, br);
        } else {
            piece = simpson5(g, a, b);
        }
        cum += piece;
        cdf_values_[k + 1] = cum;
    }

    const double adaptive_mass = 2.0 * half_mass_scaled_;
    norm_gap_ = std::fabs(cum - adaptive_mass) / adaptive_mass;
    for (double& v : cdf_values_) v /= cum;
    cdf_values_.front() = 0.0;
    cdf_values_.back() = 1.0;
}

double ExpFamilyDensity::log_density(double x) const {
    return -exponent(x) - log_z_;
}

double ExpFamilyDensity::density(double x) const {
    return std::exp(log_density(x));
}

double ExpFamilyDensity::cdf(double x) const {
    if (!has_cdf_table())
        throw Error("cdf requested on a density built without its table");
    if (x <= cdf_nodes_.front()) return 0.0;
    if (x >= cdf_nodes_.back()) return 1.0;
    const double width = 2.0 * t_ / kCdfCells;
    auto k = static_cast<std::size_t>((x - cdf_nodes_.front()) / width);
    if (k >= cdf_nodes_.size() - 1) k = cdf_nodes_.size() - 2;
    while (k > 0 && x < cdf_nodes_[k]) --k;
    while (k + 2 < cdf_nodes_.size() && x > cdf_nodes_[k + 1]) ++k;

    const auto g = [this](double u) { return std::exp(-(exponent(u) - shift_)); };
    const double total = 2.0 * half_mass_scaled_;
    double partial;
    bool kinked = false;
    for (double kk : kinks_)
        if ((kk > cdf_nodes_[k] && kk < x) || (-kk > cdf_nodes_[k] && -kk < x))
            kinked = true;
    if (kinked) {
        std::vector<double> br;
        for (double kk : kinks_) { br.push_back(kk); br.push_back(-kk); }
        QuadratureConfig cell_q = q_;
        cell_q.abs_tol = std::min(q_.abs_tol, 1e-13);
        partial = integrate(g, cdf_nodes_[k], x, cell_q, br);
    } else {
        partial = simpson5(g, cdf_nodes_[k], x);
    }
    const double c = cdf_values_[k] + partial / total;
    return std::clamp(c, 0.0, 1.0);
}

double ExpFamilyDensity::quantile(double u) const {
    if (!has_cdf_table())
        throw Error("quantile requested on a density built without its table");
    if (!(u > 0.0) || !(u < 1.0))
        throw DomainError("quantile needs u strictly inside (0, 1)");

    auto it = std::upper_bound(cdf_values_.begin(), cdf_values_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cdf_values_.begin());
    if (k == 0) k = 1;
    if (k >= cdf_values_.size()) k = cdf_values_.size() - 1;
    double lo = cdf_nodes_[k - 1], hi = cdf_nodes_[k];
    const double clo = cdf_values_[k - 1], chi = cdf_values_[k];

    double x = chi > clo ? lo + (hi - lo) * (u - clo) / (chi - clo)
                         : 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double c = cdf(x);
        if (std::fabs(c - u) <= 1e-9) break;
        if (c < u)
            lo = x;
        else
            hi = x;
        if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(hi))) break;
        x = 0.5 * (lo + hi);
    }
    return x;
}

double ExpFamilyDensity::scaled_half_integral(
    const std::function<double(double)>& weight,
    const std::vector<double>& breaks) const {
    const auto g = [&](double x) {
        return weight(x) * std::exp(-(exponent(x) - shift_));
    };
    const auto log_g = [&](double x) {
        return std::log(std::max(weight(x), 1e-300)) - (exponent(x) - shift_);
    };
    double tw = detail::find_tail_radius(log_g, t_, q_.log_tail_threshold);
    double main = integrate(g, 0.0, tw, q_, breaks);
    for (int it = 0;; ++it) {
        const double residual = integrate(g, tw, 2.0 * tw, q_, breaks);
        if (std::fabs(residual) < q_.abs_tol * std::max(1.0, std::fabs(main))) break;
        if (it >= 60)
            throw IntegrabilityError("weighted integrand tail refuses to become negligible");
        main += residual;
        tw *= 2.0;
    }
    return main;
}

double ExpFamilyDensity::expectation(const OrliczFunction& w) const {
    std::vector<double> breaks = kinks_;
    for (double k : w.kinks()) breaks.push_back(k);
    const double num =
        scaled_half_integral([&](double x) { return w.value(x); }, breaks);
    return num / half_mass_scaled_;
}

double ExpFamilyDensity::expectation_product(const OrliczFunction& a,
                                             const OrliczFunction& b) const {
    std::vector<double> breaks = kinks_;
    for (double k : a.kinks()) breaks.push_back(k);
    for (double k : b.kinks()) breaks.push_back(k);
    const double num = scaled_half_integral(
        [&](double x) { return a.value(x) * b.value(x); }, breaks);
    return num / half_mass_scaled_;
}

double ExpFamilyDensity::variance(const OrliczFunction& v) const {
    const double m = expectation(v);
    const double m2 = expectation_product(v, v);
    return m2 - m * m;
}

double ExpFamilyDensity::entropy() const {
    double h = log_z_;
    for (const WeightedTerm& t : terms_)
        if (t.coef != 0.0) h += t.coef * expectation(t.potential);
    return h;
}

namespace {

std::vector<ExpFamilyDensity::WeightedTerm> gibbs_terms(const OrliczFunction& v,
                                                        double alpha) {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
        throw DomainError("gibbs tilt parameter must be finite and < 0");
    return {{-alpha, v}};
}

}  // namespace

GibbsMeasure1D::GibbsMeasure1D(OrliczFunction v, double alpha, QuadratureConfig q)
    : v_(std::move(v)), alpha_(alpha), law_(gibbs_terms(v_, alpha), q) {}

double GibbsMeasure1D::moment() const { return law_.expectation(v_); }

double GibbsMeasure1D::variance() const { return law_.variance(v_); }

double log_partition(const OrliczFunction& v, double alpha,
                     const QuadratureConfig& q) {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
        throw DomainError("log_partition needs alpha < 0");
    return ExpFamilyDensity({{-alpha, v}}, q, false).log_partition();
}

double moment(const OrliczFunction& w, const OrliczFunction& v, double alpha,
              const QuadratureConfig& q) {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
        throw DomainError("moment needs alpha < 0");
    return ExpFamilyDensity({{-alpha, v}}, q, false).expectation(w);
}

double variance_of_potential(const OrliczFunction& v, double alpha,
                             const QuadratureConfig& q) {
    if (!(alpha < 0.0) || !std::isfinite(alpha))
        throw DomainError("variance_of_potential needs alpha < 0");
    return ExpFamilyDensity({{-alpha, v}}, q, false).variance(v);
}

namespace detail {

double solve_increasing_in_alpha(const std::function<double(double)>& g,
                                 const std::function<double(double)>& dg,
                                 double target, double tol) {
    if (!(target > 0.0) || !std::isfinite(target))
        throw DomainError("root target must be finite and > 0");

    // Bracket over neg = -alpha; g falls as neg grows.
    double neg_small = 1.0, neg_big = 1.0;
    double g_small = g(-1.0), g_big = g_small;
    while (g_small < target) {
        neg_small *= 0.5;
        if (neg_small < 1e-12)
            throw BracketError("no tilt parameter with |alpha| >= 1e-12 reaches the target");
        g_small = g(-neg_small);
    }
    while (g_big > target) {
        neg_big *= 2.0;
        if (neg_big > 1e12)
            throw BracketError("no tilt parameter with |alpha| <= 1e12 reaches the target");
        g_big = g(-neg_big);
    }

    double lo = -neg_big, hi = -neg_small;  // g(lo) <= target <= g(hi)
    for (int it = 0; it < 20; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < target)
            lo = mid;
        else
            hi = mid;
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 80; ++it) {
        const double gv = g(x);
        if (std::fabs(gv - target) <= tol) return x;
        if (gv < target)
            lo = x;
        else
            hi = x;
        double next = x;
        const double d = dg(x);
        if (d > 0.0) next = x + (target - gv) / d;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(x))
            return x;
        x = next;
    }
    throw NumericError("tilt parameter solve stalled before reaching its tolerance");
}

}  // namespace detail

double solve_alpha(const OrliczFunction& v, double r, const QuadratureConfig& q) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("mean-potential level must be finite and > 0");
    QuadratureConfig tight = q;
    tight.abs_tol = std::min(q.abs_tol, 1e-13);
    tight.rel_tol = std::min(q.rel_tol, 1e-11);
    const auto g = [&](double a) {
        return ExpFamilyDensity({{-a, v}}, tight, false).expectation(v);
    };
    const auto dg = [&](double a) {
        return ExpFamilyDensity({{-a, v}}, tight, false).variance(v);
    };
    return detail::solve_increasing_in_alpha(g, dg, r, 1e-10 * std::max(1.0, r));
}

GridDensity::GridDensity(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() < 2 || nodes_.size() != values_.size())
        throw DomainError("grid density needs matching node/value arrays with >= 2 points");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i]) || !std::isfinite(values_[i]))
            throw DomainError("grid density contains a non-finite entry");
        if (values_[i] < 0.0)
            throw DomainError("grid density contains a negative value");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
            throw DomainError("grid density nodes must be strictly increasing");
    }
    raw_mass_ = trapezoid(nodes_, values_);
    if (!(raw_mass_ > 0.0) || !std::isfinite(raw_mass_))
        throw DomainError("grid density has non-positive mass");
    warn_ = std::fabs(raw_mass_ - 1.0) > 1e-3;
    for (double& f : values_) f /= raw_mass_;
}

GridDensity GridDensity::from_csv(std::istream& in) {
    std::vector<double> xs, fs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos)
            throw DomainError("density csv line " + std::to_string(lineno) +
                              " is missing a comma");
        char* endx = nullptr;
        char* endf = nullptr;
        const double x = std::strtod(line.c_str() + start, &endx);
        const double f = std::strtod(line.c_str() + comma + 1, &endf);
        if (endx == line.c_str() + start || endf == line.c_str() + comma + 1) {
            if (xs.empty()) continue;  // header row such as "x,density"
            throw DomainError("density csv line " + std::to_string(lineno) +
                              " is not numeric");
        }
        xs.push_back(x);
        fs.push_back(f);
    }
    return GridDensity(std::move(xs), std::move(fs));
}

GridDensity GridDensity::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open density csv '" + path + "'");
    return from_csv(in);
}

double GridDensity::moment(const OrliczFunction& w) const {
    std::vector<double> g(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        g[i] = w.value(nodes_[i]) * values_[i];
    return trapezoid(nodes_, g);
}

double GridDensity::entropy() const {
    std::vector<double> g(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        g[i] = values_[i] > 0.0 ? -values_[i] * std::log(values_[i]) : 0.0;
    return trapezoid(nodes_, g);
}

double rate_function(const OrliczFunction& v, double r, const GridDensity& mu,
                     const QuadratureConfig& q) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("rate_function needs a positive budget");
    const double m = mu.moment(v);
    if (m > r + 1e-6 * std::max(1.0, r)) return kInf;
    const double alpha = solve_alpha(v, r, q);
    const double phi = log_partition(v, alpha, q);
    return -mu.entropy() + phi - alpha * r;
}

double log_volume_limit(const OrliczFunction& v, double r,
                        const QuadratureConfig& q) {
    const double alpha = solve_alpha(v, r, q);
    return log_partition(v, alpha, q) - alpha * r;
}

double exact_lp_log_volume(double p, double r, long n) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw DomainError("lp volume needs p >= 1");
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("lp volume needs a positive budget");
    if (n < 1) throw DomainError("lp volume needs dimension >= 1");
    const double nd = static_cast<double>(n);
    return std::log(2.0) + std::lgamma(1.0 + 1.0 / p) +
           std::log(r * nd) / p - std::lgamma(1.0 + nd / p) / nd;
}

}  // namespace orlicz
