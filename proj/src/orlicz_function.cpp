#include "orlicz/orlicz_function.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace orlicz {

namespace {

// |x|^p with fast paths for the small integer exponents that dominate use.
double abs_pow(double a, double p) {
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    if (p == 4.0) {
        const double a2 = a * a;
        return a2 * a2;
    }
    return std::pow(a, p);
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

OrliczFunction OrliczFunction::power(double p) {
    if (!std::isfinite(p) || p < 1.0)
        throw DomainError("power exponent must be finite and >= 1, got " +
                          format_double(p));
    OrliczFunction f;
    f.kind_ = PotentialKind::Power;
    f.terms_ = {{1.0, p}};
    return f;
}

OrliczFunction OrliczFunction::huber(double t0) {
    if (!std::isfinite(t0) || t0 <= 0.0)
        throw DomainError("huber threshold must be finite and > 0, got " +
                          format_double(t0));
    OrliczFunction f;
    f.kind_ = PotentialKind::Huber;
    f.huber_t0_ = t0;
    return f;
}

OrliczFunction OrliczFunction::mix(std::vector<Term> terms) {
    if (terms.empty()) throw DomainError("mix needs at least one term");
    for (const Term& t : terms) {
        if (!std::isfinite(t.weight) || t.weight <= 0.0)
            throw DomainError("mix weight must be finite and > 0, got " +
                              format_double(t.weight));
        if (!std::isfinite(t.power) || t.power < 1.0)
            throw DomainError("mix exponent must be finite and >= 1, got " +
                              format_double(t.power));
    }
    OrliczFunction f;
    f.kind_ = PotentialKind::Mix;
    f.terms_ = std::move(terms);
    return f;
}

double OrliczFunction::value(double x) const {
    const double a = std::fabs(x);
    if (kind_ == PotentialKind::Huber) {
        if (a <= huber_t0_) return a * a;
        return huber_t0_ * (2.0 * a - huber_t0_);
    }
    double s = 0.0;
    for (const Term& t : terms_) s += t.weight * abs_pow(a, t.power);
    return s;
}

double OrliczFunction::derivative(double x) const {
    const double a = std::fabs(x);
    if (kind_ == PotentialKind::Huber)
        return a <= huber_t0_ ? 2.0 * a : 2.0 * huber_t0_;
    double s = 0.0;
    for (const Term& t : terms_) {
        if (t.power == 1.0)
            s += t.weight;
        else
            s += t.weight * t.power * abs_pow(a, t.power - 1.0);
    }
    return s;
}

double OrliczFunction::inverse_nonneg(double y) const {
    if (!std::isfinite(y) || y < 0.0)
        throw DomainError("inverse_nonneg needs y >= 0, got " + format_double(y));
    if (y == 0.0) return 0.0;

    if (kind_ == PotentialKind::Huber) {
        const double knee = huber_t0_ * huber_t0_;
        if (y <= knee) return std::sqrt(y);
        return (y + knee) / (2.0 * huber_t0_);
    }
    if (kind_ == PotentialKind::Power) {
        const double p = terms_[0].power;
        if (p == 1.0) return y;
        if (p == 2.0) return std::sqrt(y);
        if (p == 4.0) return std::sqrt(std::sqrt(y));
        return std::pow(y, 1.0 / p);
    }

    // Mix: safeguarded Newton from an upper bound. Each term alone already
    // reaches y at (y/w_i)^{1/p_i}, so the smallest such point brackets the
    // root from above; the map is convex, so Newton descends monotonically.
    double hi = std::numeric_limits<double>::infinity();
    for (const Term& t : terms_)
        hi = std::min(hi, std::pow(y / t.weight, 1.0 / t.power));
    double lo = 0.0;
    double x = hi;
    for (int it = 0; it < 200; ++it) {
        const double f = value(x) - y;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        if (hi - lo <= 1e-13 * hi) break;
        const double d = derivative(x);
        double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return 0.5 * (lo + hi);
}

bool OrliczFunction::is_pure_power() const {
    return kind_ == PotentialKind::Power;
}

double OrliczFunction::pure_power_exponent() const {
    if (!is_pure_power()) throw DomainError("potential is not a pure power");
    return terms_[0].power;
}

std::vector<double> OrliczFunction::kinks() const {
    if (kind_ == PotentialKind::Huber) return {huber_t0_};
    return {};
}

std::string OrliczFunction::spec_string() const {
    switch (kind_) {
        case PotentialKind::Power:
            return "power:" + format_double(terms_[0].power);
        case PotentialKind::Huber:
            return "huber:" + format_double(huber_t0_);
        case PotentialKind::Mix: {
            std::string s = "mix:";
            for (std::size_t i = 0; i < terms_.size(); ++i) {
                if (i) s += "+";
                s += format_double(terms_[i].weight) + "*power:" +
                     format_double(terms_[i].power);
            }
            return s;
        }
    }
    return {};
}

bool OrliczFunction::operator==(const OrliczFunction& other) const {
    if (kind_ != other.kind_) return false;
    if (kind_ == PotentialKind::Huber) return huber_t0_ == other.huber_t0_;
    if (terms_.size() != other.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].weight != other.terms_[i].weight ||
            terms_[i].power != other.terms_[i].power)
            return false;
    return true;
}

namespace {

double parse_number(const std::string& s, std::size_t& pos) {
    if (pos >= s.size()) throw ParseError("expected a number", pos);
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number", pos);
    if (!std::isfinite(v)) throw ParseError("number is not finite", pos);
    pos = static_cast<std::size_t>(end - s.c_str());
    return v;
}

void expect_literal(const std::string& s, std::size_t& pos, const char* lit) {
    const std::size_t len = std::string::traits_type::length(lit);
    if (s.compare(pos, len, lit) != 0)
        throw ParseError(std::string("expected '") + lit + "'", pos);
    pos += len;
}

std::string read_keyword(const std::string& s, std::size_t& pos) {
    std::size_t end = pos;
    while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end])))
        ++end;
    std::string word = s.substr(pos, end - pos);
    pos = end;
    return word;
}

}  // namespace

OrliczFunction parse_potential(const std::string& text) {
    std::size_t pos = 0;
    const std::size_t kw_pos = pos;
    const std::string kw = read_keyword(text, pos);

    OrliczFunction out = OrliczFunction::power(2.0);
    if (kw == "power") {
        expect_literal(text, pos, ":");
        out = OrliczFunction::power(parse_number(text, pos));
    } else if (kw == "huber") {
        expect_literal(text, pos, ":");
        out = OrliczFunction::huber(parse_number(text, pos));
    } else if (kw == "mix") {
        expect_literal(text, pos, ":");
        std::vector<OrliczFunction::Term> terms;
        while (true) {
            OrliczFunction::Term t{};
            t.weight = parse_number(text, pos);
            expect_literal(text, pos, "*");
            expect_literal(text, pos, "power:");
            t.power = parse_number(text, pos);
            terms.push_back(t);
            if (pos < text.size() && text[pos] == '+') {
                ++pos;
                continue;
            }
            break;
        }
        out = OrliczFunction::mix(std::move(terms));
    } else {
        throw ParseError("unknown potential '" + kw + "'", kw_pos);
    }

    if (pos != text.size()) throw ParseError("trailing characters", pos);
    return out;
}

AxiomReport verify_orlicz(const OrliczFunction& v, const std::vector<double>& grid) {
    AxiomReport rep;
    double worst = 0.0;

    rep.zero_at_origin = v.value(0.0) == 0.0;
    if (!rep.zero_at_origin) worst = std::max(worst, std::fabs(v.value(0.0)));

    rep.symmetric = true;
    for (double x : grid) {
        const double d = std::fabs(v.value(x) - v.value(-x));
        if (d > 0.0) {
            rep.symmetric = false;
            worst = std::max(worst, d);
        }
    }

    rep.midpoint_convex = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double va = v.value(grid[i]);
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const double vb = v.value(grid[j]);
            const double vm = v.value(0.5 * (grid[i] + grid[j]));
            const double excess = vm - 0.5 * (va + vb);
            const double tol = 1e-12 * (1.0 + std::fabs(va) + std::fabs(vb));
            if (excess > 0.0) rep.convexity_excess = std::max(rep.convexity_excess, excess);
            if (excess > tol) {
                rep.midpoint_convex = false;
                worst = std::max(worst, excess - tol);
            }
        }
    }

    std::vector<double> nonneg;
    for (double x : grid)
        if (x >= 0.0) nonneg.push_back(x);
    std::sort(nonneg.begin(), nonneg.end());
    nonneg.erase(std::unique(nonneg.begin(), nonneg.end()), nonneg.end());
    rep.strictly_increasing = true;
    for (std::size_t i = 1; i < nonneg.size(); ++i) {
        if (!(v.value(nonneg[i]) > v.value(nonneg[i - 1]))) {
            rep.strictly_increasing = false;
            worst = std::max(worst, v.value(nonneg[i - 1]) - v.value(nonneg[i]));
        }
    }

    rep.inverse_round_trip = true;
    for (double x : grid) {
        const double y = v.value(x);
        const double r = std::fabs(v.value(v.inverse_nonneg(y)) - y);
        const double tol = 1e-10 * (1.0 + y);
        if (r > tol) {
            rep.inverse_round_trip = false;
            worst = std::max(worst, r - tol);
        }
    }

    rep.worst_violation = worst;
    return rep;
}

const std::vector<std::string>& builtin_potential_specs() {
    static const std::vector<std::string> specs = {
        "power:1",  "power:1.5", "power:2", "power:3", "power:4",
        "huber:1",  "mix:1*power:4+0.5*power:1",
    };
    return specs;
}

}  // namespace orlicz
