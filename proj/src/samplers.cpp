#include "orlicz/samplers.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace orlicz {

namespace {

void validate_constraints(const std::vector<BallConstraint>& cs) {
    if (cs.empty() || cs.size() > 2)
        throw ConfigError("the chain supports one or two ball constraints");
    for (const BallConstraint& c : cs)
        if (!(c.budget > 0.0) || !std::isfinite(c.budget))
            throw ConfigError("ball budget must be finite and > 0");
}

}  // namespace

std::vector<double> sample_gibbs_iid(const OrliczFunction& v, double alpha,
                                     std::size_t count, std::uint64_t seed,
                                     const QuadratureConfig& q) {
    if (count < 1) throw ConfigError("sample count must be >= 1");
    GibbsMeasure1D law(v, alpha, q);
    Rng rng(seed);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = law.quantile(rng.uniform01());
    return out;
}

LpBallSampler::LpBallSampler(double p, double r, std::size_t n, std::uint64_t seed)
    : p_(p), n_(n), rng_(seed) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("lp sampler needs p >= 1");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("lp sampler needs R > 0");
    if (n < 1) throw DomainError("lp sampler needs dimension >= 1");
    radius_ = std::pow(r * static_cast<double>(n), 1.0 / p);
}

void LpBallSampler::next(std::vector<double>& out) {
    out.resize(n_);
    double norm_p = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double g = std::pow(p_ * rng_.gamma(1.0 / p_), 1.0 / p_);
        const double sign = rng_.uniform01() < 0.5 ? -1.0 : 1.0;
        out[i] = sign * g;
        norm_p += std::pow(g, p_);
    }
    const double u = rng_.uniform01();
    const double scale =
        radius_ * std::pow(u, 1.0 / static_cast<double>(n_)) / std::pow(norm_p, 1.0 / p_);
    for (double& xi : out) xi *= scale;
}

std::vector<std::vector<double>> sample_lp_ball_exact(double p, double r,
                                                      std::size_t n,
                                                      std::size_t count,
                                                      std::uint64_t seed) {
    if (count < 1) throw ConfigError("sample count must be >= 1");
    LpBallSampler sampler(p, r, n, seed);
    std::vector<std::vector<double>> out(count);
    for (auto& row : out) sampler.next(row);
    return out;
}

OrliczBallChain::OrliczBallChain(std::vector<BallConstraint> constraints,
                                 std::size_t n, std::uint64_t seed)
    : constraints_(std::move(constraints)), n_(n), rng_(seed) {
    validate_constraints(constraints_);
    if (n_ < 1) throw ConfigError("chain dimension must be >= 1");
    x_.assign(n_, 0.0);  // the origin lies in every body
    sums_.assign(constraints_.size(), 0.0);
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), 0u);
}

void OrliczBallChain::resync_sums() {
    for (std::size_t j = 0; j < constraints_.size(); ++j) {
        double fresh = 0.0;
        for (double xi : x_) fresh += constraints_[j].v.value(xi);
        if (std::fabs(fresh - sums_[j]) > 1e-8 * static_cast<double>(n_))
            throw NumericError("cached potential sum drifted beyond the guard bound");
        sums_[j] = fresh;
    }
}

void OrliczBallChain::sweep() {
    // Fresh visiting order each sweep.
    for (std::size_t i = n_ - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng_.below(i + 1));
        std::swap(perm_[i], perm_[j]);
    }

    const std::size_t m = constraints_.size();
    for (std::size_t idx = 0; idx < n_; ++idx) {
        const std::size_t i = perm_[idx];
        double old_val[2];
        double half = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            old_val[j] = constraints_[j].v.value(x_[i]);
            const double slack = constraints_[j].budget - (sums_[j] - old_val[j]);
            const double w = constraints_[j].v.inverse_nonneg(std::max(slack, 0.0));
            half = std::min(half, w);
        }
        // Shave one part in 1e12 off the half-width so that freshly summed
        // potentials stay strictly inside the budget despite inverse error.
        half *= 1.0 - 1e-12;
        const double xi = rng_.uniform(-half, half);
        for (std::size_t j = 0; j < m; ++j)
            sums_[j] += constraints_[j].v.value(xi) - old_val[j];
        x_[i] = xi;
    }

    ++sweep_count_;
    if (sweep_count_ % 64 == 0) resync_sums();
}

std::vector<std::vector<double>> mcmc_orlicz_ball(
    std::vector<BallConstraint> constraints, std::size_t n, long sweeps,
    long burn_in, long thin, std::uint64_t seed) {
    if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
    if (thin < 1) throw ConfigError("thin must be >= 1");
    if (sweeps <= burn_in)
        throw ConfigError("sweeps must exceed burn_in or no state is ever kept");

    OrliczBallChain chain(std::move(constraints), n, seed);
    std::vector<std::vector<double>> kept;
    kept.reserve(static_cast<std::size_t>((sweeps - burn_in) / thin) + 1);
    for (long s = 1; s <= sweeps; ++s) {
        chain.sweep();
        if (s > burn_in && (s - burn_in) % thin == 0) kept.push_back(chain.state());
    }
    return kept;
}

std::vector<std::vector<double>> conditional_marginal_samples(
    const OrliczFunction& v1, const OrliczFunction& v2, double r, double eps,
    std::size_t n, std::size_t k, std::size_t kept, const McmcParams& params,
    std::uint64_t seed) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("R must be finite and > 0");
    if (eps < 0.0 || !std::isfinite(eps)) throw ConfigError("eps must be >= 0");
    if (k < 1 || k > n) throw ConfigError("marginal size k must be in [1, n]");
    if (kept < 1) throw ConfigError("kept count must be >= 1");
    if (params.thin < 1) throw ConfigError("thin must be >= 1");

    const double nd = static_cast<double>(n);
    const long burn = params.burn_in >= 0 ? params.burn_in : 2 * static_cast<long>(n);
    std::vector<BallConstraint> cs = {{v1, nd}, {v2, (r + eps) * nd}};

    OrliczBallChain chain(std::move(cs), n, seed);
    std::vector<std::vector<double>> out;
    out.reserve(kept);
    for (long s = 0; s < burn; ++s) chain.sweep();
    while (out.size() < kept) {
        for (long s = 0; s < params.thin; ++s) chain.sweep();
        const std::vector<double>& x = chain.state();
        out.emplace_back(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

void write_samples_csv(std::ostream& out,
                       const std::vector<std::vector<double>>& rows,
                       const std::string& metadata_json) {
    out << "# " << metadata_json << "\n";
    if (rows.empty()) return;
    for (std::size_t c = 0; c < rows[0].size(); ++c)
        out << (c ? "," : "") << "x" << (c + 1);
    out << "\n";
    char buf[32];
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto res = std::to_chars(buf, buf + sizeof(buf), row[c]);
            if (c) out << ",";
            out.write(buf, res.ptr - buf);
        }
        out << "\n";
    }
}

}  // namespace orlicz
