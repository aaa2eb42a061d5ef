#include "orlicz/stats.hpp"

#include <algorithm>
#include <cmath>

#include "orlicz/gibbs.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/samplers.hpp"

namespace orlicz {

ComparisonStat ks_distance(std::span<const double> samples,
                           const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("ks_distance needs a nonempty sample");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double m = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / m));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / m - f));
    }
    ComparisonStat s;
    s.statistic = d;
    s.n1 = xs.size();
    s.critical_value_1pct = 1.63 / std::sqrt(m);
    s.pass = s.statistic <= s.critical_value_1pct;
    return s;
}

ComparisonStat ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw DomainError("ks_two_sample needs two nonempty samples");
    std::vector<double> xs(a.begin(), a.end());
    std::vector<double> ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double m = static_cast<double>(xs.size());
    const double n = static_cast<double>(ys.size());

    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() || j < ys.size()) {
        double v;
        if (j >= ys.size() || (i < xs.size() && xs[i] <= ys[j]))
            v = xs[i];
        else
            v = ys[j];
        while (i < xs.size() && xs[i] <= v) ++i;
        while (j < ys.size() && ys[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / m -
                                  static_cast<double>(j) / n));
    }

    ComparisonStat s;
    s.statistic = d;
    s.n1 = xs.size();
    s.n2 = ys.size();
    s.critical_value_1pct = 1.63 * std::sqrt((m + n) / (m * n));
    s.pass = s.statistic <= s.critical_value_1pct;
    return s;
}

std::vector<double> histogram_masses(const std::function<double(double)>& density,
                                     int bins, std::pair<double, double> range) {
    if (bins < 10) throw DomainError("histogram needs at least 10 bins");
    const auto [lo, hi] = range;
    if (!(hi > lo)) throw DomainError("histogram range is empty");
    std::vector<double> masses(static_cast<std::size_t>(bins));
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        const double a = lo + b * width;
        const double h = width / 4.0;
        masses[static_cast<std::size_t>(b)] =
            (h / 3.0) * (density(a) + 4.0 * density(a + h) +
                         2.0 * density(a + 2 * h) + 4.0 * density(a + 3 * h) +
                         density(a + width));
    }
    return masses;
}

double tv_histogram(std::span<const double> samples,
                    const std::function<double(double)>& density, int bins,
                    std::pair<double, double> range) {
    if (samples.empty()) throw DomainError("tv_histogram needs a nonempty sample");
    const std::vector<double> masses = histogram_masses(density, bins, range);
    const auto [lo, hi] = range;

    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    double outside = 0.0;
    const double width = (hi - lo) / bins;
    for (double x : samples) {
        if (x < lo || x >= hi) {
            outside += 1.0;
            continue;
        }
        auto b = static_cast<std::size_t>((x - lo) / width);
        if (b >= counts.size()) b = counts.size() - 1;
        counts[b] += 1.0;
    }
    const double total = static_cast<double>(samples.size());

    double tv = 0.0;
    double theo_in = 0.0;
    for (int b = 0; b < bins; ++b) {
        theo_in += masses[static_cast<std::size_t>(b)];
        tv += std::fabs(counts[static_cast<std::size_t>(b)] / total -
                        masses[static_cast<std::size_t>(b)]);
    }
    const double theo_out = std::max(0.0, 1.0 - theo_in);
    tv += std::fabs(outside / total - theo_out);
    return 0.5 * tv;
}

BootstrapMean bootstrap_mean(std::span<const double> samples, double confidence,
                             int replicates, std::uint64_t seed) {
    if (samples.empty()) throw DomainError("bootstrap_mean needs a nonempty sample");
    if (!(confidence > 0.0) || !(confidence < 1.0))
        throw DomainError("confidence must lie in (0, 1)");
    if (replicates < 10) throw DomainError("bootstrap needs at least 10 replicates");

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());

    Rng rng(seed);
    std::vector<double> means(static_cast<std::size_t>(replicates));
    for (double& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            s += samples[rng.below(samples.size())];
        m = s / static_cast<double>(samples.size());
    }
    std::sort(means.begin(), means.end());
    const double tail = 0.5 * (1.0 - confidence);
    const auto pick = [&](double u) {
        const auto idx = static_cast<std::size_t>(
            std::min(static_cast<double>(means.size() - 1),
                     std::max(0.0, u * (means.size() - 1))));
        return means[idx];
    };
    return {mean, pick(tail), pick(1.0 - tail)};
}

namespace {

// Fraction of states whose V2 potential sum is at most `level`; states come
// either from the exact lp sampler (pure-power V1, unconditioned stage) or
// from the chain on the current intersection body.
double stage_hit_fraction(const OrliczFunction& v1, const OrliczFunction& v2,
                          double prev_level_budget, double target_budget,
                          std::size_t n, int chains, std::uint64_t stage_seed,
                          bool unconditioned, std::size_t kept_each) {
    const double nd = static_cast<double>(n);
    long hits = 0;
    long total = 0;
    for (int c = 0; c < chains; ++c) {
        const std::uint64_t cs = derive_stream(stage_seed, static_cast<std::uint64_t>(c));
        if (unconditioned && v1.is_pure_power()) {
            LpBallSampler sampler(v1.pure_power_exponent(), 1.0, n, cs);
            std::vector<double> x;
            for (std::size_t i = 0; i < kept_each; ++i) {
                sampler.next(x);
                double s2 = 0.0;
                for (double xi : x) s2 += v2.value(xi);
                hits += s2 <= target_budget ? 1 : 0;
                ++total;
            }
        } else {
            std::vector<BallConstraint> cs_list = {{v1, nd}};
            if (!unconditioned) cs_list.push_back({v2, prev_level_budget});
            OrliczBallChain chain(std::move(cs_list), n, cs);
            const long burn = 2 * static_cast<long>(n);
            for (long s = 0; s < burn; ++s) chain.sweep();
            for (std::size_t i = 0; i < kept_each; ++i) {
                chain.sweep();
                chain.sweep();
                double s2 = 0.0;
                for (double xi : chain.state()) s2 += v2.value(xi);
                hits += s2 <= target_budget ? 1 : 0;
                ++total;
            }
        }
    }
    if (hits == 0)
        throw DegenerateError(
            "splitting stage produced zero hits; raise n_levels or chains");
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

RareEventEstimate rare_event_rate(const OrliczFunction& v1,
                                  const OrliczFunction& v2, double r,
                                  std::size_t n, int n_levels, int chains,
                                  std::uint64_t seed, const QuadratureConfig& q) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("rare event level must be > 0");
    if (n < 1) throw DomainError("rare event needs dimension >= 1");
    if (n_levels < 1) throw DomainError("need at least one splitting level");
    if (chains < 1) throw DomainError("need at least one chain per stage");

    const double nd = static_cast<double>(n);
    const double alpha1 = solve_alpha(v1, 1.0, q);
    const double typical = moment(v2, v1, alpha1, q);

    // Levels run geometrically from the typical value down to r; when r is at
    // or above the typical value a single direct stage suffices.
    const bool rare = r < typical * (1.0 - 1e-9);
    std::vector<double> levels;
    if (rare) {
        for (int i = 0; i <= n_levels; ++i)
            levels.push_back(typical *
                             std::pow(r / typical, static_cast<double>(i) / n_levels));
        levels.back() = r;
    } else {
        levels.push_back(r);
    }
    const std::size_t kept_each = 600;
    constexpr int kReps = 3;

    std::vector<double> rates(kReps);
    std::vector<double> last_stage_probs;
    for (int rep = 0; rep < kReps; ++rep) {
        const std::uint64_t rep_seed = derive_stream(seed, static_cast<std::uint64_t>(rep));
        std::vector<double> probs;
        double log_p = 0.0;
        for (std::size_t j = 0; j < levels.size(); ++j) {
            // Stage 0 estimates P[sum V2 <= levels[0] * n] unconditioned;
            // stage j > 0 conditions on the previous level.
            const double prev_budget = (j == 0 ? levels[0] : levels[j - 1]) * nd;
            const double p = stage_hit_fraction(
                v1, v2, prev_budget, levels[j] * nd, n, chains,
                derive_stream(rep_seed, static_cast<std::uint64_t>(j)), j == 0,
                kept_each);
            probs.push_back(p);
            log_p += std::log(p);
        }
        rates[static_cast<std::size_t>(rep)] = -log_p / nd;
        if (rep == kReps - 1) last_stage_probs = std::move(probs);
    }

    RareEventEstimate est;
    for (double v : rates) est.rate += v;
    est.rate /= kReps;
    double ss = 0.0;
    for (double v : rates) ss += (v - est.rate) * (v - est.rate);
    est.stderr_rate = std::sqrt(ss / (kReps - 1)) / std::sqrt(double(kReps));
    est.stage_probabilities = std::move(last_stage_probs);
    return est;
}

}  // namespace orlicz
