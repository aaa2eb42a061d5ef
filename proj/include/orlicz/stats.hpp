#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "orlicz/orlicz_function.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

// Goodness-of-fit statistic against its 1% asymptotic critical value.
struct ComparisonStat {
    double statistic = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;  // zero for one-sample statistics
    double critical_value_1pct = 0.0;
    bool pass = false;
};

// Sup distance between the empirical CDF of `samples` and `cdf`; the 1%
// critical value is the asymptotic 1.63 / sqrt(m).
ComparisonStat ks_distance(std::span<const double> samples,
                           const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov with critical value
// 1.63 * sqrt((m + n) / (m n)).
ComparisonStat ks_two_sample(std::span<const double> a, std::span<const double> b);

// Histogram total-variation estimate: half the L1 gap over `bins` equal
// cells of `range`, plus an extra cell for everything outside the range on
// both the empirical and theoretical side.
double tv_histogram(std::span<const double> samples,
                    const std::function<double(double)>& density, int bins,
                    std::pair<double, double> range);

// Theoretical masses of the same `bins` equal cells, by five-node Simpson
// per cell; tv_histogram and the experiment runners share these.
std::vector<double> histogram_masses(const std::function<double(double)>& density,
                                     int bins, std::pair<double, double> range);

// Sample mean with a seeded percentile-bootstrap confidence interval.
struct BootstrapMean {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

BootstrapMean bootstrap_mean(std::span<const double> samples, double confidence,
                             int replicates, std::uint64_t seed);

// Multilevel-splitting estimate of -(1/n) log P[ sum V2(X_i) <= R n ] for X
// uniform on the V1-ball with budget n. Levels interpolate geometrically
// from the typical V2-level down to R; each stage's conditional probability
// comes from `chains` constrained MCMC chains. The returned stderr is over
// independent replications.
struct RareEventEstimate {
    double rate = 0.0;
    double stderr_rate = 0.0;
    std::vector<double> stage_probabilities;  // from the final replication
};

RareEventEstimate rare_event_rate(const OrliczFunction& v1,
                                  const OrliczFunction& v2, double r,
                                  std::size_t n, int n_levels, int chains,
                                  std::uint64_t seed,
                                  const QuadratureConfig& q = {});

}  // namespace orlicz
