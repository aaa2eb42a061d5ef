#pragma once

#include <cstdint>
#include <vector>

#include "orlicz/gibbs.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/rng.hpp"

namespace orlicz {

// One ball constraint sum_i V(x_i) <= budget, with budget = R * n.
struct BallConstraint {
    OrliczFunction v;
    double budget;
};

struct McmcParams {
    long burn_in = -1;  // -1 means the default 2 * n sweeps
    long thin = 5;
};

// i.i.d. draws from mu_{V,alpha} by inverse-CDF over the cached table.
std::vector<double> sample_gibbs_iid(const OrliczFunction& v, double alpha,
                                     std::size_t count, std::uint64_t seed,
                                     const QuadratureConfig& q = {});

// Streaming exact sampler for the uniform law on {sum |x_i|^p <= R n}:
// X = (Rn)^{1/p} U^{1/n} G / ||G||_p with G i.i.d. p-generalized Gaussian
// (drawn through the Gamma(1/p) transform) and U uniform.
class LpBallSampler {
public:
    LpBallSampler(double p, double r, std::size_t n, std::uint64_t seed);
    void next(std::vector<double>& out);
    std::size_t dimension() const { return n_; }

private:
    double p_;
    double radius_;
    std::size_t n_;
    Rng rng_;
};

std::vector<std::vector<double>> sample_lp_ball_exact(double p, double r,
                                                      std::size_t n,
                                                      std::size_t count,
                                                      std::uint64_t seed);

// Coordinate-Gibbs chain on the intersection of one or two Orlicz balls.
// Each sweep visits coordinates in fresh random order; the coordinate is
// redrawn uniformly on the interval the remaining budget allows, so the
// uniform law on the body is stationary and every update is rejection-free.
class OrliczBallChain {
public:
    OrliczBallChain(std::vector<BallConstraint> constraints, std::size_t n,
                    std::uint64_t seed);

    void sweep();
    const std::vector<double>& state() const { return x_; }
    double potential_sum(std::size_t j) const { return sums_[j]; }
    long sweep_count() const { return sweep_count_; }
    const std::vector<BallConstraint>& constraints() const { return constraints_; }

private:
    void resync_sums();  // drift guard: recompute sums, verify 1e-8 * n agreement

    std::vector<BallConstraint> constraints_;
    std::size_t n_;
    Rng rng_;
    std::vector<double> x_;
    std::vector<double> sums_;
    std::vector<std::uint32_t> perm_;
    long sweep_count_ = 0;
};

// Kept states of the chain: one state every `thin` sweeps after `burn_in`,
// until `sweeps` total sweeps have run.
std::vector<std::vector<double>> mcmc_orlicz_ball(
    std::vector<BallConstraint> constraints, std::size_t n, long sweeps,
    long burn_in, long thin, std::uint64_t seed);

// First k coordinates of kept states of the chain on
// {sum V1 <= n} ∩ {sum V2 <= (R + eps) n}: draws from the conditional law
// of a V1-ball point given that it also lies in the enlarged V2-ball.
std::vector<std::vector<double>> conditional_marginal_samples(
    const OrliczFunction& v1, const OrliczFunction& v2, double r, double eps,
    std::size_t n, std::size_t k, std::size_t kept, const McmcParams& params,
    std::uint64_t seed);

// CSV dump: '#' JSON metadata line, then a header x1..xd, then one row per
// state.
void write_samples_csv(std::ostream& out,
                       const std::vector<std::vector<double>>& rows,
                       const std::string& metadata_json);

}  // namespace orlicz
