#pragma once
// Conditional predictive distributions.
//
// Horizon 1 is a g-component Gaussian mixture, horizon 2 a g^2-component
// mixture; longer horizons are approximated by simulation.

#include <cstdint>
#include <utility>
#include <vector>

#include "mvar/model.hpp"

namespace mvar {

struct MixtureNormalMV {
    Vector weights;
    std::vector<Vector> means;
    std::vector<Matrix> covs;
    int horizon = 1;
    long origin_time = 0;

    std::size_t size() const { return means.size(); }
    void validate() const;
};

struct MomentPair {
    Vector mean;
    Matrix cov;
};

/// pi_k N(mu_{t+1,k}, Omega_k), k = 1..g.
MixtureNormalMV predictive_one_step(const MvarParameters& params, const ForecastOrigin& origin);

/// Mean sum w_j mu_j; covariance sum w_j Sigma_j + sum w_j mu_j mu_j' - mu mu',
/// symmetrized.
MomentPair mixture_moments(const MixtureNormalMV& mix);

/// g^2 components with weight pi_k pi_l, covariance
/// Psi_kl = Omega_k + Theta_k1 Omega_l Theta_k1' and mean
///   mu_kl = Theta_k0 + Theta_k1 Theta_l0
///         + sum_{i=1}^{p-1} (Theta_k,i+1 + Theta_k1 Theta_li) Y_{t+1-i}
///         + Theta_k1 Theta_lp Y_{t+1-p}.
/// Component (k, l) is stored at index k * g + l, where k is the regime at
/// t+2 and l the regime at t+1.
MixtureNormalMV predictive_two_step(const MvarParameters& params, const ForecastOrigin& origin);

/// Dispatch on horizon 1 or 2.
MixtureNormalMV predictive_mixture(const MvarParameters& params, const ForecastOrigin& origin,
                                   int horizon);

struct McForecast {
    Matrix samples;  // n_paths x m endpoint draws
    MomentPair moments;
    int horizon = 1;
    long origin_time = 0;
};

/// Paths per independent RNG substream in predictive_h_step_mc.
inline constexpr long kMcChunk = 1L << 16;

/// n_paths trajectories of length h from the origin. Chunk c of kMcChunk
/// paths draws from substream (seed, c), so results do not depend on how
/// chunks are scheduled.
McForecast predictive_h_step_mc(const MvarParameters& params, const ForecastOrigin& origin, int h,
                                long n_paths, std::uint64_t seed);

/// Empirical mean and (1/N) covariance of the rows of samples.
MomentPair sample_moments(const Matrix& samples);

}  // namespace mvar
