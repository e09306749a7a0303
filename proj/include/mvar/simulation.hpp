#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvar/model.hpp"
#include "mvar/rng.hpp"

namespace mvar {

struct SimulationConfig {
    MvarParameters params;
    long n = 0;
    long burn_in = 200;
    std::uint64_t seed = 0;
    /// p starting vectors, oldest first. Zero vectors when absent.
    std::optional<std::vector<Vector>> initial;
};

struct SimulationResult {
    SeriesMatrix series;
    std::vector<int> labels;  // 0-based component drawn at each output row
};

/// Draws Y_t = Theta_k0 + sum Theta_ki Y_{t-i} + L_k eps_t with k ~ pi and L_k
/// the lower Cholesky factor of Omega_k. Deterministic in the config.
SimulationResult simulate(const SimulationConfig& config);

/// Precomputed per-component Cholesky factors for repeated stepping.
class MvarStepper {
public:
    explicit MvarStepper(const MvarParameters& params);

    /// Conditional mean of component k given lags; lags[i-1] = Y_{t-i}.
    Vector component_mean(int k, const std::vector<const Vector*>& lags) const;

    /// One draw; writes the new observation to out and returns its label.
    int step(Rng& rng, const std::vector<const Vector*>& lags, Vector& out, Vector& eps) const;

    const MvarParameters& params() const { return params_; }

private:
    MvarParameters params_;
    std::vector<Matrix> lower_;
};

}  // namespace mvar
