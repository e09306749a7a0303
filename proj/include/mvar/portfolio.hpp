#pragma once
// Portfolio returns under predictive mixtures and unconstrained (short
// selling allowed) Markowitz portfolios built from conditional moments.

#include <optional>
#include <utility>

#include "mvar/forecasting.hpp"

namespace mvar {

/// Univariate Gaussian mixture: law of a portfolio return R_{t+h}.
struct MixtureNormal1D {
    Vector weights;
    Vector means;
    Vector sds;
    int horizon = 1;
    long origin_time = 0;

    Eigen::Index size() const { return weights.size(); }
    void validate() const;
};

/// Component j of mix becomes N(w'mu_j, w'Sigma_j w) with the same weight.
/// Throws NotSpdError when some w'Sigma_j w <= 0.
MixtureNormal1D project(const MixtureNormalMV& mix, const Vector& w);

struct ScalarMoments {
    double mean = 0.0;
    double variance = 0.0;
};

ScalarMoments scalar_mixture_moments(const MixtureNormal1D& mix);

struct MarkowitzCoefficients {
    double a = 0.0;  // 1' Omega^{-1} mu
    double b = 0.0;  // mu' Omega^{-1} mu
    double c = 0.0;  // 1' Omega^{-1} 1
    double d = 0.0;  // c b - a^2
};

inline constexpr double kDegenerateFrontier = 1e-12;

MarkowitzCoefficients markowitz_coefficients(const Vector& mean, const Matrix& cov);

enum class PortfolioKind { mvp, efficient };

struct PortfolioSolution {
    Vector weights;
    double expected_return = 0.0;
    double sd = 0.0;
    PortfolioKind kind = PortfolioKind::mvp;
    int horizon = 1;
};

/// w = Omega^{-1} 1 / C.
PortfolioSolution mvp_weights(const Vector& mean, const Matrix& cov);

/// Minimum-variance weights with w'mu = target and sum(w) = 1. Throws
/// DegenerateFrontierError when D <= 1e-12.
PortfolioSolution efficient_weights(const Vector& mean, const Matrix& cov, double target);

struct VarianceIdentity {
    double lhs = 0.0;  // w' Omega_{t+1} w
    double rhs = 0.0;  // variance of the projected one-step mixture
    double gap = 0.0;
};

VarianceIdentity variance_identity_check(const MvarParameters& params, const ForecastOrigin& origin,
                                         const Vector& w);

/// Target return for an efficient portfolio; empty selects the MVP.
using PortfolioObjective = std::optional<double>;

struct HorizonPortfolio {
    PortfolioSolution solution;
    MixtureNormal1D returns;
    MomentPair moments;  // conditional mean/covariance of Y_{t+h}
};

/// Markowitz portfolio against the conditional moments at horizon 1 or 2,
/// plus the projected return mixture (g or g^2 components).
HorizonPortfolio horizon_portfolio(const MvarParameters& params, const ForecastOrigin& origin,
                                   int horizon, PortfolioObjective objective);

inline HorizonPortfolio two_step_portfolio(const MvarParameters& params,
                                           const ForecastOrigin& origin,
                                           PortfolioObjective objective) {
    return horizon_portfolio(params, origin, 2, objective);
}

}  // namespace mvar
