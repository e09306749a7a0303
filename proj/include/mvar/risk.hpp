#pragma once
// Quantiles, value-at-risk, expected shortfall and CRPS for univariate
// Gaussian mixtures.
//
// Sign convention: VaR at level alpha is the (1 - alpha)-quantile of the
// return distribution, reported as a signed return (negative = loss).

#include "mvar/portfolio.hpp"

namespace mvar {

/// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)); erfc keeps full relative
/// accuracy in the lower tail.
double normal_cdf(double x);
double normal_pdf(double x);

double mixture_cdf(const MixtureNormal1D& mix, double x);
double mixture_pdf(const MixtureNormal1D& mix, double x);

/// x with |F(x) - q| < 1e-12 min(q, 1 - q) (or the bracket shrunk to machine
/// precision), by safeguarded Newton steps inside a bisection bracket. The initial
/// bracket [min(mu - 10 sd), max(mu + 10 sd)] is widened when needed; throws
/// BracketError if widening fails.
double mixture_quantile(const MixtureNormal1D& mix, double q);

struct RiskReport {
    double alpha = 0.95;
    double var = 0.0;  // (1 - alpha)-quantile
    double es = 0.0;   // E[R | R <= var]
};

/// ES = (1/(1-alpha)) sum_j w_j [mu_j Phi(z_j) - sd_j phi(z_j)], z_j = (var - mu_j)/sd_j.
RiskReport var_es(const MixtureNormal1D& mix, double alpha);

/// Closed-form CRPS of a Gaussian mixture:
///   sum_j w_j A(x - mu_j, s_j^2) - 1/2 sum_jl w_j w_l A(mu_j - mu_l, s_j^2 + s_l^2),
///   A(d, s^2) = d (2 Phi(d/s) - 1) + 2 s phi(d/s).
double crps_mixture(const MixtureNormal1D& mix, double x);

}  // namespace mvar
