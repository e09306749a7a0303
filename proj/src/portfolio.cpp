#include "mvar/portfolio.hpp"

#include <cmath>
#include <string>

namespace mvar {
namespace {

Eigen::LLT<Matrix> factor(const Matrix& cov) {
    if (!is_spd(cov)) throw NotSpdError("portfolio: covariance is not symmetric positive definite");
    return Eigen::LLT<Matrix>(cov);
}

double quad_form(const Vector& w, const Matrix& cov) { return w.dot(cov * w); }

}  // namespace

void MixtureNormal1D::validate() const {
    if (weights.size() == 0 || means.size() != weights.size() || sds.size() != weights.size())
        throw DimensionError("scalar mixture: component lists differ in length");
    if ((weights.array() <= 0.0).any()) throw ParameterError("scalar mixture: weights must be positive");
    if (std::abs(weights.sum() - 1.0) > kWeightSumTol)
        throw ParameterError("scalar mixture: weights must sum to 1");
    if (!(sds.array() > 0.0).all() || !sds.allFinite() || !means.allFinite())
        throw ParameterError("scalar mixture: sds must be positive and finite");
}

MixtureNormal1D project(const MixtureNormalMV& mix, const Vector& w) {
    if (mix.size() == 0) throw DimensionError("project: empty mixture");
    if (w.size() != mix.means.front().size()) throw DimensionError("project: weight vector has wrong length");
    const auto J = static_cast<Eigen::Index>(mix.size());
    MixtureNormal1D out{mix.weights, Vector(J), Vector(J), mix.horizon, mix.origin_time};
    for (Eigen::Index j = 0; j < J; ++j) {
        out.means[j] = w.dot(mix.means[j]);
        const double v = quad_form(w, mix.covs[j]);
        if (!(v > 0.0))
            throw NotSpdError("project: w' Sigma w <= 0 for component " + std::to_string(j));
        out.sds[j] = std::sqrt(v);
    }
    return out;
}

ScalarMoments scalar_mixture_moments(const MixtureNormal1D& mix) {
    ScalarMoments out;
    out.mean = mix.weights.dot(mix.means);
    const double second = mix.weights.dot((mix.sds.array().square() + mix.means.array().square()).matrix());
    out.variance = second - out.mean * out.mean;
    return out;
}

MarkowitzCoefficients markowitz_coefficients(const Vector& mean, const Matrix& cov) {
    if (mean.size() != cov.rows()) throw DimensionError("markowitz: mean/cov size mismatch");
    const auto llt = factor(cov);
    const Vector ones = Vector::Ones(mean.size());
    const Vector inv_one = llt.solve(ones);
    const Vector inv_mu = llt.solve(mean);
    MarkowitzCoefficients k;
    k.a = ones.dot(inv_mu);
    k.b = mean.dot(inv_mu);
    k.c = ones.dot(inv_one);
    // D = CB - A^2 = C r' Omega^{-1} r with r = mu - (A/C) 1; this form is
    // nonnegative and avoids the cancellation in CB - A^2.
    const Vector r = mean - (k.a / k.c) * ones;
    k.d = k.c * r.dot(llt.solve(r));
    return k;
}

PortfolioSolution mvp_weights(const Vector& mean, const Matrix& cov) {
    if (mean.size() != cov.rows()) throw DimensionError("mvp: mean/cov size mismatch");
    const auto llt = factor(cov);
    const Vector inv_one = llt.solve(Vector::Ones(mean.size()));
    PortfolioSolution s;
    s.kind = PortfolioKind::mvp;
    s.weights = inv_one / inv_one.sum();
    s.expected_return = s.weights.dot(mean);
    s.sd = std::sqrt(quad_form(s.weights, cov));
    return s;
}

PortfolioSolution efficient_weights(const Vector& mean, const Matrix& cov, double target) {
    const MarkowitzCoefficients k = markowitz_coefficients(mean, cov);
    if (!(k.d > kDegenerateFrontier))
        throw DegenerateFrontierError("degenerate frontier: mean vector proportional to ones");
    const auto llt = factor(cov);
    const Vector inv_one = llt.solve(Vector::Ones(mean.size()));
    // (1/D)[B O^-1 1 - A O^-1 mu + target (C O^-1 mu - A O^-1 1)] rearranged as
    // w_mvp + (target - A/C) (C/D) O^-1 r, r = mu - (A/C) 1. 1'O^-1 r = 0 and
    // mu'O^-1 r = D/C, so both constraints hold without cancellation.
    const Vector r = mean - (k.a / k.c) * Vector::Ones(mean.size());
    const Vector inv_r = llt.solve(r);
    PortfolioSolution s;
    s.kind = PortfolioKind::efficient;
    s.weights = inv_one / k.c + (target - k.a / k.c) * (k.c / k.d) * inv_r;
    s.expected_return = s.weights.dot(mean);
    s.sd = std::sqrt(quad_form(s.weights, cov));
    return s;
}

VarianceIdentity variance_identity_check(const MvarParameters& params, const ForecastOrigin& origin,
                                         const Vector& w) {
    const MixtureNormalMV mix = predictive_one_step(params, origin);
    const MomentPair mom = mixture_moments(mix);
    VarianceIdentity out;
    out.lhs = quad_form(w, mom.cov);
    out.rhs = scalar_mixture_moments(project(mix, w)).variance;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

HorizonPortfolio horizon_portfolio(const MvarParameters& params, const ForecastOrigin& origin,
                                   int horizon, PortfolioObjective objective) {
    const MixtureNormalMV mix = predictive_mixture(params, origin, horizon);
    HorizonPortfolio out;
    out.moments = mixture_moments(mix);
    out.solution = objective ? efficient_weights(out.moments.mean, out.moments.cov, *objective)
                             : mvp_weights(out.moments.mean, out.moments.cov);
    out.solution.horizon = horizon;
    out.returns = project(mix, out.solution.weights);
    return out;
}

}  // namespace mvar
