#include "mvar/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mvar {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double mixture_cdf(const MixtureNormal1D& mix, double x) {
    double f = 0.0;
    for (Eigen::Index j = 0; j < mix.size(); ++j) f += mix.weights[j] * normal_cdf((x - mix.means[j]) / mix.sds[j]);
    return f;
}

double mixture_pdf(const MixtureNormal1D& mix, double x) {
    double f = 0.0;
    for (Eigen::Index j = 0; j < mix.size(); ++j)
        f += mix.weights[j] * normal_pdf((x - mix.means[j]) / mix.sds[j]) / mix.sds[j];
    return f;
}

double mixture_quantile(const MixtureNormal1D& mix, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("quantile level must lie in (0, 1)");
    mix.validate();
    double lo = (mix.means.array() - 10.0 * mix.sds.array()).minCoeff();
    double hi = (mix.means.array() + 10.0 * mix.sds.array()).maxCoeff();
    const double span = mix.sds.maxCoeff();
    for (int i = 0; i < 64 && mixture_cdf(mix, lo) > q; ++i) lo -= span * std::ldexp(1.0, i);
    for (int i = 0; i < 64 && mixture_cdf(mix, hi) < q; ++i) hi += span * std::ldexp(1.0, i);
    if (!(mixture_cdf(mix, lo) <= q && mixture_cdf(mix, hi) >= q))
        throw BracketError("mixture_quantile: could not bracket the requested level");

    // erfc keeps relative accuracy in the lower tail, so the tolerance can
    // scale with q there; near 1 only absolute accuracy is available.
    const double tol = q < 0.5 ? 1e-12 * q : std::max(1e-12 * (1.0 - q), 2e-16);
    double x = 0.5 * (lo + hi);
    double step = hi - lo, prev_step = step;
    for (int it = 0; it < 500; ++it) {
        const double f = mixture_cdf(mix, x) - q;
        if (std::abs(f) < tol) return x;
        if (f < 0.0) lo = x; else hi = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return x;
        const double dens = mixture_pdf(mix, x);
        const double next = dens > 0.0 ? x - f / dens : lo;
        // Bisect when Newton leaves the bracket or fails to halve the step.
        if (!(next > lo && next < hi) || std::abs(2.0 * f) > std::abs(prev_step * dens)) {
            prev_step = step;
            step = 0.5 * (hi - lo);
            x = lo + step;
        } else {
            prev_step = step;
            step = x - next;
            x = next;
        }
    }
    return x;
}

RiskReport var_es(const MixtureNormal1D& mix, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("risk level alpha must lie in (0, 1)");
    RiskReport r;
    r.alpha = alpha;
    const double tail = 1.0 - alpha;
    r.var = mixture_quantile(mix, tail);
    double partial = 0.0;
    for (Eigen::Index j = 0; j < mix.size(); ++j) {
        const double z = (r.var - mix.means[j]) / mix.sds[j];
        partial += mix.weights[j] * (mix.means[j] * normal_cdf(z) - mix.sds[j] * normal_pdf(z));
    }
    r.es = partial / tail;
    return r;
}

namespace {

double crps_kernel(double d, double s) {
    const double z = d / s;
    return d * (2.0 * normal_cdf(z) - 1.0) + 2.0 * s * normal_pdf(z);
}

}  // namespace

double crps_mixture(const MixtureNormal1D& mix, double x) {
    mix.validate();
    if (!std::isfinite(x)) throw ParameterError("crps: observation must be finite");
    const Eigen::Index J = mix.size();
    double first = 0.0, second = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) {
        first += mix.weights[j] * crps_kernel(x - mix.means[j], mix.sds[j]);
        for (Eigen::Index l = 0; l < J; ++l) {
            const double s = std::sqrt(mix.sds[j] * mix.sds[j] + mix.sds[l] * mix.sds[l]);
            second += mix.weights[j] * mix.weights[l] * crps_kernel(mix.means[j] - mix.means[l], s);
        }
    }
    return std::max(0.0, first - 0.5 * second);
}

}  // namespace mvar
