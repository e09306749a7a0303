#include "mvar/forecasting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvar/kernels.hpp"
#include "mvar/rng.hpp"
#include "mvar/simulation.hpp"

namespace mvar {
namespace {

void check_origin(const MvarParameters& params, const ForecastOrigin& origin) {
    const int p = params.spec.p();
    if (static_cast<int>(origin.history.size()) != p)
        throw DimensionError("forecast origin holds " + std::to_string(origin.history.size()) +
                             " vectors, model needs p=" + std::to_string(p));
    for (const auto& v : origin.history)
        if (v.size() != params.spec.m) throw DimensionError("forecast origin vector has wrong dimension");
}

}  // namespace

void MixtureNormalMV::validate() const {
    const auto J = static_cast<Eigen::Index>(means.size());
    if (weights.size() != J || static_cast<Eigen::Index>(covs.size()) != J || J == 0)
        throw DimensionError("mixture: component lists differ in length");
    if ((weights.array() <= 0.0).any()) throw ParameterError("mixture: weights must be positive");
    if (std::abs(weights.sum() - 1.0) > kWeightSumTol) throw ParameterError("mixture: weights must sum to 1");
    for (const auto& c : covs)
        if (!is_spd(c)) throw NotSpdError("mixture: component covariance is not SPD");
}

MixtureNormalMV predictive_one_step(const MvarParameters& params, const ForecastOrigin& origin) {
    check_origin(params, origin);
    MixtureNormalMV mix;
    mix.weights = params.weights;
    mix.horizon = 1;
    mix.origin_time = origin.time;
    for (int k = 0; k < params.spec.g; ++k) {
        const Component& c = params.components[k];
        Vector mu = c.intercept;
        for (int i = 1; i <= params.spec.orders[k]; ++i) mu.noalias() += c.ar[i - 1] * origin.lag(i);
        mix.means.push_back(std::move(mu));
        mix.covs.push_back(c.cov);
    }
    return mix;
}

MomentPair mixture_moments(const MixtureNormalMV& mix) {
    const Eigen::Index m = mix.means.front().size();
    MomentPair out{Vector::Zero(m), Matrix::Zero(m, m)};
    for (std::size_t j = 0; j < mix.size(); ++j) {
        const double w = mix.weights[static_cast<Eigen::Index>(j)];
        out.mean.noalias() += w * mix.means[j];
        out.cov.noalias() += w * (mix.covs[j] + mix.means[j] * mix.means[j].transpose());
    }
    out.cov.noalias() -= out.mean * out.mean.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

MixtureNormalMV predictive_two_step(const MvarParameters& params, const ForecastOrigin& origin) {
    check_origin(params, origin);
    const int g = params.spec.g, m = params.spec.m, p = params.spec.p();
    MixtureNormalMV mix;
    mix.horizon = 2;
    mix.origin_time = origin.time;
    mix.weights.resize(g * g);
    const Matrix zero = Matrix::Zero(m, m);
    for (int k = 0; k < g; ++k) {
        const Component& ck = params.components[k];
        const Matrix& lead = p >= 1 ? ck.ar[0] : zero;  // Theta_k1
        for (int l = 0; l < g; ++l) {
            const Component& cl = params.components[l];
            Vector mu = ck.intercept + lead * cl.intercept;
            for (int i = 1; i <= p - 1; ++i)
                mu.noalias() += (ck.ar[i] + lead * cl.ar[i - 1]) * origin.lag(i);
            if (p >= 1) mu.noalias() += lead * cl.ar[p - 1] * origin.lag(p);
            Matrix psi = ck.cov + lead * cl.cov * lead.transpose();
            psi = 0.5 * (psi + psi.transpose()).eval();
            mix.weights[k * g + l] = params.weights[k] * params.weights[l];
            mix.means.push_back(std::move(mu));
            mix.covs.push_back(std::move(psi));
        }
    }
    return mix;
}

MixtureNormalMV predictive_mixture(const MvarParameters& params, const ForecastOrigin& origin,
                                   int horizon) {
    if (horizon == 1) return predictive_one_step(params, origin);
    if (horizon == 2) return predictive_two_step(params, origin);
    throw ParameterError("analytic predictive mixtures exist for horizons 1 and 2 only");
}

MomentPair sample_moments(const Matrix& samples) {
    const Eigen::Index n = samples.rows(), m = samples.cols();
    if (n == 0) throw ParameterError("sample_moments: no samples");
    const auto& kt = kernels::active();
    MomentPair out{samples.colwise().mean().transpose(), Matrix(m, m)};
    const Matrix centered = samples.rowwise() - out.mean.transpose();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            out.cov(i, j) = out.cov(j, i) =
                kt.dot(centered.col(i).data(), centered.col(j).data(), static_cast<std::size_t>(n)) /
                static_cast<double>(n);
    return out;
}

McForecast predictive_h_step_mc(const MvarParameters& params, const ForecastOrigin& origin, int h,
                                long n_paths, std::uint64_t seed) {
    if (h < 1) throw ParameterError("horizon must be >= 1");
    if (n_paths < 1) throw ParameterError("n_paths must be >= 1");
    check_origin(params, origin);
    const MvarStepper stepper(params);
    const int p = params.spec.p(), m = params.spec.m;

    McForecast out;
    out.horizon = h;
    out.origin_time = origin.time;
    out.samples.resize(n_paths, m);

    std::vector<Vector> path(static_cast<std::size_t>(p + h), Vector::Zero(m));
    std::vector<const Vector*> lags(static_cast<std::size_t>(p));
    Vector y(m), eps(m);
    for (long chunk = 0; chunk * kMcChunk < n_paths; ++chunk) {
        Rng rng(seed, static_cast<std::uint64_t>(chunk));
        const long end = std::min(n_paths, (chunk + 1) * kMcChunk);
        for (long r = chunk * kMcChunk; r < end; ++r) {
            std::copy(origin.history.begin(), origin.history.end(), path.begin());
            for (int s = 0; s < h; ++s) {
                for (int i = 1; i <= p; ++i) lags[i - 1] = &path[p + s - i];
                stepper.step(rng, lags, y, eps);
                path[p + s] = y;
            }
            out.samples.row(r) = path[p + h - 1].transpose();
        }
    }
    out.moments = sample_moments(out.samples);
    return out;
}

}  // namespace mvar
