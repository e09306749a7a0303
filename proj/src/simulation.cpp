#include "mvar/simulation.hpp"

#include <string>

namespace mvar {

MvarStepper::MvarStepper(const MvarParameters& params) : params_(params) {
    params_.validate(true);
    lower_.reserve(params_.components.size());
    for (const auto& c : params_.components) lower_.push_back(CovarianceFactor(c.cov).lower);
}

Vector MvarStepper::component_mean(int k, const std::vector<const Vector*>& lags) const {
    const Component& c = params_.components[k];
    Vector mu = c.intercept;
    for (int i = 1; i <= params_.spec.orders[k]; ++i) mu.noalias() += c.ar[i - 1] * *lags[i - 1];
    return mu;
}

int MvarStepper::step(Rng& rng, const std::vector<const Vector*>& lags, Vector& out,
                      Vector& eps) const {
    const int k = rng.categorical(params_.weights);
    rng.fill_normal(eps);
    out = component_mean(k, lags);
    out.noalias() += lower_[k].triangularView<Eigen::Lower>() * eps;
    return k;
}

SimulationResult simulate(const SimulationConfig& config) {
    if (config.n < 1) throw ParameterError("simulate: n must be >= 1");
    if (config.burn_in < 0) throw ParameterError("simulate: burn_in must be >= 0");
    const MvarStepper stepper(config.params);
    const int p = config.params.spec.p(), m = config.params.spec.m;

    std::vector<Vector> path;
    const long total = config.burn_in + config.n;
    path.reserve(static_cast<std::size_t>(p + total));
    if (config.initial) {
        if (static_cast<int>(config.initial->size()) != p)
            throw DimensionError("simulate: expected " + std::to_string(p) + " initial vectors");
        for (const auto& v : *config.initial) {
            if (v.size() != m) throw DimensionError("simulate: initial vector has wrong dimension");
            path.push_back(v);
        }
    } else {
        path.assign(static_cast<std::size_t>(p), Vector::Zero(m));
    }

    Rng rng(config.seed);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(config.n));
    std::vector<const Vector*> lags(static_cast<std::size_t>(p));
    Vector y(m), eps(m);
    for (long s = 0; s < total; ++s) {
        for (int i = 1; i <= p; ++i) lags[i - 1] = &path[path.size() - i];
        const int k = stepper.step(rng, lags, y, eps);
        path.push_back(y);
        if (s >= config.burn_in) labels.push_back(k);
    }

    Matrix values(config.n, m);
    const std::size_t first = path.size() - static_cast<std::size_t>(config.n);
    for (long t = 0; t < config.n; ++t) values.row(t) = path[first + t].transpose();
    return {SeriesMatrix(std::move(values)), std::move(labels)};
}

}  // namespace mvar
