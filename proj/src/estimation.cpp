#include "mvar/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mvar/kernels.hpp"
#include "mvar/rng.hpp"

namespace mvar {
namespace {

void check_collapse(const MvarParameters& params) {
    for (int k = 0; k < params.spec.g; ++k) {
        const Matrix& cov = params.components[k].cov;
        if (!cov.allFinite())
            throw ComponentCollapseError("component " + std::to_string(k) + " covariance is not finite", k);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < kCollapseEigenvalue)
            throw ComponentCollapseError(
                "component " + std::to_string(k) + " collapsed (covariance eigenvalue below 1e-12)", k);
    }
}

}  // namespace

Responsibilities e_step(const MvarParameters& params, const SeriesMatrix& series,
                        double& loglik) {
    const Matrix ld = weighted_log_densities(params, series);
    const int offset = params.spec.p();
    Responsibilities r{Matrix(ld.rows(), ld.cols()), offset};
    double total = 0.0;
    for (Eigen::Index t = 0; t < ld.rows(); ++t) {
        const double mx = ld.row(t).maxCoeff();
        if (!std::isfinite(mx))
            throw UnderflowError("e-step: every component density underflows at t=" +
                                     std::to_string(t + offset + 1),
                                 t + offset + 1);
        const double lse = mx + std::log((ld.row(t).array() - mx).exp().sum());
        r.tau.row(t) = (ld.row(t).array() - lse).exp();
        total += lse;
    }
    loglik = total;
    return r;
}

Responsibilities e_step(const MvarParameters& params, const SeriesMatrix& series) {
    double ll = 0.0;
    return e_step(params, series, ll);
}

MvarParameters m_step(const SeriesMatrix& series, const Responsibilities& resp,
                      const ModelSpec& spec) {
    spec.validate();
    const int g = spec.g, m = spec.m, p = spec.p();
    if (series.m() != m) throw DimensionError("m_step: series dimension differs from spec.m");
    if (series.n() < p + 1) throw IndexError("m_step: series shorter than p+1");
    const Eigen::Index n_eff = series.n() - p;
    if (resp.tau.rows() != n_eff || resp.tau.cols() != g)
        throw DimensionError("m_step: responsibilities have wrong shape");

    const auto& kt = kernels::active();
    const auto N = static_cast<std::size_t>(n_eff);
    const Vector ones = Vector::Ones(n_eff);

    MvarParameters out;
    out.spec = spec;
    out.components.resize(g);
    Vector mass(g);

    for (int k = 0; k < g; ++k) {
        const int pk = spec.orders[k];
        const int d = 1 + m * pk;
        const double* w = resp.tau.col(k).data();
        mass[k] = std::accumulate(w, w + N, 0.0);
        if (!(mass[k] >= d))
            throw SingularComponentError("m-step: component " + std::to_string(k) +
                                             " has effective weight " + std::to_string(mass[k]) +
                                             " below " + std::to_string(d),
                                         k);

        // Regressor columns (1, Y_{t-1}, ..., Y_{t-p_k}) as views into the series.
        std::vector<const double*> cols(static_cast<std::size_t>(d));
        cols[0] = ones.data();
        for (int i = 1; i <= pk; ++i)
            for (int l = 0; l < m; ++l)
                cols[1 + (i - 1) * m + l] = series.column_segment(l, p - i, n_eff).data();

        Matrix gram(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b <= a; ++b) gram(a, b) = gram(b, a) = kt.weighted_dot(w, cols[a], cols[b], N);
        Matrix cross(d, m);
        for (int a = 0; a < d; ++a)
            for (int j = 0; j < m; ++j)
                cross(a, j) = kt.weighted_dot(w, cols[a], series.column_segment(j, p, n_eff).data(), N);

        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14))
            throw SingularComponentError(
                "m-step: weighted normal equations of component " + std::to_string(k) + " are singular", k);
        const Matrix coef = llt.solve(cross);  // d x m, transpose of [Theta_k0 Theta_k1 ...]

        Component& c = out.components[k];
        c.intercept = coef.row(0).transpose();
        c.ar.assign(p, Matrix::Zero(m, m));
        for (int i = 1; i <= pk; ++i) c.ar[i - 1] = coef.block(1 + (i - 1) * m, 0, m, m).transpose();
        c.cov = Matrix::Identity(m, m);  // placeholder until residuals are formed
    }
    out.weights = mass / mass.sum();

    for (int k = 0; k < g; ++k) {
        const double* w = resp.tau.col(k).data();
        const Matrix e = component_residuals(out, series, k);
        Matrix cov(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j)
                cov(i, j) = cov(j, i) = kt.weighted_dot(w, e.col(i).data(), e.col(j).data(), N) / mass[k];
        out.components[k].cov = cov;
    }
    return out;
}

int parameter_count(const ModelSpec& spec) {
    const int m = spec.m;
    int d = spec.g - 1;
    for (int pk : spec.orders) d += m + m * m * pk + m * (m + 1) / 2;
    return d;
}

std::vector<int> canonical_order(const MvarParameters& params) {
    std::vector<int> perm(static_cast<std::size_t>(params.spec.g));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        if (params.weights[a] != params.weights[b]) return params.weights[a] > params.weights[b];
        const Vector& ia = params.components[a].intercept;
        const Vector& ib = params.components[b].intercept;
        return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
    });
    return perm;
}

MvarParameters permute_components(const MvarParameters& params, const std::vector<int>& perm) {
    MvarParameters out = params;
    for (std::size_t j = 0; j < perm.size(); ++j) {
        out.weights[static_cast<Eigen::Index>(j)] = params.weights[perm[j]];
        out.components[j] = params.components[perm[j]];
    }
    // Component orders travel with their components.
    for (std::size_t j = 0; j < perm.size(); ++j) out.spec.orders[j] = params.spec.orders[perm[j]];
    return out;
}

FitReport em_from(const MvarParameters& start, const SeriesMatrix& series, const EmOptions& options) {
    start.validate();
    check_series(start, series);
    if (options.max_iter < 1) throw ParameterError("em: max_iter must be >= 1");

    FitReport rep;
    MvarParameters params = start;
    Responsibilities resp;
    for (int it = 0; it < options.max_iter; ++it) {
        double ll = 0.0;
        resp = e_step(params, series, ll);
        rep.loglik_trace.push_back(ll);
        const std::size_t s = rep.loglik_trace.size();
        if (s >= 2 && std::abs(ll - rep.loglik_trace[s - 2]) < options.tol) {
            rep.converged = true;
            break;
        }
        if (it + 1 == options.max_iter) break;
        MvarParameters next = m_step(series, resp, params.spec);
        check_collapse(next);
        params = std::move(next);
    }
    rep.params = std::move(params);
    rep.responsibilities = std::move(resp);
    rep.loglik = rep.loglik_trace.back();
    rep.iterations = static_cast<int>(rep.loglik_trace.size()) - 1;
    rep.n_params = parameter_count(rep.params.spec);
    rep.n_scored = series.n() - rep.params.spec.p();
    rep.aic = -2.0 * rep.loglik + 2.0 * rep.n_params;
    rep.bic = -2.0 * rep.loglik + rep.n_params * std::log(static_cast<double>(rep.n_scored));
    return rep;
}

FitReport em_fit(const SeriesMatrix& series, const ModelSpec& spec, const InitStrategy& init,
                 const EmOptions& options) {
    spec.validate();
    if (init.starts < 1) throw ParameterError("em_fit: at least one start is required");
    if (series.m() != spec.m) throw DimensionError("em_fit: series dimension differs from spec.m");
    if (series.n() < spec.p() + 1) throw IndexError("em_fit: series shorter than p+1");

    const Eigen::Index n_eff = series.n() - spec.p();
    // With one component every start reduces to the same weighted least squares.
    const int starts = spec.g == 1 ? 1 : init.starts;

    std::optional<FitReport> best;
    std::vector<StartOutcome> outcomes;
    for (int s = 0; s < starts; ++s) {
        StartOutcome o;
        o.start = s;
        try {
            Rng rng(init.seed, static_cast<std::uint64_t>(s));
            Responsibilities r{Matrix(n_eff, spec.g), spec.p()};
            for (Eigen::Index t = 0; t < n_eff; ++t) r.tau.row(t) = rng.dirichlet_ones(spec.g).transpose();
            MvarParameters p0 = m_step(series, r, spec);
            check_collapse(p0);
            FitReport rep = em_from(p0, series, options);
            o.ok = true;
            o.loglik = rep.loglik;
            o.iterations = rep.iterations;
            o.converged = rep.converged;
            if (!best || rep.loglik > best->loglik) {
                rep.best_start = s;
                best = std::move(rep);
            }
        } catch (const Error& e) {
            o.error = e.what();
        }
        outcomes.push_back(std::move(o));
    }
    if (!best) {
        std::string msg = "em_fit: every start failed";
        if (!outcomes.empty()) msg += " (last: " + outcomes.back().error + ")";
        throw Error(msg);
    }

    const std::vector<int> perm = canonical_order(best->params);
    best->params = permute_components(best->params, perm);
    Matrix tau(best->responsibilities.tau.rows(), spec.g);
    for (int j = 0; j < spec.g; ++j) tau.col(j) = best->responsibilities.tau.col(perm[j]);
    best->responsibilities.tau = std::move(tau);
    best->starts = std::move(outcomes);
    return std::move(*best);
}

std::vector<Candidate> rank_candidates(const SeriesMatrix& series, const std::vector<ModelSpec>& specs,
                                       Criterion criterion, const InitStrategy& init,
                                       const EmOptions& options) {
    std::vector<Candidate> out;
    out.reserve(specs.size());
    for (const ModelSpec& spec : specs) {
        Candidate c;
        c.spec = spec;
        try {
            c.report = em_fit(series, spec, init, options);
            c.score = criterion == Criterion::aic ? c.report->aic : c.report->bic;
        } catch (const Error& e) {
            c.error = e.what();
        }
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.report.has_value() != b.report.has_value()) return a.report.has_value();
        return a.report && a.score < b.score;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

std::vector<Candidate> select_order(const SeriesMatrix& series, const std::vector<int>& g_range,
                                    const std::vector<int>& p_range, Criterion criterion,
                                    const InitStrategy& init, const EmOptions& options) {
    if (g_range.empty() || p_range.empty()) throw ParameterError("select_order: empty range");
    std::vector<ModelSpec> specs;
    for (int g : g_range)
        for (int p : p_range) specs.push_back(ModelSpec::uniform(g, static_cast<int>(series.m()), p));
    return rank_candidates(series, specs, criterion, init, options);
}

}  // namespace mvar
