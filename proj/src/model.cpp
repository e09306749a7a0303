#include "mvar/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mvar/kernels.hpp"

namespace mvar {

ModelSpec::ModelSpec(int g_, int m_, std::vector<int> orders_)
    : g(g_), m(m_), orders(std::move(orders_)) {
    validate();
}

ModelSpec ModelSpec::uniform(int g, int m, int p) {
    return ModelSpec(g, m, std::vector<int>(static_cast<std::size_t>(std::max(g, 0)), p));
}

int ModelSpec::p() const {
    return orders.empty() ? 0 : *std::max_element(orders.begin(), orders.end());
}

void ModelSpec::validate() const {
    if (g < 1) throw ParameterError("model spec: g must be >= 1");
    if (m < 1) throw ParameterError("model spec: m must be >= 1");
    if (orders.size() != static_cast<std::size_t>(g))
        throw ParameterError("model spec: expected " + std::to_string(g) + " orders, got " +
                             std::to_string(orders.size()));
    for (int pk : orders)
        if (pk < 0) throw ParameterError("model spec: negative autoregressive order");
}

MvarParameters MvarParameters::zeros(const ModelSpec& spec) {
    spec.validate();
    MvarParameters out;
    out.spec = spec;
    out.weights = Vector::Constant(spec.g, 1.0 / spec.g);
    out.components.resize(spec.g);
    for (auto& c : out.components) {
        c.intercept = Vector::Zero(spec.m);
        c.ar.assign(spec.p(), Matrix::Zero(spec.m, spec.m));
        c.cov = Matrix::Identity(spec.m, spec.m);
    }
    return out;
}

bool is_spd(const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) return false;
    if (!cov.allFinite()) return false;
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) return false;
    Eigen::LLT<Matrix> llt(cov);
    return llt.info() == Eigen::Success;
}

void MvarParameters::validate(bool allow_zero_weights) const {
    spec.validate();
    const int g = spec.g, m = spec.m, p = spec.p();
    if (weights.size() != g) throw DimensionError("weights: expected length " + std::to_string(g));
    if (static_cast<int>(components.size()) != g)
        throw DimensionError("components: expected " + std::to_string(g));
    double sum = 0.0;
    for (int k = 0; k < g; ++k) {
        const double w = weights[k];
        if (!std::isfinite(w) || w < 0.0 || (!allow_zero_weights && w == 0.0))
            throw ParameterError("mixing weight " + std::to_string(k) + " must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol)
        throw ParameterError("mixing weights must sum to 1");
    for (int k = 0; k < g; ++k) {
        const Component& c = components[k];
        if (c.intercept.size() != m) throw DimensionError("intercept has wrong length");
        if (static_cast<int>(c.ar.size()) != p)
            throw DimensionError("component " + std::to_string(k) + ": expected " +
                                 std::to_string(p) + " AR matrices");
        for (int i = 0; i < p; ++i) {
            if (c.ar[i].rows() != m || c.ar[i].cols() != m)
                throw DimensionError("AR matrix has wrong shape");
            if (!c.ar[i].allFinite()) throw ParameterError("AR matrix not finite");
            if (i >= spec.orders[k] && !c.ar[i].isZero(0.0))
                throw ParameterError("component " + std::to_string(k) + ": AR lag " +
                                     std::to_string(i + 1) + " exceeds its order and must be zero");
        }
        if (!c.intercept.allFinite()) throw ParameterError("intercept not finite");
        if (c.cov.rows() != m || c.cov.cols() != m) throw DimensionError("covariance has wrong shape");
        if (!is_spd(c.cov))
            throw NotSpdError("covariance of component " + std::to_string(k) +
                              " is not symmetric positive definite");
    }
}

SeriesMatrix::SeriesMatrix(Matrix values) : values_(std::move(values)) {
    if (!values_.allFinite()) throw ParameterError("series contains non-finite values");
}

SeriesMatrix SeriesMatrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return SeriesMatrix{};
    Matrix v(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (rows[t].size() != v.cols()) throw DimensionError("ragged series rows");
        v.row(static_cast<Eigen::Index>(t)) = rows[t].transpose();
    }
    return SeriesMatrix(std::move(v));
}

SeriesMatrix SeriesMatrix::head(Eigen::Index rows) const {
    if (rows < 0 || rows > n()) throw IndexError("head: row count out of range");
    return SeriesMatrix(values_.topRows(rows));
}

ForecastOrigin ForecastOrigin::from_series(const SeriesMatrix& series, long t, int p) {
    if (t < p || t > series.n())
        throw IndexError("forecast origin t=" + std::to_string(t) + " needs " + std::to_string(p) +
                         " observations within a series of length " + std::to_string(series.n()));
    ForecastOrigin o;
    o.time = t;
    for (long s = t - p; s < t; ++s) o.history.push_back(series.row(s));
    return o;
}

CovarianceFactor::CovarianceFactor(const Matrix& cov) {
    if (!is_spd(cov)) throw NotSpdError("covariance is not symmetric positive definite");
    llt.compute(cov);
    lower = llt.matrixL();
    log_det = 2.0 * lower.diagonal().array().log().sum();
}

void check_series(const MvarParameters& params, const SeriesMatrix& series) {
    if (series.m() != params.spec.m)
        throw DimensionError("series has " + std::to_string(series.m()) + " columns, model has m=" +
                             std::to_string(params.spec.m));
    if (series.n() < params.spec.p() + 1)
        throw IndexError("series length " + std::to_string(series.n()) + " is below p+1");
}

Vector component_residual(const MvarParameters& params, const SeriesMatrix& series,
                          Eigen::Index t, int k) {
    if (series.m() != params.spec.m) throw DimensionError("series dimension differs from spec.m");
    const int p = params.spec.p();
    if (t < p || t >= series.n()) throw IndexError("component_residual: t out of range");
    if (k < 0 || k >= params.spec.g) throw IndexError("component_residual: k out of range");
    const Component& c = params.components[k];
    Vector e = series.row(t) - c.intercept;
    for (int i = 1; i <= params.spec.orders[k]; ++i) e -= c.ar[i - 1] * series.row(t - i);
    return e;
}

Matrix component_residuals(const MvarParameters& params, const SeriesMatrix& series, int k) {
    const int p = params.spec.p(), m = params.spec.m;
    const Eigen::Index n_eff = series.n() - p;
    const Component& c = params.components[k];
    Matrix e(n_eff, m);
    for (int j = 0; j < m; ++j) {
        auto target = std::span<double>(e.col(j).data(), static_cast<std::size_t>(n_eff));
        auto own = series.column_segment(j, p, n_eff);
        for (Eigen::Index t = 0; t < n_eff; ++t) target[t] = own[t] - c.intercept[j];
        for (int i = 1; i <= params.spec.orders[k]; ++i) {
            for (int l = 0; l < m; ++l) {
                const double coef = c.ar[i - 1](j, l);
                if (coef != 0.0) kernels::axpy(-coef, series.column_segment(l, p - i, n_eff), target);
            }
        }
    }
    return e;
}

Matrix weighted_log_densities(const MvarParameters& params, const SeriesMatrix& series) {
    check_series(params, series);
    const int g = params.spec.g, m = params.spec.m;
    const Eigen::Index n_eff = series.n() - params.spec.p();
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    const auto& kt = kernels::active();
    Matrix out(n_eff, g);
    Vector q(n_eff);
    std::vector<double> scratch(4 * static_cast<std::size_t>(m));
    for (int k = 0; k < g; ++k) {
        const CovarianceFactor f(params.components[k].cov);
        const Matrix e = component_residuals(params, series, k);
        kt.mahalanobis_sq(f.lower.data(), static_cast<std::size_t>(m), e.data(),
                          static_cast<std::size_t>(n_eff), q.data(), scratch.data());
        const double log_w = params.weights[k] > 0.0 ? std::log(params.weights[k])
                                                     : -std::numeric_limits<double>::infinity();
        out.col(k) = (log_w - 0.5 * (m * log_2pi + f.log_det)) - 0.5 * q.array();
    }
    return out;
}

double log_likelihood(const MvarParameters& params, const SeriesMatrix& series) {
    const Matrix ld = weighted_log_densities(params, series);
    const long offset = params.spec.p();
    double total = 0.0;
    for (Eigen::Index t = 0; t < ld.rows(); ++t) {
        const double mx = ld.row(t).maxCoeff();
        if (!std::isfinite(mx))
            throw UnderflowError("log-likelihood: all component densities vanish at t=" +
                                     std::to_string(t + offset + 1),
                                 t + offset + 1);
        total += mx + std::log((ld.row(t).array() - mx).exp().sum());
    }
    if (!std::isfinite(total)) throw ParameterError("log-likelihood is not finite");
    return total;
}

Matrix companion_matrix(const MvarParameters& params, int k) {
    const int p = params.spec.p(), m = params.spec.m;
    if (p < 1) throw ParameterError("companion matrix requires p >= 1");
    if (k < 0 || k >= params.spec.g) throw IndexError("companion_matrix: k out of range");
    Matrix a = Matrix::Zero(m * p, m * p);
    for (int i = 0; i < p; ++i) a.block(0, i * m, m, m) = params.components[k].ar[i];
    if (p > 1) a.block(m, 0, m * (p - 1), m * (p - 1)).setIdentity();
    return a;
}

Matrix second_moment_operator(const MvarParameters& params) {
    const int d = params.spec.m * params.spec.p();
    Matrix out = Matrix::Zero(d * d, d * d);
    for (int k = 0; k < params.spec.g; ++k) {
        const Matrix a = companion_matrix(params, k);
        const double w = params.weights[k];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (a(i, j) != 0.0) out.block(i * d, j * d, d, d) += (w * a(i, j)) * a;
    }
    return out;
}

StabilityResult is_stable(const MvarParameters& params) {
    params.validate(true);
    if (params.spec.p() == 0) return {true, 0.0};
    const Matrix op = second_moment_operator(params);
    Eigen::EigenSolver<Matrix> solver(op, false);
    if (solver.info() != Eigen::Success)
        throw EigenSolverError("eigenvalue computation did not converge");
    const double rho = solver.eigenvalues().cwiseAbs().maxCoeff();
    return {rho < 1.0 - kStabilityTol, rho};
}

}  // namespace mvar
