#pragma once
// Test-only oracles. Everything here is written independently of the
// library's implementation paths: direct density sums instead of log-space
// kernels, QR instead of normal equations, LAPACK instead of Eigen for
// eigenvalues, std::normal_distribution instead of the library's sampler.

#include <lapacke.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "mvar/forecasting.hpp"
#include "mvar/model.hpp"
#include "mvar/portfolio.hpp"

namespace mvar::test {

inline double gaussian_density(const Vector& x, const Vector& mu, const Matrix& cov) {
    const Eigen::Index m = x.size();
    const Matrix inv = cov.inverse();
    const Vector d = x - mu;
    const double q = d.dot(inv * d);
    return std::exp(-0.5 * q) / std::sqrt(std::pow(2.0 * std::numbers::pi, static_cast<double>(m)) * cov.determinant());
}

/// Y_t - Theta_k0 - sum Theta_ki Y_{t-i}, written out element by element.
inline Vector naive_residual(const MvarParameters& params, const SeriesMatrix& s, Eigen::Index t, int k) {
    const int m = params.spec.m;
    Vector e(m);
    for (int j = 0; j < m; ++j) {
        double v = s.values()(t, j) - params.components[k].intercept[j];
        for (int i = 1; i <= params.spec.orders[k]; ++i)
            for (int l = 0; l < m; ++l) v -= params.components[k].ar[i - 1](j, l) * s.values()(t - i, l);
        e[j] = v;
    }
    return e;
}

/// Double loop over t and k with plain densities.
inline double naive_log_likelihood(const MvarParameters& params, const SeriesMatrix& s) {
    double ll = 0.0;
    for (Eigen::Index t = params.spec.p(); t < s.n(); ++t) {
        double f = 0.0;
        for (int k = 0; k < params.spec.g; ++k) {
            const Vector mu = s.row(t) - naive_residual(params, s, t, k);
            f += params.weights[k] * gaussian_density(s.row(t), mu, params.components[k].cov);
        }
        ll += std::log(f);
    }
    return ll;
}

/// Spectral radius of a general square matrix via LAPACK dgeev.
inline double lapack_spectral_radius(const Matrix& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Matrix copy = a;  // column-major
    std::vector<double> wr(n), wi(n);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, copy.data(), n, wr.data(), wi.data(),
                                          nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("dgeev failed");
    double rho = 0.0;
    for (lapack_int i = 0; i < n; ++i) rho = std::max(rho, std::hypot(wr[i], wi[i]));
    return rho;
}

/// Kronecker product written from its definition.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Weighted least squares by Householder QR on sqrt(w)-scaled rows.
inline Matrix wls_qr(const Matrix& x, const Matrix& y, const Vector& w) {
    const Vector sw = w.array().sqrt();
    const Matrix xs = sw.asDiagonal() * x;
    const Matrix ys = sw.asDiagonal() * y;
    return xs.householderQr().solve(ys);
}

inline Matrix random_spd(std::mt19937_64& rng, int m, double ridge = 0.3) {
    std::normal_distribution<double> nd;
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = nd(rng);
    Matrix s = a * a.transpose() / m + ridge * Matrix::Identity(m, m);
    return 0.5 * (s + s.transpose());
}

/// Random model whose companion blocks are scaled down until stable.
inline MvarParameters random_stable_model(std::mt19937_64& rng, int g, int m, std::vector<int> orders) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.2, 1.0);
    MvarParameters p = MvarParameters::zeros(ModelSpec(g, m, orders));
    Vector w(g);
    for (int k = 0; k < g; ++k) w[k] = ud(rng);
    p.weights = w / w.sum();
    for (int k = 0; k < g; ++k) {
        for (int j = 0; j < m; ++j) p.components[k].intercept[j] = 0.5 * nd(rng);
        for (int i = 0; i < orders[k]; ++i)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) p.components[k].ar[i](a, b) = 0.4 * nd(rng) / m;
        p.components[k].cov = random_spd(rng, m);
    }
    for (int guard = 0; guard < 50 && p.spec.p() > 0 && !is_stable(p).stable; ++guard)
        for (auto& c : p.components)
            for (auto& a : c.ar) a *= 0.8;
    return p;
}

/// Draws from a multivariate mixture with its own RNG and Cholesky factors.
inline Matrix sample_mixture(const MixtureNormalMV& mix, long n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::discrete_distribution<int> pick(mix.weights.begin(), mix.weights.end());
    std::vector<Matrix> chol;
    for (const auto& c : mix.covs) chol.push_back(Eigen::LLT<Matrix>(c).matrixL());
    const Eigen::Index m = mix.means.front().size();
    Matrix out(n, m);
    Vector z(m);
    for (long r = 0; r < n; ++r) {
        const int j = pick(rng);
        for (Eigen::Index i = 0; i < m; ++i) z[i] = nd(rng);
        out.row(r) = (mix.means[j] + chol[j] * z).transpose();
    }
    return out;
}

/// Y_{t+2} draws obtained by stepping the model twice from the origin.
inline Matrix simulate_two_steps(const MvarParameters& params, const ForecastOrigin& origin, long n,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::discrete_distribution<int> pick(params.weights.begin(), params.weights.end());
    const int m = params.spec.m, p = params.spec.p();
    std::vector<Matrix> chol;
    for (const auto& c : params.components) chol.push_back(Eigen::LLT<Matrix>(c.cov).matrixL());
    auto draw = [&](const std::vector<Vector>& hist) {
        const int k = pick(rng);
        Vector y = params.components[k].intercept;
        for (int i = 1; i <= params.spec.orders[k]; ++i) y += params.components[k].ar[i - 1] * hist[hist.size() - i];
        Vector z(m);
        for (int i = 0; i < m; ++i) z[i] = nd(rng);
        return Vector(y + chol[k] * z);
    };
    Matrix out(n, m);
    for (long r = 0; r < n; ++r) {
        std::vector<Vector> hist = origin.history;
        hist.push_back(draw(hist));
        if (p == 0) hist.erase(hist.begin());
        out.row(r) = draw(hist).transpose();
    }
    return out;
}

/// Sample mean/covariance with Monte Carlo standard errors of each entry.
struct EmpiricalMoments {
    Vector mean, mean_se;
    Matrix cov, cov_se;
};

inline EmpiricalMoments empirical_moments(const Matrix& x) {
    const double n = static_cast<double>(x.rows());
    const Eigen::Index m = x.cols();
    EmpiricalMoments e;
    e.mean = x.colwise().mean().transpose();
    const Matrix c = x.rowwise() - e.mean.transpose();
    e.cov = (c.transpose() * c) / n;
    e.mean_se = (e.cov.diagonal() / n).array().sqrt();
    e.cov_se.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::ArrayXd prod = c.col(i).array() * c.col(j).array();
            const double var = (prod - e.cov(i, j)).square().mean();
            e.cov_se(i, j) = std::sqrt(var / n);
        }
    return e;
}

/// max over entries of |analytic - empirical| / se.
inline double max_z(const MomentPair& analytic, const EmpiricalMoments& emp) {
    double z = 0.0;
    for (Eigen::Index i = 0; i < analytic.mean.size(); ++i) {
        z = std::max(z, std::abs(analytic.mean[i] - emp.mean[i]) / emp.mean_se[i]);
        for (Eigen::Index j = 0; j < analytic.mean.size(); ++j)
            z = std::max(z, std::abs(analytic.cov(i, j) - emp.cov(i, j)) / emp.cov_se(i, j));
    }
    return z;
}

/// CRPS from its integral definition, int (F(y) - 1{y >= x})^2 dy, by
/// adaptive Gauss-Kronrod on either side of the observation.
inline double crps_quadrature(const MixtureNormal1D& mix, double x) {
    auto F = [&](double y) {
        double f = 0.0;
        for (Eigen::Index j = 0; j < mix.size(); ++j)
            f += mix.weights[j] * 0.5 * std::erfc(-(y - mix.means[j]) / (mix.sds[j] * std::numbers::sqrt2));
        return f;
    };
    const double smax = mix.sds.maxCoeff();
    const double lo = std::min(mix.means.minCoeff() - 12.0 * smax, x);
    const double hi = std::max(mix.means.maxCoeff() + 12.0 * smax, x);
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double left = gauss_kronrod<double, 61>::integrate([&](double y) { const double f = F(y); return f * f; },
                                                            lo, x, 20, 1e-14, &err);
    const double right = gauss_kronrod<double, 61>::integrate(
        [&](double y) { const double f = 1.0 - F(y); return f * f; }, x, hi, 20, 1e-14, &err);
    return left + right;
}

/// Kolmogorov distance between the empirical CDF of draws and a mixture CDF.
template <class Cdf>
double kolmogorov_distance(std::vector<double> draws, Cdf cdf) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double f = cdf(draws[i]);
        d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    return d;
}

}  // namespace mvar::test
