// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "mvar/compare.hpp"
#include "mvar/estimation.hpp"
#include "mvar/presets.hpp"
#include "mvar/risk.hpp"
#include "mvar/simulation.hpp"
#include "support.hpp"

namespace {

using namespace mvar;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome var_reproduction() {
    const MixtureNormal1D mix{(Vector(2) << 0.7242, 0.2758).finished(), (Vector(2) << 0.2642, -0.6939).finished(),
                              (Vector(2) << 1.2235, 1.3025).finished(), 1, 498};
    const RiskReport r = var_es(mix, 0.95);
    const double dv = std::abs(r.var - -2.2039), de = std::abs(r.es - -2.7912);
    return {dv <= 1e-3 && de <= 2e-2,
            fmt("VaR %.5f (target -2.2039, |diff| %.2e, tol 1e-3); ES %.5f (target -2.7912, |diff| %.2e, tol 2e-2)",
                r.var, dv, r.es, de)};
}

struct RecoveryError {
    double pi = 0.0, theta = 0.0, omega = 0.0;
    bool within() const { return pi <= 0.04 && theta <= 0.1 && omega <= 0.3; }
};

RecoveryError recovery_error(const MvarParameters& fit, const MvarParameters& truth) {
    RecoveryError e;
    e.pi = (fit.weights - truth.weights).cwiseAbs().maxCoeff();
    for (int k = 0; k < truth.spec.g; ++k) {
        const Component& a = fit.components[k];
        const Component& b = truth.components[k];
        e.theta = std::max({e.theta, (a.intercept - b.intercept).cwiseAbs().maxCoeff(),
                            (a.ar[0] - b.ar[0]).cwiseAbs().maxCoeff()});
        e.omega = std::max(e.omega, (a.cov - b.cov).cwiseAbs().maxCoeff());
    }
    return e;
}

// Verdict uses the EM fit only. Alongside it we report the same tolerances
// applied to the infeasible estimator that knows the regime labels, and
// whether EM reached at least the likelihood of the true parameters.
Outcome parameter_recovery() {
    const MvarParameters truth = reference_two_regime_model();
    int ok = 0, oracle_ok = 0, above_truth = 0;
    std::string worst;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const SimulationResult sim = simulate({truth, 2000, 200, seed, std::nullopt});
        const SeriesMatrix& s = sim.series;
        const FitReport fit = em_fit(s, truth.spec, {10, 1000 + seed});
        const RecoveryError e = recovery_error(fit.params, truth);
        ok += e.within();
        worst += fmt(" s%d:%s(%.3f/%.3f/%.3f)", static_cast<int>(seed), e.within() ? "ok" : "x", e.pi, e.theta,
                     e.omega);

        Responsibilities known{Matrix::Zero(s.n() - 1, 2), 1};
        for (long t = 1; t < s.n(); ++t) known.tau(t - 1, sim.labels[static_cast<std::size_t>(t)]) = 1.0;
        oracle_ok += recovery_error(m_step(s, known, truth.spec), truth).within();
        above_truth += fit.loglik >= log_likelihood(truth, s);
    }
    return {ok >= 9, fmt("%d/10 seeds within (pi 0.04 / Theta 0.1 / Omega 0.3); max errors per seed:", ok) + worst +
                         fmt("; known-label estimator within tolerance %d/10; EM loglik >= true-parameter loglik "
                             "%d/10",
                             oracle_ok, above_truth)};
}

Outcome em_monotonicity() {
    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<int> gd(1, 3), md(1, 3), pd(0, 2), nd(150, 500);
    int runs = 0, aborted = 0, violations = 0, steps = 0;
    double worst_drop = 0.0;
    while (runs < 50) {
        const int g = gd(rng), m = md(rng);
        std::vector<int> orders(static_cast<std::size_t>(g));
        for (int& o : orders) o = pd(rng);
        const MvarParameters truth = test::random_stable_model(rng, g, m, orders);
        const SeriesMatrix s = simulate({truth, nd(rng), 100, rng(), std::nullopt}).series;
        // Fitted spec drawn independently of the generating one.
        const int gf = gd(rng);
        std::vector<int> fit_orders(static_cast<std::size_t>(gf));
        for (int& o : fit_orders) o = pd(rng);
        try {
            const FitReport fit = em_fit(s, ModelSpec(gf, m, fit_orders), {1, rng()});
            for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i) {
                const double drop = fit.loglik_trace[i - 1] - fit.loglik_trace[i];
                worst_drop = std::max(worst_drop, drop);
                violations += drop > 1e-8;
                ++steps;
            }
            ++runs;
        } catch (const Error&) {
            ++aborted;  // degenerate start; no trace to check
        }
    }
    return {violations == 0, fmt("50 traces, %d EM steps, %d violations, largest decrease %.2e (tol 1e-8); %d "
                                 "degenerate starts skipped",
                                 steps, violations, worst_drop, aborted)};
}

Outcome two_step_vs_mc() {
    const MvarParameters p = reference_two_regime_model();
    const SeriesMatrix path = simulate({p, 5000, 200, 2718, std::nullopt}).series;
    std::mt19937_64 rng(1618);
    std::uniform_int_distribution<long> td(1, 5000);
    int fails = 0, comparisons = 0;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ForecastOrigin o = ForecastOrigin::from_series(path, td(rng), 1);
        const MomentPair analytic = mixture_moments(predictive_two_step(p, o));
        const auto emp = test::empirical_moments(test::simulate_two_steps(p, o, 1000000, 5000u + i));
        for (int a = 0; a < 3; ++a) {
            const double zm = std::abs(analytic.mean[a] - emp.mean[a]) / emp.mean_se[a];
            worst = std::max(worst, zm);
            fails += zm > 3.0;
            ++comparisons;
            for (int b = a; b < 3; ++b) {
                const double zc = std::abs(analytic.cov(a, b) - emp.cov(a, b)) / emp.cov_se(a, b);
                worst = std::max(worst, zc);
                fails += zc > 3.0;
                ++comparisons;
            }
        }
    }
    return {fails == 0, fmt("20 origins x 1e6 draws: %d of %d moment entries beyond 3 SE, max |z| %.2f", fails,
                            comparisons, worst)};
}

Outcome variance_identity() {
    std::mt19937_64 rng(27182);
    std::uniform_int_distribution<int> gd(1, 4), md(1, 5), pd(0, 3);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int g = gd(rng), m = md(rng);
        std::vector<int> orders(static_cast<std::size_t>(g));
        for (int& o : orders) o = pd(rng);
        const MvarParameters p = test::random_stable_model(rng, g, m, orders);
        const SeriesMatrix s = simulate({p, 60, 100, rng(), std::nullopt}).series;
        Vector w(m);
        for (int j = 0; j < m; ++j) w[j] = nd(rng);
        worst = std::max(worst, variance_identity_check(p, ForecastOrigin::from_series(s, 60, p.spec.p()), w).gap);
    }
    return {worst < 1e-8, fmt("max |w'Omega w - Var(R)| over 100 instances = %.2e (tol 1e-8)", worst)};
}

Outcome markowitz() {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> md(2, 8);
    std::normal_distribution<double> nd;
    double budget = 0, target_err = 0, frontier = 0, mvp = 0;
    for (int i = 0; i < 100; ++i) {
        const int m = md(rng);
        const Matrix cov = test::random_spd(rng, m, 0.05);
        Vector mu(m);
        for (int j = 0; j < m; ++j) mu[j] = 0.05 * nd(rng);
        const MarkowitzCoefficients k = markowitz_coefficients(mu, cov);
        const double target = k.a / k.c + 0.1 * nd(rng);
        const PortfolioSolution e = efficient_weights(mu, cov, target);
        budget = std::max(budget, std::abs(e.weights.sum() - 1.0));
        target_err = std::max(target_err, std::abs(e.weights.dot(mu) - target));
        const double var_formula = (k.c * target * target - 2 * k.a * target + k.b) / k.d;
        frontier = std::max(frontier, std::abs(e.weights.dot(cov * e.weights) - var_formula));
        const PortfolioSolution bottom = efficient_weights(mu, cov, k.a / k.c);
        mvp = std::max(mvp, (bottom.weights - mvp_weights(mu, cov).weights).cwiseAbs().maxCoeff());
    }
    return {budget <= 1e-10 && target_err <= 1e-10 && frontier <= 1e-8 && mvp <= 1e-10,
            fmt("100 problems: |sum w - 1| %.1e, |w'mu - target| %.1e (tol 1e-10); frontier variance %.1e (tol "
                "1e-8); MVP at A/C %.1e (tol 1e-10)",
                budget, target_err, frontier, mvp)};
}

Outcome crps_oracle() {
    std::mt19937_64 rng(8080);
    std::uniform_int_distribution<int> gd(1, 5);
    std::uniform_real_distribution<double> wd(0.05, 1.0), mean_d(-3.0, 3.0), sd_d(0.05, 3.0), xd(-8.0, 8.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int g = gd(rng);
        MixtureNormal1D mix{Vector(g), Vector(g), Vector(g), 1, 0};
        for (int j = 0; j < g; ++j) {
            mix.weights[j] = wd(rng);
            mix.means[j] = mean_d(rng);
            mix.sds[j] = sd_d(rng);
        }
        mix.weights /= mix.weights.sum();
        const double x = xd(rng);
        worst = std::max(worst, std::abs(crps_mixture(mix, x) - test::crps_quadrature(mix, x)));
    }
    const MixtureNormal1D n01{Vector::Ones(1), Vector::Zero(1), Vector::Ones(1), 1, 0};
    const double c = crps_mixture(n01, 0.0);
    const double exact = (std::sqrt(2.0) - 1.0) / std::sqrt(std::numbers::pi);
    const double d = std::abs(c - 0.23370);
    return {worst <= 1e-7 && d <= 1e-6,
            fmt("max |closed form - quadrature| over 200 pairs %.2e (tol 1e-7); CRPS(N(0,1), 0) = %.7f vs 0.23370 "
                "|diff| %.2e (tol 1e-6); vs (sqrt2-1)/sqrt(pi) |diff| %.1e",
                worst, c, d, std::abs(c - exact))};
}

Outcome comparison_propriety() {
    const MvarParameters truth = reference_two_regime_model();
    const long train_n = 1000, count = 200;
    const SeriesMatrix s = simulate({truth, train_n + count + 1, 200, 606, std::nullopt}).series;
    const RollingEvaluation ev = rolling_evaluation(
        s, {{"MVAR(2;1,1)", truth.spec}, {"VAR(1)", ModelSpec(1, 3, {1})}}, train_n, count, {10, 77});
    std::string detail;
    bool pass = true;
    for (int h = 1; h <= 2; ++h) {
        const Matrix& c = h == 1 ? ev.crps_h1 : ev.crps_h2;
        const Vector d = c.col(1) - c.col(0);  // VAR minus MVAR
        const double mean = d.mean();
        const double se = std::sqrt((d.array() - mean).square().sum() / (count - 1) / count);
        pass = pass && mean > 3.0 * se;
        detail += fmt("h=%d: mean CRPS MVAR %.5f, VAR %.5f, paired diff %.5f, SE %.5f, z %.2f; ", h, c.col(0).mean(),
                      c.col(1).mean(), mean, se, mean / se);
    }
    return {pass, detail + "200 origins, need z > 3"};
}

Outcome stability() {
    MvarParameters ar1 = MvarParameters::zeros(ModelSpec(1, 1, {1}));
    ar1.components[0].ar[0](0, 0) = 0.7;
    const double rho_ar1 = is_stable(ar1).spectral_radius;
    const double rho_zero = is_stable(MvarParameters::zeros(ModelSpec(2, 3, {2, 1}))).spectral_radius;
    const MvarParameters p = reference_two_regime_model();
    const Matrix op = 0.75 * test::kron(p.components[0].ar[0], p.components[0].ar[0]) +
                      0.25 * test::kron(p.components[1].ar[0], p.components[1].ar[0]);
    const double oracle = test::lapack_spectral_radius(op);
    const StabilityResult r = is_stable(p);
    const bool pass = std::abs(rho_ar1 - 0.49) < 1e-14 && rho_zero == 0.0 && r.stable &&
                      std::abs(r.spectral_radius - oracle) < 1e-10;
    return {pass, fmt("AR(1) theta=0.7: rho %.15f (0.49); zero Theta: rho %g; reference model stable=%d rho %.12f vs "
                      "LAPACK dgeev %.12f (|diff| %.1e, tol 1e-10)",
                      rho_ar1, rho_zero, r.stable ? 1 : 0, r.spectral_radius, oracle,
                      std::abs(r.spectral_radius - oracle))};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "VaR/ES reproduction", 1.0, var_reproduction},
        {2, "parameter recovery", 120.0, parameter_recovery},
        {3, "EM monotonicity", 300.0, em_monotonicity},
        {4, "two-step analytic vs Monte Carlo", 120.0, two_step_vs_mc},
        {5, "variance identity", 60.0, variance_identity},
        {6, "Markowitz correctness", 60.0, markowitz},
        {7, "CRPS oracle equivalence", 60.0, crps_oracle},
        {8, "model-comparison propriety", 600.0, comparison_propriety},
        {9, "stability criterion", 60.0, stability},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] criterion %d %s: %s; %.2fs (budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%d of 9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
