// mvar: command-line front end for simulation, fitting, forecasting,
// portfolio construction, risk and model comparison.
//
// Exit codes: 0 success, 1 error, 2 fit finished without converging (the
// model file is still written).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvar/compare.hpp"
#include "mvar/estimation.hpp"
#include "mvar/forecasting.hpp"
#include "mvar/io.hpp"
#include "mvar/portfolio.hpp"
#include "mvar/presets.hpp"
#include "mvar/risk.hpp"
#include "mvar/simulation.hpp"

namespace fs = std::filesystem;
using namespace mvar;
using io::json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out;
    bool quiet = false;
};

struct DataArgs {
    std::string path;
    io::InputKind kind = io::InputKind::returns;
};

const std::map<std::string, io::InputKind> kKinds{{"prices", io::InputKind::prices},
                                                  {"returns", io::InputKind::returns}};

void add_data_args(CLI::App* sub, DataArgs& d) {
    sub->add_option("data", d.path, "CSV with a date column and one column per asset")->required()->check(
        CLI::ExistingFile);
    sub->add_option("--input-kind", d.kind, "prices or returns")
        ->transform(CLI::CheckedTransformer(kKinds, CLI::ignore_case))
        ->default_str("returns");
}

void emit(const json& j, const std::string& out) {
    const std::string text = j.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        io::atomic_write(out, text);
}

void say(const Globals& g, const std::string& line) {
    if (!g.quiet) std::cerr << line << '\n';
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ForecastOrigin origin_for(const MvarParameters& params, const SeriesMatrix& s, long t) {
    check_series(params, s);
    if (t == 0) t = s.n();
    if (t < params.spec.p() || t > s.n())
        throw IndexError(fmt("origin %ld outside [%d, %ld]", t, params.spec.p(), s.n()));
    return ForecastOrigin::from_series(s, t, params.spec.p());
}

void write_grid(const std::string& path, const MixtureNormal1D& mix) {
    std::ostringstream os;
    io::write_density_grid(os, mix);
    io::atomic_write(path, os.str());
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string model;
    long n = 1000;
    long burn_in = 200;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
    if (g.out.empty()) throw Error("simulate needs --out");
    const MvarParameters params = a.model.empty() ? reference_two_regime_model() : io::load_model(a.model).params;
    const SimulationResult sim = simulate({params, a.n, a.burn_in, g.seed, std::nullopt});

    std::vector<std::string> names;
    for (int i = 1; i <= params.spec.m; ++i) names.push_back("y" + std::to_string(i));
    std::ostringstream csv;
    io::write_series_csv(csv, sim.series, names);
    io::atomic_write(g.out, csv.str());

    fs::path cfg = g.out;
    cfg.replace_extension(".config.json");
    const json config = {{"params", io::to_json(params)},
                         {"n", a.n},
                         {"burn_in", a.burn_in},
                         {"seed", g.seed},
                         {"rng", kRngName},
                         {"data_hash", io::data_hash(sim.series)},
                         {"source", a.model.empty() ? std::string("reference") : a.model}};
    io::atomic_write(cfg, config.dump(2) + "\n");
    say(g, fmt("wrote %ld x %d returns to %s (config %s)", a.n, params.spec.m, g.out.c_str(), cfg.c_str()));
    return 0;
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
    DataArgs data;
    std::string spec;
    std::vector<int> sweep_g;
    std::vector<int> sweep_p;
    std::string criterion = "bic";
    int starts = 10;
    EmOptions em;
};

json diagnostics_json(const FitReport& r, const StabilityResult& st) {
    return {{"loglik", r.loglik}, {"aic", r.aic},       {"bic", r.bic},
            {"rho", st.spectral_radius}, {"iterations", r.iterations}, {"n_params", r.n_params}};
}

void print_fit(const Globals& g, const ModelSpec& spec, const FitReport& r, const StabilityResult& st) {
    say(g, fmt("%s: loglik %.6f  AIC %.4f  BIC %.4f  params %d  iterations %d%s", spec_label(spec).c_str(),
               r.loglik, r.aic, r.bic, r.n_params, r.iterations, r.converged ? "" : "  (not converged)"));
    say(g, fmt("stability: %s (rho = %.6g)", st.stable ? "stable" : "NOT stable", st.spectral_radius));
}

int run_fit(const Globals& g, const FitArgs& a) {
    if (g.out.empty()) throw Error("fit needs --out");
    const bool sweep = !a.sweep_g.empty() || !a.sweep_p.empty();
    if (sweep == !a.spec.empty()) throw Error("give exactly one of --spec or --sweep-g/--sweep-p");
    const SeriesMatrix s = io::load_series(a.data.path, a.data.kind);
    const InitStrategy init{a.starts, g.seed};
    const Criterion crit = a.criterion == "aic" ? Criterion::aic : Criterion::bic;

    json settings = {{"starts", a.starts},
                     {"max_iter", a.em.max_iter},
                     {"tol", a.em.tol},
                     {"input_kind", a.data.kind == io::InputKind::prices ? "prices" : "returns"},
                     {"n", s.n()}};
    FitReport best;
    if (!sweep) {
        const ModelSpec spec = parse_spec(a.spec, static_cast<int>(s.m()));
        settings["spec"] = spec_label(spec);
        best = em_fit(s, spec, init, a.em);
    } else {
        const std::vector<int> gs = a.sweep_g.empty() ? std::vector<int>{1} : a.sweep_g;
        const std::vector<int> ps = a.sweep_p.empty() ? std::vector<int>{1} : a.sweep_p;
        const std::vector<Candidate> ranked = select_order(s, gs, ps, crit, init, a.em);
        json table = json::array();
        say(g, fmt("%-4s %-16s %14s %14s %14s", "rank", "model", "loglik", "AIC", "BIC"));
        for (const Candidate& c : ranked) {
            json row = {{"rank", c.rank}, {"model", spec_label(c.spec)}, {"score", c.score}};
            if (c.report) {
                row.update({{"loglik", c.report->loglik}, {"aic", c.report->aic}, {"bic", c.report->bic},
                            {"converged", c.report->converged}});
                say(g, fmt("%-4d %-16s %14.4f %14.4f %14.4f%s", c.rank, spec_label(c.spec).c_str(), c.report->loglik,
                           c.report->aic, c.report->bic, c.report->converged ? "" : "  (not converged)"));
            } else {
                row["error"] = c.error;
                say(g, fmt("%-4d %-16s failed: %s", c.rank, spec_label(c.spec).c_str(), c.error.c_str()));
            }
            table.push_back(std::move(row));
        }
        if (!ranked.front().report) throw Error("every candidate failed");
        settings["criterion"] = a.criterion;
        settings["ranking"] = std::move(table);
        settings["spec"] = spec_label(ranked.front().spec);
        best = *ranked.front().report;
    }

    const StabilityResult st = is_stable(best.params);
    io::ModelFile mf;
    mf.params = best.params;
    mf.provenance.data_hash = io::data_hash(s);
    mf.provenance.fit_settings = std::move(settings);
    mf.provenance.seed = g.seed;
    mf.provenance.rng = kRngName;
    mf.provenance.created_at = io::timestamp_now();
    const json diag = diagnostics_json(best, st);
    for (const auto& [k, v] : diag.items()) mf.provenance.diagnostics[k] = v.get<double>();
    mf.provenance.diagnostics["converged"] = best.converged ? 1.0 : 0.0;
    io::save_model(g.out, mf);

    print_fit(g, best.params.spec, best, st);
    return best.converged ? 0 : 2;
}

// ---- forecast / portfolio -------------------------------------------------

struct ForecastArgs {
    DataArgs data;
    std::string model;
    long origin = 0;
    int horizon = 1;
    long paths = 100000;
    std::string grid;
    std::vector<double> weights;
};

int run_forecast(const Globals& g, const ForecastArgs& a) {
    const MvarParameters params = io::load_model(a.model).params;
    const SeriesMatrix s = io::load_series(a.data.path, a.data.kind);
    const ForecastOrigin origin = origin_for(params, s, a.origin);
    json out = {{"origin_time", origin.time}, {"horizon", a.horizon}};

    if (a.horizon <= 2) {
        const MixtureNormalMV mix = predictive_mixture(params, origin, a.horizon);
        out["method"] = "analytic";
        out["mixture"] = io::to_json(mix);
        out["moments"] = io::to_json(mixture_moments(mix));
        if (!a.grid.empty()) {
            Vector w = Vector::Constant(params.spec.m, 1.0 / params.spec.m);
            if (!a.weights.empty()) {
                if (static_cast<int>(a.weights.size()) != params.spec.m)
                    throw DimensionError(fmt("--weights needs %d values", params.spec.m));
                w = Eigen::Map<const Vector>(a.weights.data(), params.spec.m);
            }
            write_grid(a.grid, project(mix, w));
        }
    } else {
        if (!a.grid.empty()) throw Error("--density-grid needs horizon 1 or 2");
        const McForecast mc = predictive_h_step_mc(params, origin, a.horizon, a.paths, g.seed);
        out["method"] = "monte_carlo";
        out["paths"] = a.paths;
        out["seed"] = g.seed;
        out["moments"] = io::to_json(mc.moments);
    }
    emit(out, g.out);
    say(g, fmt("forecast h=%d from t=%ld", a.horizon, origin.time));
    return 0;
}

struct PortfolioArgs {
    DataArgs data;
    std::string model;
    long origin = 0;
    int horizon = 1;
    bool mvp = false;
    std::optional<double> target;
    std::string grid;
};

int run_portfolio(const Globals& g, const PortfolioArgs& a) {
    const MvarParameters params = io::load_model(a.model).params;
    const SeriesMatrix s = io::load_series(a.data.path, a.data.kind);
    const ForecastOrigin origin = origin_for(params, s, a.origin);
    const HorizonPortfolio hp = horizon_portfolio(params, origin, a.horizon, a.target);
    if (!a.grid.empty()) write_grid(a.grid, hp.returns);
    emit({{"origin_time", origin.time},
          {"solution", io::to_json(hp.solution)},
          {"moments", io::to_json(hp.moments)},
          {"return_mixture", io::to_json(hp.returns)}},
         g.out);
    say(g, fmt("%s portfolio h=%d: expected return %.6g, sd %.6g", a.target ? "efficient" : "minimum-variance",
               a.horizon, hp.solution.expected_return, hp.solution.sd));
    return 0;
}

// ---- risk -----------------------------------------------------------------

struct RiskArgs {
    std::string mixture;
    double alpha = 0.95;
    std::optional<double> observed;
};

int run_risk(const Globals& g, const RiskArgs& a) {
    std::ifstream in(a.mixture);
    if (!in) throw Error("cannot read " + a.mixture);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(a.mixture + ": " + e.what());
    }
    const MixtureNormal1D mix = io::mixture_1d_from_json(j);
    const RiskReport r = var_es(mix, a.alpha);
    json out = io::to_json(r);
    if (a.observed) out["crps"] = crps_mixture(mix, *a.observed);
    emit(out, g.out);
    say(g, fmt("VaR %.0f%%: %.6g (loss %.6g)  ES: %.6g (loss %.6g)", 100 * a.alpha, r.var, -r.var, r.es, -r.es));
    return 0;
}

// ---- compare / acf --------------------------------------------------------

struct CompareArgs {
    DataArgs data;
    std::vector<std::string> specs;
    int holdout = 2;
    double alpha = 0.95;
    int starts = 10;
    EmOptions em;
};

int run_compare(const Globals& g, const CompareArgs& a) {
    const SeriesMatrix s = io::load_series(a.data.path, a.data.kind);
    std::vector<ModelCandidate> models;
    for (const std::string& text : a.specs) {
        const ModelSpec spec = parse_spec(text, static_cast<int>(s.m()));
        models.push_back({spec_label(spec), spec});
    }
    const ComparisonReport rep = compare_models(s, models, a.holdout, a.alpha, {a.starts, g.seed}, a.em);
    emit(io::to_json(rep), g.out);
    say(g, fmt("%-16s %2s %11s %11s %11s %11s %11s %11s", "model", "h", "mean", "sd", "VaR", "ES", "realized",
               "CRPS"));
    for (const ComparisonRow& r : rep.rows) {
        if (r.ok)
            say(g, fmt("%-16s %2d %11.5g %11.5g %11.5g %11.5g %11.5g %11.5g", r.model_id.c_str(), r.horizon, r.mean,
                       r.sd, r.var, r.es, r.realized, r.crps));
        else
            say(g, fmt("%-16s %2d failed: %s", r.model_id.c_str(), r.horizon, r.error.c_str()));
    }
    return 0;
}

struct AcfArgs {
    DataArgs data;
    int max_lag = 10;
};

int run_acf(const Globals& g, const AcfArgs& a) {
    const io::AcfTable t = io::acf_ccf(io::load_series(a.data.path, a.data.kind), a.max_lag);
    emit(io::to_json(t), g.out);
    say(g, fmt("lags 0..%d, n = %ld, band +-%.4g", a.max_lag, t.n, t.band));
    return 0;
}

void add_em_args(CLI::App* sub, int& starts, EmOptions& em) {
    sub->add_option("--starts", starts, "EM random starts")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", em.max_iter, "EM iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--tol", em.tol, "Convergence threshold on the log-likelihood change")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture vector autoregression toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--out", g.out, "Output file (stdout when omitted, where allowed)");
    app.add_flag("--quiet", g.quiet, "Suppress the summary on stderr");

    std::function<int()> action;

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate a path; writes CSV and <out>.config.json");
    c_sim->add_option("--model", sim.model, "Model file (default: built-in two-regime reference model)")
        ->check(CLI::ExistingFile);
    c_sim->add_option("-n", sim.n, "Observations to keep")->capture_default_str()->check(CLI::PositiveNumber);
    c_sim->add_option("--burn-in", sim.burn_in, "Discarded leading draws")->capture_default_str();
    c_sim->callback([&] { action = [&] { return run_simulate(g, sim); }; });

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Fit by EM and write a model file");
    add_data_args(c_fit, fit.data);
    c_fit->add_option("--spec", fit.spec, "Model, e.g. \"2;1,1\", \"MVAR(2;2,1)\" or \"VAR(1)\"");
    c_fit->add_option("--sweep-g", fit.sweep_g, "Numbers of components to try")->delimiter(',');
    c_fit->add_option("--sweep-p", fit.sweep_p, "AR orders to try")->delimiter(',');
    c_fit->add_option("--criterion", fit.criterion, "Ranking criterion for sweeps")
        ->check(CLI::IsMember({"aic", "bic"}))
        ->capture_default_str();
    add_em_args(c_fit, fit.starts, fit.em);
    c_fit->callback([&] { action = [&] { return run_fit(g, fit); }; });

    ForecastArgs fc;
    auto* c_fc = app.add_subcommand("forecast", "Predictive mixture at horizon 1 or 2 (simulation beyond)");
    add_data_args(c_fc, fc.data);
    c_fc->add_option("--model", fc.model, "Model file")->required()->check(CLI::ExistingFile);
    c_fc->add_option("--origin", fc.origin, "1-based time of the last observation used (default: last row)");
    c_fc->add_option("--horizon", fc.horizon)->capture_default_str()->check(CLI::PositiveNumber);
    c_fc->add_option("--paths", fc.paths, "Simulated paths for horizons above 2")->capture_default_str();
    c_fc->add_option("--density-grid", fc.grid, "Write x,density CSV of a projected portfolio return");
    c_fc->add_option("--weights", fc.weights, "Portfolio for --density-grid (default: equal)")->delimiter(',');
    c_fc->callback([&] { action = [&] { return run_forecast(g, fc); }; });

    PortfolioArgs pf;
    auto* c_pf = app.add_subcommand("portfolio", "Markowitz portfolio from conditional moments");
    add_data_args(c_pf, pf.data);
    c_pf->add_option("--model", pf.model, "Model file")->required()->check(CLI::ExistingFile);
    c_pf->add_option("--origin", pf.origin, "1-based time of the last observation used (default: last row)");
    c_pf->add_option("--horizon", pf.horizon)->capture_default_str()->check(CLI::Range(1, 2));
    auto* o_mvp = c_pf->add_flag("--mvp", pf.mvp, "Minimum-variance portfolio (default)");
    c_pf->add_option("--target", pf.target, "Target expected return")->excludes(o_mvp);
    c_pf->add_option("--density-grid", pf.grid, "Write x,density CSV of the portfolio return");
    c_pf->callback([&] { action = [&] { return run_portfolio(g, pf); }; });

    RiskArgs rk;
    auto* c_rk = app.add_subcommand("risk", "VaR and ES of a portfolio return mixture");
    c_rk->add_option("mixture", rk.mixture, "Mixture JSON (or portfolio output)")->required()->check(
        CLI::ExistingFile);
    c_rk->add_option("--alpha", rk.alpha)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c_rk->add_option("--observed", rk.observed, "Realised return; adds its CRPS");
    c_rk->callback([&] { action = [&] { return run_risk(g, rk); }; });

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Out-of-sample comparison on the last observations");
    add_data_args(c_cmp, cmp.data);
    c_cmp->add_option("--specs", cmp.specs, "Models, e.g. \"VAR(1)\" \"MVAR(2;1,1)\"")->required();
    c_cmp->add_option("--holdout", cmp.holdout)->capture_default_str()->check(CLI::Range(2, 1000000));
    c_cmp->add_option("--alpha", cmp.alpha)->capture_default_str()->check(CLI::Range(0.0, 1.0));
    add_em_args(c_cmp, cmp.starts, cmp.em);
    c_cmp->callback([&] { action = [&] { return run_compare(g, cmp); }; });

    AcfArgs acf;
    auto* c_acf = app.add_subcommand("acf", "Auto- and cross-correlations");
    add_data_args(c_acf, acf.data);
    c_acf->add_option("--max-lag", acf.max_lag)->capture_default_str()->check(CLI::NonNegativeNumber);
    c_acf->callback([&] { action = [&] { return run_acf(g, acf); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    try {
        return action();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
