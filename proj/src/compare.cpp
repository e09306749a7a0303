#include "mvar/compare.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "mvar/portfolio.hpp"

namespace mvar {
namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(item, &used);
        if (used != item.size()) throw ParseError("bad integer '" + item + "'");
        out.push_back(v);
    }
    return out;
}

ComparisonRow score_horizon(const std::string& id, const MvarParameters& params, const ForecastOrigin& origin,
                            int horizon, const Vector& realized_y, double alpha) {
    ComparisonRow row;
    row.model_id = id;
    row.horizon = horizon;
    row.origin_time = origin.time;
    row.target_time = origin.time + horizon;
    const HorizonPortfolio hp = horizon_portfolio(params, origin, horizon, std::nullopt);
    const ScalarMoments mom = scalar_mixture_moments(hp.returns);
    const RiskReport risk = var_es(hp.returns, alpha);
    row.weights = hp.solution.weights;
    row.mean = mom.mean;
    row.sd = std::sqrt(mom.variance);
    row.var = risk.var;
    row.es = risk.es;
    row.realized = row.weights.dot(realized_y);
    row.crps = crps_mixture(hp.returns, row.realized);
    row.ok = true;
    return row;
}

}  // namespace

std::string spec_label(const ModelSpec& spec) {
    if (spec.g == 1) return "VAR(" + std::to_string(spec.orders.front()) + ")";
    std::string s = "MVAR(" + std::to_string(spec.g) + ";";
    for (std::size_t k = 0; k < spec.orders.size(); ++k) s += (k ? "," : "") + std::to_string(spec.orders[k]);
    return s + ")";
}

ModelSpec parse_spec(const std::string& text, int m) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    try {
        if (s.rfind("VAR(", 0) == 0 && s.back() == ')') {
            const auto orders = parse_int_list(s.substr(4, s.size() - 5));
            if (orders.size() != 1) throw ParseError("VAR(p) takes one order");
            return ModelSpec(1, m, orders);
        }
        if (s.rfind("MVAR(", 0) == 0 && s.back() == ')') s = s.substr(5, s.size() - 6);
        const auto semi = s.find(';');
        if (semi == std::string::npos) throw ParseError("expected g;p1,...,pg");
        const int g = std::stoi(s.substr(0, semi));
        auto orders = parse_int_list(s.substr(semi + 1));
        if (orders.size() == 1 && g > 1) orders.assign(static_cast<std::size_t>(g), orders.front());
        return ModelSpec(g, m, orders);
    } catch (const std::logic_error&) {
        throw ParseError("cannot parse model spec '" + text + "'");
    }
}

ComparisonReport compare_models(const SeriesMatrix& series, const std::vector<ModelCandidate>& models,
                                int holdout, double alpha, const InitStrategy& init, const EmOptions& options) {
    if (holdout < 2) throw ParameterError("compare: holdout must be at least 2");
    if (series.n() <= holdout) throw IndexError("compare: series shorter than the holdout");
    ComparisonReport rep;
    rep.alpha = alpha;
    rep.n = series.n();
    rep.train_n = series.n() - holdout;
    const SeriesMatrix train = series.head(rep.train_n);

    for (const ModelCandidate& model : models) {
        try {
            const FitReport fit = em_fit(train, model.spec, init, options);
            const ForecastOrigin origin = ForecastOrigin::from_series(train, rep.train_n, fit.params.spec.p());
            for (int h = 1; h <= 2; ++h)
                rep.rows.push_back(score_horizon(model.id, fit.params, origin, h,
                                                 series.row(rep.train_n + h - 1), alpha));
        } catch (const Error& e) {
            for (int h = 1; h <= 2; ++h) {
                ComparisonRow row;
                row.model_id = model.id;
                row.horizon = h;
                row.origin_time = rep.train_n;
                row.target_time = rep.train_n + h;
                row.error = e.what();
                rep.rows.push_back(std::move(row));
            }
        }
    }
    return rep;
}

RollingEvaluation rolling_evaluation(const SeriesMatrix& series, const std::vector<ModelCandidate>& models,
                                     long train_n, long count, const InitStrategy& init, const EmOptions& options) {
    if (count < 1) throw ParameterError("rolling evaluation needs at least one origin");
    if (train_n + count + 1 > series.n())
        throw IndexError("rolling evaluation: origins run past the end of the series");
    RollingEvaluation out;
    out.crps_h1.resize(count, static_cast<Eigen::Index>(models.size()));
    out.crps_h2.resize(count, static_cast<Eigen::Index>(models.size()));
    for (long i = 0; i < count; ++i) out.origins.push_back(train_n + i);

    const SeriesMatrix train = series.head(train_n);
    for (std::size_t j = 0; j < models.size(); ++j) {
        out.model_ids.push_back(models[j].id);
        const FitReport fit = em_fit(train, models[j].spec, init, options);
        const int p = fit.params.spec.p();
        for (long i = 0; i < count; ++i) {
            const long t = out.origins[static_cast<std::size_t>(i)];
            const ForecastOrigin origin = ForecastOrigin::from_series(series, t, p);
            const auto col = static_cast<Eigen::Index>(j);
            out.crps_h1(i, col) = score_horizon(models[j].id, fit.params, origin, 1, series.row(t), 0.95).crps;
            out.crps_h2(i, col) = score_horizon(models[j].id, fit.params, origin, 2, series.row(t + 1), 0.95).crps;
        }
    }
    return out;
}

}  // namespace mvar
