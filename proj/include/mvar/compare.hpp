#pragma once
// Out-of-sample model comparison through minimum-variance portfolios.
//
// Each model is fitted on the training prefix only. From the last training
// observation (the origin) it forecasts horizons 1 and 2, builds the MVP
// from the conditional moments, and scores the projected return mixture
// against the realised portfolio return. A plain VAR(p) is the g = 1 case.

#include <string>
#include <vector>

#include "mvar/estimation.hpp"
#include "mvar/risk.hpp"

namespace mvar {

struct ModelCandidate {
    std::string id;
    ModelSpec spec;
};

/// "MVAR(g;p1,...,pg)", or "VAR(p)" when g = 1.
std::string spec_label(const ModelSpec& spec);

/// Parses "g;p1,...,pg", "MVAR(g;p1,...,pg)" or "VAR(p)" for an m-variate series.
ModelSpec parse_spec(const std::string& text, int m);

struct ComparisonRow {
    std::string model_id;
    int horizon = 1;
    long origin_time = 0;  // 1-based time of the last training observation
    long target_time = 0;
    bool ok = false;
    std::string error;
    Vector weights;
    double mean = 0.0;
    double sd = 0.0;
    double var = 0.0;
    double es = 0.0;
    double realized = 0.0;
    double crps = 0.0;
};

struct ComparisonReport {
    double alpha = 0.95;
    long n = 0;
    long train_n = 0;
    std::vector<ComparisonRow> rows;  // model-major, horizons 1 then 2
};

/// Fits every candidate on Y_1..Y_{n-holdout} and scores horizons 1 and 2
/// against Y_{n-holdout+1}, Y_{n-holdout+2}. holdout must be >= 2.
/// Per-model failures are recorded in the rows; the run continues.
ComparisonReport compare_models(const SeriesMatrix& series, const std::vector<ModelCandidate>& models,
                                int holdout = 2, double alpha = 0.95, const InitStrategy& init = {},
                                const EmOptions& options = {});

struct RollingEvaluation {
    std::vector<std::string> model_ids;
    std::vector<long> origins;  // 1-based origin times
    Matrix crps_h1;             // origins x models
    Matrix crps_h2;
};

/// Fits every candidate once on Y_1..Y_{train_n}, then evaluates MVP return
/// forecasts at horizons 1 and 2 from origins train_n, ..., train_n + count - 1.
/// Throws if a candidate cannot be fitted.
RollingEvaluation rolling_evaluation(const SeriesMatrix& series, const std::vector<ModelCandidate>& models,
                                     long train_n, long count, const InitStrategy& init = {},
                                     const EmOptions& options = {});

}  // namespace mvar
