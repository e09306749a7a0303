#pragma once
// EM estimation for mixture vector autoregressions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvar/model.hpp"

namespace mvar {

inline constexpr double kCollapseEigenvalue = 1e-12;

/// Posterior component probabilities for the scored rows t = p..n-1.
struct Responsibilities {
    Matrix tau;       // (n - p) x g, row-stochastic
    int offset = 0;   // p: row i of tau is series row offset + i
};

struct InitStrategy {
    int starts = 10;
    std::uint64_t seed = 0;
};

struct EmOptions {
    int max_iter = 500;
    double tol = 1e-8;  // absolute change in log-likelihood
};

struct StartOutcome {
    int start = 0;
    bool ok = false;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string error;
};

struct FitReport {
    MvarParameters params;
    double loglik = 0.0;
    std::vector<double> loglik_trace;
    int iterations = 0;
    bool converged = false;
    Responsibilities responsibilities;
    int n_params = 0;
    long n_scored = 0;  // n - p
    double aic = 0.0;
    double bic = 0.0;
    int best_start = 0;
    std::vector<StartOutcome> starts;
};

/// E-step: tau_tk proportional to pi_k phi(Y_t; mu_tk, Omega_k), in log space.
/// Throws UnderflowError naming the (1-based) time when every density vanishes.
Responsibilities e_step(const MvarParameters& params, const SeriesMatrix& series);

/// E-step that also returns the log-likelihood of params.
Responsibilities e_step(const MvarParameters& params, const SeriesMatrix& series,
                        double& loglik);

/// M-step: weighted least squares per component. Throws
/// SingularComponentError when a component's weighted design is singular.
MvarParameters m_step(const SeriesMatrix& series, const Responsibilities& tau,
                      const ModelSpec& spec);

/// Free parameters: (g - 1) + sum_k (m + m^2 p_k + m(m+1)/2).
int parameter_count(const ModelSpec& spec);

/// Reorder components by descending weight (ties: lexicographic intercept).
/// Returns the permutation applied (new index -> old index).
std::vector<int> canonical_order(const MvarParameters& params);
MvarParameters permute_components(const MvarParameters& params, const std::vector<int>& perm);

/// EM from a given starting point. Throws ComponentCollapseError or
/// SingularComponentError if the run degenerates.
FitReport em_from(const MvarParameters& start, const SeriesMatrix& series,
                  const EmOptions& options = {});

/// Multi-start EM. Each start draws Dirichlet(1) responsibility rows from
/// the stream (seed, start index) and runs one M-step to get its initial
/// parameters. The best final log-likelihood wins. Throws Error if every
/// start fails.
FitReport em_fit(const SeriesMatrix& series, const ModelSpec& spec, const InitStrategy& init = {},
                 const EmOptions& options = {});

enum class Criterion { aic, bic };

struct Candidate {
    ModelSpec spec;
    std::optional<FitReport> report;
    std::string error;
    double score = 0.0;
    int rank = 0;  // 1-based; failed candidates rank after every success
};

/// Fits every (g, p) pair with uniform orders and ranks ascending by the
/// criterion. Per-candidate failures are recorded, never thrown.
std::vector<Candidate> select_order(const SeriesMatrix& series, const std::vector<int>& g_range,
                                    const std::vector<int>& p_range, Criterion criterion,
                                    const InitStrategy& init = {}, const EmOptions& options = {});

/// Same, over an explicit candidate list.
std::vector<Candidate> rank_candidates(const SeriesMatrix& series,
                                       const std::vector<ModelSpec>& specs, Criterion criterion,
                                       const InitStrategy& init = {},
                                       const EmOptions& options = {});

}  // namespace mvar
