#pragma once
// Mixture vector autoregressive model objects.
//
// A model with g Gaussian components on an m-dimensional series Y_t has
// conditional law
//
//     Y_t | F_{t-1}  ~  sum_k pi_k N( Theta_k0 + sum_{i<=p_k} Theta_ki Y_{t-i}, Omega_k ).
//
// Time is 1-based in public APIs that talk about "time t" (as in a forecast
// origin), and 0-based for row indices into a SeriesMatrix.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "mvar/errors.hpp"

namespace mvar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kStabilityTol = 1e-10;

struct ModelSpec {
    int g = 1;
    int m = 1;
    std::vector<int> orders{0};

    ModelSpec() = default;
    ModelSpec(int g, int m, std::vector<int> orders);

    /// Every component gets the same order p.
    static ModelSpec uniform(int g, int m, int p);

    int p() const;  // max order
    void validate() const;

    bool operator==(const ModelSpec&) const = default;
};

/// One Gaussian regime: intercept, p AR matrices (zero beyond its own order)
/// and innovation covariance.
struct Component {
    Vector intercept;
    std::vector<Matrix> ar;
    Matrix cov;

    bool operator==(const Component& o) const {
        if (ar.size() != o.ar.size()) return false;
        for (std::size_t i = 0; i < ar.size(); ++i)
            if (ar[i] != o.ar[i]) return false;
        return intercept == o.intercept && cov == o.cov;
    }
};

struct MvarParameters {
    ModelSpec spec;
    Vector weights;
    std::vector<Component> components;

    /// Zero-filled parameters of the right shape with equal weights and
    /// identity covariances.
    static MvarParameters zeros(const ModelSpec& spec);

    /// Throws ParameterError / DimensionError / NotSpdError. Zero weights are
    /// accepted only when allow_zero_weights is set (simulation studies).
    void validate(bool allow_zero_weights = false) const;

    bool operator==(const MvarParameters& o) const {
        return spec == o.spec && weights == o.weights && components == o.components;
    }
};

/// Time-ordered n x m panel, oldest row first. Stored column-major so that
/// each coordinate series is contiguous.
class SeriesMatrix {
public:
    SeriesMatrix() = default;
    explicit SeriesMatrix(Matrix values);

    static SeriesMatrix from_rows(const std::vector<Vector>& rows);

    Eigen::Index n() const { return values_.rows(); }
    Eigen::Index m() const { return values_.cols(); }
    const Matrix& values() const { return values_; }

    /// Row t (0-based) as a vector.
    Vector row(Eigen::Index t) const { return values_.row(t).transpose(); }

    /// Coordinate j observed at rows [begin, begin + len).
    std::span<const double> column_segment(Eigen::Index j, Eigen::Index begin,
                                           Eigen::Index len) const {
        return {values_.col(j).data() + begin, static_cast<std::size_t>(len)};
    }

    /// First `rows` observations.
    SeriesMatrix head(Eigen::Index rows) const;

private:
    Matrix values_;
};

/// Sufficient statistic of the information set at time t: the last p
/// observations. history is oldest first; lag(1) is Y_t.
struct ForecastOrigin {
    std::vector<Vector> history;
    long time = 0;  // 1-based index of the last observation in history

    /// Origin after observing rows 0..t-1 of the series (i.e. Y_1..Y_t).
    static ForecastOrigin from_series(const SeriesMatrix& series, long t, int p);

    /// Y_{t+1-i} for i = 1..p.
    const Vector& lag(int i) const { return history[history.size() - i]; }
};

/// Cholesky factor and log-determinant of one covariance; throws NotSpdError.
struct CovarianceFactor {
    Eigen::LLT<Matrix> llt;
    Matrix lower;
    double log_det = 0.0;

    explicit CovarianceFactor(const Matrix& cov);
};

/// Symmetry within kSymmetryTol and a successful Cholesky.
bool is_spd(const Matrix& cov);

/// e_tk = Y_t - Theta_k0 - sum_{i<=p_k} Theta_ki Y_{t-i}.
/// t is a 0-based row with p <= t < n; k is 0-based.
Vector component_residual(const MvarParameters& params, const SeriesMatrix& series,
                          Eigen::Index t, int k);

/// Residuals of component k for every scored row t = p..n-1, stored as an
/// (n - p) x m column-major matrix.
Matrix component_residuals(const MvarParameters& params, const SeriesMatrix& series, int k);

/// (n - p) x g matrix of log(pi_k) + log phi_m(Y_t; mu_tk, Omega_k).
Matrix weighted_log_densities(const MvarParameters& params, const SeriesMatrix& series);

/// Conditional log-likelihood; the first p observations are conditioned on.
double log_likelihood(const MvarParameters& params, const SeriesMatrix& series);

/// (mp) x (mp) companion matrix of component k. Requires p >= 1.
Matrix companion_matrix(const MvarParameters& params, int k);

/// sum_k pi_k (A_k kron A_k).
Matrix second_moment_operator(const MvarParameters& params);

struct StabilityResult {
    bool stable = false;
    double spectral_radius = 0.0;
};

/// Stable when the spectral radius of sum_k pi_k A_k (x) A_k is below
/// 1 - kStabilityTol. Throws EigenSolverError if the eigen routine fails.
StabilityResult is_stable(const MvarParameters& params);

/// Validates that the series matches the model dimension and is long enough.
void check_series(const MvarParameters& params, const SeriesMatrix& series);

}  // namespace mvar
