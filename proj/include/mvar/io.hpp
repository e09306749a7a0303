#pragma once
// Data ingestion, model persistence and plot-ready outputs.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <json.hpp>
#include <string>
#include <vector>

#include "mvar/compare.hpp"
#include "mvar/estimation.hpp"
#include "mvar/portfolio.hpp"
#include "mvar/risk.hpp"

namespace mvar::io {

using nlohmann::json;

/// Dated table of positive prices (or returns, for --input-kind returns).
struct PriceTable {
    std::vector<std::string> names;
    std::vector<std::string> dates;  // ISO-8601, strictly increasing
    Matrix values;                   // rows x assets
    long rejected_rows = 0;          // rows dropped for missing cells
};

/// CSV with a header; first column `date` (YYYY-MM-DD), remaining columns
/// numeric. Rows with an empty or non-numeric cell are dropped and counted.
/// Throws ParseError on a malformed header, bad date or non-ascending dates.
PriceTable read_table_csv(std::istream& in);
PriceTable read_table_csv(const std::filesystem::path& path);

/// r[t, i] = (P[t+1, i] - P[t, i]) / P[t, i]. Throws on non-positive prices.
SeriesMatrix returns_from_prices(const PriceTable& prices);

enum class InputKind { prices, returns };

/// Reads a CSV and converts it to a return series according to kind.
SeriesMatrix load_series(const std::filesystem::path& path, InputKind kind);

/// Writes a series as CSV with synthetic consecutive daily dates starting at
/// start_date.
void write_series_csv(std::ostream& out, const SeriesMatrix& series,
                      const std::vector<std::string>& names, const std::string& start_date = "2000-01-01");

/// FNV-1a 64-bit hash of the series dimensions and raw values, as hex.
std::string data_hash(const SeriesMatrix& series);

inline constexpr int kModelFormatVersion = 1;

struct Provenance {
    std::string data_hash;
    json fit_settings = json::object();
    std::uint64_t seed = 0;
    std::string rng;
    std::string created_at;  // UTC ISO-8601; empty when not recorded
    std::map<std::string, double> diagnostics;

    bool operator==(const Provenance&) const = default;
};

struct ModelFile {
    int format_version = kModelFormatVersion;
    MvarParameters params;
    Provenance provenance;

    bool operator==(const ModelFile&) const = default;
};

json to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const json& j);
json to_json(const MvarParameters& params);
MvarParameters params_from_json(const json& j);
json to_json(const ModelFile& model);
ModelFile model_from_json(const json& j);

json to_json(const MixtureNormalMV& mix);
MixtureNormalMV mixture_mv_from_json(const json& j);
json to_json(const MixtureNormal1D& mix);
MixtureNormal1D mixture_1d_from_json(const json& j);
json to_json(const MomentPair& moments);
json to_json(const PortfolioSolution& solution);
json to_json(const RiskReport& report);
json to_json(const ComparisonReport& report);

json to_json(const Vector& v);
json to_json(const Matrix& m);  // row-major nested arrays
Vector vector_from_json(const json& j);
Matrix matrix_from_json(const json& j);

ModelFile load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ModelFile& model);

/// Writes to a sibling temporary file, then renames over path.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Current UTC time as ISO-8601, or SOURCE_DATE_EPOCH when that is set so
/// that reproducible runs produce identical files.
std::string timestamp_now();

/// Auto/cross-correlations r_ij(k) = c_ij(k) / sqrt(c_ii(0) c_jj(0)) with
/// c_ij(k) = (1/n) sum_t (Y_{i,t+k} - mean_i)(Y_{j,t} - mean_j).
struct AcfTable {
    std::vector<Matrix> lags;  // lags[k](i, j)
    double band = 0.0;         // 1.96 / sqrt(n)
    long n = 0;
};

AcfTable acf_ccf(const SeriesMatrix& series, int max_lag);
json to_json(const AcfTable& table);

/// 512 evenly spaced points over mean +- 6 sd of the mixture: columns x,density.
void write_density_grid(std::ostream& out, const MixtureNormal1D& mix, int points = 512);

}  // namespace mvar::io
