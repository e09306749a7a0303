#include "mvar/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mvar::io {
namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<std::chrono::sys_days> parse_date(const std::string& s) {
    int y = 0;
    unsigned mo = 0, d = 0;
    char tail = 0;
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &mo, &d, &tail) != 3) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

PriceTable read_table_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("csv: empty input");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header.front() != "date")
        throw ParseError("csv: header must start with `date` followed by at least one column");

    PriceTable table;
    table.names.assign(header.begin() + 1, header.end());
    const auto cols = static_cast<Eigen::Index>(table.names.size());
    std::vector<double> flat;
    std::optional<std::chrono::sys_days> previous;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        const auto date = parse_date(cells.empty() ? std::string{} : cells.front());
        if (!date) throw ParseError("csv line " + std::to_string(line_no) + ": invalid ISO-8601 date");
        if (previous && *date <= *previous)
            throw ParseError("csv line " + std::to_string(line_no) + ": dates must be strictly increasing");
        previous = date;

        std::vector<double> row;
        bool complete = static_cast<Eigen::Index>(cells.size()) == cols + 1;
        for (Eigen::Index j = 0; complete && j < cols; ++j) {
            const auto v = parse_number(cells[j + 1]);
            if (!v) complete = false;
            else row.push_back(*v);
        }
        if (!complete) {
            ++table.rejected_rows;
            continue;
        }
        table.dates.push_back(cells.front());
        flat.insert(flat.end(), row.begin(), row.end());
    }
    const auto rows = static_cast<Eigen::Index>(table.dates.size());
    table.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), rows, cols);
    return table;
}

PriceTable read_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_table_csv(in);
}

SeriesMatrix returns_from_prices(const PriceTable& prices) {
    const Eigen::Index rows = prices.values.rows();
    if (rows < 2) throw ParseError("returns: at least two price rows are required");
    if (!(prices.values.array() > 0.0).all()) throw ParseError("returns: prices must be positive");
    for (std::size_t t = 1; t < prices.dates.size(); ++t)
        if (!(prices.dates[t - 1] < prices.dates[t])) throw ParseError("returns: dates must be ascending");
    const Matrix prev = prices.values.topRows(rows - 1);
    const Matrix next = prices.values.bottomRows(rows - 1);
    return SeriesMatrix(((next - prev).array() / prev.array()).matrix());
}

SeriesMatrix load_series(const std::filesystem::path& path, InputKind kind) {
    const PriceTable table = read_table_csv(path);
    if (kind == InputKind::prices) return returns_from_prices(table);
    if (table.values.rows() == 0) throw ParseError("csv: no complete rows");
    return SeriesMatrix(table.values);
}

void write_series_csv(std::ostream& out, const SeriesMatrix& series, const std::vector<std::string>& names,
                      const std::string& start_date) {
    auto day = parse_date(start_date);
    if (!day) throw ParseError("invalid start date " + start_date);
    out << "date";
    for (Eigen::Index j = 0; j < series.m(); ++j)
        out << ',' << (static_cast<std::size_t>(j) < names.size() ? names[j] : "y" + std::to_string(j + 1));
    out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index t = 0; t < series.n(); ++t) {
        out << format_date(*day + std::chrono::days{t});
        for (Eigen::Index j = 0; j < series.m(); ++j) out << ',' << series.values()(t, j);
        out << '\n';
    }
}

std::string data_hash(const SeriesMatrix& series) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    const std::int64_t dims[2] = {series.n(), series.m()};
    mix(dims, sizeof dims);
    for (Eigen::Index t = 0; t < series.n(); ++t)
        for (Eigen::Index j = 0; j < series.m(); ++j) {
            const double v = series.values()(t, j);
            mix(&v, sizeof v);
        }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json to_json(const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); }

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("expected a numeric array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError("expected a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("expected a nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Vector r = vector_from_json(j[static_cast<std::size_t>(i)]);
        if (r.size() != cols) throw ParseError("ragged matrix");
        m.row(i) = r.transpose();
    }
    return m;
}

json to_json(const ModelSpec& spec) { return {{"g", spec.g}, {"m", spec.m}, {"orders", spec.orders}}; }

ModelSpec spec_from_json(const json& j) {
    try {
        return ModelSpec(j.at("g").get<int>(), j.at("m").get<int>(), j.at("orders").get<std::vector<int>>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("model spec: ") + e.what());
    }
}

json to_json(const MvarParameters& params) {
    json comps = json::array();
    for (const Component& c : params.components) {
        json ar = json::array();
        for (const Matrix& a : c.ar) ar.push_back(to_json(a));
        comps.push_back({{"intercept", to_json(c.intercept)}, {"ar", std::move(ar)}, {"cov", to_json(c.cov)}});
    }
    return {{"weights", to_json(params.weights)}, {"components", std::move(comps)}};
}

MvarParameters params_from_json(const json& j) {
    try {
        MvarParameters p;
        p.spec = spec_from_json(j.at("spec"));
        const json& body = j.at("params");
        p.weights = vector_from_json(body.at("weights"));
        for (const json& c : body.at("components")) {
            Component comp;
            comp.intercept = vector_from_json(c.at("intercept"));
            for (const json& a : c.at("ar")) comp.ar.push_back(matrix_from_json(a));
            comp.cov = matrix_from_json(c.at("cov"));
            p.components.push_back(std::move(comp));
        }
        p.validate();
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model parameters: ") + e.what());
    }
}

json to_json(const ModelFile& model) {
    json prov = {{"data_hash", model.provenance.data_hash},
                 {"fit_settings", model.provenance.fit_settings},
                 {"seed", model.provenance.seed},
                 {"rng", model.provenance.rng},
                 {"created_at", model.provenance.created_at},
                 {"diagnostics", model.provenance.diagnostics}};
    return {{"format_version", model.format_version},
            {"spec", to_json(model.params.spec)},
            {"params", to_json(model.params)},
            {"provenance", std::move(prov)}};
}

ModelFile model_from_json(const json& j) {
    try {
        ModelFile m;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kModelFormatVersion)
            throw ParseError("unsupported model format_version " + std::to_string(m.format_version));
        m.params = params_from_json(j);
        if (j.contains("provenance")) {
            const json& p = j.at("provenance");
            m.provenance.data_hash = p.value("data_hash", "");
            m.provenance.fit_settings = p.value("fit_settings", json::object());
            m.provenance.seed = p.value("seed", std::uint64_t{0});
            m.provenance.rng = p.value("rng", "");
            m.provenance.created_at = p.value("created_at", "");
            m.provenance.diagnostics = p.value("diagnostics", std::map<std::string, double>{});
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

json to_json(const MixtureNormalMV& mix) {
    json means = json::array(), covs = json::array();
    for (const auto& v : mix.means) means.push_back(to_json(v));
    for (const auto& c : mix.covs) covs.push_back(to_json(c));
    return {{"horizon", mix.horizon},
            {"origin_time", mix.origin_time},
            {"weights", to_json(mix.weights)},
            {"means", std::move(means)},
            {"covs", std::move(covs)}};
}

MixtureNormalMV mixture_mv_from_json(const json& j) {
    try {
        MixtureNormalMV mix;
        mix.horizon = j.value("horizon", 1);
        mix.origin_time = j.value("origin_time", 0L);
        mix.weights = vector_from_json(j.at("weights"));
        for (const json& v : j.at("means")) mix.means.push_back(vector_from_json(v));
        for (const json& c : j.at("covs")) mix.covs.push_back(matrix_from_json(c));
        mix.validate();
        return mix;
    } catch (const json::exception& e) {
        throw ParseError(std::string("mixture: ") + e.what());
    }
}

json to_json(const MixtureNormal1D& mix) {
    return {{"horizon", mix.horizon},
            {"origin_time", mix.origin_time},
            {"weights", to_json(mix.weights)},
            {"means", to_json(mix.means)},
            {"sds", to_json(mix.sds)}};
}

MixtureNormal1D mixture_1d_from_json(const json& j) {
    try {
        // Accept either a bare mixture or a portfolio report that embeds one.
        const json& body = j.contains("return_mixture") ? j.at("return_mixture") : j;
        MixtureNormal1D mix;
        mix.horizon = body.value("horizon", 1);
        mix.origin_time = body.value("origin_time", 0L);
        mix.weights = vector_from_json(body.at("weights"));
        mix.means = vector_from_json(body.at("means"));
        mix.sds = vector_from_json(body.at("sds"));
        mix.validate();
        return mix;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scalar mixture: ") + e.what());
    }
}

json to_json(const MomentPair& moments) { return {{"mean", to_json(moments.mean)}, {"cov", to_json(moments.cov)}}; }

json to_json(const PortfolioSolution& s) {
    return {{"kind", s.kind == PortfolioKind::mvp ? "mvp" : "efficient"},
            {"horizon", s.horizon},
            {"weights", to_json(s.weights)},
            {"expected_return", s.expected_return},
            {"sd", s.sd}};
}

json to_json(const RiskReport& r) {
    return {{"alpha", r.alpha}, {"var", r.var}, {"es", r.es}, {"var_loss", -r.var}, {"es_loss", -r.es}};
}

json to_json(const ComparisonReport& report) {
    json rows = json::array();
    for (const ComparisonRow& r : report.rows) {
        json row = {{"model", r.model_id},      {"horizon", r.horizon}, {"origin_time", r.origin_time},
                    {"target_time", r.target_time}, {"ok", r.ok}};
        if (r.ok) {
            row.update({{"weights", to_json(r.weights)},
                        {"mean", r.mean},
                        {"sd", r.sd},
                        {"var", r.var},
                        {"es", r.es},
                        {"realized", r.realized},
                        {"crps", r.crps}});
        } else {
            row["error"] = r.error;
        }
        rows.push_back(std::move(row));
    }
    return {{"alpha", report.alpha}, {"n", report.n}, {"train_n", report.train_n}, {"rows", std::move(rows)}};
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << contents;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    atomic_write(path, to_json(model).dump(2) + "\n");
}

std::string timestamp_now() {
    std::time_t secs = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"))
        secs = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    else
        secs = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

AcfTable acf_ccf(const SeriesMatrix& series, int max_lag) {
    const Eigen::Index n = series.n(), m = series.m();
    if (max_lag < 0 || n <= max_lag) throw ParameterError("acf: series must be longer than max lag");
    const Matrix centered = series.values().rowwise() - series.values().colwise().mean();
    AcfTable out;
    out.n = n;
    out.band = 1.96 / std::sqrt(static_cast<double>(n));
    Vector c0(m);
    for (Eigen::Index i = 0; i < m; ++i) c0[i] = centered.col(i).squaredNorm() / static_cast<double>(n);
    for (int k = 0; k <= max_lag; ++k) {
        Matrix r(m, m);
        const Eigen::Index len = n - k;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) {
                const double c = centered.col(i).segment(k, len).dot(centered.col(j).head(len)) / static_cast<double>(n);
                r(i, j) = c / std::sqrt(c0[i] * c0[j]);
            }
        out.lags.push_back(std::move(r));
    }
    return out;
}

json to_json(const AcfTable& table) {
    json lags = json::array();
    for (std::size_t k = 0; k < table.lags.size(); ++k) lags.push_back({{"lag", k}, {"r", to_json(table.lags[k])}});
    return {{"n", table.n}, {"band", table.band}, {"lags", std::move(lags)}};
}

void write_density_grid(std::ostream& out, const MixtureNormal1D& mix, int points) {
    if (points < 2) throw ParameterError("density grid needs at least two points");
    const ScalarMoments mom = scalar_mixture_moments(mix);
    const double sd = std::sqrt(mom.variance);
    const double lo = mom.mean - 6.0 * sd, hi = mom.mean + 6.0 * sd;
    out << "x,density\n" << std::setprecision(17);
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        out << x << ',' << mixture_pdf(mix, x) << '\n';
    }
}

}  // namespace mvar::io
