#include "acd/io.hpp"

#include "acd/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace acd::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::size_t line) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw DataError("line " + std::to_string(line) + ": '" + std::string(text) +
                        "' is not a decimal number");
    }
    return value;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    return v ? to_json(*v) : json(nullptr);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

void write_durations(std::ostream& out, const DurationSeries& series,
                     const std::map<std::string, std::string>& extra_header) {
    std::map<std::string, std::string> header = extra_header;
    header["count"] = std::to_string(series.count());
    if (series.horizon) {
        header["horizon"] = format_double(*series.horizon);
    }
    if (series.seed) {
        header["seed"] = std::to_string(*series.seed);
    }
    if (series.true_params) {
        header["omega"] = format_double(series.true_params->omega());
        header["alpha"] = format_double(series.true_params->alpha());
        header["beta"] = format_double(series.true_params->beta());
    }
    if (series.law) {
        header["law"] = series.law->to_string();
    }
    out << "# acd-durations v1\n";
    for (const auto& [key, value] : header) {
        out << "# " << key << '=' << value << '\n';
    }
    for (const double x : series.durations) {
        out << format_double(x) << '\n';
    }
}

void write_durations(const std::filesystem::path& path, const DurationSeries& series,
                     const std::map<std::string, std::string>& extra_header) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    write_durations(out, series, extra_header);
    if (!out) {
        throw DataError("failed writing '" + path.string() + "'");
    }
}

DurationsFile read_durations(std::istream& in) {
    DurationsFile file;
    std::vector<double> durations;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text = trim(raw);
        if (text.empty()) {
            continue;
        }
        if (text.front() == '#') {
            const std::string_view body = trim(text.substr(1));
            const auto eq = body.find('=');
            if (eq != std::string_view::npos) {
                file.header[std::string(trim(body.substr(0, eq)))] =
                    std::string(trim(body.substr(eq + 1)));
            }
            continue;
        }
        const double x = parse_number(text, line);
        if (!std::isfinite(x) || !(x > 0.0)) {
            throw DataError("line " + std::to_string(line) + ": duration " + std::string(text) +
                            " is not strictly positive");
        }
        durations.push_back(x);
    }
    if (durations.empty()) {
        throw DataError("durations file contains no observations");
    }
    std::optional<double> horizon;
    if (auto it = file.header.find("horizon"); it != file.header.end()) {
        horizon = parse_number(it->second, 0);
    }
    file.series = DurationSeries::from_durations(std::move(durations), horizon);
    return file;
}

DurationsFile read_durations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read durations file '" + path.string() + "'");
    }
    return read_durations(in);
}

json to_json(const Vector3& v) { return json::array({v(0), v(1), v(2)}); }

json to_json(const Matrix3& m) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) {
        rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
    }
    return rows;
}

json to_json(const AcdParams& p) {
    return json{{"omega", p.omega()}, {"alpha", p.alpha()}, {"beta", p.beta()}};
}

json to_json(const EstimateResult& r) {
    json j;
    j["theta_hat"] = to_json(r.theta_hat);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["starts"] = r.starts;
    j["final_gradient_norm"] = r.final_gradient_norm;
    j["termination"] = r.termination;
    j["neg_loglik"] = r.neg_loglik;
    j["n"] = r.n;
    j["horizon"] = r.horizon;
    j["horizon_from_last_event"] = r.horizon_from_last_event;
    j["omega_S_hat"] = to_json(r.omega_S_hat);
    j["omega_I_hat"] = to_json(r.omega_I_hat);
    j["mu_hat"] = r.mu_hat;
    j["min_info_eigenvalue"] = r.min_info_eigenvalue;
    j["singular_information"] = r.singular_information;
    j["cov_per_obs"] = optional_json(r.cov_per_obs);
    j["cov_per_time"] = optional_json(r.cov_per_time);
    j["std_errors"] = optional_json(r.std_errors);
    j["std_errors_per_time"] = optional_json(r.std_errors_per_time);
    j["stationarity_flag"] = r.stationarity_flag;
    return j;
}

json to_json(const lab::McReport& r) {
    json reps = json::array();
    for (const auto& rec : r.per_replication) {
        json e;
        e["index"] = rec.index;
        e["seed"] = rec.seed;
        e["n"] = rec.n;
        e["theta_hat"] = optional_json(rec.theta_hat);
        e["converged"] = rec.converged;
        e["std_errors"] = optional_json(rec.std_errors);
        if (!rec.error.empty()) {
            e["error"] = rec.error;
        }
        reps.push_back(std::move(e));
    }
    json j;
    j["replications"] = r.per_replication.size();
    j["used"] = r.used;
    j["failures"] = r.failures;
    j["convergence_rate"] = r.convergence_rate;
    j["bias"] = optional_json(r.bias);
    j["bias_std_error"] = optional_json(r.bias_std_error);
    j["rmse"] = optional_json(r.rmse);
    j["empirical_cov_sqrtT"] = optional_json(r.empirical_cov_sqrtT);
    j["empirical_cov_sqrtn"] = optional_json(r.empirical_cov_sqrtn);
    j["iqr_sqrtT"] = optional_json(r.iqr_sqrtT);
    j["coverage"] = optional_json(r.coverage);
    j["normality_stats"] = optional_json(r.normality_stats);
    j["counting_rate"] = json{{"mean", r.counting_rate.mean},
                              {"sd", r.counting_rate.sd},
                              {"min", r.counting_rate.min},
                              {"max", r.counting_rate.max},
                              {"mean_abs_dev", optional_number(r.counting_rate.mean_abs_dev)},
                              {"max_abs_dev", optional_number(r.counting_rate.max_abs_dev)}};
    j["per_replication"] = std::move(reps);
    return j;
}

json to_json(const lab::CountingRateReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels) {
        levels.push_back(json{{"horizon", l.horizon},
                              {"mean_rate", l.mean_rate},
                              {"mean_abs_dev", l.mean_abs_dev},
                              {"max_abs_dev", l.max_abs_dev}});
    }
    return json{{"mu", r.mu}, {"inverse_mu", 1.0 / r.mu}, {"levels", std::move(levels)}};
}

json to_json(const lab::FcltReport& r) {
    json levels = json::array();
    for (const auto& l : r.levels) {
        levels.push_back(json{{"u", l.u},
                              {"terms", l.terms},
                              {"covariance", to_json(l.covariance)},
                              {"target", to_json(l.target)},
                              {"relative_error", optional_number(l.relative_error)}});
    }
    json increments = json::array();
    for (const auto& inc : r.increments) {
        increments.push_back(json{{"u", inc.u},
                                  {"v", inc.v},
                                  {"correlation", to_json(inc.correlation)},
                                  {"max_abs", inc.max_abs}});
    }
    return json{{"omega_S_long", to_json(r.omega_S_long)},
                {"levels", std::move(levels)},
                {"increments", std::move(increments)},
                {"band", r.band},
                {"max_relative_error", r.max_relative_error},
                {"max_abs_correlation", r.max_abs_correlation}};
}

json to_json(const lab::RateFactorReport& r) {
    json candidates = json::array();
    for (const auto& c : r.candidates) {
        candidates.push_back(
            json{{"name", c.name}, {"kappa", c.kappa}, {"discrepancy", c.discrepancy}});
    }
    return json{{"mu", r.mu},
                {"sandwich", to_json(r.sandwich)},
                {"empirical_cov_sqrtT", to_json(r.empirical_cov_sqrtT)},
                {"empirical_cov_sqrtn", to_json(r.empirical_cov_sqrtn)},
                {"candidates", std::move(candidates)},
                {"winner", r.candidates.at(r.winner).name},
                {"winner_kappa", r.candidates.at(r.winner).kappa},
                {"winner_to_runner_up", r.winner_to_runner_up},
                {"unique", r.unique},
                {"identity_relative_error", r.identity_relative_error},
                {"mc", to_json(r.mc)}};
}

json to_json(const lab::BreakdownReport& r) {
    auto rows = [](const std::vector<lab::DispersionRow>& v) {
        json out = json::array();
        for (const auto& row : v) {
            out.push_back(json{{"horizon", row.horizon},
                               {"iqr_sqrtT", optional_json(row.iqr_sqrtT)},
                               {"convergence_rate", row.convergence_rate},
                               {"mean_count", row.mean_count}});
        }
        return out;
    };
    return json{{"lyapunov", json{{"value", r.lyapunov.value}, {"std_error", r.lyapunov.std_error}}},
                {"nonstationary", rows(r.nonstationary)},
                {"baseline", rows(r.baseline)},
                {"nonstationary_ratio", optional_json(r.nonstationary_ratio)},
                {"baseline_ratio", optional_json(r.baseline_ratio)}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open '" + path.string() + "' for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw DataError("failed writing '" + path.string() + "'");
    }
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot read '" + path.string() + "' for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0xf]);
    }
    return hex;
}

}  // namespace acd::io
