#pragma once

#include "acd/lab.hpp"
#include "acd/qmle.hpp"
#include "acd/simulate.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace acd::io {

using json = nlohmann::ordered_json;

/// Shortest decimal text that round-trips to the same double.
[[nodiscard]] std::string format_double(double value);

/// Durations file:
///   # acd-durations v1
///   # key=value            (horizon, seed, omega, alpha, beta, law, count, ...)
///   <one duration per line>
/// Blank lines are ignored.
void write_durations(std::ostream& out, const DurationSeries& series,
                     const std::map<std::string, std::string>& extra_header = {});
void write_durations(const std::filesystem::path& path, const DurationSeries& series,
                     const std::map<std::string, std::string>& extra_header = {});

struct DurationsFile {
    DurationSeries series;
    std::map<std::string, std::string> header;
};

/// Throws DataError citing the 1-based line number of the first malformed or
/// non-positive duration.
[[nodiscard]] DurationsFile read_durations(std::istream& in);
[[nodiscard]] DurationsFile read_durations(const std::filesystem::path& path);

[[nodiscard]] json to_json(const Vector3& v);
[[nodiscard]] json to_json(const Matrix3& m);
[[nodiscard]] json to_json(const AcdParams& p);
[[nodiscard]] json to_json(const EstimateResult& r);
[[nodiscard]] json to_json(const lab::McReport& r);
[[nodiscard]] json to_json(const lab::CountingRateReport& r);
[[nodiscard]] json to_json(const lab::FcltReport& r);
[[nodiscard]] json to_json(const lab::RateFactorReport& r);
[[nodiscard]] json to_json(const lab::BreakdownReport& r);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);
[[nodiscard]] json read_json(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

}  // namespace acd::io
