#include "acd/errors.hpp"
#include "acd/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace acd::io {
namespace {

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2000.0), "2000");
    const double x = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Durations, WriteReadRoundTripIsExact) {
    const auto series = simulate_horizon(AcdParams(0.1, 0.2, 0.7), InnovationLaw::gamma(3.0),
                                         200.0, 4);
    std::stringstream buf;
    write_durations(buf, series, {{"note", "x"}});
    const auto file = read_durations(buf);
    EXPECT_EQ(file.series.durations, series.durations);
    EXPECT_EQ(file.series.horizon, series.horizon);
    EXPECT_EQ(file.header.at("seed"), "4");
    EXPECT_EQ(file.header.at("law"), "gamma:3");
    EXPECT_EQ(file.header.at("note"), "x");
    EXPECT_EQ(file.header.at("count"), std::to_string(series.count()));
}

TEST(Durations, HeaderIsSortedAndVersioned) {
    const auto series = DurationSeries::from_durations({1.5, 0.25}, 3.0);
    std::stringstream buf;
    write_durations(buf, series);
    EXPECT_EQ(buf.str(), "# acd-durations v1\n# count=2\n# horizon=3\n1.5\n0.25\n");
}

TEST(Durations, ZeroDurationCitesLine) {
    std::istringstream in("1.0\n2.0\n0\n4.0\n");
    try {
        (void)read_durations(in);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Durations, MalformedAndNegativeValuesRejected) {
    std::istringstream garbage("# acd-durations v1\n1.0\nabc\n");
    EXPECT_THROW((void)read_durations(garbage), DataError);
    std::istringstream negative("1.0\n-2\n");
    EXPECT_THROW((void)read_durations(negative), DataError);
    std::istringstream empty("# only a header\n\n");
    EXPECT_THROW((void)read_durations(empty), DataError);
}

TEST(Durations, MissingFileIsDataError) {
    EXPECT_THROW((void)read_durations(std::filesystem::path("/nonexistent/durations.txt")),
                 DataError);
}

TEST(Sha256, KnownDigest) {
    const auto path = std::filesystem::temp_directory_path() / "acd_sha_test.txt";
    {
        std::ofstream out(path, std::ios::binary);
        out << "abc";
    }
    EXPECT_EQ(sha256_file(path), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::filesystem::remove(path);
}

TEST(Json, EstimateResultFields) {
    const auto series =
        simulate_horizon(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(), 1000.0, 2);
    const json j = to_json(estimate(series));
    for (const char* key : {"theta_hat", "converged", "iterations", "final_gradient_norm",
                            "neg_loglik", "n", "horizon", "omega_S_hat", "omega_I_hat", "mu_hat",
                            "min_info_eigenvalue", "cov_per_obs", "cov_per_time", "std_errors",
                            "std_errors_per_time", "stationarity_flag"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["omega_S_hat"].size(), 3u);
}

}  // namespace
}  // namespace acd::io
