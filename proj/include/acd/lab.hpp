#pragma once

// Monte Carlo harness for the large-sample behaviour of the ACD(1,1) QMLE
// when the sample is observed over a fixed calendar window [0, T], so that
// the number of durations n(T) is itself random.

#include "acd/innovation.hpp"
#include "acd/params.hpp"
#include "acd/qmle.hpp"
#include "acd/random.hpp"
#include "acd/simulate.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acd::lab {

struct McConfig {
    AcdParams true_params{0.1, 0.2, 0.7};
    InnovationLaw law = InnovationLaw::exponential();
    /// Exactly one of horizon / fixed_n is used; horizon takes precedence.
    std::optional<double> horizon = 2000.0;
    std::optional<std::size_t> fixed_n;
    std::size_t replications = 500;
    RngSeed base_seed = 1;
    EstimateOptions estimate_options;
    double nominal_coverage = 0.95;
    SimulationOptions simulation;
    /// Worker threads; 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct ReplicationRecord {
    std::size_t index = 0;
    RngSeed seed = 0;
    std::size_t n = 0;
    double horizon = 0.0;
    std::optional<Vector3> theta_hat;
    bool converged = false;
    std::optional<Vector3> std_errors;
    std::string error;  // non-empty when simulation or estimation threw
};

struct CountingRateSummary {
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// mean and max of |n(T) mu / T - 1|; finite-mean params only.
    std::optional<double> mean_abs_dev;
    std::optional<double> max_abs_dev;
};

struct McReport {
    std::vector<ReplicationRecord> per_replication;
    std::size_t used = 0;      // converged replications entering the aggregates
    std::size_t failures = 0;  // threw or did not converge
    double convergence_rate = 0.0;
    std::optional<Vector3> bias;
    std::optional<Vector3> bias_std_error;  // sd(theta_hat) / sqrt(used)
    std::optional<Vector3> rmse;
    std::optional<Matrix3> empirical_cov_sqrtT;
    std::optional<Matrix3> empirical_cov_sqrtn;
    std::optional<Vector3> iqr_sqrtT;
    std::optional<Vector3> coverage;
    std::optional<Vector3> normality_stats;  // KS distance of studentized estimates
    CountingRateSummary counting_rate;
};

/// R replications of simulate -> estimate, each on its own derived seed.
/// Per-replication failures are recorded, never thrown. Results are merged
/// in replication order, so the report does not depend on thread count.
[[nodiscard]] McReport run_mc(const McConfig& config);

struct CountingRateLevel {
    double horizon = 0.0;
    double mean_rate = 0.0;  // mean of n(T) / T
    double mean_abs_dev = 0.0;
    double max_abs_dev = 0.0;
};

struct CountingRateReport {
    double mu = 0.0;
    std::vector<CountingRateLevel> levels;  // in the order of the horizon grid
};

/// Simulates n(T) on the same R seeds for every horizon in the grid.
/// Throws InfiniteMeanError for alpha + beta >= 1.
[[nodiscard]] CountingRateReport counting_rate_check(const McConfig& config,
                                                     std::span<const double> horizons);

struct FcltConfig {
    AcdParams theta0{0.1, 0.2, 0.7};
    InnovationLaw law = InnovationLaw::exponential();
    std::size_t n = 10'000;
    std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
    std::size_t replications = 500;
    RngSeed seed = 1;
    std::size_t long_run_n = 1'000'000;
    unsigned threads = 0;
};

struct FcltLevel {
    double u = 0.0;
    std::size_t terms = 0;  // floor(n u)
    Matrix3 covariance = Matrix3::Zero();
    Matrix3 target = Matrix3::Zero();  // u * omega_S from the long run
    std::optional<double> relative_error;
};

struct FcltIncrement {
    double u = 0.0;
    double v = 0.0;
    Matrix3 correlation = Matrix3::Zero();  // corr(S(u)_j, (S(v) - S(u))_k)
    double max_abs = 0.0;
};

struct FcltReport {
    Matrix3 omega_S_long = Matrix3::Zero();
    std::vector<FcltLevel> levels;
    std::vector<FcltIncrement> increments;
    double band = 0.0;  // 4 / sqrt(R)
    double max_relative_error = 0.0;
    double max_abs_correlation = 0.0;
};

/// n^{-1/2} times the partial sums of per-observation scores up to
/// floor(n u) for each u in the grid.
[[nodiscard]] std::vector<Vector3> partial_sum_scores(std::span<const Vector3> scores,
                                                      std::span<const double> grid);

/// Partial-sum score process at the true parameter over R fixed-n samples.
[[nodiscard]] FcltReport functional_clt_probe(const FcltConfig& config);

struct RateFactorCandidate {
    std::string name;  // "mu", "1/mu", "1"
    double kappa = 0.0;
    double discrepancy = 0.0;
};

struct RateFactorReport {
    double mu = 0.0;
    Matrix3 sandwich = Matrix3::Zero();  // Omega_I^{-1} Omega_S Omega_I^{-1}, long run at theta_0
    Matrix3 empirical_cov_sqrtT = Matrix3::Zero();
    Matrix3 empirical_cov_sqrtn = Matrix3::Zero();
    std::vector<RateFactorCandidate> candidates;
    std::size_t winner = 0;
    double winner_to_runner_up = 0.0;
    bool unique = false;  // winner_to_runner_up <= 0.5
    double identity_relative_error = 0.0;  // ||cov_sqrtT - mu cov_sqrtn|| / ||mu cov_sqrtn||
    McReport mc;
};

/// Decides which of kappa in {mu, 1/mu, 1} scales Omega_I^{-1} Omega_S
/// Omega_I^{-1} into the covariance of sqrt(T)(theta_hat - theta_0).
/// Throws InvalidArgument when mu is within 10% of 1.
[[nodiscard]] RateFactorReport rate_factor_probe(const McConfig& config,
                                                 std::size_t long_run_n = 1'000'000);

struct BreakdownConfig {
    AcdParams params{0.1, 0.9, 0.2};
    InnovationLaw law = InnovationLaw::exponential();
    std::vector<double> horizons{2000.0, 8000.0};
    std::size_t replications = 500;
    RngSeed seed = 1;
    AcdParams baseline{0.1, 0.2, 0.7};
    EstimateOptions estimate_options;
    std::size_t lyapunov_draws = 1'000'000;
    unsigned threads = 0;
};

struct DispersionRow {
    double horizon = 0.0;
    std::optional<Vector3> iqr_sqrtT;
    double convergence_rate = 0.0;
    double mean_count = 0.0;
};

struct BreakdownReport {
    LyapunovEstimate lyapunov{};
    std::vector<DispersionRow> nonstationary;
    std::vector<DispersionRow> baseline;
    /// IQR at the last horizon over IQR at the first, per coordinate.
    std::optional<Vector3> nonstationary_ratio;
    std::optional<Vector3> baseline_ratio;
};

/// Contrasts the sqrt(T)-scaled dispersion of theta_hat for alpha + beta >= 1
/// against a finite-mean baseline. Throws InvalidArgument when alpha + beta
/// < 1 or when the Lyapunov estimate is not negative.
[[nodiscard]] BreakdownReport breakdown_demo(const BreakdownConfig& config);

/// -n^{-1} Hessian of the log-likelihood at theta, started from the series'
/// recorded simulation state when available and the sample mean otherwise.
[[nodiscard]] Matrix3 information_at(const AcdParams& theta, const DurationSeries& series);

struct ThirdDerivativeLevel {
    std::size_t n = 0;
    double max_abs = 0.0;  // max over points and (h, i, j) of |d^3 Q_n| / n
};

/// Finite-difference third derivatives of the objective (central differences
/// of the analytic Hessian) at `points` parameters drawn uniformly from the
/// ball of the given radius around theta0, on prefixes of one long series.
[[nodiscard]] std::vector<ThirdDerivativeLevel> third_derivative_probe(
    const AcdParams& theta0, const InnovationLaw& law, std::span<const std::size_t> sizes,
    std::size_t points, double radius, RngSeed seed);

}  // namespace acd::lab
