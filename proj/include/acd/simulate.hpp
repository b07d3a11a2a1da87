#pragma once

#include "acd/innovation.hpp"
#include "acd/params.hpp"
#include "acd/random.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace acd {

/// Observed (or simulated) durations together with their event times.
struct DurationSeries {
    std::vector<double> durations;    // x_1..x_n, all > 0
    std::vector<double> event_times;  // t_i = x_1 + ... + x_i
    std::optional<double> horizon;    // T, when observed over [0, T]

    // Simulation provenance; absent for data read from disk.
    std::optional<AcdParams> true_params;
    std::optional<InnovationLaw> law;
    std::optional<RngSeed> seed;
    std::optional<InitialState> start;  // state preceding x_1
    std::optional<double> overshoot;    // discarded x_{n+1} of a horizon run

    [[nodiscard]] std::size_t count() const noexcept { return durations.size(); }
    [[nodiscard]] bool empty() const noexcept { return durations.empty(); }
    [[nodiscard]] double sample_mean() const;
    /// T if present, otherwise the last event time.
    [[nodiscard]] double effective_horizon() const;

    /// Builds a series from raw durations, validating positivity.
    /// Throws DataError naming the 0-based index of the first bad value.
    static DurationSeries from_durations(std::vector<double> durations,
                                         std::optional<double> horizon = std::nullopt);
};

struct SimulationOptions {
    /// Initial (x_0, psi_0). Default: both equal stationary_mean when the mean
    /// is finite, otherwise both equal omega.
    std::optional<InitialState> init;
    /// Discarded warm-up draws. Default: 500 for finite-mean params, else 0.
    std::optional<std::size_t> burn_in;
    double psi_cap = 1e300;
    /// Permits alpha + beta >= 1 in simulate_horizon.
    bool allow_nonstationary = false;
};

[[nodiscard]] InitialState default_initial_state(const AcdParams& params);

/// Exactly n durations. Deterministic in (params, law, seed, options).
[[nodiscard]] DurationSeries simulate_fixed_n(const AcdParams& params, const InnovationLaw& law,
                                              std::size_t n, RngSeed seed,
                                              const SimulationOptions& options = {});

/// All durations whose cumulative sum is <= T. The first duration that
/// crosses T is drawn, recorded in `overshoot`, and discarded. Shares its
/// draw order with simulate_fixed_n for the same seed.
[[nodiscard]] DurationSeries simulate_horizon(const AcdParams& params, const InnovationLaw& law,
                                              double horizon, RngSeed seed,
                                              const SimulationOptions& options = {});

struct LyapunovEstimate {
    double value;
    double std_error;
};

/// Monte Carlo estimate of E[ln(alpha * eps + beta)]. Negative values place
/// the parameters in the strictly stationary, ergodic region. alpha == 0 is
/// answered exactly as ln(beta) without drawing.
[[nodiscard]] LyapunovEstimate lyapunov_exponent(const AcdParams& params, const InnovationLaw& law,
                                                 std::size_t n_draws, RngSeed seed);

}  // namespace acd
