#include "acd/simulate.hpp"

#include "acd/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace acd {

namespace {

constexpr std::size_t kDefaultBurnIn = 500;

/// Steps the ACD(1,1) recursion one duration at a time. Both simulators
/// go through this type so they consume the random stream identically.
class DurationGenerator {
public:
    DurationGenerator(const AcdParams& params, const InnovationLaw& law, RngSeed seed,
                      const SimulationOptions& options)
        : params_(params),
          sampler_(law),
          rng_(seed),
          cap_(options.psi_cap),
          x_prev_(0.0),
          psi_prev_(0.0) {
        const InitialState init = options.init.value_or(default_initial_state(params));
        x_prev_ = init.x0;
        psi_prev_ = init.psi0;
        const std::size_t burn =
            options.burn_in.value_or(params.finite_mean() ? kDefaultBurnIn : std::size_t{0});
        for (std::size_t i = 0; i < burn; ++i) {
            (void)next();
        }
        index_ = 0;
    }

    [[nodiscard]] InitialState state() const { return {x_prev_, psi_prev_}; }

    double next() {
        ++index_;
        const double psi = params_.omega() + params_.alpha() * x_prev_ + params_.beta() * psi_prev_;
        if (!std::isfinite(psi) || psi > cap_) {
            throw ExplosionError(index_, psi);
        }
        const double x = psi * sampler_(rng_);
        if (!(x > 0.0) || !std::isfinite(x)) {
            // Underflow of psi * eps is the only way to land here.
            throw ExplosionError(index_, psi);
        }
        x_prev_ = x;
        psi_prev_ = psi;
        return x;
    }

private:
    AcdParams params_;
    InnovationSampler sampler_;
    RandomStream rng_;
    double cap_;
    double x_prev_;
    double psi_prev_;
    std::size_t index_ = 0;
};

}  // namespace

double DurationSeries::sample_mean() const {
    if (durations.empty()) {
        throw EmptySeriesError("sample mean of an empty duration series");
    }
    return std::accumulate(durations.begin(), durations.end(), 0.0L) /
           static_cast<long double>(durations.size());
}

double DurationSeries::effective_horizon() const {
    if (horizon) {
        return *horizon;
    }
    if (event_times.empty()) {
        throw EmptySeriesError("empty duration series has no horizon");
    }
    return event_times.back();
}

DurationSeries DurationSeries::from_durations(std::vector<double> durations,
                                              std::optional<double> horizon) {
    DurationSeries series;
    series.event_times.reserve(durations.size());
    double t = 0.0;
    for (std::size_t i = 0; i < durations.size(); ++i) {
        const double x = durations[i];
        if (!std::isfinite(x) || !(x > 0.0)) {
            throw DataError("duration " + std::to_string(i + 1) + " is not strictly positive");
        }
        t += x;
        series.event_times.push_back(t);
    }
    if (horizon) {
        if (!std::isfinite(*horizon) || !(*horizon > 0.0)) {
            throw DataError("horizon must be positive");
        }
        if (!series.event_times.empty() && series.event_times.back() > *horizon) {
            throw DataError("last event time exceeds the horizon");
        }
    }
    series.durations = std::move(durations);
    series.horizon = horizon;
    return series;
}

InitialState default_initial_state(const AcdParams& params) {
    const double level = params.finite_mean() ? stationary_mean(params) : params.omega();
    return {level, level};
}

DurationSeries simulate_fixed_n(const AcdParams& params, const InnovationLaw& law, std::size_t n,
                                RngSeed seed, const SimulationOptions& options) {
    if (n == 0) {
        throw InvalidArgument("simulate_fixed_n requires n >= 1");
    }
    DurationGenerator gen(params, law, seed, options);
    DurationSeries series;
    series.true_params = params;
    series.law = law;
    series.seed = seed;
    series.start = gen.state();
    series.durations.reserve(n);
    series.event_times.reserve(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = gen.next();
        t += x;
        series.durations.push_back(x);
        series.event_times.push_back(t);
    }
    return series;
}

DurationSeries simulate_horizon(const AcdParams& params, const InnovationLaw& law, double horizon,
                                RngSeed seed, const SimulationOptions& options) {
    if (!std::isfinite(horizon) || !(horizon > 0.0)) {
        throw InvalidArgument("horizon must be positive and finite");
    }
    if (!params.finite_mean() && !options.allow_nonstationary) {
        throw InfiniteMeanError("alpha + beta = " + std::to_string(params.persistence()) +
                                " >= 1; set allow_nonstationary to simulate anyway");
    }
    DurationGenerator gen(params, law, seed, options);
    DurationSeries series;
    series.true_params = params;
    series.law = law;
    series.seed = seed;
    series.start = gen.state();
    series.horizon = horizon;
    double t = 0.0;
    for (;;) {
        const double x = gen.next();
        if (t + x > horizon) {
            series.overshoot = x;
            break;
        }
        t += x;
        series.durations.push_back(x);
        series.event_times.push_back(t);
    }
    if (series.durations.empty()) {
        throw EmptySeriesError("no event in [0, " + std::to_string(horizon) +
                               "]: the first duration exceeds the horizon");
    }
    return series;
}

LyapunovEstimate lyapunov_exponent(const AcdParams& params, const InnovationLaw& law,
                                   std::size_t n_draws, RngSeed seed) {
    if (params.alpha() == 0.0) {
        return {std::log(params.beta()), 0.0};
    }
    if (n_draws < 10'000) {
        throw InvalidArgument("lyapunov_exponent requires at least 10^4 draws");
    }
    InnovationSampler sampler(law);
    RandomStream rng(seed);
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const double v = std::log(params.alpha() * sampler(rng) + params.beta());
        sum += v;
        sum_sq += static_cast<long double>(v) * v;
    }
    const auto n = static_cast<long double>(n_draws);
    const long double mean = sum / n;
    const long double var = (sum_sq - n * mean * mean) / (n - 1.0L);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

}  // namespace acd
