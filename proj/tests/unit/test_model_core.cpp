#include "acd/errors.hpp"
#include "acd/innovation.hpp"
#include "acd/params.hpp"
#include "acd/random.hpp"
#include "acd/simulate.hpp"
#include "acd/stats.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace acd {
namespace {

// Frozen quadrature values of E[ln(a eps + b)], eps ~ Exp(1).
constexpr double kLyapunov_02_07 = -0.12585561234072218;
constexpr double kLyapunov_12_04 = 0.24051530453592684;
constexpr double kLyapunov_09_02 = -0.18909285606525955;

TEST(AcdParams, RejectsNonPositiveCoordinates) {
    EXPECT_THROW(AcdParams(0.0, 0.2, 0.7), InvalidArgument);
    EXPECT_THROW(AcdParams(0.1, 0.0, 0.7), InvalidArgument);
    EXPECT_THROW(AcdParams(0.1, 0.2, -0.1), InvalidArgument);
    EXPECT_THROW(AcdParams(0.1, std::nan(""), 0.7), InvalidArgument);
    EXPECT_NO_THROW(AcdParams::relaxed(0.1, 0.0, 0.5));
    EXPECT_THROW(AcdParams::relaxed(0.0, 0.1, 0.5), InvalidArgument);
}

TEST(AcdParams, FiniteMeanFlag) {
    EXPECT_TRUE(AcdParams(0.1, 0.2, 0.7).finite_mean());
    EXPECT_FALSE(AcdParams(1.0, 0.6, 0.5).finite_mean());
}

TEST(InitialState, RequiresPositiveFiniteValues) {
    EXPECT_THROW(InitialState(0.0, 1.0), InvalidArgument);
    EXPECT_THROW(InitialState(1.0, INFINITY), InvalidArgument);
    EXPECT_NO_THROW(InitialState(1.0, 1.0));
}

TEST(StationaryMean, Examples) {
    EXPECT_DOUBLE_EQ(stationary_mean(AcdParams(0.1, 0.2, 0.7)), 0.1 / (1.0 - 0.2 - 0.7));
    EXPECT_NEAR(stationary_mean(AcdParams(0.1, 0.2, 0.7)), 1.0, 1e-12);
    EXPECT_NEAR(stationary_mean(AcdParams(2.0, 0.05, 0.55)), 5.0, 1e-12);
    EXPECT_THROW((void)stationary_mean(AcdParams(1.0, 0.6, 0.5)), InfiniteMeanError);
}

TEST(InnovationLaw, ParseRoundTrip) {
    for (const char* text : {"exponential", "weibull:2", "gamma:4"}) {
        const auto law = InnovationLaw::parse(text);
        EXPECT_EQ(InnovationLaw::parse(law.to_string()), law);
    }
    EXPECT_THROW((void)InnovationLaw::parse("lognormal"), InvalidArgument);
    EXPECT_THROW((void)InnovationLaw::parse("gamma:-1"), InvalidArgument);
    EXPECT_THROW((void)InnovationLaw::parse("weibull:"), InvalidArgument);
}

TEST(InnovationLaw, AnalyticMoments) {
    EXPECT_NEAR(InnovationLaw::exponential().second_moment(), 2.0, 1e-12);
    EXPECT_NEAR(InnovationLaw::weibull(2.0).second_moment(), 4.0 / std::numbers::pi, 1e-12);
    EXPECT_NEAR(InnovationLaw::gamma(4.0).variance(), 0.25, 1e-12);
}

double draws_mean(const InnovationLaw& law, RngSeed seed, std::size_t n, int power) {
    RandomStream rng(seed);
    InnovationSampler sampler(law);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = sampler(rng);
        EXPECT_GT(e, 0.0);
        sum += std::pow(e, power);
    }
    return static_cast<double>(sum / n);
}

TEST(DrawInnovation, ExponentialUnitMean) {
    EXPECT_NEAR(draws_mean(InnovationLaw::exponential(), 11, 1'000'000, 1), 1.0, 0.005);
}

TEST(DrawInnovation, WeibullSecondMoment) {
    const double m2 = draws_mean(InnovationLaw::weibull(2.0), 12, 1'000'000, 2);
    EXPECT_NEAR(m2 / 1.2732395447351628, 1.0, 0.01);
}

TEST(DrawInnovation, GammaVariance) {
    const auto law = InnovationLaw::gamma(4.0);
    const double m1 = draws_mean(law, 13, 1'000'000, 1);
    const double m2 = draws_mean(law, 13, 1'000'000, 2);
    EXPECT_NEAR((m2 - m1 * m1) / 0.25, 1.0, 0.01);
}

TEST(RandomStream, DerivedSeedsAreDistinctAndStable) {
    EXPECT_EQ(derive_seed(1, 0), derive_seed(1, 0));
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    RandomStream a(5);
    RandomStream b(5);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a(), b());
    }
}

TEST(SimulateFixedN, ExactCountAndEventTimes) {
    const auto s = simulate_fixed_n(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(), 500, 3);
    ASSERT_EQ(s.count(), 500u);
    ASSERT_EQ(s.event_times.size(), 500u);
    long double t = 0.0L;
    for (std::size_t i = 0; i < s.count(); ++i) {
        EXPECT_GT(s.durations[i], 0.0);
        t += s.durations[i];
        EXPECT_NEAR(s.event_times[i], static_cast<double>(t), 1e-9 * static_cast<double>(t));
    }
}

TEST(SimulateFixedN, SameSeedIsBitIdentical) {
    const AcdParams p(0.1, 0.2, 0.7);
    const auto a = simulate_fixed_n(p, InnovationLaw::weibull(1.5), 2000, 99);
    const auto b = simulate_fixed_n(p, InnovationLaw::weibull(1.5), 2000, 99);
    EXPECT_EQ(a.durations, b.durations);
    const auto c = simulate_fixed_n(p, InnovationLaw::weibull(1.5), 2000, 100);
    EXPECT_NE(a.durations, c.durations);
}

TEST(SimulateFixedN, MomentLaw) {
    const auto s =
        simulate_fixed_n(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(), 1'000'000, 21);
    EXPECT_NEAR(s.sample_mean(), 1.0, 0.02);
}

TEST(SimulateFixedN, NearZeroDynamicsGiveIidExponentials) {
    const auto s = simulate_fixed_n(AcdParams(1.0, 1e-12, 1e-12), InnovationLaw::exponential(),
                                    10'000, 4);
    const double d = stats::ks_distance(s.durations, [](double x) { return 1.0 - std::exp(-x); });
    EXPECT_GT(oracle::ks_pvalue(d, s.count()), 0.01);
}

TEST(SimulateFixedN, ExplosionNamesIndex) {
    SimulationOptions opts;
    opts.psi_cap = 1e6;
    try {
        (void)simulate_fixed_n(AcdParams(1.0, 3.0, 1.0), InnovationLaw::exponential(), 100'000, 1,
                               opts);
        FAIL() << "expected an explosion";
    } catch (const ExplosionError& e) {
        EXPECT_NE(std::string(e.what()).find("index"), std::string::npos);
    }
}

TEST(SimulateHorizon, CountMatchesWindow) {
    const double T = 1000.0;
    const auto s = simulate_horizon(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(), T, 8);
    ASSERT_FALSE(s.empty());
    EXPECT_LE(s.event_times.back(), T);
    ASSERT_TRUE(s.overshoot.has_value());
    EXPECT_GT(s.event_times.back() + *s.overshoot, T);
    EXPECT_EQ(s.horizon, T);
}

TEST(SimulateHorizon, SharesDrawOrderWithFixedN) {
    const AcdParams p(0.1, 0.2, 0.7);
    const auto h = simulate_horizon(p, InnovationLaw::gamma(2.0), 3000.0, 17);
    const auto f = simulate_fixed_n(p, InnovationLaw::gamma(2.0), h.count(), 17);
    EXPECT_EQ(h.durations, f.durations);
}

TEST(SimulateHorizon, CountingRateAtLongHorizon) {
    const auto s =
        simulate_horizon(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(), 10'000.0, 5);
    const double rate = static_cast<double>(s.count()) / 10'000.0;
    EXPECT_GE(rate, 0.9);
    EXPECT_LE(rate, 1.1);
}

TEST(SimulateHorizon, TinyWindowIsEmptySeriesError) {
    EXPECT_THROW((void)simulate_horizon(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(),
                                        1e-12, 1),
                 EmptySeriesError);
}

TEST(SimulateHorizon, InfiniteMeanNeedsOptIn) {
    const AcdParams p(0.1, 0.9, 0.2);
    EXPECT_THROW((void)simulate_horizon(p, InnovationLaw::exponential(), 100.0, 1),
                 InfiniteMeanError);
    SimulationOptions opts;
    opts.allow_nonstationary = true;
    EXPECT_NO_THROW((void)simulate_horizon(p, InnovationLaw::exponential(), 100.0, 1, opts));
}

TEST(DurationSeries, FromDurationsValidates) {
    EXPECT_THROW((void)DurationSeries::from_durations({1.0, 0.0}), DataError);
    EXPECT_THROW((void)DurationSeries::from_durations({1.0, -2.0}), DataError);
    const auto s = DurationSeries::from_durations({1.0, 2.0, 0.5});
    EXPECT_DOUBLE_EQ(s.effective_horizon(), 3.5);
    EXPECT_DOUBLE_EQ(s.sample_mean(), 3.5 / 3.0);
}

TEST(QuadratureOracle, MatchesFrozenValues) {
    EXPECT_NEAR(oracle::exp_log_affine(0.2, 0.7), kLyapunov_02_07, 1e-10);
    EXPECT_NEAR(oracle::exp_log_affine(1.2, 0.4), kLyapunov_12_04, 1e-10);
    EXPECT_NEAR(oracle::exp_log_affine(0.9, 0.2), kLyapunov_09_02, 1e-10);
}

TEST(LyapunovExponent, DegenerateAlphaIsExact) {
    const auto est = lyapunov_exponent(AcdParams::relaxed(0.1, 0.0, 0.5),
                                       InnovationLaw::weibull(3.0), 10'000, 1);
    EXPECT_DOUBLE_EQ(est.value, std::log(0.5));
    EXPECT_DOUBLE_EQ(est.std_error, 0.0);
}

TEST(LyapunovExponent, WithinThreeStandardErrorsOfQuadrature) {
    const auto est =
        lyapunov_exponent(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(), 1'000'000, 2);
    EXPECT_LT(std::abs(est.value - kLyapunov_02_07), 3.0 * est.std_error);
}

TEST(LyapunovExponent, SignForBreakdownCandidates) {
    const auto positive =
        lyapunov_exponent(AcdParams(0.1, 1.2, 0.4), InnovationLaw::exponential(), 1'000'000, 3);
    EXPECT_GT(positive.value, 0.0);
    EXPECT_LT(std::abs(positive.value - kLyapunov_12_04), 4.0 * positive.std_error);
    const auto negative =
        lyapunov_exponent(AcdParams(0.1, 0.9, 0.2), InnovationLaw::exponential(), 1'000'000, 3);
    EXPECT_LT(negative.value, 0.0);
}

TEST(LyapunovExponent, RequiresEnoughDraws) {
    EXPECT_THROW((void)lyapunov_exponent(AcdParams(0.1, 0.2, 0.7), InnovationLaw::exponential(),
                                         100, 1),
                 InvalidArgument);
}

}  // namespace
}  // namespace acd
