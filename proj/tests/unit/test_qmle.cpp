#include "acd/errors.hpp"
#include "acd/filter.hpp"
#include "acd/qmle.hpp"
#include "acd/simulate.hpp"
#include "acd/stats.hpp"
#include "support/oracles.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <cmath>

namespace acd {
namespace {

const AcdParams kTheta0(0.1, 0.2, 0.7);

DurationSeries horizon_sample(double T, RngSeed seed) {
    return simulate_horizon(kTheta0, InnovationLaw::exponential(), T, seed);
}

TEST(Estimate, RecoversTruthOnLongSample) {
    const auto data = horizon_sample(20'000.0, 1);
    const auto r = estimate(data);
    ASSERT_TRUE(r.converged);
    EXPECT_EQ(r.termination, "gradient");
    EXPECT_TRUE(r.stationarity_flag);
    ASSERT_TRUE(r.std_errors.has_value());
    for (int j = 0; j < 3; ++j) {
        EXPECT_LT(std::abs(r.theta_hat.vector()(j) - kTheta0.vector()(j)), 4.0 * (*r.std_errors)(j));
    }
    EXPECT_GT(r.min_info_eigenvalue, 0.0);
    EXPECT_EQ(r.n, data.count());
    EXPECT_EQ(r.horizon, 20'000.0);
    EXPECT_FALSE(r.horizon_from_last_event);
    EXPECT_DOUBLE_EQ(r.mu_hat, data.sample_mean());
}

TEST(Estimate, FixedPointReturnsStartUnchanged) {
    const auto data = horizon_sample(3000.0, 2);
    const auto first = estimate(data);
    ASSERT_TRUE(first.converged);
    EstimateOptions opts;
    opts.theta_start = first.theta_hat;
    const auto again = estimate(data, opts);
    EXPECT_EQ(again.iterations, 0u);
    EXPECT_TRUE(again.converged);
    EXPECT_EQ(again.theta_hat, first.theta_hat);
}

TEST(Estimate, LogAndRawCoordinatesAgree) {
    const auto data = horizon_sample(5000.0, 3);
    EstimateOptions raw;
    raw.reparam = Reparam::Raw;
    const auto a = estimate(data);
    const auto b = estimate(data, raw);
    ASSERT_TRUE(a.converged);
    ASSERT_TRUE(b.converged);
    EXPECT_LT((a.theta_hat.vector() - b.theta_hat.vector()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Estimate, LineSearchIsMonotone) {
    const auto data = horizon_sample(2000.0, 4);
    double previous = INFINITY;
    for (std::size_t k = 1; k <= 12; ++k) {
        EstimateOptions opts;
        opts.max_iterations = k;
        const auto r = estimate(data, opts);
        EXPECT_LE(r.neg_loglik, previous + 1e-9 * std::abs(r.neg_loglik)) << "k=" << k;
        previous = r.neg_loglik;
    }
}

TEST(Estimate, IterationCapReportsNonConvergence) {
    const auto data = horizon_sample(2000.0, 5);
    EstimateOptions opts;
    opts.max_iterations = 1;
    const auto r = estimate(data, opts);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.termination, "max_iterations");
    EXPECT_EQ(r.iterations, 1u);
}

TEST(Estimate, InitialisationInsensitiveAtLargeN) {
    const auto data = simulate_fixed_n(kTheta0, InnovationLaw::exponential(), 100'000, 6);
    EstimateOptions fixed;
    fixed.init_strategy = InitialState{1.0, 1.0};
    EstimateOptions model;
    model.init_strategy = ModelImpliedStart{};
    const auto a = estimate(data);
    const auto b = estimate(data, fixed);
    const auto c = estimate(data, model);
    EXPECT_LT((a.theta_hat.vector() - b.theta_hat.vector()).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_LT((a.theta_hat.vector() - c.theta_hat.vector()).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Estimate, RejectsShortDataAndBadOptions) {
    const auto tiny = DurationSeries::from_durations({1.0, 2.0, 0.5});
    EXPECT_THROW((void)estimate(tiny), DataError);
    const auto data = horizon_sample(500.0, 7);
    EstimateOptions opts;
    opts.max_iterations = 0;
    EXPECT_THROW((void)estimate(data, opts), InvalidArgument);
    opts = {};
    opts.gradient_tolerance = 0.0;
    EXPECT_THROW((void)estimate(data, opts), InvalidArgument);
}

TEST(Estimate, HorizonDefaultsToLastEventTime) {
    auto sim = horizon_sample(1000.0, 8);
    const auto data = DurationSeries::from_durations(sim.durations);
    const auto r = estimate(data);
    EXPECT_TRUE(r.horizon_from_last_event);
    EXPECT_DOUBLE_EQ(r.horizon, sim.event_times.back());
}

TEST(Estimate, StandardErrorsCoherentAcrossNormalisations) {
    const auto data = horizon_sample(4000.0, 9);
    const auto r = estimate(data);
    ASSERT_TRUE(r.std_errors && r.std_errors_per_time);
    const double gap = std::abs(static_cast<double>(r.n) * r.mu_hat / r.horizon - 1.0);
    for (int j = 0; j < 3; ++j) {
        const double ratio = (*r.std_errors_per_time)(j) / (*r.std_errors)(j);
        EXPECT_NEAR(ratio * ratio, 1.0, gap + 1e-12);
    }
}

TEST(Estimate, NewtonNeverWorseThanGridOracle) {
    for (RngSeed seed = 1; seed <= 3; ++seed) {
        const auto data =
            simulate_fixed_n(kTheta0, InnovationLaw::exponential(), 50, derive_seed(77, seed));
        const auto r = estimate(data);
        const double m = data.sample_mean();
        const auto grid = oracle::grid_search(data.durations, m, m, Vector3(0.01, 0.01, 0.01),
                                              Vector3(1.0, 0.9, 0.9), 0.01);
        const double newton = oracle::naive_neg_loglik(r.theta_hat.vector(), data.durations, m, m);
        EXPECT_LE(newton, grid.value + 1e-9) << "seed " << seed;
    }
}

TEST(Estimate, CoverageOfThreeStandardErrors) {
    int inside = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        const auto data = horizon_sample(5000.0, derive_seed(31, r));
        const auto est = estimate(data);
        ASSERT_TRUE(est.std_errors.has_value());
        const Vector3 z = (est.theta_hat.vector() - kTheta0.vector()).cwiseQuotient(*est.std_errors);
        inside += z.cwiseAbs().maxCoeff() <= 3.0 ? 1 : 0;
    }
    EXPECT_GE(inside, static_cast<int>(0.95 * reps));
}

TEST(SandwichCovariances, IdentityAlgebra) {
    const Matrix3 id = Matrix3::Identity();
    const auto cov = sandwich_covariances(id, id, 100, 200.0, 2.0);
    EXPECT_TRUE(cov.cov_per_obs.isApprox(id));
    EXPECT_TRUE(cov.cov_per_time.isApprox(2.0 * id));
    for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(cov.std_errors(j), 0.1, 1e-15);
        EXPECT_NEAR(cov.std_errors_per_time(j), 0.1, 1e-15);
    }
    EXPECT_NEAR(cov.coherence_gap, 0.0, 1e-15);
}

TEST(SandwichCovariances, SingularInformationRejected) {
    Matrix3 singular = Matrix3::Identity();
    singular(2, 2) = 0.0;
    try {
        (void)sandwich_covariances(Matrix3::Identity(), singular, 10, 10.0, 1.0);
        FAIL() << "expected SingularMatrixError";
    } catch (const SingularMatrixError& e) {
        EXPECT_TRUE(std::isinf(e.condition_number()));
    }
}

TEST(SandwichCovariances, ExponentialCaseReducesToInverseInformation) {
    const auto data = simulate_fixed_n(kTheta0, InnovationLaw::exponential(), 100'000, 10);
    const auto omegas = normalized_omegas(accumulate_score_info(kTheta0, data.durations, *data.start));
    const auto cov = sandwich_covariances(omegas.omega_S, omegas.omega_I, data.count(),
                                          data.effective_horizon(), data.sample_mean());
    EXPECT_LT(stats::relative_frobenius(cov.cov_per_obs, omegas.omega_I.inverse()), 0.1);
}

}  // namespace
}  // namespace acd
