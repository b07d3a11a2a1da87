#pragma once

#include "acd/params.hpp"
#include "acd/simulate.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace acd {

/// psi_0 = x_0 = omega / (1 - alpha - beta), re-evaluated for every
/// candidate theta, so the start itself carries parameter derivatives.
struct ModelImpliedStart {};

/// How the likelihood recursion is started: from fixed values, or from the
/// candidate's own stationary mean.
using FilterStart = std::variant<InitialState, ModelImpliedStart>;

/// Full per-observation output of the likelihood recursion.
struct FilterOutput {
    std::vector<double> psi;            // psi_i(theta)
    std::vector<Vector3> dpsi;          // d psi_i / d theta
    std::vector<Matrix3> d2psi;         // d^2 psi_i / d theta d theta'
    std::vector<double> loglik_terms;   // l_i = log psi_i + x_i / psi_i
    double neg_loglik = 0.0;            // sum of l_i
};

/// Unnormalized sums of per-observation scores and information.
///   score_sum = sum_i d l_i / d theta
///   info_sum  = sum_i d^2 l_i / d theta d theta'
///   outer_sum = sum_i (d l_i / d theta)(d l_i / d theta)'
/// info_sum is the Hessian of the negative log-likelihood, i.e. the sign
/// convention under which its expectation at the truth is positive definite.
struct ScoreInfo {
    Vector3 score_sum = Vector3::Zero();
    Matrix3 info_sum = Matrix3::Zero();
    Matrix3 outer_sum = Matrix3::Zero();
    std::size_t n = 0;
};

struct NormalizedOmegas {
    Matrix3 omega_S;  // outer_sum / n
    Matrix3 omega_I;  // info_sum / n
};

/// Runs the psi recursion and its first and second parameter derivatives.
/// Throws FilterDivergenceError on a non-finite or non-positive psi.
[[nodiscard]] FilterOutput run_filter(const AcdParams& theta, std::span<const double> durations,
                                      const FilterStart& start);
[[nodiscard]] FilterOutput run_filter(const AcdParams& theta, const DurationSeries& data,
                                      const FilterStart& start);

/// Builds score and information sums from a stored filter pass.
/// Throws DataError if the filter and data lengths differ.
[[nodiscard]] ScoreInfo score_and_info(const AcdParams& theta, const FilterOutput& filter,
                                       std::span<const double> durations);
[[nodiscard]] ScoreInfo score_and_info(const AcdParams& theta, const FilterOutput& filter,
                                       const DurationSeries& data);

[[nodiscard]] NormalizedOmegas normalized_omegas(const ScoreInfo& si);

/// Single pass without storing per-observation output; same values as
/// run_filter followed by score_and_info.
[[nodiscard]] ScoreInfo accumulate_score_info(const AcdParams& theta,
                                              std::span<const double> durations,
                                              const FilterStart& start,
                                              double* neg_loglik = nullptr);

/// Negative log-likelihood only. Throws FilterDivergenceError.
[[nodiscard]] double neg_loglik(const AcdParams& theta, std::span<const double> durations,
                                const FilterStart& start);

/// Per-observation scores d l_i / d theta, i = 1..n.
[[nodiscard]] std::vector<Vector3> observation_scores(const AcdParams& theta,
                                                     std::span<const double> durations,
                                                     const FilterStart& start);

}  // namespace acd
