#pragma once

#include "acd/filter.hpp"
#include "acd/params.hpp"
#include "acd/simulate.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

namespace acd {

/// Filter start used during estimation.
struct SampleMeanInit {};
using InitStrategy = std::variant<SampleMeanInit, InitialState, ModelImpliedStart>;

enum class Reparam { LogParams, Raw };

struct EstimateOptions {
    std::size_t max_iterations = 200;
    /// Bound on the Euclidean norm of the gradient of the mean negative
    /// log-likelihood in the working coordinates (log or raw).
    double gradient_tolerance = 1e-9;
    InitStrategy init_strategy = SampleMeanInit{};
    std::optional<AcdParams> theta_start;
    Reparam reparam = Reparam::LogParams;
    std::size_t min_observations = 10;
    /// When the first Newton run ends with a coordinate near zero, rerun
    /// from a fixed set of interior starts and keep the lowest objective.
    bool restart_on_boundary = true;
    double condition_cap = 1e12;
};

struct SandwichCovariances {
    Matrix3 cov_per_obs;        // Avar of sqrt(n) (theta_hat - theta_0)
    Matrix3 cov_per_time;       // Avar of sqrt(T) (theta_hat - theta_0)
    Vector3 std_errors;         // sqrt(diag(cov_per_obs) / n)
    Vector3 std_errors_per_time;  // sqrt(diag(cov_per_time) / T)
    double coherence_gap;       // |n mu_hat / T - 1|
    double condition_number;    // of omega_I_hat
};

struct EstimateResult {
    AcdParams theta_hat{1.0, 0.1, 0.8};
    bool converged = false;
    std::size_t iterations = 0;  // of the run that produced theta_hat
    std::size_t starts = 1;      // Newton runs performed
    double final_gradient_norm = 0.0;
    double neg_loglik = 0.0;
    std::size_t n = 0;
    double horizon = 0.0;
    bool horizon_from_last_event = false;
    Matrix3 omega_S_hat = Matrix3::Zero();
    Matrix3 omega_I_hat = Matrix3::Zero();
    double mu_hat = 0.0;
    /// Smallest eigenvalue of omega_I_hat; positive means the objective is
    /// locally strictly convex (the likelihood locally concave) at theta_hat.
    double min_info_eigenvalue = 0.0;
    bool singular_information = false;
    std::optional<Matrix3> cov_per_obs;
    std::optional<Matrix3> cov_per_time;
    std::optional<Vector3> std_errors;
    std::optional<Vector3> std_errors_per_time;
    bool stationarity_flag = false;  // alpha_hat + beta_hat < 1
    std::string termination;         // "gradient", "max_iterations", "line_search"
};

/// Newton iteration on the negative log-likelihood with an eigenvalue
/// floored Hessian and Armijo backtracking. Hitting the iteration cap is
/// reported through `converged`, not thrown. Throws DataError when the
/// series has fewer than options.min_observations durations.
[[nodiscard]] EstimateResult estimate(const DurationSeries& data,
                                      const EstimateOptions& options = {});

/// Omega_I^{-1} Omega_S Omega_I^{-1} and its per-time rescaling by mu_hat.
/// Throws SingularMatrixError when cond(omega_I) exceeds condition_cap.
[[nodiscard]] SandwichCovariances sandwich_covariances(const Matrix3& omega_S,
                                                       const Matrix3& omega_I, std::size_t n,
                                                       double horizon, double mu_hat,
                                                       double condition_cap = 1e12);

/// Resolves an InitStrategy against data into a FilterStart.
[[nodiscard]] FilterStart resolve_start(const InitStrategy& strategy, const DurationSeries& data);

}  // namespace acd
