#include "acd/qmle.hpp"

#include "acd/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <string>
#include <utility>
#include <cmath>
#include <limits>

namespace acd {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kEigenFloor = 1e-14;
constexpr double kMaxLogStep = 1.0;
constexpr int kMaxHalvings = 60;
constexpr double kBoundary = 1e-4;
// (alpha, beta) of the extra starts; omega is set so the start matches xbar.
constexpr std::array<std::pair<double, double>, 6> kRestarts{
    {{0.05, 0.9}, {0.1, 0.6}, {0.3, 0.3}, {0.05, 0.5}, {0.3, 0.6}, {0.5, 0.1}}};

/// Mean negative log-likelihood with the recursion carried in extended
/// precision, so that the line search can resolve the small decreases of
/// the final Newton steps. +inf outside the admissible region.
long double mean_objective(const Vector3& theta, std::span<const double> x,
                           const FilterStart& start) {
    if (!(theta.array() > 0.0).all() || !theta.allFinite()) {
        return std::numeric_limits<long double>::infinity();
    }
    const long double omega = theta(0);
    const long double alpha = theta(1);
    const long double beta = theta(2);
    long double psi = 0.0L;
    if (const auto* fixed = std::get_if<InitialState>(&start)) {
        psi = omega + alpha * fixed->x0 + beta * fixed->psi0;
    } else {
        const long double s = 1.0L - alpha - beta;
        if (!(s > 0.0L)) {
            return std::numeric_limits<long double>::infinity();
        }
        psi = omega / s;
    }
    // Kahan-compensated sum.
    long double total = 0.0L;
    long double carry = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0) {
            psi = omega + alpha * x[i - 1] + beta * psi;
        }
        if (!std::isfinite(psi) || !(psi > 0.0L)) {
            return std::numeric_limits<long double>::infinity();
        }
        const long double term = std::log(psi) + x[i] / psi - carry;
        const long double next = total + term;
        carry = (next - total) - term;
        total = next;
    }
    return total / static_cast<long double>(x.size());
}

struct WorkingPoint {
    long double f;
    Vector3 gradient;  // in working coordinates, mean objective
    Matrix3 hessian;   // in working coordinates, mean objective
    ScoreInfo si;
};

WorkingPoint evaluate(const Vector3& theta, std::span<const double> x, const FilterStart& start,
                      Reparam reparam) {
    WorkingPoint wp;
    wp.si = accumulate_score_info(AcdParams::from_vector(theta), x, start);
    wp.f = mean_objective(theta, x, start);
    const double n = static_cast<double>(x.size());
    const Vector3 g = wp.si.score_sum / n;
    const Matrix3 h = wp.si.info_sum / n;
    if (reparam == Reparam::LogParams) {
        // theta = exp(z): grad_z = D g, hess_z = D h D + diag(D g), D = diag(theta).
        const Matrix3 d = theta.asDiagonal();
        wp.gradient = d * g;
        wp.hessian = d * h * d;
        wp.hessian.diagonal() += wp.gradient;
    } else {
        wp.gradient = g;
        wp.hessian = h;
    }
    return wp;
}

/// Newton direction with eigenvalues replaced by max(|lambda|, floor).
Vector3 newton_direction(const Matrix3& hessian, const Vector3& gradient) {
    Eigen::SelfAdjointEigenSolver<Matrix3> eig(0.5 * (hessian + hessian.transpose()));
    Vector3 lambda = eig.eigenvalues().cwiseAbs();
    const double floor = kEigenFloor * std::max(1.0, lambda.maxCoeff());
    lambda = lambda.cwiseMax(floor);
    const Matrix3& v = eig.eigenvectors();
    return -(v * (v.transpose() * gradient).cwiseQuotient(lambda));
}

Vector3 step_theta(const Vector3& theta, const Vector3& direction, double t, Reparam reparam) {
    if (reparam == Reparam::LogParams) {
        return (theta.array().log() + t * direction.array()).exp().matrix();
    }
    return theta + t * direction;
}

double condition_number(const Matrix3& m) {
    Eigen::SelfAdjointEigenSolver<Matrix3> eig(m, Eigen::EigenvaluesOnly);
    const Vector3 abs_lambda = eig.eigenvalues().cwiseAbs();
    const double lo = abs_lambda.minCoeff();
    if (lo == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return abs_lambda.maxCoeff() / lo;
}

}  // namespace

FilterStart resolve_start(const InitStrategy& strategy, const DurationSeries& data) {
    if (std::holds_alternative<SampleMeanInit>(strategy)) {
        const double m = data.sample_mean();
        return InitialState{m, m};
    }
    if (const auto* fixed = std::get_if<InitialState>(&strategy)) {
        return *fixed;
    }
    return ModelImpliedStart{};
}

SandwichCovariances sandwich_covariances(const Matrix3& omega_S, const Matrix3& omega_I,
                                         std::size_t n, double horizon, double mu_hat,
                                         double condition_cap) {
    if (n == 0 || !(horizon > 0.0) || !(mu_hat > 0.0)) {
        throw InvalidArgument("sandwich_covariances requires n >= 1, T > 0 and mu_hat > 0");
    }
    const double cond = condition_number(omega_I);
    if (!(cond <= condition_cap)) {
        throw SingularMatrixError(cond);
    }
    const Matrix3 inv = omega_I.inverse();
    Matrix3 cov = inv * omega_S * inv.transpose();
    cov = 0.5 * (cov + cov.transpose());

    SandwichCovariances out;
    out.cov_per_obs = cov;
    out.cov_per_time = mu_hat * cov;
    out.std_errors = (cov.diagonal() / static_cast<double>(n)).cwiseSqrt();
    out.std_errors_per_time = (out.cov_per_time.diagonal() / horizon).cwiseSqrt();
    out.coherence_gap = std::abs(static_cast<double>(n) * mu_hat / horizon - 1.0);
    out.condition_number = cond;
    return out;
}

namespace {

struct NewtonRun {
    Vector3 theta;
    WorkingPoint wp;
    std::size_t iterations = 0;
    bool converged = false;
    std::string termination = "max_iterations";
};

NewtonRun newton(Vector3 theta, std::span<const double> x, const FilterStart& start,
                 const EstimateOptions& options) {
    NewtonRun run;
    WorkingPoint wp = evaluate(theta, x, start, options.reparam);
    std::size_t iter = 0;
    for (;;) {
        if (wp.gradient.norm() <= options.gradient_tolerance) {
            run.converged = true;
            run.termination = "gradient";
            break;
        }
        if (iter >= options.max_iterations) {
            break;
        }
        Vector3 direction = newton_direction(wp.hessian, wp.gradient);
        double t = 1.0;
        if (options.reparam == Reparam::LogParams) {
            const double largest = direction.cwiseAbs().maxCoeff();
            if (largest > kMaxLogStep) {
                direction *= kMaxLogStep / largest;
            }
        } else {
            // Stay inside the positive orthant.
            for (int j = 0; j < 3; ++j) {
                if (direction(j) < 0.0) {
                    t = std::min(t, -0.95 * theta(j) / direction(j));
                }
            }
        }
        const long double slope = wp.gradient.dot(direction);
        bool accepted = false;
        Vector3 trial;
        for (int k = 0; k < kMaxHalvings; ++k, t *= 0.5) {
            trial = step_theta(theta, direction, t, options.reparam);
            const long double f_trial = mean_objective(trial, x, start);
            if (f_trial <= wp.f + kArmijo * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            run.termination = "line_search";
            break;
        }
        theta = trial;
        wp = evaluate(theta, x, start, options.reparam);
        ++iter;
    }
    run.theta = theta;
    run.wp = wp;
    run.iterations = iter;
    return run;
}

/// A coordinate has drifted onto the edge of the parameter space, where a
/// local optimum of the constrained problem need not be the global one.
bool on_boundary(const Vector3& theta, double xbar) {
    return theta(0) < kBoundary * xbar || theta(1) < kBoundary || theta(2) < kBoundary;
}

}  // namespace

EstimateResult estimate(const DurationSeries& data, const EstimateOptions& options) {
    if (options.max_iterations < 1 || !(options.gradient_tolerance > 0.0)) {
        throw InvalidArgument("estimate requires max_iterations >= 1 and gradient_tolerance > 0");
    }
    if (data.count() < options.min_observations) {
        throw DataError("estimation needs at least " + std::to_string(options.min_observations) +
                        " durations, got " + std::to_string(data.count()));
    }
    const std::span<const double> x(data.durations);
    const FilterStart start = resolve_start(options.init_strategy, data);
    const double xbar = data.sample_mean();

    const Vector3 theta0 = options.theta_start ? options.theta_start->vector()
                                               : Vector3(0.1 * xbar, 0.1, 0.8);
    if (std::holds_alternative<ModelImpliedStart>(start) && theta0(1) + theta0(2) >= 1.0) {
        throw InvalidArgument("model-implied filter start needs a finite-mean theta_start");
    }

    NewtonRun best = newton(theta0, x, start, options);
    std::size_t starts = 1;
    if (options.restart_on_boundary && on_boundary(best.theta, xbar)) {
        for (const auto& [alpha, beta] : kRestarts) {
            NewtonRun run = newton(Vector3((1.0 - alpha - beta) * xbar, alpha, beta), x, start,
                                   options);
            ++starts;
            if (run.wp.f < best.wp.f) {
                best = std::move(run);
            }
        }
    }

    EstimateResult result;
    const Vector3& theta = best.theta;
    const WorkingPoint& wp = best.wp;
    const std::size_t iter = best.iterations;
    result.converged = best.converged;
    result.termination = best.termination;
    result.starts = starts;

    const double n = static_cast<double>(data.count());
    result.theta_hat = AcdParams::from_vector(theta);
    result.iterations = iter;
    result.final_gradient_norm = wp.gradient.norm();
    result.neg_loglik = static_cast<double>(wp.f * static_cast<long double>(n));
    result.n = data.count();
    result.horizon = data.effective_horizon();
    result.horizon_from_last_event = !data.horizon.has_value();
    const NormalizedOmegas omegas = normalized_omegas(wp.si);
    result.omega_S_hat = omegas.omega_S;
    result.omega_I_hat = omegas.omega_I;
    result.mu_hat = xbar;
    result.min_info_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Matrix3>(omegas.omega_I, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    result.stationarity_flag = result.theta_hat.finite_mean();
    try {
        const SandwichCovariances cov = sandwich_covariances(
            omegas.omega_S, omegas.omega_I, data.count(), result.horizon, xbar,
            options.condition_cap);
        result.cov_per_obs = cov.cov_per_obs;
        result.cov_per_time = cov.cov_per_time;
        result.std_errors = cov.std_errors;
        result.std_errors_per_time = cov.std_errors_per_time;
    } catch (const SingularMatrixError&) {
        result.singular_information = true;
    }
    return result;
}

}  // namespace acd
