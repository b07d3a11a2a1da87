#pragma once

#include <Eigen/Core>

#include <string>

namespace acd {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// ACD(1,1) parameter triple (omega, alpha, beta) of the recursion
///   psi_i = omega + alpha * x_{i-1} + beta * psi_{i-1}.
///
/// The ordinary constructor enforces strict positivity of all three
/// coordinates, which is the estimable parameter space. relaxed() also
/// admits alpha = 0 or beta = 0 for analytic fixtures; such values are
/// rejected by the likelihood and estimation code.
class AcdParams {
public:
    AcdParams(double omega, double alpha, double beta);

    static AcdParams relaxed(double omega, double alpha, double beta);
    static AcdParams from_vector(const Vector3& theta);

    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    [[nodiscard]] double persistence() const noexcept { return alpha_ + beta_; }
    [[nodiscard]] bool finite_mean() const noexcept { return alpha_ + beta_ < 1.0; }
    [[nodiscard]] bool strictly_positive() const noexcept {
        return omega_ > 0.0 && alpha_ > 0.0 && beta_ > 0.0;
    }

    [[nodiscard]] Vector3 vector() const { return {omega_, alpha_, beta_}; }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const AcdParams&, const AcdParams&) = default;

private:
    struct Unchecked {};
    AcdParams(double omega, double alpha, double beta, Unchecked) noexcept
        : omega_(omega), alpha_(alpha), beta_(beta) {}

    double omega_;
    double alpha_;
    double beta_;
};

/// Starting values (x_0, psi_0) for the recursion.
struct InitialState {
    double x0;
    double psi0;

    InitialState(double x0_, double psi0_);
    friend bool operator==(const InitialState&, const InitialState&) = default;
};

/// Unconditional mean duration omega / (1 - alpha - beta).
/// Throws InfiniteMeanError when alpha + beta >= 1.
[[nodiscard]] double stationary_mean(const AcdParams& params);

}  // namespace acd
