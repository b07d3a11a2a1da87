#include "acd/params.hpp"

#include "acd/errors.hpp"

#include <cmath>
#include <array>
#include <charconv>

namespace acd {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(name) + " must be finite");
    }
}

}  // namespace

AcdParams::AcdParams(double omega, double alpha, double beta)
    : omega_(omega), alpha_(alpha), beta_(beta) {
    require_finite(omega, "omega");
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    if (!(omega > 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
        throw InvalidArgument("omega, alpha and beta must be strictly positive (got " + to_string() +
                              ")");
    }
}

AcdParams AcdParams::relaxed(double omega, double alpha, double beta) {
    require_finite(omega, "omega");
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    if (!(omega > 0.0) || alpha < 0.0 || beta < 0.0) {
        throw InvalidArgument("omega must be positive and alpha, beta non-negative");
    }
    return AcdParams(omega, alpha, beta, Unchecked{});
}

AcdParams AcdParams::from_vector(const Vector3& theta) {
    return AcdParams(theta(0), theta(1), theta(2));
}

std::string AcdParams::to_string() const {
    auto fmt = [](double v) {
        std::array<char, 32> buf{};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), ptr);
    };
    return "(omega=" + fmt(omega_) + ", alpha=" + fmt(alpha_) + ", beta=" + fmt(beta_) + ")";
}

InitialState::InitialState(double x0_, double psi0_) : x0(x0_), psi0(psi0_) {
    if (!std::isfinite(x0) || !std::isfinite(psi0) || !(x0 > 0.0) || !(psi0 > 0.0)) {
        throw InvalidArgument("initial state (x0, psi0) must be strictly positive and finite");
    }
}

double stationary_mean(const AcdParams& params) {
    if (!params.finite_mean()) {
        throw InfiniteMeanError("alpha + beta = " + std::to_string(params.persistence()) +
                                " >= 1: durations have no finite mean");
    }
    return params.omega() / (1.0 - params.alpha() - params.beta());
}

}  // namespace acd
