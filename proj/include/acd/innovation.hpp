#pragma once

#include "acd/random.hpp"

#include <random>
#include <string>
#include <string_view>
#include <variant>

namespace acd {

/// Unit-mean positive innovation law. Every family is rescaled so that
/// E[eps] = 1 exactly.
class InnovationLaw {
public:
    enum class Family { Exponential, Weibull, Gamma };

    static InnovationLaw exponential();
    /// Weibull with shape k, scale 1 / Gamma(1 + 1/k).
    static InnovationLaw weibull(double shape);
    /// Gamma with shape a, scale 1 / a.
    static InnovationLaw gamma(double shape);

    /// Parses "exponential", "weibull:K" or "gamma:A".
    static InnovationLaw parse(std::string_view text);

    [[nodiscard]] Family family() const noexcept { return family_; }
    /// Shape parameter (1 for the exponential family).
    [[nodiscard]] double shape() const noexcept { return shape_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }

    [[nodiscard]] static constexpr double mean() noexcept { return 1.0; }
    [[nodiscard]] double second_moment() const;
    [[nodiscard]] double variance() const { return second_moment() - 1.0; }

    /// Canonical text form accepted by parse().
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const InnovationLaw&, const InnovationLaw&) = default;

private:
    InnovationLaw(Family family, double shape, double scale) noexcept
        : family_(family), shape_(shape), scale_(scale) {}

    Family family_;
    double shape_;
    double scale_;
};

/// Stateful sampler for one law; owns the distribution object so that
/// families with internal caches (gamma) draw a reproducible sequence.
class InnovationSampler {
public:
    explicit InnovationSampler(const InnovationLaw& law);

    /// Strictly positive draw; zero draws are rejected and redrawn.
    double operator()(RandomStream& rng);

private:
    std::variant<std::exponential_distribution<double>, std::weibull_distribution<double>,
                 std::gamma_distribution<double>>
        dist_;
};

/// Single draw from a freshly constructed sampler.
[[nodiscard]] double draw_innovation(const InnovationLaw& law, RandomStream& rng);

}  // namespace acd
