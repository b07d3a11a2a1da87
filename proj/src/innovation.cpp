#include "acd/innovation.hpp"

#include "acd/errors.hpp"

#include <charconv>
#include <cmath>

namespace acd {

namespace {

double parse_shape(std::string_view text, std::string_view family) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw InvalidArgument("invalid " + std::string(family) + " shape '" + std::string(text) +
                              "'");
    }
    return value;
}

}  // namespace

InnovationLaw InnovationLaw::exponential() { return {Family::Exponential, 1.0, 1.0}; }

InnovationLaw InnovationLaw::weibull(double shape) {
    if (!std::isfinite(shape) || !(shape > 0.0)) {
        throw InvalidArgument("Weibull shape must be positive");
    }
    return {Family::Weibull, shape, 1.0 / std::tgamma(1.0 + 1.0 / shape)};
}

InnovationLaw InnovationLaw::gamma(double shape) {
    if (!std::isfinite(shape) || !(shape > 0.0)) {
        throw InvalidArgument("gamma shape must be positive");
    }
    return {Family::Gamma, shape, 1.0 / shape};
}

InnovationLaw InnovationLaw::parse(std::string_view text) {
    if (text == "exponential") {
        return exponential();
    }
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        const auto family = text.substr(0, colon);
        const auto shape = text.substr(colon + 1);
        if (family == "weibull") {
            return weibull(parse_shape(shape, family));
        }
        if (family == "gamma") {
            return gamma(parse_shape(shape, family));
        }
    }
    throw InvalidArgument("unknown innovation law '" + std::string(text) +
                          "' (expected exponential, weibull:K or gamma:A)");
}

double InnovationLaw::second_moment() const {
    switch (family_) {
        case Family::Exponential:
            return 2.0;
        case Family::Weibull: {
            const double g1 = std::tgamma(1.0 + 1.0 / shape_);
            return std::tgamma(1.0 + 2.0 / shape_) / (g1 * g1);
        }
        case Family::Gamma:
            return 1.0 + 1.0 / shape_;
    }
    return 0.0;
}

std::string InnovationLaw::to_string() const {
    char buf[64];
    switch (family_) {
        case Family::Exponential:
            return "exponential";
        case Family::Weibull: {
            auto res = std::to_chars(buf, buf + sizeof buf, shape_);
            return "weibull:" + std::string(buf, res.ptr);
        }
        case Family::Gamma: {
            auto res = std::to_chars(buf, buf + sizeof buf, shape_);
            return "gamma:" + std::string(buf, res.ptr);
        }
    }
    return {};
}

InnovationSampler::InnovationSampler(const InnovationLaw& law)
    : dist_(std::exponential_distribution<double>(1.0)) {
    switch (law.family()) {
        case InnovationLaw::Family::Exponential:
            break;
        case InnovationLaw::Family::Weibull:
            dist_ = std::weibull_distribution<double>(law.shape(), law.scale());
            break;
        case InnovationLaw::Family::Gamma:
            dist_ = std::gamma_distribution<double>(law.shape(), law.scale());
            break;
    }
}

double InnovationSampler::operator()(RandomStream& rng) {
    return std::visit(
        [&rng](auto& dist) {
            double e = dist(rng);
            while (!(e > 0.0)) {
                e = dist(rng);
            }
            return e;
        },
        dist_);
}

double draw_innovation(const InnovationLaw& law, RandomStream& rng) {
    InnovationSampler sampler(law);
    return sampler(rng);
}

}  // namespace acd
