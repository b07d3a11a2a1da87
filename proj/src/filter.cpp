#include "acd/filter.hpp"

#include "acd/errors.hpp"

#include <cmath>
#include <string>

namespace acd {

namespace {

using Vector3L = Eigen::Matrix<long double, 3, 1>;
using Matrix3L = Eigen::Matrix<long double, 3, 3>;

void require_estimable(const AcdParams& theta) {
    if (!theta.strictly_positive()) {
        throw InvalidArgument("likelihood requires strictly positive parameters, got " +
                              theta.to_string());
    }
}

void require_nonempty(std::span<const double> x) {
    if (x.empty()) {
        throw DataError("likelihood of an empty duration series");
    }
}

/// psi recursion with first and second derivatives. Holds the values for
/// the current observation i; advance() moves to i + 1 given x_i.
class Recursion {
public:
    Recursion(const AcdParams& theta, const FilterStart& start)
        : omega_(theta.omega()), alpha_(theta.alpha()), beta_(theta.beta()) {
        if (const auto* fixed = std::get_if<InitialState>(&start)) {
            psi_ = omega_ + alpha_ * fixed->x0 + beta_ * fixed->psi0;
            dpsi_ = {1.0, fixed->x0, fixed->psi0};
            d2psi_.setZero();
        } else {
            // With x_0 = psi_0 = m(theta), psi_1 = omega + (alpha + beta) m = m.
            const double s = 1.0 - alpha_ - beta_;
            if (!(s > 0.0)) {
                throw FilterDivergenceError(1);
            }
            const double m = omega_ / s;
            const double dm = omega_ / (s * s);
            const double d2m = 2.0 * omega_ / (s * s * s);
            const double cross = 1.0 / (s * s);
            psi_ = m;
            dpsi_ = {1.0 / s, dm, dm};
            d2psi_ << 0.0, cross, cross,
                      cross, d2m, d2m,
                      cross, d2m, d2m;
        }
        check(1);
    }

    [[nodiscard]] double psi() const noexcept { return psi_; }
    [[nodiscard]] const Vector3& dpsi() const noexcept { return dpsi_; }
    [[nodiscard]] const Matrix3& d2psi() const noexcept { return d2psi_; }

    void advance(double x_prev, std::size_t index) {
        // d2psi_i = beta d2psi_{i-1} + e_beta dpsi_{i-1}' + dpsi_{i-1} e_beta'
        d2psi_ *= beta_;
        d2psi_.row(2) += dpsi_.transpose();
        d2psi_.col(2) += dpsi_;
        // dpsi_i = (1, x_{i-1}, psi_{i-1}) + beta dpsi_{i-1}
        dpsi_ *= beta_;
        dpsi_(0) += 1.0;
        dpsi_(1) += x_prev;
        dpsi_(2) += psi_;
        psi_ = omega_ + alpha_ * x_prev + beta_ * psi_;
        check(index);
    }

private:
    void check(std::size_t index) const {
        if (!std::isfinite(psi_) || !(psi_ > 0.0)) {
            throw FilterDivergenceError(index);
        }
    }

    double omega_;
    double alpha_;
    double beta_;
    double psi_ = 0.0;
    Vector3 dpsi_ = Vector3::Zero();
    Matrix3 d2psi_ = Matrix3::Zero();
};

double psi_start(const AcdParams& theta, const FilterStart& start) {
    if (const auto* fixed = std::get_if<InitialState>(&start)) {
        return theta.omega() + theta.alpha() * fixed->x0 + theta.beta() * fixed->psi0;
    }
    const double s = 1.0 - theta.alpha() - theta.beta();
    if (!(s > 0.0)) {
        throw FilterDivergenceError(1);
    }
    return theta.omega() / s;
}

Matrix3 symmetrized(const Matrix3L& m) {
    const Matrix3 d = m.cast<double>();
    return 0.5 * (d + d.transpose());
}

/// Adds observation i to the running sums.
inline void accumulate(double x, double psi, const Vector3& dpsi, const Matrix3& d2psi,
                       Vector3L& score, Matrix3L& info, Matrix3L& outer) {
    const double ratio = x / psi;
    const double g = (1.0 - ratio) / psi;
    const Vector3 xi = g * dpsi;
    const Matrix3 zeta =
        ((2.0 * ratio - 1.0) / (psi * psi)) * (dpsi * dpsi.transpose()) + g * d2psi;
    score += xi.cast<long double>();
    info += zeta.cast<long double>();
    outer += (xi * xi.transpose()).cast<long double>();
}

}  // namespace

FilterOutput run_filter(const AcdParams& theta, std::span<const double> durations,
                        const FilterStart& start) {
    require_estimable(theta);
    require_nonempty(durations);
    const std::size_t n = durations.size();
    FilterOutput out;
    out.psi.reserve(n);
    out.dpsi.reserve(n);
    out.d2psi.reserve(n);
    out.loglik_terms.reserve(n);

    Recursion rec(theta, start);
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            rec.advance(durations[i - 1], i + 1);
        }
        const double psi = rec.psi();
        const double term = std::log(psi) + durations[i] / psi;
        if (!std::isfinite(term)) {
            throw FilterDivergenceError(i + 1);
        }
        out.psi.push_back(psi);
        out.dpsi.push_back(rec.dpsi());
        out.d2psi.push_back(rec.d2psi());
        out.loglik_terms.push_back(term);
        total += term;
    }
    out.neg_loglik = static_cast<double>(total);
    return out;
}

FilterOutput run_filter(const AcdParams& theta, const DurationSeries& data,
                        const FilterStart& start) {
    return run_filter(theta, std::span<const double>(data.durations), start);
}

ScoreInfo score_and_info(const AcdParams& theta, const FilterOutput& filter,
                         std::span<const double> durations) {
    require_estimable(theta);
    const std::size_t n = durations.size();
    if (filter.psi.size() != n || filter.dpsi.size() != n || filter.d2psi.size() != n) {
        throw DataError("filter output has " + std::to_string(filter.psi.size()) +
                        " observations but data has " + std::to_string(n));
    }
    Vector3L score = Vector3L::Zero();
    Matrix3L info = Matrix3L::Zero();
    Matrix3L outer = Matrix3L::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        accumulate(durations[i], filter.psi[i], filter.dpsi[i], filter.d2psi[i], score, info,
                   outer);
    }
    ScoreInfo si;
    si.score_sum = score.cast<double>();
    si.info_sum = symmetrized(info);
    si.outer_sum = symmetrized(outer);
    si.n = n;
    return si;
}

ScoreInfo score_and_info(const AcdParams& theta, const FilterOutput& filter,
                         const DurationSeries& data) {
    return score_and_info(theta, filter, std::span<const double>(data.durations));
}

NormalizedOmegas normalized_omegas(const ScoreInfo& si) {
    if (si.n == 0) {
        throw DataError("normalized_omegas requires at least one observation");
    }
    const double n = static_cast<double>(si.n);
    return {si.outer_sum / n, si.info_sum / n};
}

ScoreInfo accumulate_score_info(const AcdParams& theta, std::span<const double> durations,
                                const FilterStart& start, double* neg_loglik_out) {
    require_estimable(theta);
    require_nonempty(durations);
    const std::size_t n = durations.size();
    Vector3L score = Vector3L::Zero();
    Matrix3L info = Matrix3L::Zero();
    Matrix3L outer = Matrix3L::Zero();
    long double total = 0.0L;

    Recursion rec(theta, start);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            rec.advance(durations[i - 1], i + 1);
        }
        const double psi = rec.psi();
        total += std::log(psi) + durations[i] / psi;
        accumulate(durations[i], psi, rec.dpsi(), rec.d2psi(), score, info, outer);
    }
    if (neg_loglik_out != nullptr) {
        *neg_loglik_out = static_cast<double>(total);
    }
    ScoreInfo si;
    si.score_sum = score.cast<double>();
    si.info_sum = symmetrized(info);
    si.outer_sum = symmetrized(outer);
    si.n = n;
    return si;
}

double neg_loglik(const AcdParams& theta, std::span<const double> durations,
                  const FilterStart& start) {
    require_estimable(theta);
    require_nonempty(durations);
    const double omega = theta.omega();
    const double alpha = theta.alpha();
    const double beta = theta.beta();
    double psi = psi_start(theta, start);
    long double total = 0.0L;
    for (std::size_t i = 0; i < durations.size(); ++i) {
        if (i > 0) {
            psi = omega + alpha * durations[i - 1] + beta * psi;
        }
        if (!std::isfinite(psi) || !(psi > 0.0)) {
            throw FilterDivergenceError(i + 1);
        }
        total += std::log(psi) + durations[i] / psi;
    }
    const auto value = static_cast<double>(total);
    if (!std::isfinite(value)) {
        throw FilterDivergenceError(durations.size());
    }
    return value;
}

std::vector<Vector3> observation_scores(const AcdParams& theta, std::span<const double> durations,
                                        const FilterStart& start) {
    require_estimable(theta);
    require_nonempty(durations);
    std::vector<Vector3> scores;
    scores.reserve(durations.size());
    Recursion rec(theta, start);
    for (std::size_t i = 0; i < durations.size(); ++i) {
        if (i > 0) {
            rec.advance(durations[i - 1], i + 1);
        }
        const double psi = rec.psi();
        scores.push_back(((1.0 - durations[i] / psi) / psi) * rec.dpsi());
    }
    return scores;
}

}  // namespace acd
