#include "acd/stats.hpp"

#include "acd/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acd::stats {

double mean(std::span<const double> v) {
    if (v.empty()) {
        throw InvalidArgument("mean of an empty sample");
    }
    return static_cast<double>(std::accumulate(v.begin(), v.end(), 0.0L) /
                               static_cast<long double>(v.size()));
}

double stddev(std::span<const double> v) {
    if (v.size() < 2) {
        throw InvalidArgument("standard deviation needs at least two values");
    }
    const double m = mean(v);
    long double ss = 0.0L;
    for (double x : v) {
        ss += static_cast<long double>(x - m) * (x - m);
    }
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size() - 1)));
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) {
        throw InvalidArgument("quantile of an empty sample");
    }
    std::sort(v.begin(), v.end());
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double iqr(std::span<const double> v) {
    std::vector<double> copy(v.begin(), v.end());
    return quantile(copy, 0.75) - quantile(copy, 0.25);
}

Matrix3 sample_covariance(std::span<const Vector3> rows) {
    if (rows.size() < 2) {
        throw InvalidArgument("sample covariance needs at least two rows");
    }
    Vector3 m = Vector3::Zero();
    for (const auto& r : rows) {
        m += r;
    }
    m /= static_cast<double>(rows.size());
    Matrix3 c = Matrix3::Zero();
    for (const auto& r : rows) {
        const Vector3 d = r - m;
        c += d * d.transpose();
    }
    c /= static_cast<double>(rows.size() - 1);
    return 0.5 * (c + c.transpose());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("normal quantile requires p in (0, 1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) {
        throw InvalidArgument("KS distance of an empty sample");
    }
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double i_d = static_cast<double>(i);
        d = std::max({d, (i_d + 1.0) / n - f, f - i_d / n});
    }
    return d;
}

double relative_frobenius(const Matrix3& a, const Matrix3& b) { return (a - b).norm() / b.norm(); }

}  // namespace acd::stats
