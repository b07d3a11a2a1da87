#pragma once

#include "acd/params.hpp"

#include <functional>
#include <span>
#include <vector>

namespace acd::stats {

[[nodiscard]] double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator).
[[nodiscard]] double stddev(std::span<const double> v);
/// Linear-interpolation quantile (type 7), p in [0, 1].
[[nodiscard]] double quantile(std::vector<double> v, double p);
[[nodiscard]] double iqr(std::span<const double> v);

/// Sample covariance (n - 1 denominator) of 3-vectors; requires >= 2 rows.
[[nodiscard]] Matrix3 sample_covariance(std::span<const Vector3> rows);

[[nodiscard]] double normal_cdf(double z);
[[nodiscard]] double normal_quantile(double p);

/// sup_x |F_n(x) - F(x)| of the sample against a continuous cdf.
[[nodiscard]] double ks_distance(std::vector<double> sample,
                                 const std::function<double(double)>& cdf);

/// ||a - b||_F / ||b||_F
[[nodiscard]] double relative_frobenius(const Matrix3& a, const Matrix3& b);

}  // namespace acd::stats
