#include "acd/lab.hpp"

#include "acd/errors.hpp"
#include "acd/filter.hpp"
#include "acd/stats.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace acd::lab {

namespace {

/// Runs body(i) for i in [0, count) on a small pool. body writes only to
/// its own slot, so the outcome is independent of scheduling.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void validate(const McConfig& config) {
    if (config.replications < 1) {
        throw InvalidArgument("replications must be >= 1");
    }
    if (!config.horizon && !config.fixed_n) {
        throw InvalidArgument("configure either a horizon or a fixed sample size");
    }
    if (config.horizon && !(*config.horizon > 0.0)) {
        throw InvalidArgument("horizon must be positive");
    }
    if (!config.horizon && *config.fixed_n < 1) {
        throw InvalidArgument("fixed_n must be >= 1");
    }
    if (!(config.nominal_coverage > 0.0 && config.nominal_coverage < 1.0)) {
        throw InvalidArgument("nominal coverage must lie in (0, 1)");
    }
    if (!config.true_params.finite_mean() && !config.simulation.allow_nonstationary) {
        throw InfiniteMeanError("alpha + beta >= 1 requires breakdown mode (allow_nonstationary)");
    }
}

DurationSeries simulate_one(const McConfig& config, RngSeed seed) {
    if (config.horizon) {
        return simulate_horizon(config.true_params, config.law, *config.horizon, seed,
                                config.simulation);
    }
    return simulate_fixed_n(config.true_params, config.law, *config.fixed_n, seed,
                            config.simulation);
}

ReplicationRecord run_replication(const McConfig& config, std::size_t index) {
    ReplicationRecord rec;
    rec.index = index;
    rec.seed = derive_seed(config.base_seed, index);
    try {
        const DurationSeries series = simulate_one(config, rec.seed);
        rec.n = series.count();
        rec.horizon = series.effective_horizon();
        const EstimateResult est = estimate(series, config.estimate_options);
        rec.theta_hat = est.theta_hat.vector();
        rec.converged = est.converged;
        rec.std_errors = est.std_errors;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

CountingRateSummary summarize_counts(const std::vector<ReplicationRecord>& reps,
                                     const AcdParams& params) {
    std::vector<double> rates;
    for (const auto& r : reps) {
        if (r.n > 0 && r.horizon > 0.0) {
            rates.push_back(static_cast<double>(r.n) / r.horizon);
        }
    }
    CountingRateSummary s;
    if (rates.empty()) {
        return s;
    }
    s.mean = stats::mean(rates);
    s.sd = rates.size() > 1 ? stats::stddev(rates) : 0.0;
    s.min = *std::min_element(rates.begin(), rates.end());
    s.max = *std::max_element(rates.begin(), rates.end());
    if (params.finite_mean()) {
        const double mu = stationary_mean(params);
        double sum = 0.0;
        double worst = 0.0;
        for (double r : rates) {
            const double dev = std::abs(r * mu - 1.0);
            sum += dev;
            worst = std::max(worst, dev);
        }
        s.mean_abs_dev = sum / static_cast<double>(rates.size());
        s.max_abs_dev = worst;
    }
    return s;
}

std::vector<double> column(const std::vector<Vector3>& rows, int j) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r(j));
    }
    return out;
}

}  // namespace

McReport run_mc(const McConfig& config) {
    validate(config);
    McReport report;
    report.per_replication.resize(config.replications);
    parallel_for(config.replications, config.threads, [&](std::size_t i) {
        report.per_replication[i] = run_replication(config, i);
    });

    const Vector3 theta0 = config.true_params.vector();
    std::vector<Vector3> estimates;
    std::vector<Vector3> scaled_time;
    std::vector<Vector3> scaled_obs;
    std::vector<Vector3> studentized;
    std::vector<Vector3> covered;
    const double z = stats::normal_quantile(0.5 + 0.5 * config.nominal_coverage);
    for (const auto& r : report.per_replication) {
        if (!r.converged || !r.theta_hat) {
            ++report.failures;
            continue;
        }
        const Vector3 err = *r.theta_hat - theta0;
        estimates.push_back(*r.theta_hat);
        scaled_time.push_back(std::sqrt(r.horizon) * err);
        scaled_obs.push_back(std::sqrt(static_cast<double>(r.n)) * err);
        if (r.std_errors) {
            const Vector3 t = err.cwiseQuotient(*r.std_errors);
            studentized.push_back(t);
            covered.push_back((t.cwiseAbs().array() <= z).cast<double>().matrix());
        }
    }
    report.used = estimates.size();
    report.convergence_rate =
        static_cast<double>(report.used) / static_cast<double>(config.replications);
    report.counting_rate = summarize_counts(report.per_replication, config.true_params);

    if (!estimates.empty()) {
        const double used = static_cast<double>(estimates.size());
        Vector3 mean_err = Vector3::Zero();
        Vector3 sq = Vector3::Zero();
        for (const auto& e : estimates) {
            mean_err += e - theta0;
            sq += (e - theta0).cwiseAbs2();
        }
        report.bias = mean_err / used;
        report.rmse = (sq / used).cwiseSqrt();
        Vector3 iqr;
        for (int j = 0; j < 3; ++j) {
            iqr(j) = stats::iqr(column(scaled_time, j));
        }
        report.iqr_sqrtT = iqr;
    }
    if (estimates.size() >= 2) {
        const Matrix3 cov = stats::sample_covariance(estimates);
        report.bias_std_error = (cov.diagonal() / static_cast<double>(estimates.size())).cwiseSqrt();
        report.empirical_cov_sqrtT = stats::sample_covariance(scaled_time);
        report.empirical_cov_sqrtn = stats::sample_covariance(scaled_obs);
    }
    if (!studentized.empty()) {
        Vector3 cov_rate = Vector3::Zero();
        for (const auto& c : covered) {
            cov_rate += c;
        }
        report.coverage = cov_rate / static_cast<double>(covered.size());
        Vector3 ks;
        for (int j = 0; j < 3; ++j) {
            ks(j) = stats::ks_distance(column(studentized, j), stats::normal_cdf);
        }
        report.normality_stats = ks;
    }
    return report;
}

CountingRateReport counting_rate_check(const McConfig& config, std::span<const double> horizons) {
    if (config.replications < 1) {
        throw InvalidArgument("replications must be >= 1");
    }
    if (horizons.empty()) {
        throw InvalidArgument("counting_rate_check needs at least one horizon");
    }
    CountingRateReport report;
    report.mu = stationary_mean(config.true_params);
    for (const double horizon : horizons) {
        if (!(horizon > 0.0)) {
            throw InvalidArgument("horizons must be positive");
        }
        std::vector<double> rates(config.replications, 0.0);
        parallel_for(config.replications, config.threads, [&](std::size_t i) {
            const RngSeed seed = derive_seed(config.base_seed, i);
            try {
                const DurationSeries s =
                    simulate_horizon(config.true_params, config.law, horizon, seed,
                                     config.simulation);
                rates[i] = static_cast<double>(s.count()) / horizon;
            } catch (const EmptySeriesError&) {
                rates[i] = 0.0;
            }
        });
        CountingRateLevel level;
        level.horizon = horizon;
        level.mean_rate = stats::mean(rates);
        for (const double r : rates) {
            const double dev = std::abs(r * report.mu - 1.0);
            level.mean_abs_dev += dev;
            level.max_abs_dev = std::max(level.max_abs_dev, dev);
        }
        level.mean_abs_dev /= static_cast<double>(rates.size());
        report.levels.push_back(level);
    }
    return report;
}

std::vector<Vector3> partial_sum_scores(std::span<const Vector3> scores,
                                        std::span<const double> grid) {
    const double n = static_cast<double>(scores.size());
    const double scale = 1.0 / std::sqrt(n);
    std::vector<Vector3> out;
    out.reserve(grid.size());
    for (const double u : grid) {
        if (!(u >= 0.0 && u <= 1.0)) {
            throw InvalidArgument("grid fractions must lie in [0, 1]");
        }
        const auto k = static_cast<std::size_t>(std::floor(n * u));
        Vector3 sum = Vector3::Zero();
        for (std::size_t i = 0; i < k; ++i) {
            sum += scores[i];
        }
        out.push_back(scale * sum);
    }
    return out;
}

FcltReport functional_clt_probe(const FcltConfig& config) {
    if (config.replications < 2 || config.n < 1 || config.grid.empty()) {
        throw InvalidArgument("functional CLT probe needs R >= 2, n >= 1 and a nonempty grid");
    }
    const std::size_t m = config.grid.size();
    std::vector<std::vector<Vector3>> sums(config.replications);
    parallel_for(config.replications, config.threads, [&](std::size_t r) {
        const DurationSeries s =
            simulate_fixed_n(config.theta0, config.law, config.n, derive_seed(config.seed, r));
        const auto scores = observation_scores(config.theta0, s.durations, *s.start);
        sums[r] = partial_sum_scores(scores, config.grid);
    });

    FcltReport report;
    {
        const DurationSeries long_run =
            simulate_fixed_n(config.theta0, config.law, config.long_run_n,
                             derive_seed(config.seed, std::numeric_limits<std::uint64_t>::max()));
        const ScoreInfo si = accumulate_score_info(config.theta0, long_run.durations, *long_run.start);
        report.omega_S_long = normalized_omegas(si).omega_S;
    }
    report.band = 4.0 / std::sqrt(static_cast<double>(config.replications));

    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Vector3> rows;
        rows.reserve(config.replications);
        for (const auto& s : sums) {
            rows.push_back(s[k]);
        }
        FcltLevel level;
        level.u = config.grid[k];
        level.terms = static_cast<std::size_t>(std::floor(static_cast<double>(config.n) * level.u));
        level.covariance = stats::sample_covariance(rows);
        level.target = level.u * report.omega_S_long;
        if (level.terms > 0) {
            level.relative_error = stats::relative_frobenius(level.covariance, level.target);
            report.max_relative_error = std::max(report.max_relative_error, *level.relative_error);
        }
        report.levels.push_back(level);
    }

    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            if (!(config.grid[a] > 0.0 && config.grid[a] < config.grid[b])) {
                continue;
            }
            std::vector<Vector3> first;
            std::vector<Vector3> incr;
            for (const auto& s : sums) {
                first.push_back(s[a]);
                incr.push_back(s[b] - s[a]);
            }
            FcltIncrement inc;
            inc.u = config.grid[a];
            inc.v = config.grid[b];
            for (int j = 0; j < 3; ++j) {
                const auto x = column(first, j);
                const double mx = stats::mean(x);
                const double sx = stats::stddev(x);
                for (int l = 0; l < 3; ++l) {
                    const auto y = column(incr, l);
                    const double my = stats::mean(y);
                    const double sy = stats::stddev(y);
                    double c = 0.0;
                    for (std::size_t r = 0; r < x.size(); ++r) {
                        c += (x[r] - mx) * (y[r] - my);
                    }
                    c /= static_cast<double>(x.size() - 1) * sx * sy;
                    inc.correlation(j, l) = c;
                    inc.max_abs = std::max(inc.max_abs, std::abs(c));
                }
            }
            report.max_abs_correlation = std::max(report.max_abs_correlation, inc.max_abs);
            report.increments.push_back(inc);
        }
    }
    return report;
}

RateFactorReport rate_factor_probe(const McConfig& config, std::size_t long_run_n) {
    const double mu = stationary_mean(config.true_params);
    if (std::abs(mu - 1.0) <= 0.1) {
        throw InvalidArgument("rate-factor probe refuses mu within 10% of 1 (mu = " +
                              std::to_string(mu) + "): the candidate factors are indistinguishable");
    }
    if (!config.horizon) {
        throw InvalidArgument("rate-factor probe needs horizon mode");
    }
    RateFactorReport report;
    report.mu = mu;
    report.mc = run_mc(config);
    if (!report.mc.empirical_cov_sqrtT || !report.mc.empirical_cov_sqrtn) {
        throw NumericalError("rate-factor probe: fewer than two converged replications");
    }
    report.empirical_cov_sqrtT = *report.mc.empirical_cov_sqrtT;
    report.empirical_cov_sqrtn = *report.mc.empirical_cov_sqrtn;

    const DurationSeries long_run =
        simulate_fixed_n(config.true_params, config.law, long_run_n,
                         derive_seed(config.base_seed, std::numeric_limits<std::uint64_t>::max()),
                         config.simulation);
    const NormalizedOmegas om = normalized_omegas(
        accumulate_score_info(config.true_params, long_run.durations, *long_run.start));
    const Matrix3 inv = om.omega_I.inverse();
    report.sandwich = inv * om.omega_S * inv.transpose();

    report.candidates = {{"mu", mu, 0.0}, {"1/mu", 1.0 / mu, 0.0}, {"1", 1.0, 0.0}};
    for (auto& c : report.candidates) {
        c.discrepancy = (report.empirical_cov_sqrtT - c.kappa * report.sandwich).norm();
    }
    std::vector<std::size_t> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.candidates[a].discrepancy < report.candidates[b].discrepancy;
    });
    report.winner = order[0];
    report.winner_to_runner_up =
        report.candidates[order[0]].discrepancy / report.candidates[order[1]].discrepancy;
    report.unique = report.winner_to_runner_up <= 0.5;
    report.identity_relative_error =
        stats::relative_frobenius(report.empirical_cov_sqrtT, mu * report.empirical_cov_sqrtn);
    return report;
}

BreakdownReport breakdown_demo(const BreakdownConfig& config) {
    if (config.params.finite_mean()) {
        throw InvalidArgument("breakdown demo expects alpha + beta >= 1, got " +
                              config.params.to_string());
    }
    if (config.horizons.empty()) {
        throw InvalidArgument("breakdown demo needs at least one horizon");
    }
    BreakdownReport report;
    report.lyapunov = lyapunov_exponent(config.params, config.law, config.lyapunov_draws,
                                        derive_seed(config.seed, 0x4c79617075ULL));
    if (!(report.lyapunov.value < 0.0)) {
        throw InvalidArgument("E[ln(alpha eps + beta)] estimated at " +
                              std::to_string(report.lyapunov.value) +
                              " >= 0: the process is not ergodic");
    }

    auto sweep = [&](const AcdParams& params, bool nonstationary) {
        std::vector<DispersionRow> rows;
        for (const double horizon : config.horizons) {
            McConfig mc;
            mc.true_params = params;
            mc.law = config.law;
            mc.horizon = horizon;
            mc.replications = config.replications;
            mc.base_seed = config.seed;
            mc.estimate_options = config.estimate_options;
            mc.simulation.allow_nonstationary = nonstationary;
            mc.threads = config.threads;
            const McReport rep = run_mc(mc);
            DispersionRow row;
            row.horizon = horizon;
            row.iqr_sqrtT = rep.iqr_sqrtT;
            row.convergence_rate = rep.convergence_rate;
            double total = 0.0;
            for (const auto& r : rep.per_replication) {
                total += static_cast<double>(r.n);
            }
            row.mean_count = total / static_cast<double>(rep.per_replication.size());
            rows.push_back(row);
        }
        return rows;
    };
    auto ratio = [](const std::vector<DispersionRow>& rows) -> std::optional<Vector3> {
        if (rows.size() < 2 || !rows.front().iqr_sqrtT || !rows.back().iqr_sqrtT) {
            return std::nullopt;
        }
        return rows.back().iqr_sqrtT->cwiseQuotient(*rows.front().iqr_sqrtT);
    };
    report.nonstationary = sweep(config.params, true);
    report.baseline = sweep(config.baseline, false);
    report.nonstationary_ratio = ratio(report.nonstationary);
    report.baseline_ratio = ratio(report.baseline);
    return report;
}

Matrix3 information_at(const AcdParams& theta, const DurationSeries& series) {
    const FilterStart start = series.start ? FilterStart{*series.start}
                                           : FilterStart{InitialState{series.sample_mean(),
                                                                      series.sample_mean()}};
    return normalized_omegas(accumulate_score_info(theta, series.durations, start)).omega_I;
}

std::vector<ThirdDerivativeLevel> third_derivative_probe(const AcdParams& theta0,
                                                         const InnovationLaw& law,
                                                         std::span<const std::size_t> sizes,
                                                         std::size_t points, double radius,
                                                         RngSeed seed) {
    if (sizes.empty() || points == 0 || !(radius > 0.0)) {
        throw InvalidArgument("third-derivative probe needs sizes, points and a positive radius");
    }
    const std::size_t longest = *std::max_element(sizes.begin(), sizes.end());
    const DurationSeries series = simulate_fixed_n(theta0, law, longest, seed);

    // Points uniform in the ball: gaussian direction, radius * U^{1/3}.
    RandomStream rng(derive_seed(seed, 1));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    std::vector<Vector3> centres;
    while (centres.size() < points) {
        Vector3 dir(normal(rng), normal(rng), normal(rng));
        const Vector3 p = theta0.vector() + radius * std::cbrt(uniform(rng)) * dir.normalized();
        if ((p.array() > 0.0).all()) {
            centres.push_back(p);
        }
    }

    std::vector<ThirdDerivativeLevel> out;
    for (const std::size_t n : sizes) {
        const std::span<const double> x(series.durations.data(), n);
        const FilterStart start = *series.start;
        ThirdDerivativeLevel level;
        level.n = n;
        for (const auto& c : centres) {
            for (int h = 0; h < 3; ++h) {
                const double step = 1e-5 * std::max(1.0, std::abs(c(h)));
                Vector3 up = c;
                Vector3 down = c;
                up(h) += step;
                down(h) -= step;
                const Matrix3 d3 = (accumulate_score_info(AcdParams::from_vector(up), x, start).info_sum -
                                    accumulate_score_info(AcdParams::from_vector(down), x, start).info_sum) /
                                   (2.0 * step);
                level.max_abs = std::max(level.max_abs, d3.cwiseAbs().maxCoeff() / static_cast<double>(n));
            }
        }
        out.push_back(level);
    }
    return out;
}

}  // namespace acd::lab
