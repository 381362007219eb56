#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "asq/distribution.hpp"
#include "asq/error.hpp"
#include "asq/random.hpp"

namespace asq {

// Exact stationary law of the coupled birth-death chain with birth rate
// lambda and death rate d(n) = mu_d_total*1{n>0} + beta*lambda_ref*n,
// truncated where the tail drops below tol.
struct StationaryPMF {
    std::vector<double> probs;  // pi_0 .. pi_{N_trunc}

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) m += static_cast<double>(i) * probs[i];
        return m;
    }

    double total() const {
        double s = 0.0;
        for (double p : probs) s += p;
        return s;
    }

    std::size_t sample(RandomStream& rng) const {
        double u = rng.uniform01();
        for (std::size_t i = 0; i < probs.size(); ++i) {
            u -= probs[i];
            if (u <= 0.0) return i;
        }
        return probs.size() - 1;
    }

    std::string to_csv() const {
        std::string out = "n,pi\n";
        for (std::size_t i = 0; i < probs.size(); ++i)
            out += std::to_string(i) + "," + format_double(probs[i]) + "\n";
        return out;
    }
};

inline StationaryPMF stationary_distribution(double lambda, double mu_d_total, double beta,
                                             double lambda_ref, double tol = 1e-12) {
    if (!(lambda >= 0) || !(mu_d_total >= 0) || !(beta >= 0) || !(lambda_ref >= 0))
        throw domain_error("stationary_distribution: rates must be >= 0");
    StationaryPMF pmf;
    if (lambda == 0.0) {
        pmf.probs = {1.0};
        return pmf;
    }
    const double slope = beta * lambda_ref;
    if (mu_d_total == 0.0 && slope == 0.0)
        throw numeric_error("stationary_distribution: no service, chain is transient");

    // detailed balance in log space: lw(n) = lw(n-1) + log(lambda) - log(d(n))
    std::vector<double> lw;
    lw.push_back(0.0);
    double lw_max = 0.0;
    const double log_lambda = std::log(lambda);
    const double log_tol = std::log(tol) - 35.0;  // generous safety margin
    for (std::size_t n = 1;; ++n) {
        if (n > 10'000'000)
            throw numeric_error("stationary_distribution: truncation grew beyond 1e7 states");
        const double death = mu_d_total + slope * static_cast<double>(n);
        lw.push_back(lw.back() + log_lambda - std::log(death));
        lw_max = std::max(lw_max, lw.back());
        const double next_death = mu_d_total + slope * static_cast<double>(n + 1);
        const bool decaying = lambda / next_death < 0.999;
        if (decaying && lw.back() - lw_max < log_tol) break;
        if (slope == 0.0 && lambda >= mu_d_total)
            throw numeric_error("stationary_distribution: unstable chain (lambda >= mu_d)");
    }
    pmf.probs.resize(lw.size());
    double total = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
        pmf.probs[i] = std::exp(lw[i] - lw_max);
        total += pmf.probs[i];
    }
    for (double& p : pmf.probs) p /= total;
    return pmf;
}

struct FlowRates {
    double breach = 0.0;
    double defense = 0.0;
};

// Steady-state breach rate beta*lambda_ref*E[N]; defense is the balance
// lambda - breach (flow conservation).
inline FlowRates breach_and_defense_rates(const StationaryPMF& pmf, double lambda,
                                          double /*mu_d_total*/, double beta, double lambda_ref) {
    FlowRates r;
    r.breach = beta * lambda_ref * pmf.mean();
    r.defense = lambda - r.breach;
    ASQ_CHECK(r.breach >= -1e-12 && r.defense >= -1e-9, "breach/defense rates must be >= 0");
    return r;
}

enum class CurveProvenance { analytic, empirical };

struct CovarianceCurve {
    std::vector<double> lags;
    std::vector<double> values;
    CurveProvenance provenance = CurveProvenance::analytic;

    std::string to_csv() const {
        std::string out = "lag,cov\n";
        for (std::size_t i = 0; i < lags.size(); ++i)
            out += format_double(lags[i]) + "," + format_double(values[i]) + "\n";
        return out;
    }
};

// M/G/inf autocovariance at lag h: lambda * integral_h^inf (1-F(s)) ds
inline double analytic_autocovariance(double lambda, const DistributionSpec& service, double h) {
    return lambda * tail_integral(service, h);
}

inline CovarianceCurve analytic_autocovariance_curve(double lambda,
                                                     const DistributionSpec& service,
                                                     const std::vector<double>& lags) {
    CovarianceCurve c;
    c.provenance = CurveProvenance::analytic;
    c.lags = lags;
    c.values.reserve(lags.size());
    for (double h : lags) c.values.push_back(analytic_autocovariance(lambda, service, h));
    return c;
}

// standard biased autocovariance estimator (divide by n)
inline CovarianceCurve empirical_autocovariance(const std::vector<double>& series, int max_lag) {
    if (max_lag < 0) throw domain_error("empirical_autocovariance: max_lag must be >= 0");
    const std::size_t n = series.size();
    if (n < 10 * static_cast<std::size_t>(std::max(1, max_lag)))
        throw insufficient_data_error("empirical_autocovariance: series too short for max_lag");
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);
    CovarianceCurve c;
    c.provenance = CurveProvenance::empirical;
    for (int h = 0; h <= max_lag; ++h) {
        double acc = 0.0;
        for (std::size_t t = 0; t + h < n; ++t)
            acc += (series[t] - mean) * (series[t + static_cast<std::size_t>(h)] - mean);
        c.lags.push_back(static_cast<double>(h));
        c.values.push_back(acc / static_cast<double>(n));
    }
    return c;
}

// Least-squares slope of log Cov versus log h over [h_lo, h_hi]. For pareto
// service with tail index a the analytic curve gives slope -(a-1).
inline double tail_exponent_estimate(const CovarianceCurve& curve, double h_lo, double h_hi) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < curve.lags.size(); ++i) {
        const double h = curve.lags[i];
        if (h < h_lo || h > h_hi || h <= 0) continue;
        if (!(curve.values[i] > 0))
            throw numeric_error(
                "tail_exponent_estimate: nonpositive covariance in window; use a smaller h_hi");
        lx.push_back(std::log(h));
        ly.push_back(std::log(curve.values[i]));
    }
    if (lx.size() < 2)
        throw insufficient_data_error("tail_exponent_estimate: fewer than 2 lags in window");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    return sxy / sxx;
}

// Slope over the upper half of the window; an exponential-type curve keeps
// steepening and is flagged LRD-negative once this drops below -2.
inline bool lrd_negative(const CovarianceCurve& curve, double h_lo, double h_hi) {
    const double mid = std::sqrt(std::max(h_lo, 1.0) * h_hi);
    return tail_exponent_estimate(curve, mid, h_hi) < -2.0;
}

// Inverse of the tail integral: residual-life (equilibrium) sampling for the
// stationary start of an M/G/inf run. Solves tail_integral(r) = u * mean by
// bisection; exact up to the integral tolerance.
inline double sample_equilibrium_residual(const DistributionSpec& service, double mu,
                                          RandomStream& rng) {
    const double target = rng.uniform_pos() * mu;
    double lo = 0.0, hi = std::max(1.0, mu);
    while (tail_integral(service, hi) > target) {
        hi *= 2.0;
        if (hi > 1e18) throw numeric_error("equilibrium residual: runaway tail");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail_integral(service, mid) > target) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-9 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

// M/G/inf occupancy sampled at unit-slot boundaries. With stationary_start
// the initial jobs are drawn from the exact equilibrium (Poisson(lambda*mean)
// jobs with residual-life service), so the sampled process is stationary from
// slot 0.
inline std::vector<std::int64_t> simulate_mg_inf(double lambda, const DistributionSpec& service,
                                                 std::int64_t slots, RandomStream& rng,
                                                 bool stationary_start = true) {
    if (!(lambda >= 0)) throw domain_error("mg_inf: lambda must be >= 0");
    const double mu = mean(service);  // throws for infinite-mean services
    std::vector<std::int32_t> delta(static_cast<std::size_t>(slots) + 1, 0);
    auto add_interval = [&](double from, double to) {
        // job present at integer boundaries k with from <= k < to
        const std::int64_t first = static_cast<std::int64_t>(std::ceil(from));
        std::int64_t last = static_cast<std::int64_t>(std::ceil(to));
        if (last <= first) return;
        if (first >= slots) return;
        if (last > slots) last = slots;
        delta[static_cast<std::size_t>(first)] += 1;
        delta[static_cast<std::size_t>(last)] -= 1;
    };
    if (stationary_start) {
        const std::uint64_t n0 = rng.poisson(lambda * mu);
        for (std::uint64_t j = 0; j < n0; ++j)
            add_interval(0.0, sample_equilibrium_residual(service, mu, rng));
    }
    for (std::int64_t k = 0; k < slots; ++k) {
        const std::uint64_t a = rng.poisson(lambda);
        for (std::uint64_t j = 0; j < a; ++j) {
            const double u = static_cast<double>(k) + rng.uniform01();
            add_interval(u, u + sample(service, rng));
        }
    }
    std::vector<std::int64_t> occ(static_cast<std::size_t>(slots));
    std::int64_t run = 0;
    for (std::int64_t k = 0; k < slots; ++k) {
        run += delta[static_cast<std::size_t>(k)];
        ASQ_CHECK(run >= 0, "mg_inf: negative occupancy");
        occ[static_cast<std::size_t>(k)] = run;
    }
    return occ;
}

}  // namespace asq
