#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "asq/chain.hpp"
#include "asq/histogram.hpp"
#include "asq/surface.hpp"

using namespace asq;

TEST_CASE("no arrivals: stationary law is a point mass at zero") {
    const auto pmf = stationary_distribution(0.0, 5.0, 0.1, 10.0);
    REQUIRE(pmf.probs.size() == 1);
    CHECK(pmf.probs[0] == 1.0);
}

TEST_CASE("pure load-dependent death gives the Poisson marginal") {
    // lambda=1, mu_d=0, beta*lambda_ref=1: d(n)=n, the M/M/inf chain
    const auto pmf = stationary_distribution(1.0, 0.0, 1.0, 1.0);
    CHECK(pmf.probs[0] == Catch::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(pmf.mean() == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(pmf.total() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("unstable or transient chains are rejected") {
    CHECK_THROWS_AS(stationary_distribution(1.0, 0.0, 0.0, 0.0), numeric_error);
    CHECK_THROWS_AS(stationary_distribution(2.0, 1.0, 0.0, 100.0), numeric_error);
}

TEST_CASE("breach and defense rates satisfy flow conservation") {
    const double lambda = 100.0, beta = 0.001, lref = 100.0;
    for (double alpha : {1.0, 0.5, 0.25, 0.1}) {
        const auto pmf = stationary_distribution(lambda, alpha * lambda, beta, lref);
        const auto r = breach_and_defense_rates(pmf, lambda, alpha * lambda, beta, lref);
        CHECK(r.breach + r.defense == Catch::Approx(lambda).epsilon(1e-12));
        CHECK(r.breach >= 0.0);
        CHECK(r.defense >= 0.0);
        // cross-identity: defense equals mu_d * P(N > 0) for the exact chain
        CHECK(r.defense ==
              Catch::Approx(alpha * lambda * (1.0 - pmf.probs[0])).epsilon(1e-6));
    }
    // no attack: breach is zero
    const auto pmf0 = stationary_distribution(10.0, 20.0, 0.0, 100.0);
    const auto r0 = breach_and_defense_rates(pmf0, 10.0, 20.0, 0.0, 100.0);
    CHECK(r0.breach == 0.0);
}

TEST_CASE("solver agrees with the slot simulator on a coupled config") {
    SurfaceConfig cfg;
    cfg.lambda = 100.0;
    cfg.alpha = 1.0;
    cfg.beta = 0.001;
    cfg.dt = 0.002;
    RandomStream rng(21, 0);
    const auto pmf = stationary_distribution(cfg.lambda, cfg.static_defense_rate(), cfg.beta,
                                             cfg.lambda);
    const std::int64_t slots = 2'000'000;
    const auto traj = simulate(cfg, slots, PoissonArrivals{cfg.lambda}, {}, rng,
                               static_cast<std::int64_t>(pmf.sample(rng)));
    double mean_n = 0.0;
    for (auto v : traj.n) mean_n += static_cast<double>(v);
    mean_n /= static_cast<double>(slots);
    const double breach_rate = static_cast<double>(traj.total_exploited()) /
                               (static_cast<double>(slots) * cfg.dt);
    const auto rates = breach_and_defense_rates(pmf, cfg.lambda, cfg.static_defense_rate(),
                                                cfg.beta, cfg.lambda);
    CHECK(std::fabs(mean_n - pmf.mean()) / pmf.mean() < 0.03);
    CHECK(std::fabs(breach_rate - rates.breach) / rates.breach < 0.03);
}

TEST_CASE("symmetric rate scaling leaves the stationary law unchanged") {
    const double a = 4.0;
    const auto base = stationary_distribution(5.0, 2.5, 0.005, 5.0);
    const auto amp = stationary_distribution(a * 5.0, a * 2.5, 0.005, a * 5.0);
    REQUIRE(base.probs.size() == amp.probs.size());
    for (std::size_t i = 0; i < base.probs.size(); ++i)
        CHECK(base.probs[i] == Catch::Approx(amp.probs[i]).margin(1e-14));
    const auto rb = breach_and_defense_rates(base, 5.0, 2.5, 0.005, 5.0);
    const auto ra = breach_and_defense_rates(amp, 20.0, 10.0, 0.005, 20.0);
    CHECK(ra.breach == Catch::Approx(a * rb.breach).epsilon(1e-10));
}

TEST_CASE("analytic autocovariance closed forms") {
    const double lambda = 3.0;
    const auto exp_d = DistributionSpec::exponential(0.5);
    // lambda * exp(-mu h)/mu
    CHECK(analytic_autocovariance(lambda, exp_d, 2.0) ==
          Catch::Approx(lambda * std::exp(-1.0) / 0.5).epsilon(1e-10));
    // h=0: lambda * mean (Poisson marginal variance of M/G/inf)
    CHECK(analytic_autocovariance(lambda, exp_d, 0.0) ==
          Catch::Approx(lambda * 2.0).epsilon(1e-10));
    // pareto(1, 1.5): 2 lambda / sqrt(h) for h >= 1
    const auto par = DistributionSpec::pareto(1.5, 1.0);
    CHECK(analytic_autocovariance(lambda, par, 4.0) ==
          Catch::Approx(2.0 * lambda / 2.0).epsilon(1e-10));
    CHECK_THROWS_AS(analytic_autocovariance(lambda, DistributionSpec::pareto(0.9, 1.0), 1.0),
                    numeric_error);
}

TEST_CASE("analytic curve is nonincreasing and non-summable in the LRD regime") {
    const auto par = DistributionSpec::pareto(1.5, 1.0);
    std::vector<double> lags;
    for (double h = 0; h <= 200; h += 1) lags.push_back(h);
    const auto curve = analytic_autocovariance_curve(10.0, par, lags);
    for (std::size_t i = 1; i < curve.values.size(); ++i)
        CHECK(curve.values[i] <= curve.values[i - 1] + 1e-12);
    // partial sums grow like h^{1/2} for alpha = 1.5: compare two prefixes
    double s1 = 0, s2 = 0;
    for (int h = 1; h <= 100; ++h) s1 += analytic_autocovariance(10.0, par, h);
    for (int h = 1; h <= 400; ++h) s2 += analytic_autocovariance(10.0, par, h);
    CHECK(s2 > 1.8 * s1);  // sqrt(4) = 2 up to edge effects
}

TEST_CASE("empirical autocovariance of white noise vanishes at positive lags") {
    RandomStream rng(22, 0);
    std::vector<double> x(200000);
    for (auto& v : x) v = static_cast<double>(rng.poisson(5.0));
    const auto curve = empirical_autocovariance(x, 20);
    CHECK(curve.values[0] == Catch::Approx(5.0).epsilon(0.05));
    const double se = 5.0 / std::sqrt(static_cast<double>(x.size()));
    for (std::size_t i = 1; i < curve.values.size(); ++i)
        CHECK(std::fabs(curve.values[i]) < 4 * se);
}

TEST_CASE("constant series has zero autocovariance") {
    std::vector<double> x(1000, 3.25);
    const auto curve = empirical_autocovariance(x, 5);
    for (double v : curve.values) CHECK(v == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("series shorter than 10x max_lag is rejected") {
    std::vector<double> x(99, 1.0);
    CHECK_THROWS_AS(empirical_autocovariance(x, 10), insufficient_data_error);
}

TEST_CASE("slope of the exact pareto curve is -(alpha-1)") {
    const auto par = DistributionSpec::pareto(1.5, 1.0);
    std::vector<double> lags;
    for (double h = 1; h <= 200; h += 1) lags.push_back(h);
    const auto curve = analytic_autocovariance_curve(10.0, par, lags);
    const double slope = tail_exponent_estimate(curve, 1.0, 200.0);
    CHECK(slope == Catch::Approx(-0.5).margin(1e-6));
}

TEST_CASE("exponential curve flags LRD-negative") {
    const auto exp_d = DistributionSpec::exponential(1.0 / 3.0);
    std::vector<double> lags;
    for (double h = 1; h <= 100; h += 1) lags.push_back(h);
    const auto curve = analytic_autocovariance_curve(10.0, exp_d, lags);
    CHECK(lrd_negative(curve, 1.0, 100.0));
    const auto par_curve = analytic_autocovariance_curve(
        10.0, DistributionSpec::pareto(1.5, 1.0), lags);
    CHECK_FALSE(lrd_negative(par_curve, 1.0, 100.0));
}

TEST_CASE("window with nonpositive covariance raises a window error") {
    CovarianceCurve c;
    c.lags = {1, 2, 3, 4};
    c.values = {1.0, 0.5, -0.1, 0.05};
    CHECK_THROWS_AS(tail_exponent_estimate(c, 1.0, 4.0), numeric_error);
}

TEST_CASE("M/G/inf simulation matches the analytic covariance") {
    const double lambda = 10.0;
    const auto par = DistributionSpec::pareto(1.5, 1.0);
    RandomStream rng(23, 0);
    const auto occ = simulate_mg_inf(lambda, par, 300000, rng);
    std::vector<double> x(occ.begin(), occ.end());
    double m = 0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    // stationary mean lambda * E[S] = 30
    CHECK(std::fabs(m - 30.0) < 1.5);
    const auto emp = empirical_autocovariance(x, 30);
    for (int h : {1, 2, 5, 10, 20}) {
        const double ana = analytic_autocovariance(lambda, par, h);
        INFO("lag " << h);
        CHECK(std::fabs(emp.values[static_cast<std::size_t>(h)] - ana) / ana < 0.25);
    }
}

TEST_CASE("equilibrium residual sampler matches the pareto closed form") {
    // pareto(1.5, 1): equilibrium survival (3-s)/3 on [0,1], 2/(3 sqrt(s)) beyond
    const auto par = DistributionSpec::pareto(1.5, 1.0);
    const double mu = mean(par);
    RandomStream rng(24, 0);
    int below_one = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i)
        if (sample_equilibrium_residual(par, mu, rng) <= 1.0) ++below_one;
    const double frac = static_cast<double>(below_one) / n;
    // P(R <= 1) = 1 - 2/3 = 1/3
    CHECK(std::fabs(frac - 1.0 / 3.0) < 0.02);
}
