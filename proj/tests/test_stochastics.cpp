#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "asq/distribution.hpp"
#include "asq/fit.hpp"
#include "asq/histogram.hpp"
#include "asq/random.hpp"

using namespace asq;

namespace {

std::vector<double> draw(const DistributionSpec& d, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream = 0) {
    RandomStream rng(seed, stream);
    std::vector<double> out(n);
    for (auto& x : out) x = sample(d, rng);
    return out;
}

double sample_mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_sd(const std::vector<double>& x) {
    const double m = sample_mean(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// one-sample Kolmogorov-Smirnov statistic against an analytic CDF
double ks_distance(std::vector<double> x, const DistributionSpec& d) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = cdf(d, x[i]);
        stat = std::max(stat, std::fabs(c - static_cast<double>(i) / n));
        stat = std::max(stat, std::fabs(static_cast<double>(i + 1) / n - c));
    }
    return stat;
}

// Hill estimator of the pareto tail index: independent check for the MLE path
double hill_estimate(const std::vector<double>& x) {
    const double xm = *std::min_element(x.begin(), x.end());
    double acc = 0.0;
    for (double v : x) acc += std::log(v / xm);
    return static_cast<double>(x.size()) / acc;
}

}  // namespace

TEST_CASE("random streams are reproducible and distinct") {
    RandomStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true, any_diff_stream = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff_stream = any_diff_stream || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff_stream);
}

TEST_CASE("poisson sampler matches mean and variance") {
    RandomStream rng(1, 0);
    for (double mean : {0.3, 4.0, 40.0, 400.0}) {
        const std::size_t n = 200000;
        double s = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            s += k;
            s2 += k * k;
        }
        const double m = s / n;
        const double v = s2 / n - m * m;
        const double se = std::sqrt(mean / n);
        CHECK(std::fabs(m - mean) < 4 * se);
        CHECK(std::fabs(v - mean) < 0.05 * mean + 4 * se);
    }
}

TEST_CASE("exponential sample mean within 1 percent") {
    const auto x = draw(DistributionSpec::exponential(2.0), 1'000'000, 2024);
    CHECK(std::fabs(sample_mean(x) - 0.5) < 0.005);
}

TEST_CASE("pareto draws respect the lower bound") {
    const auto x = draw(DistributionSpec::pareto(1.5, 1.0), 20000, 7);
    CHECK(*std::min_element(x.begin(), x.end()) >= 1.0);
}

TEST_CASE("degenerate mixture equals its first component") {
    const auto a = DistributionSpec::exponential(1.3);
    const auto b = DistributionSpec::pareto(2.5, 1.0);
    const auto x = draw(DistributionSpec::mixture(1.0, a, b), 100000, 11);
    CHECK(ks_distance(x, a) < 0.01);
}

TEST_CASE("empirical means match analytic means within 3 standard errors") {
    const std::vector<DistributionSpec> specs = {
        DistributionSpec::exponential(0.7),
        DistributionSpec::gamma(2.3, 1.7),
        DistributionSpec::weibull(1.4, 2.0),
        DistributionSpec::lognormal(0.3, 0.6),
        DistributionSpec::loglogistic(3.5, 2.0),
        DistributionSpec::pareto(2.8, 1.5),
        DistributionSpec::gpd(0.25, 1.0),
        DistributionSpec::inverse_gaussian(1.8, 3.0),
        DistributionSpec::mixture(0.4, DistributionSpec::exponential(1.0),
                                  DistributionSpec::gamma(3.0, 0.5)),
    };
    std::uint64_t stream = 0;
    for (const auto& d : specs) {
        const std::size_t n = 1'000'000;
        const auto x = draw(d, n, 555, stream++);
        const double se = sample_sd(x) / std::sqrt(static_cast<double>(n));
        INFO(format_distribution(d));
        CHECK(std::fabs(sample_mean(x) - mean(d)) < 3 * se);
    }
}

TEST_CASE("survival closed forms and monotonicity") {
    const auto exp_d = DistributionSpec::exponential(0.8);
    CHECK(survival(exp_d, 1.3) == Catch::Approx(std::exp(-0.8 * 1.3)).epsilon(1e-12));

    const auto par = DistributionSpec::pareto(1.5, 1.0);
    CHECK(survival(par, 4.0) == Catch::Approx(0.125).epsilon(1e-12));

    const std::vector<DistributionSpec> specs = {
        exp_d,
        par,
        DistributionSpec::gamma(2.0, 1.0),
        DistributionSpec::weibull(0.8, 1.0),
        DistributionSpec::lognormal(0.0, 1.0),
        DistributionSpec::loglogistic(2.0, 1.0),
        DistributionSpec::gpd(0.5, 1.0),
        DistributionSpec::inverse_gaussian(1.0, 1.0),
    };
    for (const auto& d : specs) {
        INFO(format_distribution(d));
        CHECK(survival(d, 0.0) == Catch::Approx(1.0).epsilon(1e-12));
        double prev = 1.0;
        for (double s = 0.1; s < 50.0; s *= 1.6) {
            const double cur = survival(d, s);
            CHECK(cur <= prev + 1e-12);
            CHECK(cur >= 0.0);
            CHECK(cur <= 1.0);
            prev = cur;
        }
    }
}

TEST_CASE("tail integral closed forms") {
    const auto exp_d = DistributionSpec::exponential(0.8);
    CHECK(tail_integral(exp_d, 2.0) == Catch::Approx(std::exp(-1.6) / 0.8).epsilon(1e-10));

    const auto par = DistributionSpec::pareto(1.5, 1.0);
    CHECK(tail_integral(par, 1.0) == Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("tail integral at zero equals the mean, and is nonincreasing") {
    const std::vector<DistributionSpec> specs = {
        DistributionSpec::exponential(1.7),
        DistributionSpec::gamma(2.3, 0.7),
        DistributionSpec::weibull(1.2, 1.5),
        DistributionSpec::lognormal(0.2, 0.5),
        DistributionSpec::loglogistic(2.5, 1.2),
        DistributionSpec::pareto(1.5, 1.0),
        DistributionSpec::gpd(0.4, 2.0),
        DistributionSpec::inverse_gaussian(2.0, 4.0),
        DistributionSpec::mixture(0.3, DistributionSpec::loglogistic(2.2, 1.0),
                                  DistributionSpec::gpd(0.55, 1.5)),
    };
    for (const auto& d : specs) {
        INFO(format_distribution(d));
        CHECK(tail_integral(d, 0.0) == Catch::Approx(mean(d)).epsilon(1e-6));
        double prev = std::numeric_limits<double>::infinity();
        for (double h : {0.0, 0.5, 1.0, 2.0, 5.0, 11.0}) {
            const double ti = tail_integral(d, h);
            CHECK(ti <= prev + 1e-9);
            prev = ti;
        }
    }
}

TEST_CASE("infinite-mean tails are rejected") {
    CHECK_THROWS_AS(tail_integral(DistributionSpec::pareto(0.9, 1.0), 0.0), numeric_error);
    CHECK_THROWS_AS(mean(DistributionSpec::pareto(1.0, 1.0)), numeric_error);
    CHECK_THROWS_AS(mean(DistributionSpec::gpd(1.2, 1.0)), numeric_error);
}

TEST_CASE("LRD-inducing flag tracks the tail index") {
    CHECK(lrd_inducing(DistributionSpec::pareto(1.5, 1.0)));
    CHECK(lrd_inducing(DistributionSpec::gpd(0.8, 1.0)));  // tail index 1.25
    CHECK_FALSE(lrd_inducing(DistributionSpec::pareto(2.5, 1.0)));
    CHECK_FALSE(lrd_inducing(DistributionSpec::exponential(1.0)));
    CHECK(lrd_inducing(DistributionSpec::mixture(0.5, DistributionSpec::exponential(1.0),
                                                 DistributionSpec::pareto(1.7, 1.0))));
}

TEST_CASE("exponential MLE is the closed form") {
    // ten samples with mean exactly 0.25
    std::vector<double> x = {0.20, 0.30, 0.25, 0.10, 0.40, 0.22, 0.28, 0.15, 0.35, 0.25};
    const auto fit = fit_mle(Family::exponential, x);
    CHECK(fit.spec.params[0] == Catch::Approx(4.0).epsilon(1e-12));
    CHECK(fit.converged);
}

TEST_CASE("pareto MLE recovers the tail index and agrees with the Hill oracle") {
    const auto x = draw(DistributionSpec::pareto(1.5, 1.0), 100000, 99);
    const auto fit = fit_mle(Family::pareto, x);
    const double hill = hill_estimate(x);
    CHECK(std::fabs(fit.spec.params[0] - 1.5) < 0.05);
    CHECK(std::fabs(fit.spec.params[0] - hill) < 0.02);
}

TEST_CASE("too few samples is an error") {
    std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_mle(Family::exponential, x), insufficient_data_error);
}

TEST_CASE("MLE recovers parameters within 10 percent for every family") {
    struct Case {
        DistributionSpec truth;
        Family fam;
    };
    const std::vector<Case> cases = {
        {DistributionSpec::exponential(2.0), Family::exponential},
        {DistributionSpec::gamma(2.5, 0.8), Family::gamma_law},
        {DistributionSpec::weibull(1.6, 2.2), Family::weibull},
        {DistributionSpec::lognormal(0.4, 0.9), Family::lognormal},
        {DistributionSpec::loglogistic(2.8, 1.4), Family::loglogistic},
        {DistributionSpec::pareto(1.8, 1.0), Family::pareto},
        {DistributionSpec::gpd(0.45, 1.3), Family::generalized_pareto},
        {DistributionSpec::inverse_gaussian(1.5, 2.4), Family::inverse_gaussian},
    };
    std::uint64_t stream = 40;
    for (const auto& c : cases) {
        const auto x = draw(c.truth, 100000, 321, stream++);
        const auto fit = fit_mle(c.fam, x);
        INFO(format_distribution(c.truth) << " -> " << format_distribution(fit.spec));
        for (std::size_t i = 0; i < c.truth.params.size(); ++i) {
            CHECK(std::fabs(fit.spec.params[i] - c.truth.params[i]) <=
                  0.10 * std::fabs(c.truth.params[i]) + 1e-9);
        }
    }
}

TEST_CASE("mixture EM separates well-spread components") {
    const auto truth = DistributionSpec::mixture(0.6, DistributionSpec::lognormal(0.0, 0.4),
                                                 DistributionSpec::lognormal(3.0, 0.4));
    const auto x = draw(truth, 20000, 17);
    const auto fit = fit_mle_mixture(Family::lognormal, Family::lognormal, x);
    const double w = fit.spec.params[0];
    const double mu_low = std::min(fit.spec.parts[0].params[0], fit.spec.parts[1].params[0]);
    const double mu_high = std::max(fit.spec.parts[0].params[0], fit.spec.parts[1].params[0]);
    CHECK(std::fabs(mu_low - 0.0) < 0.1);
    CHECK(std::fabs(mu_high - 3.0) < 0.1);
    CHECK((std::fabs(w - 0.6) < 0.05 || std::fabs(w - 0.4) < 0.05));
}

TEST_CASE("divergence identity and frozen examples") {
    const auto p = Histogram::from_counts({0.0, 1.0}, {0.5, 0.5});
    const auto q = Histogram::from_counts({0.0, 1.0}, {0.9, 0.1});
    for (auto m : {Divergence::KL, Divergence::TVD, Divergence::L2, Divergence::JSD,
                   Divergence::W1}) {
        CHECK(divergence(p, p, m) == Catch::Approx(0.0).margin(1e-9));
    }
    // 0.5*ln(0.5/0.9) + 0.5*ln(0.5/0.1) = 0.5108 nats
    CHECK(divergence(p, q, Divergence::KL) == Catch::Approx(0.5108256238).epsilon(1e-6));
    // KL asymmetry on the same pair
    CHECK(divergence(q, p, Divergence::KL) != Catch::Approx(divergence(p, q, Divergence::KL)));

    const auto d0 = Histogram::from_counts({0.0}, {1.0});
    const auto d3 = Histogram::from_counts({3.0}, {1.0});
    CHECK(divergence(d0, d3, Divergence::W1) == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("divergence symmetry for the symmetric metrics") {
    RandomStream rng(5, 5);
    std::vector<double> a(6), b(6);
    for (int i = 0; i < 6; ++i) {
        a[i] = rng.uniform01() + 0.01;
        b[i] = rng.uniform01() + 0.01;
    }
    const auto p = Histogram::from_counts({0, 1, 2, 3, 4, 5}, a);
    const auto q = Histogram::from_counts({0, 1, 2, 3, 4, 5}, b);
    for (auto m : {Divergence::TVD, Divergence::L2, Divergence::JSD, Divergence::W1}) {
        CHECK(divergence(p, q, m) == Catch::Approx(divergence(q, p, m)).epsilon(1e-12));
        CHECK(divergence(p, q, m) >= 0.0);
    }
}

TEST_CASE("binned histograms unify across different edges") {
    std::vector<double> samples;
    RandomStream rng(8, 1);
    const auto d = DistributionSpec::gamma(2.0, 1.0);
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20000; ++i) samples.push_back(sample(d, rng));
    const auto h1 = Histogram::binned_from_samples(samples, {0, 0.5, 1, 1.5, 2, 3, 4, 8, inf});
    const auto h2 = Histogram::binned_from_samples(samples, {0, 1, 2, 4, 8, inf});
    const double kl = divergence(h1, h2, Divergence::KL);
    CHECK(kl >= 0.0);
    CHECK(kl < 0.1);  // same data, coarser binning: small but nonzero
    CHECK(divergence(h1, h2, Divergence::W1) < 0.5);
}

TEST_CASE("identical seeds give bit-identical variate sequences") {
    const auto specs = {DistributionSpec::gamma(1.7, 2.0), DistributionSpec::pareto(1.5, 1.0),
                        DistributionSpec::inverse_gaussian(1.0, 2.0)};
    for (const auto& d : specs) {
        RandomStream r1(123, 4), r2(123, 4);
        for (int i = 0; i < 200; ++i) {
            CHECK(sample(d, r1) == sample(d, r2));
        }
    }
}

TEST_CASE("distribution specs round-trip through the key-value form") {
    const std::vector<DistributionSpec> specs = {
        DistributionSpec::exponential(2.0),
        DistributionSpec::pareto(1.5, 1.0),
        DistributionSpec::mixture(0.3, DistributionSpec::loglogistic(2.0, 1.0),
                                  DistributionSpec::gpd(0.6, 2.0)),
    };
    for (const auto& d : specs) {
        const auto parsed = parse_distribution(format_distribution(d));
        CHECK(parsed.family == d.family);
        REQUIRE(parsed.params.size() == d.params.size());
        for (std::size_t i = 0; i < d.params.size(); ++i)
            CHECK(parsed.params[i] == Catch::Approx(d.params[i]).epsilon(1e-10));
    }
    CHECK_THROWS_AS(parse_distribution("zipf s=1"), config_error);
    CHECK_THROWS_AS(parse_distribution("pareto alpha=1.5"), config_error);     // missing xm
    CHECK_THROWS_AS(parse_distribution("pareto alpha=1.5 xm=1 z=2"), config_error);
    CHECK_THROWS_AS(validate(DistributionSpec::pareto(-1.0, 1.0)), domain_error);
}
