#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "asq/error.hpp"
#include "asq/random.hpp"
#include "asq/special.hpp"

namespace asq {

enum class Family {
    exponential,       // params: rate
    gamma_law,         // params: shape, scale
    weibull,           // params: shape, scale
    lognormal,         // params: mu_log, sigma_log
    loglogistic,       // params: shape c, scale s       (tail index c)
    pareto,            // params: alpha_tail, x_m        (support [x_m, inf))
    generalized_pareto,// params: xi, sigma              (tail index 1/xi for xi>0)
    inverse_gaussian,  // params: mean, shape
    mixture2,          // params: weight w; two component specs
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::exponential: return "exponential";
        case Family::gamma_law: return "gamma";
        case Family::weibull: return "weibull";
        case Family::lognormal: return "lognormal";
        case Family::loglogistic: return "loglogistic";
        case Family::pareto: return "pareto";
        case Family::generalized_pareto: return "gpd";
        case Family::inverse_gaussian: return "invgauss";
        case Family::mixture2: return "mixture2";
    }
    return "?";
}

// Parametric law for inter-arrival or service times. Parameters live in
// `params` in the order documented on Family; mixture2 carries its two
// component specs in `parts` and the first-component weight in params[0].
struct DistributionSpec {
    Family family = Family::exponential;
    std::vector<double> params;
    std::vector<DistributionSpec> parts;

    static DistributionSpec exponential(double rate) { return {Family::exponential, {rate}, {}}; }
    static DistributionSpec gamma(double shape, double scale) {
        return {Family::gamma_law, {shape, scale}, {}};
    }
    static DistributionSpec weibull(double shape, double scale) {
        return {Family::weibull, {shape, scale}, {}};
    }
    static DistributionSpec lognormal(double mu, double sigma) {
        return {Family::lognormal, {mu, sigma}, {}};
    }
    static DistributionSpec loglogistic(double shape, double scale) {
        return {Family::loglogistic, {shape, scale}, {}};
    }
    static DistributionSpec pareto(double alpha_tail, double x_m) {
        return {Family::pareto, {alpha_tail, x_m}, {}};
    }
    static DistributionSpec gpd(double xi, double sigma) {
        return {Family::generalized_pareto, {xi, sigma}, {}};
    }
    static DistributionSpec inverse_gaussian(double mean, double shape) {
        return {Family::inverse_gaussian, {mean, shape}, {}};
    }
    static DistributionSpec mixture(double w, DistributionSpec a, DistributionSpec b) {
        DistributionSpec d{Family::mixture2, {w}, {}};
        d.parts.push_back(std::move(a));
        d.parts.push_back(std::move(b));
        return d;
    }
};

inline void validate(const DistributionSpec& d) {
    auto positive = [&](std::size_t i, const char* what) {
        if (d.params.size() <= i || !(d.params[i] > 0) || !std::isfinite(d.params[i]))
            throw domain_error(std::string(family_name(d.family)) + ": " + what +
                               " must be strictly positive");
    };
    switch (d.family) {
        case Family::exponential: positive(0, "rate"); break;
        case Family::gamma_law: positive(0, "shape"); positive(1, "scale"); break;
        case Family::weibull: positive(0, "shape"); positive(1, "scale"); break;
        case Family::lognormal:
            if (d.params.size() < 2 || !std::isfinite(d.params[0]))
                throw domain_error("lognormal: mu_log must be finite");
            positive(1, "sigma_log");
            break;
        case Family::loglogistic: positive(0, "shape"); positive(1, "scale"); break;
        case Family::pareto: positive(0, "alpha_tail"); positive(1, "x_m"); break;
        case Family::generalized_pareto: positive(0, "xi"); positive(1, "sigma"); break;
        case Family::inverse_gaussian: positive(0, "mean"); positive(1, "shape"); break;
        case Family::mixture2: {
            if (d.params.empty() || !(d.params[0] >= 0.0 && d.params[0] <= 1.0))
                throw domain_error("mixture2: weight must lie in [0,1]");
            if (d.parts.size() != 2) throw domain_error("mixture2: needs two components");
            validate(d.parts[0]);
            validate(d.parts[1]);
            break;
        }
    }
}

// Tail index alpha of a regularly varying survival function; +inf for
// light-tailed families. Mixtures inherit the heavier component.
inline double tail_index(const DistributionSpec& d) {
    const double inf = std::numeric_limits<double>::infinity();
    switch (d.family) {
        case Family::pareto: return d.params[0];
        case Family::generalized_pareto: return d.params[0] > 0 ? 1.0 / d.params[0] : inf;
        case Family::loglogistic: return d.params[0];
        case Family::mixture2: {
            double t0 = tail_index(d.parts[0]);
            double t1 = tail_index(d.parts[1]);
            if (d.params[0] >= 1.0) return t0;
            if (d.params[0] <= 0.0) return t1;
            return std::min(t0, t1);
        }
        default: return inf;
    }
}

// A spec is LRD-inducing when its tail is regularly varying with index in
// (1,2): finite mean, infinite variance service times.
inline bool lrd_inducing(const DistributionSpec& d) {
    const double a = tail_index(d);
    return a > 1.0 && a < 2.0;
}

inline double mean(const DistributionSpec& d) {
    validate(d);
    switch (d.family) {
        case Family::exponential: return 1.0 / d.params[0];
        case Family::gamma_law: return d.params[0] * d.params[1];
        case Family::weibull:
            return d.params[1] * std::exp(log_gamma(1.0 + 1.0 / d.params[0]));
        case Family::lognormal:
            return std::exp(d.params[0] + 0.5 * d.params[1] * d.params[1]);
        case Family::loglogistic: {
            const double c = d.params[0];
            if (!(c > 1.0)) throw numeric_error("loglogistic: mean diverges for shape <= 1");
            const double pi_over_c = 3.14159265358979323846 / c;
            return d.params[1] * pi_over_c / std::sin(pi_over_c);
        }
        case Family::pareto: {
            const double a = d.params[0];
            if (!(a > 1.0)) throw numeric_error("pareto: mean diverges for alpha_tail <= 1");
            return a * d.params[1] / (a - 1.0);
        }
        case Family::generalized_pareto: {
            const double xi = d.params[0];
            if (!(xi < 1.0)) throw numeric_error("gpd: mean diverges for xi >= 1");
            return d.params[1] / (1.0 - xi);
        }
        case Family::inverse_gaussian: return d.params[0];
        case Family::mixture2:
            return d.params[0] * mean(d.parts[0]) + (1.0 - d.params[0]) * mean(d.parts[1]);
    }
    throw domain_error("mean: unknown family");
}

inline double cdf(const DistributionSpec& d, double x);

// survival 1 - F(s)
inline double survival(const DistributionSpec& d, double s) {
    validate(d);
    if (s <= 0) return 1.0;
    switch (d.family) {
        case Family::exponential: return std::exp(-d.params[0] * s);
        case Family::gamma_law: return gamma_q(d.params[0], s / d.params[1]);
        case Family::weibull: return std::exp(-std::pow(s / d.params[1], d.params[0]));
        case Family::lognormal:
            return 1.0 - normal_cdf((std::log(s) - d.params[0]) / d.params[1]);
        case Family::loglogistic:
            return 1.0 / (1.0 + std::pow(s / d.params[1], d.params[0]));
        case Family::pareto: {
            const double xm = d.params[1];
            return s <= xm ? 1.0 : std::pow(xm / s, d.params[0]);
        }
        case Family::generalized_pareto:
            return std::pow(1.0 + d.params[0] * s / d.params[1], -1.0 / d.params[0]);
        case Family::inverse_gaussian: {
            const double mu = d.params[0], lam = d.params[1];
            const double r = std::sqrt(lam / s);
            return 1.0 - (normal_cdf(r * (s / mu - 1.0)) +
                          std::exp(2.0 * lam / mu) * normal_cdf(-r * (s / mu + 1.0)));
        }
        case Family::mixture2:
            return d.params[0] * survival(d.parts[0], s) +
                   (1.0 - d.params[0]) * survival(d.parts[1], s);
    }
    throw domain_error("survival: unknown family");
}

inline double cdf(const DistributionSpec& d, double x) { return 1.0 - survival(d, x); }

inline double log_pdf(const DistributionSpec& d, double x) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (!(x > 0)) return neg_inf;
    switch (d.family) {
        case Family::exponential: return std::log(d.params[0]) - d.params[0] * x;
        case Family::gamma_law: {
            const double k = d.params[0], s = d.params[1];
            return (k - 1.0) * std::log(x) - x / s - log_gamma(k) - k * std::log(s);
        }
        case Family::weibull: {
            const double k = d.params[0], s = d.params[1];
            const double z = x / s;
            return std::log(k / s) + (k - 1.0) * std::log(z) - std::pow(z, k);
        }
        case Family::lognormal: {
            const double mu = d.params[0], sg = d.params[1];
            const double z = (std::log(x) - mu) / sg;
            return -std::log(x * sg) - 0.91893853320467274178 - 0.5 * z * z;
        }
        case Family::loglogistic: {
            const double c = d.params[0], s = d.params[1];
            const double z = x / s;
            const double zc = std::pow(z, c);
            return std::log(c / s) + (c - 1.0) * std::log(z) - 2.0 * std::log1p(zc);
        }
        case Family::pareto: {
            const double a = d.params[0], xm = d.params[1];
            if (x < xm) return neg_inf;
            return std::log(a) + a * std::log(xm) - (a + 1.0) * std::log(x);
        }
        case Family::generalized_pareto: {
            const double xi = d.params[0], sg = d.params[1];
            return -std::log(sg) - (1.0 / xi + 1.0) * std::log1p(xi * x / sg);
        }
        case Family::inverse_gaussian: {
            const double mu = d.params[0], lam = d.params[1];
            const double dev = x - mu;
            return 0.5 * std::log(lam / (6.28318530717958647692 * x * x * x)) -
                   lam * dev * dev / (2.0 * mu * mu * x);
        }
        case Family::mixture2: {
            const double w = d.params[0];
            const double la = log_pdf(d.parts[0], x);
            const double lb = log_pdf(d.parts[1], x);
            if (w >= 1.0) return la;
            if (w <= 0.0) return lb;
            const double m = std::max(la + std::log(w), lb + std::log1p(-w));
            if (m == neg_inf) return neg_inf;
            return m + std::log(std::exp(la + std::log(w) - m) +
                                std::exp(lb + std::log1p(-w) - m));
        }
    }
    throw domain_error("log_pdf: unknown family");
}

inline double pdf(const DistributionSpec& d, double x) { return std::exp(log_pdf(d, x)); }

inline double sample(const DistributionSpec& d, RandomStream& rng) {
    validate(d);
    switch (d.family) {
        case Family::exponential: return rng.exponential(d.params[0]);
        case Family::gamma_law: return rng.gamma(d.params[0], d.params[1]);
        case Family::weibull:
            return d.params[1] * std::pow(-std::log(rng.uniform_pos()), 1.0 / d.params[0]);
        case Family::lognormal: return std::exp(rng.normal(d.params[0], d.params[1]));
        case Family::loglogistic: {
            const double u = rng.uniform_pos();
            return d.params[1] * std::pow(u / (1.0 - u), 1.0 / d.params[0]);
        }
        case Family::pareto:
            return d.params[1] * std::pow(rng.uniform_pos(), -1.0 / d.params[0]);
        case Family::generalized_pareto: {
            const double xi = d.params[0], sg = d.params[1];
            return sg * (std::pow(rng.uniform_pos(), -xi) - 1.0) / xi;
        }
        case Family::inverse_gaussian: {
            // Michael-Schucany-Haas
            const double mu = d.params[0], lam = d.params[1];
            const double nu = rng.normal();
            const double y = nu * nu;
            const double x = mu + mu * mu * y / (2.0 * lam) -
                             mu / (2.0 * lam) *
                                 std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
            if (rng.uniform01() <= mu / (mu + x)) return x;
            return mu * mu / x;
        }
        case Family::mixture2:
            return rng.uniform01() < d.params[0] ? sample(d.parts[0], rng)
                                                 : sample(d.parts[1], rng);
    }
    throw domain_error("sample: unknown family");
}

// integral of the survival function over [h, inf); equals the mean at h = 0.
// Closed form where available, otherwise panel quadrature at ~1e-8 relative.
inline double tail_integral(const DistributionSpec& d, double h) {
    validate(d);
    if (!(h >= 0)) throw domain_error("tail_integral: h must be >= 0");
    switch (d.family) {
        case Family::exponential: return std::exp(-d.params[0] * h) / d.params[0];
        case Family::pareto: {
            const double a = d.params[0], xm = d.params[1];
            if (!(a > 1.0)) throw numeric_error("pareto: tail integral diverges for alpha_tail <= 1");
            if (h <= xm) return (xm - h) + xm / (a - 1.0);
            return std::pow(xm, a) * std::pow(h, 1.0 - a) / (a - 1.0);
        }
        case Family::generalized_pareto: {
            const double xi = d.params[0], sg = d.params[1];
            if (!(xi < 1.0)) throw numeric_error("gpd: tail integral diverges for xi >= 1");
            return sg / (1.0 - xi) * std::pow(1.0 + xi * h / sg, 1.0 - 1.0 / xi);
        }
        case Family::gamma_law: {
            const double k = d.params[0], s = d.params[1];
            return k * s * gamma_q(k + 1.0, h / s) - h * gamma_q(k, h / s);
        }
        case Family::weibull: {
            const double k = d.params[0], s = d.params[1];
            const double z = std::pow(h / s, k);
            return s * std::exp(log_gamma(1.0 + 1.0 / k)) * gamma_q(1.0 + 1.0 / k, z) -
                   h * std::exp(-z);
        }
        case Family::lognormal: {
            const double mu = d.params[0], sg = d.params[1];
            if (h == 0) return mean(d);
            const double z = (std::log(h) - mu) / sg;
            return std::exp(mu + 0.5 * sg * sg) * normal_cdf(sg - z) - h * (1.0 - normal_cdf(z));
        }
        case Family::mixture2:
            return d.params[0] * tail_integral(d.parts[0], h) +
                   (1.0 - d.params[0]) * tail_integral(d.parts[1], h);
        case Family::loglogistic: {
            const double c = d.params[0], s = d.params[1];
            if (!(c > 1.0)) throw numeric_error("loglogistic: tail integral diverges for shape <= 1");
            // quadrature up to M, then the analytic power-tail remainder:
            // survival(s) = z^-1 - z^-2 + z^-3 - ... with z = (s/scale)^c
            const double M = std::max(h, s * std::pow(1e6, 1.0 / c));
            double acc = 0.0;
            double lo = h;
            double width = std::max(s * 0.5, std::max(h, 1.0) * 0.5);
            while (lo < M) {
                const double hi = std::min(M, lo + width);
                acc += detail::gl15([&](double x) { return survival(d, x); }, lo,
                                    0.5 * (lo + hi)) +
                       detail::gl15([&](double x) { return survival(d, x); }, 0.5 * (lo + hi),
                                    hi);
                lo = hi;
                width *= 2.0;
            }
            const double y = M / s;
            double tail = 0.0;
            for (int j = 1; j <= 4; ++j) {
                const double term = s * std::pow(y, 1.0 - j * c) / (j * c - 1.0);
                tail += (j % 2 == 1) ? term : -term;
            }
            return acc + tail;
        }
        case Family::inverse_gaussian: {
            (void)mean(d);
            return integrate_tail([&](double x) { return survival(d, x); }, h,
                                  d.params[0], 1e-10);
        }
    }
    throw domain_error("tail_integral: unknown family");
}

// --- human-readable key-value form ------------------------------------------
//
//   exponential rate=2
//   pareto alpha=1.5 xm=1
//   mixture2 w=0.3 | loglogistic shape=2 scale=1 | gpd xi=0.6 sigma=2
//
// Parameter names per family are fixed; see param_names().

inline std::vector<std::string> param_names(Family f) {
    switch (f) {
        case Family::exponential: return {"rate"};
        case Family::gamma_law: return {"shape", "scale"};
        case Family::weibull: return {"shape", "scale"};
        case Family::lognormal: return {"mu", "sigma"};
        case Family::loglogistic: return {"shape", "scale"};
        case Family::pareto: return {"alpha", "xm"};
        case Family::generalized_pareto: return {"xi", "sigma"};
        case Family::inverse_gaussian: return {"mean", "shape"};
        case Family::mixture2: return {"w"};
    }
    return {};
}

inline Family family_from_name(const std::string& name) {
    for (Family f : {Family::exponential, Family::gamma_law, Family::weibull, Family::lognormal,
                     Family::loglogistic, Family::pareto, Family::generalized_pareto,
                     Family::inverse_gaussian, Family::mixture2}) {
        if (name == family_name(f)) return f;
    }
    throw config_error("unknown distribution family: " + name);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_distribution(const DistributionSpec& d) {
    std::string out = family_name(d.family);
    const auto names = param_names(d.family);
    for (std::size_t i = 0; i < names.size(); ++i)
        out += " " + names[i] + "=" + format_double(d.params[i]);
    if (d.family == Family::mixture2) {
        out += " | " + format_distribution(d.parts[0]);
        out += " | " + format_distribution(d.parts[1]);
    }
    return out;
}

namespace detail {
inline DistributionSpec parse_flat_distribution(const std::string& text) {
    std::istringstream in(text);
    std::string famtok;
    if (!(in >> famtok)) throw config_error("empty distribution spec");
    DistributionSpec d;
    d.family = family_from_name(famtok);
    const auto names = param_names(d.family);
    d.params.assign(names.size(), std::numeric_limits<double>::quiet_NaN());
    std::string kv;
    while (in >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw config_error("distribution parameter missing '=': " + kv);
        const std::string key = kv.substr(0, eq);
        const double val = std::stod(kv.substr(eq + 1));
        bool found = false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == key) {
                d.params[i] = val;
                found = true;
                break;
            }
        }
        if (!found)
            throw config_error(std::string("unknown parameter '") + key + "' for family " +
                               famtok);
    }
    for (std::size_t i = 0; i < names.size(); ++i)
        if (std::isnan(d.params[i]))
            throw config_error(std::string("missing parameter '") + names[i] + "' for family " +
                               famtok);
    return d;
}
}  // namespace detail

inline DistributionSpec parse_distribution(const std::string& text) {
    // split on '|': mixture head and two component specs
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (true) {
        const auto bar = text.find('|', start);
        if (bar == std::string::npos) {
            pieces.push_back(text.substr(start));
            break;
        }
        pieces.push_back(text.substr(start, bar - start));
        start = bar + 1;
    }
    DistributionSpec d = detail::parse_flat_distribution(pieces[0]);
    if (d.family == Family::mixture2) {
        if (pieces.size() != 3)
            throw config_error("mixture2 requires two '|'-separated components");
        d.parts.push_back(detail::parse_flat_distribution(pieces[1]));
        d.parts.push_back(detail::parse_flat_distribution(pieces[2]));
    } else if (pieces.size() != 1) {
        throw config_error("unexpected '|' in non-mixture distribution spec");
    }
    validate(d);
    return d;
}

}  // namespace asq
