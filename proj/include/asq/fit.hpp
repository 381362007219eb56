#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "asq/distribution.hpp"
#include "asq/error.hpp"
#include "asq/random.hpp"

namespace asq {

struct FitResult {
    DistributionSpec spec;
    double log_likelihood = -std::numeric_limits<double>::infinity();
    bool converged = false;
};

struct fit_failed_error : numeric_error {
    fit_failed_error(const std::string& msg, FitResult best)
        : numeric_error(msg), best_so_far(std::move(best)) {}
    FitResult best_so_far;
};

namespace detail {

// Nelder-Mead simplex minimizer; derivative-free, budgeted.
struct SimplexResult {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    bool converged = false;
};

inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, double step, long max_evals) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    long evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = f(pts[i]);
        ++evals;
    }
    SimplexResult res;
    auto order = [&]() {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            f2[i] = fv[idx[i]];
        }
        pts.swap(p2);
        fv.swap(f2);
    };
    while (evals < max_evals) {
        order();
        if (std::fabs(fv[n] - fv[0]) < 1e-10 * (1.0 + std::fabs(fv[0]))) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;
        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (pts[n][j] - centroid[j]);
            return p;
        };
        auto xr = blend(-1.0);
        double fr = f(xr);
        ++evals;
        if (fr < fv[0]) {
            auto xe = blend(-2.0);
            double fe = f(xe);
            ++evals;
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = f(xc);
            ++evals;
            if (fc < std::min(fr, fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    fv[i] = f(pts[i]);
                    ++evals;
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.fx = fv[0];
    return res;
}

struct WeightedStats {
    double wsum = 0, mean = 0, var = 0, mean_log = 0, var_log = 0, min = 0;
    double sum_inv = 0;
};

inline WeightedStats weighted_stats(const std::vector<double>& x, const std::vector<double>& w) {
    WeightedStats s;
    s.min = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
    double sx = 0, sl = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s.wsum += w[i];
        sx += w[i] * x[i];
        sl += w[i] * std::log(x[i]);
        s.sum_inv += w[i] / x[i];
    }
    s.mean = sx / s.wsum;
    s.mean_log = sl / s.wsum;
    double vx = 0, vl = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        vx += w[i] * (x[i] - s.mean) * (x[i] - s.mean);
        const double dl = std::log(x[i]) - s.mean_log;
        vl += w[i] * dl * dl;
    }
    s.var = vx / s.wsum;
    s.var_log = vl / s.wsum;
    return s;
}

// moment-based starting point in the transformed (log) space
inline std::vector<double> init_theta(Family fam, const WeightedStats& s) {
    switch (fam) {
        case Family::gamma_law: {
            const double shape = std::max(1e-3, s.mean * s.mean / std::max(s.var, 1e-12));
            return {std::log(shape), std::log(std::max(1e-12, s.mean / shape))};
        }
        case Family::weibull: {
            const double sd_log = std::sqrt(std::max(s.var_log, 1e-8));
            const double k = std::max(0.05, 1.2825498301618641 / sd_log);
            return {std::log(k), std::log(std::exp(s.mean_log + 0.5772156649015329 / k))};
        }
        case Family::loglogistic: {
            const double sd_log = std::sqrt(std::max(s.var_log, 1e-8));
            const double c = std::max(0.1, 1.8137993642342178 / sd_log);
            return {std::log(c), s.mean_log};
        }
        case Family::generalized_pareto: {
            const double cv2 = s.var / std::max(1e-12, s.mean * s.mean);
            double xi = 0.5 * (1.0 - 1.0 / std::max(cv2, 1e-6));
            xi = std::min(0.95, std::max(0.02, xi));
            const double sigma = std::max(1e-12, 0.5 * s.mean * (1.0 / std::max(cv2, 1e-6) + 1.0));
            return {std::log(xi), std::log(sigma)};
        }
        case Family::inverse_gaussian: {
            const double lam = std::max(1e-9, s.wsum / std::max(1e-12, s.sum_inv - s.wsum / s.mean));
            return {std::log(s.mean), std::log(lam)};
        }
        default: return {};
    }
}

inline DistributionSpec spec_from_theta(Family fam, const std::vector<double>& th,
                                        double pareto_xm) {
    switch (fam) {
        case Family::gamma_law: return DistributionSpec::gamma(std::exp(th[0]), std::exp(th[1]));
        case Family::weibull: return DistributionSpec::weibull(std::exp(th[0]), std::exp(th[1]));
        case Family::loglogistic:
            return DistributionSpec::loglogistic(std::exp(th[0]), std::exp(th[1]));
        case Family::generalized_pareto:
            return DistributionSpec::gpd(std::exp(th[0]), std::exp(th[1]));
        case Family::inverse_gaussian:
            return DistributionSpec::inverse_gaussian(std::exp(th[0]), std::exp(th[1]));
        case Family::pareto: return DistributionSpec::pareto(std::exp(th[0]), pareto_xm);
        default: throw domain_error("spec_from_theta: family has closed-form fit");
    }
}

inline double weighted_loglik(const DistributionSpec& d, const std::vector<double>& x,
                              const std::vector<double>& w) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lp = log_pdf(d, x[i]);
        if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
        ll += w[i] * lp;
    }
    return ll;
}

// Weighted maximum likelihood for a single (non-mixture) family. Closed form
// for exponential and lognormal; Nelder-Mead with random restarts otherwise.
inline FitResult mle_single(Family fam, const std::vector<double>& x,
                            const std::vector<double>& w, RandomStream& rng,
                            int restarts = 5, long eval_budget = 10000) {
    FitResult out;
    const WeightedStats s = weighted_stats(x, w);
    if (fam == Family::exponential) {
        out.spec = DistributionSpec::exponential(1.0 / s.mean);
        out.log_likelihood = weighted_loglik(out.spec, x, w);
        out.converged = true;
        return out;
    }
    if (fam == Family::lognormal) {
        out.spec = DistributionSpec::lognormal(s.mean_log, std::sqrt(std::max(s.var_log, 1e-12)));
        out.log_likelihood = weighted_loglik(out.spec, x, w);
        out.converged = true;
        return out;
    }
    if (fam == Family::mixture2) throw domain_error("mle_single: use fit_mixture");

    const double pareto_xm = s.min;  // MLE of the pareto lower bound
    std::vector<double> theta0;
    if (fam == Family::pareto) {
        double denom = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) denom += w[i] * std::log(x[i] / pareto_xm);
        const double alpha = std::max(0.05, s.wsum / std::max(denom, 1e-12));
        theta0 = {std::log(alpha)};
    } else {
        theta0 = init_theta(fam, s);
    }
    auto objective = [&](const std::vector<double>& th) {
        for (double t : th)
            if (!std::isfinite(t) || std::fabs(t) > 50.0) return 1e100;
        return -weighted_loglik(spec_from_theta(fam, th, pareto_xm), x, w);
    };
    bool any_converged = false;
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> start = theta0;
        if (r > 0)
            for (double& t : start) t += 0.4 * rng.normal();
        auto res = nelder_mead(objective, start, 0.25, eval_budget);
        any_converged = any_converged || res.converged;
        if (-res.fx > out.log_likelihood) {
            out.log_likelihood = -res.fx;
            out.spec = spec_from_theta(fam, res.x, pareto_xm);
            out.converged = res.converged;
        }
        if (res.converged && r >= 1) break;  // converged from two starts: enough
    }
    if (!std::isfinite(out.log_likelihood))
        throw fit_failed_error(std::string("mle: no finite likelihood for ") + family_name(fam),
                               out);
    if (!any_converged)
        throw fit_failed_error(std::string("mle: optimizer failed to converge for ") +
                                   family_name(fam),
                               out);
    return out;
}

}  // namespace detail

// Two-component mixture fit by expectation-maximization with restarts.
// Component M-steps reuse the weighted single-family MLE.
inline FitResult fit_mixture(Family fam_a, Family fam_b, const std::vector<double>& samples,
                             RandomStream& rng, int restarts = 5, int max_iters = 200) {
    const std::size_t n = samples.size();
    FitResult best;
    bool any_converged = false;
    for (int r = 0; r < restarts; ++r) {
        // initialize responsibilities from a quantile split (jittered on restarts)
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        double split_q = 0.5;
        if (r > 0) split_q = std::min(0.85, std::max(0.15, 0.5 + 0.2 * rng.normal()));
        const double split = sorted[static_cast<std::size_t>(split_q * (n - 1))];
        std::vector<double> ra(n);
        for (std::size_t i = 0; i < n; ++i)
            ra[i] = samples[i] <= split ? 0.9 : 0.1;

        double w = 0.5;
        DistributionSpec spec_a, spec_b;
        double ll = -std::numeric_limits<double>::infinity();
        bool converged = false;
        try {
            for (int it = 0; it < max_iters; ++it) {
                // M-step
                std::vector<double> rb(n);
                double wa = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    rb[i] = 1.0 - ra[i];
                    wa += ra[i];
                }
                w = std::min(1.0 - 1e-6, std::max(1e-6, wa / n));
                spec_a = detail::mle_single(fam_a, samples, ra, rng, 2, 2500).spec;
                spec_b = detail::mle_single(fam_b, samples, rb, rng, 2, 2500).spec;
                // E-step
                double new_ll = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double la = std::log(w) + log_pdf(spec_a, samples[i]);
                    const double lb = std::log1p(-w) + log_pdf(spec_b, samples[i]);
                    const double m = std::max(la, lb);
                    const double denom = std::exp(la - m) + std::exp(lb - m);
                    ra[i] = std::exp(la - m) / denom;
                    new_ll += m + std::log(denom);
                }
                if (std::isfinite(new_ll) && std::fabs(new_ll - ll) < 1e-8 * (1.0 + std::fabs(new_ll))) {
                    ll = new_ll;
                    converged = true;
                    break;
                }
                ll = new_ll;
            }
        } catch (const fit_failed_error&) {
            continue;  // this restart collapsed; try another initialization
        }
        any_converged = any_converged || converged;
        if (ll > best.log_likelihood) {
            best.spec = DistributionSpec::mixture(w, spec_a, spec_b);
            best.log_likelihood = ll;
            best.converged = converged;
        }
    }
    if (!std::isfinite(best.log_likelihood))
        throw fit_failed_error("mixture fit failed for all restarts", best);
    if (!any_converged) throw fit_failed_error("mixture EM did not converge", best);
    return best;
}

// Maximum-likelihood fit of one family to positive samples. Needs >= 10
// samples. Deterministic: restarts draw from a fixed internal stream.
inline FitResult fit_mle(Family family, const std::vector<double>& samples) {
    if (samples.size() < 10)
        throw insufficient_data_error("fit_mle: need at least 10 samples");
    for (double s : samples)
        if (!(s > 0)) throw domain_error("fit_mle: samples must be strictly positive");
    RandomStream rng(0x5EEDF17ULL, 0);
    if (family == Family::mixture2)
        return fit_mixture(Family::lognormal, Family::pareto, samples, rng);
    std::vector<double> w(samples.size(), 1.0);
    return detail::mle_single(family, samples, w, rng);
}

// Mixture fit of an explicit family pair.
inline FitResult fit_mle_mixture(Family fam_a, Family fam_b, const std::vector<double>& samples) {
    if (samples.size() < 10)
        throw insufficient_data_error("fit_mle: need at least 10 samples");
    for (double s : samples)
        if (!(s > 0)) throw domain_error("fit_mle: samples must be strictly positive");
    RandomStream rng(0x5EEDF17ULL, 1);
    return fit_mixture(fam_a, fam_b, samples, rng);
}

}  // namespace asq
