#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "asq/error.hpp"
#include "asq/random.hpp"

namespace asq {

// Regularized lower incomplete gamma P(a,x); series for x < a+1, continued
// fraction otherwise (Numerical Recipes style, Lentz's algorithm).
inline double gamma_p(double a, double x) {
    if (!(a > 0) || x < 0) throw domain_error("gamma_p: bad arguments");
    if (x == 0) return 0.0;
    const double lg = log_gamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x)
inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// standard normal CDF
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

namespace detail {

// 15-point Gauss-Legendre nodes/weights on [-1,1]
inline const double kGl15X[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601701,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline const double kGl15W[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

inline double gl15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 15; ++i) acc += kGl15W[i] * f(mid + half * kGl15X[i]);
    return acc * half;
}

}  // namespace detail

// Integral of a nonnegative decaying integrand over [h, inf): geometric
// doubling of panels, each evaluated by 15-point Gauss-Legendre with one
// bisection refinement; stops when a panel's relative contribution drops
// below tol. Suited to monotone survival-type integrands.
inline double integrate_tail(const std::function<double(double)>& f, double h, double scale,
                             double tol = 1e-9) {
    double lo = h;
    double width = std::max(scale, std::max(h, 1.0) * 0.5);
    double total = 0.0;
    for (int panel = 0; panel < 400; ++panel) {
        const double hi = lo + width;
        double est = detail::gl15(f, lo, hi);
        // one refinement pass for accuracy on curved panels
        const double refined =
            detail::gl15(f, lo, 0.5 * (lo + hi)) + detail::gl15(f, 0.5 * (lo + hi), hi);
        est = refined + (refined - est) / 63.0;  // extrapolated
        total += est;
        if (panel > 2 && std::fabs(est) < tol * std::fabs(total)) return total;
        lo = hi;
        width *= 2.0;
    }
    throw numeric_error("integrate_tail: integral failed to converge (diverging tail?)");
}

}  // namespace asq
