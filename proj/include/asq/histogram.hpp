#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "asq/distribution.hpp"
#include "asq/error.hpp"

namespace asq {

enum class Divergence { KL, TVD, L2, JSD, W1 };

inline const char* divergence_name(Divergence m) {
    switch (m) {
        case Divergence::KL: return "KL";
        case Divergence::TVD: return "TVD";
        case Divergence::L2: return "L2";
        case Divergence::JSD: return "JSD";
        case Divergence::W1: return "W1";
    }
    return "?";
}

// Normalized mass on an ordered support. Two layouts:
//   - integer/point support: `values` only (edges empty)
//   - binned: `edges` of size values.size()+1, values are bin midpoints
struct Histogram {
    std::vector<double> values;
    std::vector<double> edges;
    std::vector<double> mass;

    bool binned() const { return !edges.empty(); }

    void normalize() {
        double total = 0.0;
        for (double m : mass) {
            ASQ_CHECK(m >= 0.0, "histogram mass must be nonnegative");
            total += m;
        }
        if (total <= 0.0) throw data_error("histogram: empty (zero total mass)");
        for (double& m : mass) m /= total;
    }

    static Histogram from_counts(std::vector<double> values, std::vector<double> counts) {
        for (std::size_t i = 1; i < values.size(); ++i)
            ASQ_CHECK(values[i] > values[i - 1], "histogram support must be strictly increasing");
        Histogram h;
        h.values = std::move(values);
        h.mass = std::move(counts);
        h.normalize();
        return h;
    }

    // occupancy histogram of a nonnegative integer series (queue lengths)
    template <typename Int>
    static Histogram occupancy(const std::vector<Int>& series) {
        if (series.empty()) throw data_error("histogram: empty series");
        Int max_v = *std::max_element(series.begin(), series.end());
        std::vector<double> counts(static_cast<std::size_t>(max_v) + 1, 0.0);
        for (Int v : series) counts[static_cast<std::size_t>(v)] += 1.0;
        std::vector<double> vals(counts.size());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = static_cast<double>(i);
        return from_counts(std::move(vals), std::move(counts));
    }

    // bin samples into the given ascending edges; mass outside is clipped to
    // the end bins. Last edge may be +inf.
    static Histogram binned_from_samples(const std::vector<double>& samples,
                                         std::vector<double> bin_edges) {
        ASQ_CHECK(bin_edges.size() >= 2, "need at least one bin");
        for (std::size_t i = 1; i < bin_edges.size(); ++i)
            ASQ_CHECK(bin_edges[i] > bin_edges[i - 1], "edges must be strictly increasing");
        if (samples.empty()) throw data_error("histogram: no samples");
        std::vector<double> counts(bin_edges.size() - 1, 0.0);
        for (double s : samples) {
            auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), s);
            std::size_t idx;
            if (it == bin_edges.begin()) idx = 0;
            else idx = std::min(counts.size() - 1, static_cast<std::size_t>(it - bin_edges.begin() - 1));
            counts[idx] += 1.0;
        }
        Histogram h;
        h.edges = std::move(bin_edges);
        h.values.resize(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double lo = h.edges[i];
            const double hi = h.edges[i + 1];
            h.values[i] = std::isinf(hi) ? lo : 0.5 * (lo + hi);
        }
        h.mass = std::move(counts);
        h.normalize();
        return h;
    }

    // model mass on this histogram's bins (requires binned layout)
    Histogram model_mass(const DistributionSpec& d) const {
        ASQ_CHECK(binned(), "model_mass needs a binned histogram");
        Histogram out = *this;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double lo = cdf(d, std::max(0.0, edges[i]));
            const double hi = std::isinf(edges[i + 1]) ? 1.0 : cdf(d, edges[i + 1]);
            out.mass[i] = std::max(0.0, hi - lo);
        }
        out.normalize();
        return out;
    }

    std::string to_csv() const {
        std::string out = "value,mass\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            out += format_double(values[i]) + "," + format_double(mass[i]) + "\n";
        return out;
    }
};

namespace detail {

// Align two histograms onto a shared partition. Integer supports merge by
// value; binned supports merge edge sets with proportional mass splitting.
inline void unify(const Histogram& p, const Histogram& q, std::vector<double>& vout,
                  std::vector<double>& pm, std::vector<double>& qm) {
    if (p.mass.empty() || q.mass.empty()) throw data_error("divergence: empty histogram");
    if (!p.binned() && !q.binned()) {
        std::vector<double> values;
        values.reserve(p.values.size() + q.values.size());
        values.insert(values.end(), p.values.begin(), p.values.end());
        values.insert(values.end(), q.values.begin(), q.values.end());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        auto project = [&](const Histogram& h) {
            std::vector<double> m(values.size(), 0.0);
            for (std::size_t i = 0; i < h.values.size(); ++i) {
                auto it = std::lower_bound(values.begin(), values.end(), h.values[i]);
                m[static_cast<std::size_t>(it - values.begin())] += h.mass[i];
            }
            return m;
        };
        vout = values;
        pm = project(p);
        qm = project(q);
        return;
    }
    if (p.binned() && q.binned()) {
        std::vector<double> edges;
        edges.insert(edges.end(), p.edges.begin(), p.edges.end());
        edges.insert(edges.end(), q.edges.begin(), q.edges.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        auto project = [&](const Histogram& h) {
            std::vector<double> m(edges.size() - 1, 0.0);
            for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
                const double lo = h.edges[i], hi = h.edges[i + 1];
                // distribute h.mass[i] over refined cells inside [lo,hi)
                for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
                    const double clo = std::max(lo, edges[j]);
                    const double chi = std::min(hi, edges[j + 1]);
                    if (chi <= clo) continue;
                    double frac;
                    if (std::isinf(hi)) frac = std::isinf(chi) ? 1.0 : 0.0;
                    else frac = (chi - clo) / (hi - lo);
                    if (std::isinf(hi) && std::isinf(chi)) frac = 1.0;
                    m[j] += h.mass[i] * frac;
                }
            }
            return m;
        };
        vout.assign(edges.size() - 1, 0.0);
        for (std::size_t j = 0; j + 1 < edges.size(); ++j)
            vout[j] = std::isinf(edges[j + 1]) ? edges[j] : 0.5 * (edges[j] + edges[j + 1]);
        pm = project(p);
        qm = project(q);
        return;
    }
    throw data_error("divergence: cannot unify integer-support with binned histogram");
}

}  // namespace detail

// Histogram divergences on the unified support. KL and JSD are reported in
// nats with add-eps smoothing (1e-9) on both inputs; W1 is the area between
// CDFs using the support coordinates.
inline double divergence(const Histogram& p, const Histogram& q, Divergence metric) {
    std::vector<double> v, pm, qm;
    detail::unify(p, q, v, pm, qm);
    constexpr double eps = 1e-9;
    const std::size_t n = pm.size();

    auto smooth = [&](std::vector<double> m) {
        double tot = 0.0;
        for (double& x : m) {
            x += eps;
            tot += x;
        }
        for (double& x : m) x /= tot;
        return m;
    };

    switch (metric) {
        case Divergence::KL: {
            auto ps = smooth(pm), qs = smooth(qm);
            double kl = 0.0;
            for (std::size_t i = 0; i < n; ++i) kl += ps[i] * std::log(ps[i] / qs[i]);
            return std::max(0.0, kl);
        }
        case Divergence::JSD: {
            auto ps = smooth(pm), qs = smooth(qm);
            double jsd = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double m = 0.5 * (ps[i] + qs[i]);
                jsd += 0.5 * ps[i] * std::log(ps[i] / m) + 0.5 * qs[i] * std::log(qs[i] / m);
            }
            return std::max(0.0, jsd);
        }
        case Divergence::TVD: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::fabs(pm[i] - qm[i]);
            return 0.5 * acc;
        }
        case Divergence::L2: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += (pm[i] - qm[i]) * (pm[i] - qm[i]);
            return std::sqrt(acc);
        }
        case Divergence::W1: {
            // area between CDFs over the support span
            double acc = 0.0, cp = 0.0, cq = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                cp += pm[i];
                cq += qm[i];
                const double dx = v[i + 1] - v[i];
                if (std::isfinite(dx)) acc += std::fabs(cp - cq) * dx;
            }
            return acc;
        }
    }
    throw domain_error("divergence: unknown metric");
}

// empirical total variation between an integer-support histogram and a PMF
// vector indexed from 0
inline double total_variation(const Histogram& h, const std::vector<double>& pmf) {
    double acc = 0.0;
    std::size_t n = std::max(pmf.size(), h.values.empty()
                                             ? std::size_t(0)
                                             : static_cast<std::size_t>(h.values.back()) + 1);
    std::vector<double> hm(n, 0.0);
    for (std::size_t i = 0; i < h.values.size(); ++i)
        hm[static_cast<std::size_t>(h.values[i])] = h.mass[i];
    for (std::size_t i = 0; i < n; ++i) {
        const double p = i < pmf.size() ? pmf[i] : 0.0;
        acc += std::fabs(hm[i] - p);
    }
    return 0.5 * acc;
}

}  // namespace asq
