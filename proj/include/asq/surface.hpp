#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "asq/distribution.hpp"
#include "asq/error.hpp"
#include "asq/random.hpp"

namespace asq {

enum class CouplingMode { static_defense, policy_driven };

// Rate/capacity parameters of one queue regime.
struct SurfaceConfig {
    double lambda = 0.0;       // vulnerability arrivals per unit time
    double alpha = 1.0;        // defense intensity; static mode uses mu_d = alpha*lambda
    double beta = 0.0;         // attack intensity per vulnerability per unit lambda
    double amplification = 1.0;// record of the applied AI amplification factor
    double budget = std::numeric_limits<double>::infinity();  // max total defense rate b
    int servers = std::numeric_limits<int>::max();            // m
    double dt = 1.0;           // slot length
    CouplingMode mode = CouplingMode::static_defense;

    double static_defense_rate() const { return alpha * lambda; }
    double exploit_rate(std::int64_t n) const { return beta * lambda * static_cast<double>(n); }

    void validate() const {
        if (!(lambda >= 0) || !(dt >= 0)) throw domain_error("surface: lambda and dt must be >= 0");
        if (servers < 1) throw domain_error("surface: servers must be >= 1");
        if (mode == CouplingMode::static_defense && static_defense_rate() > budget * (1 + 1e-12))
            throw domain_error("surface: static defense rate alpha*lambda exceeds budget b");
    }
};

struct SurfaceState {
    std::int64_t n = 0;   // active vulnerabilities
    std::int64_t clock = 0;  // slot index
};

// Per-slot record of the simulated queue. N is the count at slot start;
// N(t+1) = N(t) + V(t) - Nd(t) - Nl(t) holds exactly for every slot.
struct Trajectory {
    std::vector<std::int64_t> n, arrivals, defended, exploited;
    std::vector<double> mu_d, mu_l;
    std::int64_t final_n = 0;
    double dt = 1.0;

    std::size_t slots() const { return n.size(); }

    std::int64_t total_arrivals() const {
        std::int64_t s = 0;
        for (auto v : arrivals) s += v;
        return s;
    }
    std::int64_t total_defended() const {
        std::int64_t s = 0;
        for (auto v : defended) s += v;
        return s;
    }
    std::int64_t total_exploited() const {
        std::int64_t s = 0;
        for (auto v : exploited) s += v;
        return s;
    }

    std::string to_csv() const {
        std::string out = "slot,N,V,Nd,Nl,mu_d,mu_l\n";
        char buf[160];
        for (std::size_t i = 0; i < n.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%lld,%lld,%lld,%lld,%s,%s\n", i,
                          static_cast<long long>(n[i]), static_cast<long long>(arrivals[i]),
                          static_cast<long long>(defended[i]), static_cast<long long>(exploited[i]),
                          format_double(mu_d[i]).c_str(), format_double(mu_l[i]).c_str());
            out += buf;
        }
        return out;
    }
};

// Per-vulnerability defense/exploit race over one slot. Candidate defense
// completions are Poisson(mu_d*dt) capped at the server count; candidate
// exploits are Poisson(mu_l*dt). If the candidates oversubscribe the n
// available jobs, the n departures are drawn from the candidate pool without
// replacement, which preserves the competing-race attribution probability
// mu_d/(mu_d+mu_l) per departure (Poisson splitting).
struct RaceOutcome {
    std::int64_t defended = 0;
    std::int64_t exploited = 0;
};

inline RaceOutcome race_outcome(std::int64_t n, double mu_d, double mu_l, double dt, int m,
                                RandomStream& rng) {
    ASQ_CHECK(n >= 0, "race_outcome: negative queue");
    if (!(mu_d >= 0) || !(mu_l >= 0)) throw domain_error("race_outcome: rates must be >= 0");
    std::int64_t d = static_cast<std::int64_t>(rng.poisson(mu_d * dt));
    if (d > m) d = m;
    std::int64_t e = static_cast<std::int64_t>(rng.poisson(mu_l * dt));
    if (d + e <= n) return {d, e};
    const std::int64_t def =
        static_cast<std::int64_t>(rng.hypergeometric(static_cast<std::uint64_t>(d),
                                                     static_cast<std::uint64_t>(e),
                                                     static_cast<std::uint64_t>(n)));
    return {def, n - def};
}

struct StepRecord {
    SurfaceState state;       // post-step state
    std::int64_t defended = 0;
    std::int64_t exploited = 0;
    double mu_d = 0.0;        // applied defense rate
    double mu_l = 0.0;        // exploit rate (computed at the pre-arrival count)
};

// One slot of Eq.-style evolution: arrivals first, then departures drawn on
// the post-arrival count; the nonnegativity clamp is unreachable because
// departures never exceed the count, and this is checked.
inline StepRecord step(const SurfaceState& state, const SurfaceConfig& cfg, std::int64_t v,
                       double mu_d_action, RandomStream& rng) {
    cfg.validate();
    if (v < 0) throw domain_error("step: arrivals must be >= 0");
    double mu_d = cfg.mode == CouplingMode::static_defense ? cfg.static_defense_rate()
                                                           : mu_d_action;
    if (cfg.mode == CouplingMode::policy_driven && mu_d > cfg.budget * (1 + 1e-12))
        throw domain_error("step: defense action exceeds budget b");
    if (mu_d > cfg.budget) mu_d = cfg.budget;
    const double mu_l = cfg.exploit_rate(state.n);

    const std::int64_t post = state.n + v;
    const RaceOutcome race = race_outcome(post, mu_d, mu_l, cfg.dt, cfg.servers, rng);
    const std::int64_t next = post - race.defended - race.exploited;
    ASQ_CHECK(next >= 0, "step: conservation violated");
    return {{next, state.clock + 1}, race.defended, race.exploited, mu_d, mu_l};
}

// --- arrival sources ---------------------------------------------------------

struct PoissonArrivals {
    double lambda = 0.0;
};

struct TraceArrivals {
    std::vector<std::int64_t> counts;  // per-slot arrival counts, replayed in order
};

// Deterministic sinusoid plus seeded burst spikes, clipped to [0, v_max].
struct AdversarialArrivals {
    std::int64_t v_max = 10;
    double period = 50.0;
    double burst_prob = 0.05;
};

using ArrivalSource = std::variant<PoissonArrivals, TraceArrivals, AdversarialArrivals>;

inline std::int64_t draw_arrivals(const ArrivalSource& src, std::int64_t slot, double dt,
                                  RandomStream& rng) {
    if (const auto* p = std::get_if<PoissonArrivals>(&src))
        return static_cast<std::int64_t>(rng.poisson(p->lambda * dt));
    if (const auto* t = std::get_if<TraceArrivals>(&src)) {
        if (t->counts.empty()) return 0;
        return t->counts[static_cast<std::size_t>(slot) % t->counts.size()];
    }
    const auto& a = std::get<AdversarialArrivals>(src);
    double v = 0.5 * static_cast<double>(a.v_max) *
               (1.0 + std::sin(6.28318530717958647692 * static_cast<double>(slot) / a.period));
    if (rng.uniform01() < a.burst_prob)
        v += static_cast<double>(rng.uniform_int(static_cast<std::uint64_t>(a.v_max) + 1));
    std::int64_t out = static_cast<std::int64_t>(std::llround(v));
    if (out < 0) out = 0;
    if (out > a.v_max) out = a.v_max;
    return out;
}

using DefensePolicy = std::function<double(const SurfaceState&)>;

// Run the queue for `horizon` slots. In static-defense mode the policy is
// ignored. Reproducible per (seed, stream).
inline Trajectory simulate(const SurfaceConfig& cfg, std::int64_t horizon,
                           const ArrivalSource& arrivals, const DefensePolicy& policy,
                           RandomStream& rng, std::int64_t initial_n = 0) {
    cfg.validate();
    if (horizon < 1) throw domain_error("simulate: horizon must be >= 1");
    Trajectory traj;
    traj.dt = cfg.dt;
    traj.n.reserve(static_cast<std::size_t>(horizon));
    traj.arrivals.reserve(static_cast<std::size_t>(horizon));
    traj.defended.reserve(static_cast<std::size_t>(horizon));
    traj.exploited.reserve(static_cast<std::size_t>(horizon));
    traj.mu_d.reserve(static_cast<std::size_t>(horizon));
    traj.mu_l.reserve(static_cast<std::size_t>(horizon));

    SurfaceState st{initial_n, 0};
    for (std::int64_t t = 0; t < horizon; ++t) {
        const std::int64_t v = draw_arrivals(arrivals, t, cfg.dt, rng);
        const double action =
            cfg.mode == CouplingMode::policy_driven && policy ? policy(st) : 0.0;
        const StepRecord rec = step(st, cfg, v, action, rng);
        traj.n.push_back(st.n);
        traj.arrivals.push_back(v);
        traj.defended.push_back(rec.defended);
        traj.exploited.push_back(rec.exploited);
        traj.mu_d.push_back(rec.mu_d);
        traj.mu_l.push_back(rec.mu_l);
        st = rec.state;
    }
    traj.final_n = st.n;
    ASQ_CHECK(traj.total_arrivals() + initial_n ==
                  traj.total_defended() + traj.total_exploited() + traj.final_n,
              "simulate: cumulative conservation violated");
    return traj;
}

// AI amplification of a configuration. Symmetric scaling multiplies arrivals
// and the defense budget (exploit coupling beta*lambda*N rides on lambda);
// attack-only leaves the absolute defense rate and budget unchanged.
enum class AmplificationMode { symmetric, attack_only };

inline SurfaceConfig apply_amplification(const SurfaceConfig& cfg, double a,
                                         AmplificationMode mode) {
    if (!(a >= 1.0)) throw domain_error("apply_amplification: factor must be >= 1");
    SurfaceConfig out = cfg;
    out.amplification = cfg.amplification * a;
    out.lambda = cfg.lambda * a;
    if (mode == AmplificationMode::symmetric) {
        if (std::isfinite(cfg.budget)) out.budget = cfg.budget * a;
    } else {
        out.alpha = cfg.alpha / a;  // keeps mu_d = alpha*lambda at its original value
    }
    out.validate();
    return out;
}

// --- discrete-time G/G/m-b workload queue -------------------------------------
//
// Jobs carry explicit service-time requirements drawn from F_ST; arrivals
// follow a renewal process with inter-arrival law F_IA. Up to m jobs are in
// service; each busy server progresses at rate min(1, b/busy), so b caps the
// total service rate. Slot-granular: servers are (re)assigned at slot starts
// and completions take effect at slot ends.

struct GgmbResult {
    std::vector<std::int64_t> occupancy;                  // jobs in system at slot end
    std::vector<std::pair<double, double>> events;        // (arrival, completion) pairs
    std::int64_t completed = 0;
};

inline GgmbResult simulate_ggmb(const DistributionSpec& ia, const DistributionSpec& st, int m,
                                double b, double slot_dt, std::int64_t slots, RandomStream& rng,
                                bool record_events = false) {
    if (m < 1) throw domain_error("ggmb: m must be >= 1");
    if (!(b > 0)) throw domain_error("ggmb: b must be > 0");
    if (!(slot_dt > 0)) throw domain_error("ggmb: slot width must be > 0");
    struct Job {
        double arrival;
        double remaining;
    };
    GgmbResult res;
    res.occupancy.reserve(static_cast<std::size_t>(slots));
    std::deque<Job> waiting;
    std::vector<Job> in_service;
    in_service.reserve(static_cast<std::size_t>(m));
    double next_arrival = sample(ia, rng);

    for (std::int64_t k = 0; k < slots; ++k) {
        const double slot_start = static_cast<double>(k) * slot_dt;
        const double slot_end = slot_start + slot_dt;
        // assign free servers
        while (static_cast<int>(in_service.size()) < m && !waiting.empty()) {
            in_service.push_back(waiting.front());
            waiting.pop_front();
        }
        // progress under the aggregate rate cap
        const double busy = static_cast<double>(in_service.size());
        if (busy > 0) {
            const double rate = std::min(1.0, b / busy);
            const double work = rate * slot_dt;
            std::size_t kept = 0;
            for (std::size_t i = 0; i < in_service.size(); ++i) {
                in_service[i].remaining -= work;
                if (in_service[i].remaining <= 1e-12) {
                    ++res.completed;
                    if (record_events) res.events.emplace_back(in_service[i].arrival, slot_end);
                } else {
                    in_service[kept++] = in_service[i];
                }
            }
            in_service.resize(kept);
        }
        // admit arrivals that occurred during this slot
        while (next_arrival < slot_end) {
            waiting.push_back({next_arrival, sample(st, rng)});
            next_arrival += sample(ia, rng);
        }
        res.occupancy.push_back(static_cast<std::int64_t>(waiting.size() + in_service.size()));
    }
    return res;
}

}  // namespace asq
