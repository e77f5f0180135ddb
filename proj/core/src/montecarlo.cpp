#include "netsirs/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <ostream>
#include <string>

#include "netsirs/error.hpp"
#include "netsirs/rng.hpp"

namespace netsirs {

namespace {

// Draw streams: stream 0 carries the per-step dynamics (slot 2i is node i's
// infection/vaccination branch, slot 2i+1 its recovery/loss branch);
// stream 1 carries initial-state draws.
constexpr std::uint64_t kDynamicsStream = 0;
constexpr std::uint64_t kInitStream = 1;

void format_double(std::ostream& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

} // namespace

int SimState::count(Health h) const {
    return static_cast<int>(std::count(states.begin(), states.end(), h));
}

InitSpec InitSpec::parse(std::string_view text) {
    InitSpec s;
    if (text == "one_random" || text == "one_random_infected") {
        s.kind = Kind::OneRandomInfected;
        return s;
    }
    if (text == "all" || text == "all_infected") {
        s.kind = Kind::AllInfected;
        return s;
    }
    if (text.rfind("fraction:", 0) == 0) {
        s.kind = Kind::Fraction;
        const auto num = text.substr(9);
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(),
                                         s.fraction);
        if (ec != std::errc() || ptr != num.data() + num.size() ||
            s.fraction < 0.0 || s.fraction > 1.0)
            throw Error("bad init fraction '" + std::string(num) + "'");
        return s;
    }
    throw Error("unknown init spec '" + std::string(text) +
                "' (expected one_random, all, or fraction:q)");
}

SimState make_initial_state(const Graph& g, InitSpec init, std::uint64_t seed) {
    const int n = g.node_count();
    SimState s;
    s.seed = seed;
    s.t = 0;
    s.states.assign(static_cast<std::size_t>(n), Health::S);
    switch (init.kind) {
    case InitSpec::Kind::AllInfected:
        std::fill(s.states.begin(), s.states.end(), Health::I);
        break;
    case InitSpec::Kind::OneRandomInfected: {
        const double u = counter_uniform(seed, kInitStream, 0, 0);
        const int node = std::min(n - 1, static_cast<int>(u * n));
        s.states[node] = Health::I;
        break;
    }
    case InitSpec::Kind::Fraction:
        for (int i = 0; i < n; ++i)
            if (counter_uniform(seed, kInitStream, 0,
                                static_cast<std::uint64_t>(i)) < init.fraction)
                s.states[i] = Health::I;
        break;
    }
    return s;
}

void mc_step(const Graph& g, const EpidemicParams& params, SimState& s) {
    const int n = g.node_count();
    const std::uint64_t step = static_cast<std::uint64_t>(s.t);

    // Infected-neighbor counts from the current (pre-update) state.
    std::vector<int> m(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        if (s.states[i] == Health::I)
            for (int j : g.neighbors(i)) ++m[j];

    std::vector<Health> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u_branch = counter_uniform(
            s.seed, kDynamicsStream, step, 2 * static_cast<std::uint64_t>(i));
        const double u_flip = counter_uniform(
            s.seed, kDynamicsStream, step, 2 * static_cast<std::uint64_t>(i) + 1);

        switch (s.states[i]) {
        case Health::S: {
            const double p_inf = 1.0 - pow_int(1.0 - params.beta, m[i]);
            switch (params.variant) {
            case Variant::Sirs:
                next[i] = u_branch < p_inf ? Health::I : Health::S;
                break;
            case Variant::InfectionDominant:
                // [0, p_inf) -> I, then the vaccinated slice of the escape.
                if (u_branch < p_inf)
                    next[i] = Health::I;
                else if (u_branch < p_inf + (1.0 - p_inf) * params.theta)
                    next[i] = Health::R;
                else
                    next[i] = Health::S;
                break;
            case Variant::VaccinationDominant:
                // [0, theta) -> R, infection region grows upward from theta
                // so raising beta only ever adds infections under a common
                // draw.
                if (u_branch < params.theta)
                    next[i] = Health::R;
                else if (u_branch < params.theta + (1.0 - params.theta) * p_inf)
                    next[i] = Health::I;
                else
                    next[i] = Health::S;
                break;
            }
            break;
        }
        case Health::I:
            next[i] = u_flip < params.delta ? Health::R : Health::I;
            break;
        case Health::R:
            next[i] = u_flip < params.gamma ? Health::S : Health::R;
            break;
        }
    }
    s.states = std::move(next);
    ++s.t;
}

void Trajectory::to_csv(std::ostream& out) const {
    out << "t,num_S,num_I,num_R\n";
    for (const auto& r : rows)
        out << r.t << ',' << r.num_s << ',' << r.num_i << ',' << r.num_r << '\n';
}

Trajectory run(const Graph& g, const EpidemicParams& params, InitSpec init,
               const RunOptions& opts, std::uint64_t seed) {
    params.validate();
    if (opts.horizon < 1) throw Error("run: horizon must be >= 1");

    SimState s = make_initial_state(g, init, seed);
    Trajectory traj;
    traj.rows.reserve(static_cast<std::size_t>(opts.horizon) + 1);

    auto record = [&]() {
        Trajectory::Row row;
        row.t = s.t;
        row.num_s = s.count(Health::S);
        row.num_i = s.count(Health::I);
        row.num_r = s.count(Health::R);
        traj.rows.push_back(row);
        if (!traj.extinction_step && row.num_i == 0)
            traj.extinction_step = row.t;
    };

    record();
    for (std::int64_t t = 1; t <= opts.horizon; ++t) {
        if (opts.stop_at_extinction && traj.extinction_step) break;
        mc_step(g, params, s);
        record();
    }
    return traj;
}

void EnsembleStats::to_csv(std::ostream& out) const {
    out << "t,mean_frac_i,q10,q50,q90\n";
    for (std::size_t t = 0; t < mean_infected_fraction.size(); ++t) {
        out << t << ',';
        format_double(out, mean_infected_fraction[t]);
        out << ',';
        format_double(out, q10[t]);
        out << ',';
        format_double(out, q50[t]);
        out << ',';
        format_double(out, q90[t]);
        out << '\n';
    }
}

double EnsembleStats::mean_infected_over(std::int64_t from,
                                         std::int64_t to) const {
    double acc = 0.0;
    std::int64_t count = 0;
    for (std::int64_t t = from; t <= to &&
         t < static_cast<std::int64_t>(mean_infected_fraction.size()); ++t) {
        acc += mean_infected_fraction[t];
        ++count;
    }
    return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

EnsembleStats ensemble(const Graph& g, const EpidemicParams& params,
                       InitSpec init, const RunOptions& opts, int runs,
                       std::uint64_t base_seed, int jobs) {
    if (runs < 1) throw Error("ensemble: runs must be >= 1");
    params.validate();

    std::vector<Trajectory> trajectories(static_cast<std::size_t>(runs));
    auto worker = [&](int lo, int hi) {
        for (int r = lo; r < hi; ++r)
            trajectories[r] = run(g, params, init, opts,
                                  base_seed + static_cast<std::uint64_t>(r));
    };

    if (jobs <= 1 || runs == 1) {
        worker(0, runs);
    } else {
        const int workers = std::min(jobs, runs);
        std::vector<std::future<void>> futures;
        const int chunk = (runs + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int lo = w * chunk;
            const int hi = std::min(runs, lo + chunk);
            if (lo >= hi) break;
            futures.push_back(std::async(std::launch::async, worker, lo, hi));
        }
        for (auto& f : futures) f.get();
    }

    EnsembleStats stats;
    stats.runs = runs;
    stats.horizon = opts.horizon;
    stats.n = g.node_count();
    const std::size_t steps = static_cast<std::size_t>(opts.horizon) + 1;
    stats.mean_infected_fraction.assign(steps, 0.0);
    stats.q10.assign(steps, 0.0);
    stats.q50.assign(steps, 0.0);
    stats.q90.assign(steps, 0.0);

    // A replica stopped at extinction is extended with zero infections;
    // exact for every variant because the infection-free set is closed.
    auto frac_at = [&](const Trajectory& tr, std::size_t t) {
        if (t < tr.rows.size())
            return static_cast<double>(tr.rows[t].num_i) / stats.n;
        return 0.0;
    };

    std::vector<double> column(static_cast<std::size_t>(runs));
    for (std::size_t t = 0; t < steps; ++t) {
        double sum = 0.0;
        for (int r = 0; r < runs; ++r) {
            column[r] = frac_at(trajectories[r], t);
            sum += column[r];
        }
        stats.mean_infected_fraction[t] = sum / runs;
        std::sort(column.begin(), column.end());
        auto rank = [&](double q) {
            const auto idx = static_cast<std::size_t>(
                std::llround(q * (runs - 1)));
            return column[idx];
        };
        stats.q10[t] = rank(0.1);
        stats.q50[t] = rank(0.5);
        stats.q90[t] = rank(0.9);
    }

    int extinct = 0;
    for (const auto& tr : trajectories) {
        stats.extinction_steps.push_back(tr.extinction_step);
        if (tr.extinction_step) ++extinct;
    }
    stats.extinction_fraction = static_cast<double>(extinct) / runs;
    return stats;
}

} // namespace netsirs
