#include "netsirs/chain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>

#include "netsirs/error.hpp"

namespace netsirs {

namespace chaincode {

std::uint64_t state_count(int n) {
    std::uint64_t c = 1;
    for (int i = 0; i < n; ++i) c *= 3;
    return c;
}

Health digit(StateCode code, int node) {
    StateCode c = code;
    for (int i = 0; i < node; ++i) c /= 3;
    return static_cast<Health>(c % 3);
}

StateCode encode(std::span<const Health> states) {
    StateCode code = 0;
    for (std::size_t i = states.size(); i-- > 0;)
        code = code * 3 + static_cast<StateCode>(states[i]);
    return code;
}

std::vector<Health> decode(StateCode code, int n) {
    std::vector<Health> states(static_cast<std::size_t>(n));
    StateCode c = code;
    for (int i = 0; i < n; ++i) {
        states[i] = static_cast<Health>(c % 3);
        c /= 3;
    }
    return states;
}

StateCode uniform(Health h, int n) {
    StateCode code = 0;
    for (int i = 0; i < n; ++i) code = code * 3 + static_cast<StateCode>(h);
    return code;
}

} // namespace chaincode

ChainDistribution ChainDistribution::point_mass(StateCode code) {
    ChainDistribution d;
    d.entries_.emplace_back(code, 1.0);
    return d;
}

ChainDistribution ChainDistribution::from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    ChainDistribution d;
    for (const auto& [code, mass] : entries) {
        if (!d.entries_.empty() && d.entries_.back().first == code)
            d.entries_.back().second += mass;
        else
            d.entries_.emplace_back(code, mass);
    }
    std::erase_if(d.entries_, [](const Entry& e) { return e.second <= 0.0; });
    return d;
}

double ChainDistribution::mass_at(StateCode code) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), code,
        [](const Entry& e, StateCode c) { return e.first < c; });
    if (it != entries_.end() && it->first == code) return it->second;
    return 0.0;
}

double ChainDistribution::total_mass() const {
    double s = 0.0;
    for (const auto& [code, mass] : entries_) s += mass;
    return s;
}

void ChainDistribution::to_csv(std::ostream& out) const {
    out << "state_code,probability\n";
    char buf[32];
    for (const auto& [code, mass] : entries_) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, mass);
        out << code << ',' << std::string_view(buf, ptr - buf) << '\n';
    }
}

ChainDistribution ChainDistribution::from_csv(std::istream& in) {
    std::vector<Entry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("state_code", 0) == 0) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw Error("distribution csv line " + std::to_string(line_no) +
                        ": expected state_code,probability");
        StateCode code = 0;
        auto [p1, e1] = std::from_chars(line.data(), line.data() + comma, code);
        double mass = 0.0;
        auto [p2, e2] = std::from_chars(line.data() + comma + 1,
                                        line.data() + line.size(), mass);
        if (e1 != std::errc() || e2 != std::errc())
            throw Error("distribution csv line " + std::to_string(line_no) +
                        ": parse failure");
        entries.emplace_back(code, mass);
    }
    return from_entries(std::move(entries));
}

namespace {

void ensure_exact_cap(int n, int cap) {
    if (n > cap)
        throw Error("graph has " + std::to_string(n) +
                    " nodes, above the exact-chain cap of " +
                    std::to_string(cap) +
                    "; use the Monte Carlo layer at this scale");
}

// Expands the product of per-node kernels for one source state into
// (code, probability) pairs, sorted by code. Kernels are expanded most
// significant digit last so sortedness is preserved without a sort.
void expand_row(const Graph& g, const EpidemicParams& params,
                StateCode from, std::vector<Health>& digits,
                std::vector<ChainDistribution::Entry>& out,
                std::vector<ChainDistribution::Entry>& scratch) {
    const int n = g.node_count();
    digits = chaincode::decode(from, n);

    out.clear();
    out.emplace_back(0, 1.0);
    StateCode pow3 = 1;
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j : g.neighbors(i))
            if (digits[j] == Health::I) ++m;
        const KernelRow row = node_kernel(params, digits[i], m);

        scratch.clear();
        for (int d = 0; d < 3; ++d) {
            const double p = row.p[d];
            if (p <= 0.0) continue;
            const StateCode add = pow3 * static_cast<StateCode>(d);
            for (const auto& [code, mass] : out)
                scratch.emplace_back(code + add, mass * p);
        }
        out.swap(scratch);
        pow3 *= 3;
    }
}

} // namespace

ChainDistribution transition_row(const Graph& g, const EpidemicParams& params,
                                 StateCode from, int cap) {
    ensure_exact_cap(g.node_count(), cap);
    params.validate();
    std::vector<Health> digits;
    std::vector<ChainDistribution::Entry> out, scratch;
    expand_row(g, params, from, digits, out, scratch);
    return ChainDistribution::from_entries(std::move(out));
}

EvolveResult evolve(const Graph& g, const EpidemicParams& params,
                    const ChainDistribution& mu, int steps,
                    const EvolveOptions& opts) {
    const int n = g.node_count();
    ensure_exact_cap(n, opts.cap);
    params.validate();

    const std::uint64_t n_states = chaincode::state_count(n);
    std::vector<ChainDistribution::Entry> current(mu.entries());

    EvolveResult result;
    result.steps.reserve(static_cast<std::size_t>(steps));

    std::vector<Health> digits;
    std::vector<ChainDistribution::Entry> row, scratch;
    std::vector<double> dense;
    std::unordered_map<StateCode, double> sparse;

    for (int t = 0; t < steps; ++t) {
        EvolveStepStats stats;
        stats.dense_path = current.size() > n_states / 3;

        std::vector<ChainDistribution::Entry> next;
        if (stats.dense_path) {
            dense.assign(n_states, 0.0);
            for (const auto& [code, mass] : current) {
                expand_row(g, params, code, digits, row, scratch);
                for (const auto& [rc, rp] : row) dense[rc] += mass * rp;
            }
            for (std::uint64_t c = 0; c < n_states; ++c)
                if (dense[c] > 0.0)
                    next.emplace_back(static_cast<StateCode>(c), dense[c]);
        } else {
            sparse.clear();
            for (const auto& [code, mass] : current) {
                expand_row(g, params, code, digits, row, scratch);
                for (const auto& [rc, rp] : row) sparse[rc] += mass * rp;
                if (sparse.size() > opts.max_support)
                    throw Error("evolve: support exceeded max_support (" +
                                std::to_string(opts.max_support) +
                                ") at step " + std::to_string(t));
            }
            next.reserve(sparse.size());
            for (const auto& [c, p] : sparse)
                if (p > 0.0) next.emplace_back(c, p);
            std::sort(next.begin(), next.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
        }

        stats.support_before_prune = next.size();
        for (const auto& [c, p] : next) stats.mass_before_prune += p;

        if (opts.prune_tol > 0.0) {
            double kept = 0.0;
            std::size_t w = 0;
            for (std::size_t r = 0; r < next.size(); ++r) {
                if (next[r].second < opts.prune_tol) {
                    stats.pruned_mass += next[r].second;
                } else {
                    kept += next[r].second;
                    next[w++] = next[r];
                }
            }
            next.resize(w);
            if (stats.pruned_mass > 0.0 && kept > 0.0)
                for (auto& [c, p] : next) p /= kept;
        }
        stats.support_after = next.size();

        current.swap(next);
        result.steps.push_back(stats);
    }

    result.dist = ChainDistribution::from_entries(std::move(current));
    return result;
}

MarginalVector marginals(const ChainDistribution& mu, int n) {
    MarginalVector m(n);
    for (const auto& [code, mass] : mu.entries()) {
        StateCode c = code;
        for (int i = 0; i < n; ++i) {
            switch (static_cast<Health>(c % 3)) {
            case Health::I: m.p_i[i] += mass; break;
            case Health::R: m.p_r[i] += mass; break;
            case Health::S: break;
            }
            c /= 3;
        }
    }
    return m;
}

ChainDistribution stationary_distribution(const Graph& g,
                                          const EpidemicParams& params) {
    params.validate();
    const int n = g.node_count();
    if (params.variant == Variant::Sirs) {
        if (params.gamma <= 0.0)
            throw Error("SIRS stationary distribution requires gamma > 0");
        return ChainDistribution::point_mass(0);
    }
    if (params.theta <= 0.0)
        throw Error("vaccinated stationary distribution requires theta > 0");

    const double p_s = params.gamma / (params.gamma + params.theta);
    const double p_r = params.theta / (params.gamma + params.theta);

    // Product over nodes of {S: p_s, R: p_r}; enumerate the 2^n codes.
    std::vector<ChainDistribution::Entry> entries;
    entries.reserve(std::size_t{1} << n);
    entries.emplace_back(0, 1.0);
    StateCode pow3 = 1;
    for (int i = 0; i < n; ++i) {
        const std::size_t sz = entries.size();
        for (std::size_t k = 0; k < sz; ++k) {
            if (p_r > 0.0)
                entries.emplace_back(entries[k].first + 2 * pow3,
                                     entries[k].second * p_r);
            entries[k].second *= p_s;
        }
        pow3 *= 3;
    }
    return ChainDistribution::from_entries(std::move(entries));
}

double tv_distance(const ChainDistribution& a, const ChainDistribution& b) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    std::size_t i = 0, j = 0;
    double l1 = 0.0;
    while (i < ea.size() || j < eb.size()) {
        if (j >= eb.size() || (i < ea.size() && ea[i].first < eb[j].first)) {
            l1 += ea[i].second;
            ++i;
        } else if (i >= ea.size() || eb[j].first < ea[i].first) {
            l1 += eb[j].second;
            ++j;
        } else {
            l1 += std::abs(ea[i].second - eb[j].second);
            ++i;
            ++j;
        }
    }
    return 0.5 * l1;
}

MixingResult mixing_time(const Graph& g, const EpidemicParams& params,
                         double eps, const MixingOptions& opts) {
    if (!(eps > 0.0) || eps > 1.0)
        throw Error("mixing_time: eps must lie in (0, 1]");
    ensure_exact_cap(g.node_count(), opts.cap);

    const ChainDistribution pi = stationary_distribution(g, params);
    ChainDistribution mu =
        ChainDistribution::point_mass(chaincode::uniform(Health::I, g.node_count()));

    EvolveOptions eopts;
    eopts.prune_tol = opts.prune_tol;
    eopts.cap = opts.cap;

    MixingResult res;
    for (int t = 0; t <= opts.step_budget; ++t) {
        res.tv = tv_distance(mu, pi);
        if (res.tv <= eps) {
            res.steps = t;
            res.converged = true;
            return res;
        }
        if (t == opts.step_budget) break;
        mu = evolve(g, params, mu, 1, eopts).dist;
    }
    res.steps = opts.step_budget;
    res.converged = false;
    return res;
}

DominationReport verify_linear_domination(const Graph& g,
                                          const EpidemicParams& params,
                                          const ChainDistribution& mu0,
                                          int steps,
                                          const EvolveOptions& opts) {
    const int n = g.node_count();
    ensure_exact_cap(n, opts.cap);
    params.validate();

    const double infection_factor =
        params.variant == Variant::VaccinationDominant
            ? (1.0 - params.theta) * params.beta
            : params.beta;

    DominationReport rep;
    rep.steps = steps;
    rep.min_slack_infected = std::numeric_limits<double>::infinity();
    if (params.variant == Variant::Sirs)
        rep.min_slack_joint = std::numeric_limits<double>::infinity();

    ChainDistribution mu = mu0;
    MarginalVector cur = marginals(mu, n);
    for (int t = 0; t < steps; ++t) {
        mu = evolve(g, params, mu, 1, opts).dist;
        MarginalVector nxt = marginals(mu, n);

        for (int i = 0; i < n; ++i) {
            double neigh = 0.0;
            for (int j : g.neighbors(i)) neigh += cur.p_i[j];
            const double bound_i =
                (1.0 - params.delta) * cur.p_i[i] + infection_factor * neigh;
            rep.min_slack_infected =
                std::min(rep.min_slack_infected, bound_i - nxt.p_i[i]);

            if (rep.min_slack_joint) {
                // SIRS joint bound: top block is the exact recurrence, so
                // its slack is rounding noise around zero.
                const double bound_r = (1.0 - params.gamma) * cur.p_r[i] +
                                       params.delta * cur.p_i[i];
                rep.min_slack_joint = std::min(*rep.min_slack_joint,
                                               bound_r - nxt.p_r[i]);
                rep.min_slack_joint =
                    std::min(*rep.min_slack_joint, bound_i - nxt.p_i[i]);
            }
        }
        cur = std::move(nxt);
    }
    return rep;
}

} // namespace netsirs
