#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "netsirs/graph.hpp"
#include "netsirs/kernel.hpp"
#include "netsirs/params.hpp"

namespace netsirs {

/// Agent-level state of one replica. Draws are keyed by (seed, step, node,
/// branch), so the state advances deterministically and identical seeds
/// replay identical trajectories draw for draw.
struct SimState {
    std::vector<Health> states;
    std::int64_t t = 0;
    std::uint64_t seed = 0;

    int count(Health h) const;
};

struct InitSpec {
    enum class Kind { OneRandomInfected, AllInfected, Fraction };
    Kind kind = Kind::OneRandomInfected;
    double fraction = 0.0;

    /// Parses "one_random", "all" / "all_infected", or "fraction:0.1".
    static InitSpec parse(std::string_view text);
};

SimState make_initial_state(const Graph& g, InitSpec init, std::uint64_t seed);

/// One synchronous step: infected-neighbor counts are taken from the
/// current state for every node, then each node samples its next state
/// from the per-node kernel. Each node consumes exactly two positionally
/// fixed uniforms per step (infection/vaccination branch, recovery/loss
/// branch), which keeps common-random-number comparisons across parameter
/// values aligned.
void mc_step(const Graph& g, const EpidemicParams& params, SimState& s);

struct Trajectory {
    struct Row {
        std::int64_t t;
        int num_s;
        int num_i;
        int num_r;
    };
    std::vector<Row> rows; ///< t = 0 .. horizon (shorter if stopped early)
    std::optional<std::int64_t> extinction_step; ///< first t with num_i = 0

    /// CSV with a `t,num_S,num_I,num_R` header.
    void to_csv(std::ostream& out) const;
};

struct RunOptions {
    std::int64_t horizon = 100;
    bool stop_at_extinction = false;
};

Trajectory run(const Graph& g, const EpidemicParams& params, InitSpec init,
               const RunOptions& opts, std::uint64_t seed);

/// Aggregate over `runs` replicas with per-replica seed base_seed + index.
/// Only infected-count statistics are aggregated, so replicas stopped at
/// extinction extend exactly (the infection-free set is closed in every
/// variant). Aggregation order is fixed by replica index regardless of
/// worker scheduling.
struct EnsembleStats {
    int runs = 0;
    std::int64_t horizon = 0;
    int n = 0;
    std::vector<double> mean_infected_fraction; ///< per step t = 0..horizon
    std::vector<double> q10, q50, q90;          ///< infected-fraction quantiles
    double extinction_fraction = 0.0;
    std::vector<std::optional<std::int64_t>> extinction_steps; ///< per replica

    /// CSV with a `t,mean_frac_i,q10,q50,q90` header.
    void to_csv(std::ostream& out) const;

    /// Time-averaged mean infected fraction over steps [from, to].
    double mean_infected_over(std::int64_t from, std::int64_t to) const;
};

EnsembleStats ensemble(const Graph& g, const EpidemicParams& params,
                       InitSpec init, const RunOptions& opts, int runs,
                       std::uint64_t base_seed, int jobs = 1);

} // namespace netsirs
