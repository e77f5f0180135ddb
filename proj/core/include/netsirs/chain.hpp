#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "netsirs/graph.hpp"
#include "netsirs/kernel.hpp"
#include "netsirs/node_probs.hpp"
#include "netsirs/params.hpp"

namespace netsirs {

/// Largest n for which the exact 3^n-state chain is materialized by default.
inline constexpr int kDefaultExactCap = 10;

/// Network state packed base-3, little-endian: node i is digit i,
/// digit values follow Health (0 = S, 1 = I, 2 = R).
using StateCode = std::uint32_t;

namespace chaincode {

std::uint64_t state_count(int n); // 3^n
Health digit(StateCode code, int node);
StateCode encode(std::span<const Health> states);
std::vector<Health> decode(StateCode code, int n);
StateCode uniform(Health h, int n); // all nodes in state h

} // namespace chaincode

/// Sparse probability vector over chain states. Entries are sorted by code,
/// strictly positive, and sum to 1 (within accumulated rounding) unless the
/// object was built from an explicitly unnormalized source.
class ChainDistribution {
public:
    using Entry = std::pair<StateCode, double>;

    ChainDistribution() = default;

    static ChainDistribution point_mass(StateCode code);
    /// Sorts, merges duplicates, drops non-positive mass. Does not rescale.
    static ChainDistribution from_entries(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }
    double mass_at(StateCode code) const;
    double total_mass() const;

    /// CSV with a `state_code,probability` header, rows sorted by code.
    void to_csv(std::ostream& out) const;
    static ChainDistribution from_csv(std::istream& in);

private:
    std::vector<Entry> entries_;
};

/// Marginal node probabilities extracted from a chain distribution.
using MarginalVector = NodeProbs;

/// One row of the transition matrix, generated on the fly as the product
/// of per-node kernels. Throws Error if the graph exceeds `cap` nodes.
ChainDistribution transition_row(const Graph& g, const EpidemicParams& params,
                                 StateCode from, int cap = kDefaultExactCap);

struct EvolveOptions {
    double prune_tol = 1e-15;
    std::size_t max_support = std::size_t{1} << 26;
    int cap = kDefaultExactCap;
};

struct EvolveStepStats {
    double mass_before_prune = 0.0;
    double pruned_mass = 0.0;
    std::size_t support_before_prune = 0;
    std::size_t support_after = 0;
    bool dense_path = false;
};

struct EvolveResult {
    ChainDistribution dist;
    std::vector<EvolveStepStats> steps;
};

/// Pushes the distribution `steps` applications forward. Entries below
/// prune_tol are dropped with the surviving mass renormalized; the pruned
/// mass is reported per step. Accumulation switches to a dense table when
/// the support exceeds a third of the state space. Throws Error (with the
/// step reached) if the support would exceed max_support.
EvolveResult evolve(const Graph& g, const EpidemicParams& params,
                    const ChainDistribution& mu, int steps,
                    const EvolveOptions& opts = {});

/// Per-node P(R) and P(I) by direct summation over the support.
MarginalVector marginals(const ChainDistribution& mu, int n);

/// SIRS: point mass on the all-susceptible state (requires gamma > 0).
/// Vaccination variants: the product distribution with per-node weights
/// gamma/(gamma+theta) on S and theta/(gamma+theta) on R (requires
/// theta > 0 and not gamma = theta = 1).
ChainDistribution stationary_distribution(const Graph& g,
                                          const EpidemicParams& params);

/// Total variation distance: half the L1 distance over the union support.
double tv_distance(const ChainDistribution& a, const ChainDistribution& b);

struct MixingOptions {
    int step_budget = 5000;
    double prune_tol = 1e-15;
    int cap = kDefaultExactCap;
};

struct MixingResult {
    int steps = 0;      ///< first t with TV <= eps (valid when converged)
    double tv = 0.0;    ///< TV at the returned step
    bool converged = false; ///< false: budget exhausted, slow mixing suspected
};

/// Smallest t at which the chain started from the all-infected point mass
/// is within total-variation eps of the stationary distribution. The
/// all-infected start stands in for the supremum over starts.
MixingResult mixing_time(const Graph& g, const EpidemicParams& params,
                         double eps, const MixingOptions& opts = {});

struct DominationReport {
    int steps = 0;
    /// min over steps/nodes of (linear bound on p_I - exact next p_I)
    double min_slack_infected = 0.0;
    /// min slack of the joint [p_R; p_I] bound; only checked for SIRS
    std::optional<double> min_slack_joint;
};

/// Checks, step by step along the exact evolution, that the next exact
/// infection marginals stay componentwise below the variant's linear bound
/// applied to the current exact marginals:
///   sirs / infection-dominant:  (1-delta) p_I + beta A p_I
///   vaccination-dominant:       (1-delta) p_I + (1-theta) beta A p_I
/// For SIRS additionally the joint two-block bound.
DominationReport verify_linear_domination(const Graph& g,
                                          const EpidemicParams& params,
                                          const ChainDistribution& mu0,
                                          int steps,
                                          const EvolveOptions& opts = {});

} // namespace netsirs
