#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netsirs/graph.hpp"
#include "netsirs/node_probs.hpp"
#include "netsirs/params.hpp"

namespace netsirs {

/// One application of the 2n-state nonlinear mean-field map. The infected
/// update multiplies the per-neighbor escape probabilities; the recovered
/// update adds the variant's vaccination inflow. Output is validated
/// against the NodeProbs invariants.
NodeProbs step_nonlinear(const Graph& g, const EpidemicParams& params,
                         const NodeProbs& s);

/// Block description of the 2n x 2n linearization around the disease-free
/// fixed point: an affine map x -> offset + M (x - offset). All blocks are
/// multiples of I_n or of the adjacency matrix, so application is
/// matrix-free.
struct LinearModel {
    const Graph* graph = nullptr;
    // R-row: rr * x_R + ri * x_I + ri_adj * (A x_I)
    double rr = 0.0;
    double ri = 0.0;
    double ri_adj = 0.0;
    // I-row: ii * x_I + ii_adj * (A x_I)
    double ii = 0.0;
    double ii_adj = 0.0;
    /// Disease-free P_R level the map is expanded around (0 for SIRS,
    /// theta/(gamma+theta) for the vaccination variants).
    double offset_r = 0.0;
    /// max(|rr|, spectral radius of the lower-right block); < 1 iff the
    /// disease-free point is locally stable.
    double spectral_norm_upper = 0.0;
};

/// Assembles the variant's linearization (M, M' or M''). Offsets come from
/// the closed forms, never from fitting.
LinearModel make_linear_model(const Graph& g, const EpidemicParams& params);

NodeProbs step_linear(const LinearModel& model, const NodeProbs& s);

/// Operator 2-norm of the linear part, by power iteration on M^T M.
double operator_norm(const LinearModel& model, double tol = 1e-12,
                     int max_iter = 100000);

enum class Regime { Subcritical, Critical, Supercritical };

std::string to_string(Regime r);

/// Threshold quantities of the variant. ratio_global is the proven
/// global-stability / fast-mixing quantity and decides the regime label;
/// ratio_local is the (tighter) local-stability quantity:
///   sirs                  local = global = beta lambda / delta
///   infection-dominant    local = g/(g+t) * base, global = base
///   vaccination-dominant  local = (1-t) g/(g+t) * base, global = (1-t) base
struct ThresholdReport {
    double ratio_local = 0.0;
    double ratio_global = 0.0;
    Regime regime = Regime::Subcritical;
    double beta = 0.0;
    double delta = 0.0;
    double lambda_max = 0.0;
    double susceptible_factor = 1.0; ///< gamma/(gamma+theta)
    double one_minus_theta = 1.0;
};

ThresholdReport threshold_report(const EpidemicParams& params,
                                 double lambda_max);

/// Mixing-time upper bound of the variant's fast-mixing theorem:
///   sirs: log(2n/eps) / -log ||M||,
///   infection-dominant: log(n/eps) / -log ||(1-d)I + bA||,
///   vaccination-dominant: log(n/eps) / -log ||(1-d)I + (1-t)bA||.
/// valid is false when the relevant norm is >= 1 (the bound is vacuous).
struct MixingBound {
    double bound = 0.0;
    double norm = 0.0;
    bool valid = false;
};

MixingBound mixing_time_bound(const Graph& g, const EpidemicParams& params,
                              double eps);

/// Per-node infection pressure 1 - prod_{j in N_i} (1 - beta P_I[j]).
std::vector<double> infection_pressure(const Graph& g, double beta,
                                       const std::vector<double>& p_i);

/// Normalized recovery pressure delta * p_i / (1 - p_r - p_i).
double recovery_pressure(double delta, double p_r, double p_i);

/// Net growth pressure: infection pressure minus recovery pressure,
/// componentwise. Zeros of this field are fixed points of the nonlinear
/// map (together with the P_R balance). Throws Error when p_r + p_i >= 1
/// at any node.
std::vector<double> net_pressure(const Graph& g, const EpidemicParams& params,
                                 const NodeProbs& s);

struct EndemicOptions {
    double tol = 1e-12;          ///< max-norm map residual for convergence
    int max_iter = 200000;
    double damping = 1.0;        ///< initial step blend
    bool adaptive_damping = true;
    double min_damping = 1.0 / 16.0;
    int cycle_window = 64;
    double cycle_tol = 1e-9;
    /// Custom start for the infected block; empty selects the symmetric
    /// interior start. P_R always starts on the (delta/gamma) P_I manifold.
    std::vector<double> start_p_i;
};

struct FixedPointResult {
    enum class Outcome { Converged, CycleDetected, Diverged };
    std::vector<double> p_i_star;
    std::vector<double> p_r_star;
    double residual = 0.0; ///< max-norm of the net pressure at the point
    Outcome outcome = Outcome::Diverged;
    int cycle_period = 0;
    int iterations = 0;
};

std::string to_string(FixedPointResult::Outcome o);

/// Finds the endemic fixed point of the SIRS mean-field map by damped
/// iteration from a symmetric interior start on the manifold
/// P_R = (delta/gamma) P_I. Refuses subcritical or critical parameters
/// (only the trivial fixed point exists below threshold) and non-SIRS
/// variants (the uniqueness result covers the plain map).
FixedPointResult endemic_fixed_point(const Graph& g,
                                     const EpidemicParams& params,
                                     const EndemicOptions& opts = {});

struct MultiStartResult {
    FixedPointResult consensus; ///< converged run with the smallest residual
    double max_spread = 0.0;    ///< max pairwise max-norm distance
    int converged = 0;
    int starts = 0;
};

/// Uniqueness probe: repeats the solve from seeded random interior starts.
MultiStartResult endemic_multi_start(const Graph& g,
                                     const EpidemicParams& params,
                                     int starts, std::uint64_t seed,
                                     const EndemicOptions& opts = {});

struct PropertyCheck {
    std::string name;
    bool passed = false;
    int samples = 0;
    double worst = 0.0; ///< most adverse margin observed
};

/// Numerical checks of the structural properties of the infection and
/// recovery pressure maps that the endemic uniqueness argument rests on:
/// value/gradient at the origin, sign pattern against the adjacency,
/// concavity, and the monotonicity of the recovery pressure and of its
/// ratio to P_I.
std::vector<PropertyCheck> pressure_property_suite(const Graph& g,
                                                   const EpidemicParams& params,
                                                   int samples,
                                                   std::uint64_t seed);

} // namespace netsirs
