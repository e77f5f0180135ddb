#pragma once

#include <array>
#include <cstdint>

#include "netsirs/params.hpp"

namespace netsirs {

/// Single-node health state. Values double as base-3 digits in packed
/// chain state codes.
enum class Health : std::uint8_t { S = 0, I = 1, R = 2 };

inline constexpr std::array<Health, 3> kHealthStates = {Health::S, Health::I,
                                                        Health::R};

/// Integer power by repeated multiplication; bit-reproducible across
/// platforms, unlike std::pow.
double pow_int(double base, int exp);

/// Distribution of a node's next state given its current state and the
/// number of infected neighbors. p[0], p[1], p[2] are the probabilities of
/// S, I, R next step.
struct KernelRow {
    std::array<double, 3> p;

    double operator[](Health h) const { return p[static_cast<int>(h)]; }
    double sum() const { return p[0] + p[1] + p[2]; }
};

/// The per-node transition table of the chosen variant.
///
/// From S with m infected neighbors:
///   sirs                  stay (1-b)^m, infect 1-(1-b)^m
///   infection-dominant    stay (1-b)^m (1-t), infect 1-(1-b)^m,
///                         vaccinate (1-b)^m t
///   vaccination-dominant  stay (1-b)^m (1-t), infect (1-(1-b)^m)(1-t),
///                         vaccinate t
/// From I: recover with delta. From R: lose immunity with gamma.
KernelRow node_kernel(const EpidemicParams& params, Health current,
                      int infected_neighbors);

} // namespace netsirs
