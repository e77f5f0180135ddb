#pragma once

#include <string>
#include <string_view>

namespace netsirs {

/// Which single-node update rule the model uses. The two vaccination
/// variants differ in how a simultaneous infection and vaccination event
/// on a susceptible node is resolved.
enum class Variant {
    Sirs,
    InfectionDominant,
    VaccinationDominant,
};

std::string to_string(Variant v);
Variant variant_from_string(std::string_view s);

/// Per-step transition probabilities shared by all model layers.
///   beta  — infection probability per infected neighbor per step
///   delta — recovery probability (I -> R)
///   gamma — immunity-loss probability (R -> S)
///   theta — vaccination probability (S -> R); zero for plain SIRS
struct EpidemicParams {
    double beta = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    Variant variant = Variant::Sirs;

    /// Throws Error unless all rates lie in [0,1], theta is zero for the
    /// SIRS variant, and the vaccination variants avoid the periodic
    /// gamma = theta = 1 corner (the decoupled S/R chain never settles there).
    void validate() const;
};

} // namespace netsirs
