#include "netsirs/params.hpp"

#include "netsirs/error.hpp"

namespace netsirs {

std::string to_string(Variant v) {
    switch (v) {
    case Variant::Sirs: return "sirs";
    case Variant::InfectionDominant: return "infection_dominant";
    case Variant::VaccinationDominant: return "vaccination_dominant";
    }
    return "?";
}

Variant variant_from_string(std::string_view s) {
    if (s == "sirs") return Variant::Sirs;
    if (s == "infection_dominant" || s == "siv_infection_dominant")
        return Variant::InfectionDominant;
    if (s == "vaccination_dominant" || s == "siv_vaccination_dominant")
        return Variant::VaccinationDominant;
    throw Error("unknown model variant: '" + std::string(s) + "'");
}

void EpidemicParams::validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(beta) || !in_unit(delta) || !in_unit(gamma) || !in_unit(theta))
        throw Error("epidemic rates must lie in [0,1]");
    if (variant == Variant::Sirs && theta != 0.0)
        throw Error("SIRS variant requires theta = 0");
    if (variant != Variant::Sirs && gamma == 1.0 && theta == 1.0)
        throw Error("gamma = theta = 1 makes the vaccinated single-node chain periodic");
}

} // namespace netsirs
