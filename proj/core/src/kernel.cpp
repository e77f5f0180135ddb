#include "netsirs/kernel.hpp"

namespace netsirs {

double pow_int(double base, int exp) {
    double r = 1.0;
    for (int k = 0; k < exp; ++k) r *= base;
    return r;
}

KernelRow node_kernel(const EpidemicParams& params, Health current,
                      int infected_neighbors) {
    switch (current) {
    case Health::S: {
        const double escape = pow_int(1.0 - params.beta, infected_neighbors);
        switch (params.variant) {
        case Variant::Sirs:
            return {{escape, 1.0 - escape, 0.0}};
        case Variant::InfectionDominant:
            return {{escape * (1.0 - params.theta), 1.0 - escape,
                     escape * params.theta}};
        case Variant::VaccinationDominant:
            return {{escape * (1.0 - params.theta),
                     (1.0 - escape) * (1.0 - params.theta), params.theta}};
        }
        break;
    }
    case Health::I:
        return {{0.0, 1.0 - params.delta, params.delta}};
    case Health::R:
        return {{params.gamma, 0.0, 1.0 - params.gamma}};
    }
    return {{0.0, 0.0, 0.0}}; // unreachable
}

} // namespace netsirs
