#include <doctest.h>

#include <cmath>

#include "netsirs/error.hpp"
#include "netsirs/kernel.hpp"
#include "netsirs/rng.hpp"

using namespace netsirs;

TEST_CASE("infected row: recover with delta regardless of neighbors") {
    const EpidemicParams p{0.7, 0.4, 0.3, 0.0, Variant::Sirs};
    for (int m : {0, 1, 5}) {
        const auto row = node_kernel(p, Health::I, m);
        CHECK(row[Health::S] == 0.0);
        CHECK(row[Health::I] == doctest::Approx(0.6));
        CHECK(row[Health::R] == doctest::Approx(0.4));
    }
}

TEST_CASE("susceptible row, sirs: single infected neighbor") {
    const EpidemicParams p{0.5, 0.4, 0.3, 0.0, Variant::Sirs};
    const auto row = node_kernel(p, Health::S, 1);
    CHECK(row[Health::S] == doctest::Approx(0.5));
    CHECK(row[Health::I] == doctest::Approx(0.5));
    CHECK(row[Health::R] == 0.0);
}

TEST_CASE("susceptible row, vaccination dominant") {
    const EpidemicParams p{0.5, 0.4, 0.3, 0.2, Variant::VaccinationDominant};
    const auto row = node_kernel(p, Health::S, 1);
    CHECK(row[Health::S] == doctest::Approx(0.4));
    CHECK(row[Health::I] == doctest::Approx(0.4));
    CHECK(row[Health::R] == doctest::Approx(0.2));
}

TEST_CASE("susceptible row, infection dominant") {
    const EpidemicParams p{0.5, 0.4, 0.3, 0.2, Variant::InfectionDominant};
    const auto row = node_kernel(p, Health::S, 2);
    const double esc = 0.25;
    CHECK(row[Health::S] == doctest::Approx(esc * 0.8));
    CHECK(row[Health::I] == doctest::Approx(1.0 - esc));
    CHECK(row[Health::R] == doctest::Approx(esc * 0.2));
}

TEST_CASE("rows are distributions for random rates, all variants") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 3000; ++trial) {
        EpidemicParams p;
        p.beta = rng.next_double();
        p.delta = rng.next_double();
        p.gamma = rng.next_double();
        p.variant = static_cast<Variant>(trial % 3);
        p.theta = p.variant == Variant::Sirs ? 0.0 : 0.99 * rng.next_double();
        const auto h = kHealthStates[trial % 3];
        const int m = static_cast<int>(rng.next_below(9));
        const auto row = node_kernel(p, h, m);
        CHECK(row.p[0] >= 0.0);
        CHECK(row.p[1] >= 0.0);
        CHECK(row.p[2] >= 0.0);
        CHECK(std::abs(row.sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("theta = 0 reduces both vaccinated kernels to sirs, bitwise") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        EpidemicParams sirs;
        sirs.beta = rng.next_double();
        sirs.delta = rng.next_double();
        sirs.gamma = rng.next_double();
        sirs.variant = Variant::Sirs;
        EpidemicParams id = sirs;
        id.variant = Variant::InfectionDominant;
        EpidemicParams vd = sirs;
        vd.variant = Variant::VaccinationDominant;
        const int m = static_cast<int>(rng.next_below(6));
        for (Health h : kHealthStates) {
            const auto base = node_kernel(sirs, h, m);
            const auto a = node_kernel(id, h, m);
            const auto b = node_kernel(vd, h, m);
            for (int k = 0; k < 3; ++k) {
                CHECK(a.p[k] == base.p[k]);
                CHECK(b.p[k] == base.p[k]);
            }
        }
    }
}

TEST_CASE("params validation") {
    CHECK_THROWS_AS((EpidemicParams{1.2, 0, 0, 0, Variant::Sirs}).validate(),
                    Error);
    CHECK_THROWS_AS((EpidemicParams{0.1, 0.2, 0.3, 0.4, Variant::Sirs}).validate(),
                    Error);
    CHECK_THROWS_AS(
        (EpidemicParams{0.1, 0.2, 1.0, 1.0, Variant::VaccinationDominant})
            .validate(),
        Error);
    CHECK_NOTHROW(
        (EpidemicParams{0.1, 0.2, 1.0, 0.9, Variant::VaccinationDominant})
            .validate());
}

TEST_CASE("pow_int matches repeated multiplication semantics") {
    CHECK(pow_int(0.5, 0) == 1.0);
    CHECK(pow_int(0.5, 3) == 0.125);
    CHECK(pow_int(1.0, 100) == 1.0);
    CHECK(pow_int(0.0, 2) == 0.0);
}
