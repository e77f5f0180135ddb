// Test-only oracles, coded independently of the library paths they check:
// dense matrix powers for the exact chain, dense block matrices for the
// linear model, enumeration marginals, and a scalar bisection for the
// symmetric endemic point on complete graphs.
#pragma once

#include <cstdint>
#include <vector>

#include "netsirs/graph.hpp"
#include "netsirs/params.hpp"

namespace netsirs::testoracle {

std::uint32_t pow3(int k);
int digit3(std::uint32_t code, int node);

/// Full 3^n x 3^n transition matrix, row-stochastic, built from the
/// per-variant probability tables written out here.
std::vector<std::vector<double>> dense_transition_matrix(
    const Graph& g, const EpidemicParams& params);

/// mu S^steps by dense multiplication.
std::vector<double> dense_evolve(const std::vector<std::vector<double>>& S,
                                 std::vector<double> mu, int steps);

/// Dense stationary vector: point mass on all-S for SIRS, the product form
/// for the vaccination variants.
std::vector<double> dense_stationary(int n, const EpidemicParams& params);

double dense_tv(const std::vector<double>& a, const std::vector<double>& b);

/// Mixing time from the all-infected point mass via dense powers;
/// returns -1 if the budget is exhausted.
int dense_mixing_time(const Graph& g, const EpidemicParams& params,
                      double eps, int budget);

/// Per-node P(R), P(I) by explicit enumeration over all 3^n states.
void dense_marginals(const std::vector<double>& mu, int n,
                     std::vector<double>& p_r, std::vector<double>& p_i);

/// Dense 2n x 2n linearization block matrix (M, M', M'') from the closed
/// forms, plus the disease-free offset level.
struct DenseLinear {
    std::vector<std::vector<double>> m;
    double offset_r = 0.0;
};
DenseLinear dense_linear_matrix(const Graph& g, const EpidemicParams& params);

/// Root of 1 - (1 - beta p)^(n-1) = delta p / (1 - (1 + delta/gamma) p)
/// by bisection; the symmetric endemic level on the complete graph.
double symmetric_endemic_bisection(int n, double beta, double delta,
                                   double gamma);

} // namespace netsirs::testoracle
