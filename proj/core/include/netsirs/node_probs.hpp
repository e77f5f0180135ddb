#pragma once

#include <vector>

namespace netsirs {

/// Per-node recovered/infected probabilities. The susceptible probability
/// is implied as 1 - p_r - p_i. Used both for exact marginals and for the
/// mean-field layers.
struct NodeProbs {
    std::vector<double> p_r;
    std::vector<double> p_i;

    NodeProbs() = default;
    explicit NodeProbs(int n) : p_r(n, 0.0), p_i(n, 0.0) {}

    int size() const { return static_cast<int>(p_i.size()); }

    /// Throws Error unless components are in [0,1] and p_r + p_i <= 1
    /// within `tol` componentwise.
    void validate(double tol = 1e-12) const;
};

/// Componentwise max-norm distance over both fields.
double max_distance(const NodeProbs& a, const NodeProbs& b);

} // namespace netsirs
