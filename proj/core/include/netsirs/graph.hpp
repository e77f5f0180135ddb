#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace netsirs {

/// Undirected simple graph over dense node ids 0..n-1.
/// Immutable after construction; neighbor lists are sorted ascending,
/// symmetric, self-loop free and duplicate free.
class Graph {
public:
    Graph() = default;

    /// Builds from an edge list; symmetrizes and deduplicates, rejects
    /// self-loops. n must cover every endpoint.
    Graph(int n, const std::vector<std::pair<int, int>>& edges);

    int node_count() const { return static_cast<int>(adj_.size()); }
    std::size_t edge_count() const { return edge_count_; }

    const std::vector<int>& neighbors(int i) const { return adj_[i]; }
    int degree(int i) const { return static_cast<int>(adj_[i].size()); }
    int max_degree() const;
    double average_degree() const;

    bool has_edge(int i, int j) const;

    /// Connected components as a label per node (labels are 0..k-1 in
    /// order of first appearance).
    std::vector<int> component_labels() const;
    int component_count() const;

private:
    std::vector<std::vector<int>> adj_;
    std::size_t edge_count_ = 0;
};

Graph make_complete(int n);
Graph make_path(int n);
Graph make_cycle(int n);
/// Star on n nodes: node 0 is the hub, nodes 1..n-1 are leaves.
Graph make_star(int n);
/// G(n, p) with geometric edge skipping, deterministic for a fixed seed.
Graph make_erdos_renyi(int n, double p, std::uint64_t seed);

/// Parses a generator spec of the form kind:args, e.g. "complete:10",
/// "path:3", "star:5", "cycle:8", "er:500:0.02". ER uses the given seed.
Graph graph_from_spec(std::string_view spec, std::uint64_t seed);

/// Whitespace-separated 0-indexed node id pairs, one edge per line,
/// '#' starts a comment line. Node count is 1 + max id; gaps stay as
/// isolated nodes. Throws Error naming the offending line on bad input.
Graph load_edge_list(std::istream& in);
void save_edge_list(const Graph& g, std::ostream& out);

struct SpectralReport {
    double lambda_max = 0.0; ///< largest adjacency eigenvalue
    int iterations = 0;
    double residual = 0.0;   ///< final l2 Rayleigh residual
    bool disconnected = false;
    int components = 1;
};

/// Largest adjacency eigenvalue by shifted power iteration (all-ones start,
/// shift = max degree keeps the iteration on the Perron cone so the Rayleigh
/// estimate is monotone). Works per component implicitly; on disconnected
/// input the report carries a warning flag and the value is the max over
/// components. Throws Error carrying the best estimate on non-convergence.
///
/// `trace`, when non-null, receives the Rayleigh estimate after each
/// iteration.
SpectralReport spectral_radius(const Graph& g, double tol = 1e-12,
                               int max_iter = 100000,
                               std::vector<double>* trace = nullptr);

/// Smallest adjacency eigenvalue, same machinery run on (shift*I - A).
double lambda_min(const Graph& g, double tol = 1e-12, int max_iter = 100000);

} // namespace netsirs
