#include "netsirs/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "netsirs/error.hpp"
#include "netsirs/rng.hpp"

namespace netsirs {

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 1) throw Error("graph must have at least one node");
    adj_.resize(static_cast<std::size_t>(n));
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw Error("edge endpoint out of range");
        if (a == b) throw Error("self-loops are not allowed");
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }
    edge_count_ = 0;
    for (auto& nbrs : adj_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        edge_count_ += nbrs.size();
    }
    edge_count_ /= 2;
}

int Graph::max_degree() const {
    int d = 0;
    for (const auto& nbrs : adj_) d = std::max(d, static_cast<int>(nbrs.size()));
    return d;
}

double Graph::average_degree() const {
    if (adj_.empty()) return 0.0;
    return 2.0 * static_cast<double>(edge_count_) / static_cast<double>(adj_.size());
}

bool Graph::has_edge(int i, int j) const {
    const auto& nbrs = adj_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

std::vector<int> Graph::component_labels() const {
    const int n = node_count();
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<int> stack;
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (label[s] != -1) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj_[v]) {
                if (label[w] == -1) {
                    label[w] = next;
                    stack.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

int Graph::component_count() const {
    auto labels = component_labels();
    return labels.empty() ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
}

Graph make_complete(int n) {
    if (n < 1) throw Error("complete(n) requires n >= 1");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    return Graph(n, edges);
}

Graph make_path(int n) {
    if (n < 1) throw Error("path(n) requires n >= 1");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return Graph(n, edges);
}

Graph make_cycle(int n) {
    if (n < 1) throw Error("cycle(n) requires n >= 1");
    if (n <= 2) return make_path(n);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    edges.emplace_back(n - 1, 0);
    return Graph(n, edges);
}

Graph make_star(int n) {
    if (n < 1) throw Error("star(n) requires n >= 1");
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
    return Graph(n, edges);
}

Graph make_erdos_renyi(int n, double p, std::uint64_t seed) {
    if (n < 1) throw Error("erdos_renyi(n, p) requires n >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw Error("erdos_renyi edge probability must lie in [0,1]");

    std::vector<std::pair<int, int>> edges;
    if (p >= 1.0) return make_complete(n);
    if (p > 0.0) {
        // Geometric skipping over the lexicographic pair order (Batagelj &
        // Brandes), O(n + m) instead of O(n^2).
        SplitMix64 rng(seed);
        const double log1mp = std::log1p(-p);
        long long v = 1, w = -1;
        const long long nn = n;
        while (v < nn) {
            double u = rng.next_double();
            long long skip = static_cast<long long>(
                std::floor(std::log1p(-u) / log1mp));
            w += 1 + skip;
            while (w >= v && v < nn) {
                w -= v;
                ++v;
            }
            if (v < nn) edges.emplace_back(static_cast<int>(w), static_cast<int>(v));
        }
    }
    return Graph(n, edges);
}

Graph graph_from_spec(std::string_view spec, std::uint64_t seed) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto pos = spec.find(':', start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(spec.substr(start));
            break;
        }
        parts.emplace_back(spec.substr(start, pos - start));
        start = pos + 1;
    }
    if (parts.empty()) throw Error("empty graph spec");

    auto want = [&](std::size_t k) {
        if (parts.size() != k + 1)
            throw Error("graph spec '" + std::string(spec) + "': expected " +
                        std::to_string(k) + " argument(s)");
    };
    auto as_int = [&](const std::string& s) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw Error("graph spec: bad integer '" + s + "'");
        return v;
    };

    const std::string& kind = parts[0];
    if (kind == "complete") { want(1); return make_complete(as_int(parts[1])); }
    if (kind == "path")     { want(1); return make_path(as_int(parts[1])); }
    if (kind == "cycle")    { want(1); return make_cycle(as_int(parts[1])); }
    if (kind == "star")     { want(1); return make_star(as_int(parts[1])); }
    if (kind == "er") {
        want(2);
        double p = 0.0;
        try {
            p = std::stod(parts[2]);
        } catch (const std::exception&) {
            throw Error("graph spec: bad probability '" + parts[2] + "'");
        }
        return make_erdos_renyi(as_int(parts[1]), p, seed);
    }
    throw Error("unknown graph kind '" + kind + "'");
}

Graph load_edge_list(std::istream& in) {
    std::vector<std::pair<int, int>> edges;
    int max_id = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long a, b;
        if (!(ls >> a)) continue; // blank or comment-only line
        if (!(ls >> b))
            throw Error("edge list line " + std::to_string(line_no) +
                        ": expected two node ids");
        long long extra;
        if (ls >> extra)
            throw Error("edge list line " + std::to_string(line_no) +
                        ": trailing tokens");
        if (a < 0 || b < 0)
            throw Error("edge list line " + std::to_string(line_no) +
                        ": negative node id");
        if (a == b)
            throw Error("edge list line " + std::to_string(line_no) +
                        ": self-loop");
        edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        max_id = std::max<long long>({max_id, a, b});
    }
    if (max_id < 0) throw Error("edge list contains no edges");
    return Graph(max_id + 1, edges);
}

void save_edge_list(const Graph& g, std::ostream& out) {
    for (int i = 0; i < g.node_count(); ++i)
        for (int j : g.neighbors(i))
            if (i < j) out << i << ' ' << j << '\n';
}

namespace {

// Rayleigh-quotient power iteration on A + shift*I. With shift >= max degree
// the operator is positive semidefinite, so the estimate is monotone
// non-decreasing and the dominant eigenvalue is the Perron root plus shift.
struct PowerResult {
    double value;
    int iterations;
    double residual;
    bool converged;
};

PowerResult shifted_power_iteration(const Graph& g, double shift, bool negate,
                                    double tol, int max_iter,
                                    std::vector<double>* trace) {
    const int n = g.node_count();
    std::vector<double> v(static_cast<std::size_t>(n));
    if (negate) {
        // All-ones is the Perron vector on regular graphs, which is the
        // *minimal* eigenvector of shift*I - A; start from a hashed vector
        // so the dominant direction is always represented.
        for (int i = 0; i < n; ++i)
            v[i] = 0.5 + counter_uniform(0x5eedULL, 0, 0, static_cast<std::uint64_t>(i));
    } else {
        std::fill(v.begin(), v.end(), 1.0);
    }
    double n0 = 0.0;
    for (double x : v) n0 += x * x;
    n0 = std::sqrt(n0);
    for (double& x : v) x /= n0;
    std::vector<double> av(static_cast<std::size_t>(n));

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j : g.neighbors(i)) s += x[j];
            y[i] = negate ? shift * x[i] - s : s + shift * x[i];
        }
    };

    double rayleigh = 0.0;
    double residual = 0.0;
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        apply(v, av);
        double num = 0.0, nrm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            num += v[i] * av[i];
            nrm2 += av[i] * av[i];
        }
        rayleigh = num; // v is unit length
        if (trace) trace->push_back(rayleigh - shift);

        residual = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = av[i] - rayleigh * v[i];
            residual += r * r;
        }
        residual = std::sqrt(residual);
        if (residual <= tol) return {rayleigh - shift, it, residual, true};

        double norm = std::sqrt(nrm2);
        if (norm == 0.0) return {rayleigh - shift, it, 0.0, true}; // edgeless graph
        for (int i = 0; i < n; ++i) v[i] = av[i] / norm;
    }
    return {rayleigh - shift, max_iter, residual, false};
}

} // namespace

SpectralReport spectral_radius(const Graph& g, double tol, int max_iter,
                               std::vector<double>* trace) {
    const double shift = std::max(1, g.max_degree());
    auto pr = shifted_power_iteration(g, shift, false, tol, max_iter, trace);
    if (!pr.converged)
        throw Error("spectral_radius: power iteration did not converge in " +
                    std::to_string(max_iter) + " iterations (best estimate " +
                    std::to_string(pr.value) + ", residual " +
                    std::to_string(pr.residual) + ")");
    SpectralReport rep;
    rep.lambda_max = pr.value;
    rep.iterations = pr.iterations;
    rep.residual = pr.residual;
    rep.components = g.component_count();
    rep.disconnected = rep.components > 1;
    return rep;
}

double lambda_min(const Graph& g, double tol, int max_iter) {
    // Largest eigenvalue of shift*I - A is shift - lambda_min(A); shift
    // strictly above lambda_max keeps the operator positive definite.
    const double shift = g.max_degree() + 1.0;
    auto pr = shifted_power_iteration(g, shift, true, tol, max_iter, nullptr);
    if (!pr.converged)
        throw Error("lambda_min: power iteration did not converge");
    return -pr.value; // pr.value = (shift - lambda_min) - shift
}

} // namespace netsirs
