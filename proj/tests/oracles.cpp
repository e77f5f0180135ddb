#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace netsirs::testoracle {

std::uint32_t pow3(int k) {
    std::uint32_t v = 1;
    for (int i = 0; i < k; ++i) v *= 3;
    return v;
}

int digit3(std::uint32_t code, int node) {
    return static_cast<int>((code / pow3(node)) % 3);
}

namespace {

double node_prob(const EpidemicParams& p, int x, int y, int m) {
    const double esc = std::pow(1.0 - p.beta, m);
    if (x == 0) {
        switch (p.variant) {
        case Variant::Sirs:
            if (y == 0) return esc;
            if (y == 1) return 1.0 - esc;
            return 0.0;
        case Variant::InfectionDominant:
            if (y == 0) return esc * (1.0 - p.theta);
            if (y == 1) return 1.0 - esc;
            return esc * p.theta;
        case Variant::VaccinationDominant:
            if (y == 0) return esc * (1.0 - p.theta);
            if (y == 1) return (1.0 - esc) * (1.0 - p.theta);
            return p.theta;
        }
    }
    if (x == 1) {
        if (y == 0) return 0.0;
        if (y == 1) return 1.0 - p.delta;
        return p.delta;
    }
    if (y == 0) return p.gamma;
    if (y == 1) return 0.0;
    return 1.0 - p.gamma;
}

} // namespace

std::vector<std::vector<double>> dense_transition_matrix(
    const Graph& g, const EpidemicParams& params) {
    const int n = g.node_count();
    const std::uint32_t total = pow3(n);
    std::vector<std::vector<double>> S(total, std::vector<double>(total, 0.0));
    for (std::uint32_t x = 0; x < total; ++x) {
        std::vector<int> m(n, 0);
        for (int i = 0; i < n; ++i)
            if (digit3(x, i) == 1)
                for (int j : g.neighbors(i)) ++m[j];
        for (std::uint32_t y = 0; y < total; ++y) {
            double prob = 1.0;
            for (int i = 0; i < n && prob != 0.0; ++i)
                prob *= node_prob(params, digit3(x, i), digit3(y, i), m[i]);
            S[x][y] = prob;
        }
    }
    return S;
}

std::vector<double> dense_evolve(const std::vector<std::vector<double>>& S,
                                 std::vector<double> mu, int steps) {
    const std::size_t total = S.size();
    std::vector<double> next(total);
    for (int t = 0; t < steps; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t x = 0; x < total; ++x) {
            if (mu[x] == 0.0) continue;
            for (std::size_t y = 0; y < total; ++y)
                next[y] += mu[x] * S[x][y];
        }
        mu.swap(next);
    }
    return mu;
}

std::vector<double> dense_stationary(int n, const EpidemicParams& params) {
    const std::uint32_t total = pow3(n);
    std::vector<double> pi(total, 0.0);
    if (params.variant == Variant::Sirs) {
        pi[0] = 1.0;
        return pi;
    }
    const double p_s = params.gamma / (params.gamma + params.theta);
    const double p_r = params.theta / (params.gamma + params.theta);
    for (std::uint32_t x = 0; x < total; ++x) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            const int d = digit3(x, i);
            w *= d == 0 ? p_s : (d == 1 ? 0.0 : p_r);
        }
        pi[x] = w;
    }
    return pi;
}

double dense_tv(const std::vector<double>& a, const std::vector<double>& b) {
    double l1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) l1 += std::abs(a[i] - b[i]);
    return 0.5 * l1;
}

int dense_mixing_time(const Graph& g, const EpidemicParams& params,
                      double eps, int budget) {
    const int n = g.node_count();
    const auto S = dense_transition_matrix(g, params);
    const auto pi = dense_stationary(n, params);
    std::vector<double> mu(pow3(n), 0.0);
    std::uint32_t all_i = 0;
    for (int i = 0; i < n; ++i) all_i += pow3(i); // every digit 1
    mu[all_i] = 1.0;
    for (int t = 0; t <= budget; ++t) {
        if (dense_tv(mu, pi) <= eps) return t;
        mu = dense_evolve(S, std::move(mu), 1);
    }
    return -1;
}

void dense_marginals(const std::vector<double>& mu, int n,
                     std::vector<double>& p_r, std::vector<double>& p_i) {
    p_r.assign(n, 0.0);
    p_i.assign(n, 0.0);
    for (std::uint32_t x = 0; x < mu.size(); ++x) {
        if (mu[x] == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            const int d = digit3(x, i);
            if (d == 2) p_r[i] += mu[x];
            if (d == 1) p_i[i] += mu[x];
        }
    }
}

DenseLinear dense_linear_matrix(const Graph& g, const EpidemicParams& p) {
    const int n = g.node_count();
    DenseLinear out;
    out.m.assign(2 * n, std::vector<double>(2 * n, 0.0));

    double p_s = 1.0, p_r = 0.0;
    if (p.variant != Variant::Sirs && p.gamma + p.theta > 0.0) {
        p_s = p.gamma / (p.gamma + p.theta);
        p_r = p.theta / (p.gamma + p.theta);
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double a = g.has_edge(i, j) ? 1.0 : 0.0;
            const double id = i == j ? 1.0 : 0.0;
            switch (p.variant) {
            case Variant::Sirs:
                out.m[i][j] = (1.0 - p.gamma) * id;
                out.m[i][n + j] = p.delta * id;
                out.m[n + i][n + j] = (1.0 - p.delta) * id + p.beta * a;
                break;
            case Variant::InfectionDominant:
                out.m[i][j] = (1.0 - p.gamma - p.theta) * id;
                out.m[i][n + j] =
                    (p.delta - p.theta) * id - p.theta * p_s * p.beta * a;
                out.m[n + i][n + j] =
                    (1.0 - p.delta) * id + p_s * p.beta * a;
                break;
            case Variant::VaccinationDominant:
                out.m[i][j] = (1.0 - p.gamma - p.theta) * id;
                out.m[i][n + j] =
                    (p.delta - p.theta) * id - p.theta * p_s * p.beta * a;
                out.m[n + i][n + j] =
                    (1.0 - p.delta) * id + (1.0 - p.theta) * p_s * p.beta * a;
                break;
            }
        }
    out.offset_r = p.variant == Variant::Sirs ? 0.0 : p_r;
    return out;
}

double symmetric_endemic_bisection(int n, double beta, double delta,
                                   double gamma) {
    const double slope = 1.0 + delta / gamma;
    const double singular = 1.0 / slope;
    auto f = [&](double p) {
        const double lhs = 1.0 - std::pow(1.0 - beta * p, n - 1);
        const double rhs = delta * p / (1.0 - slope * p);
        return lhs - rhs;
    };
    double lo = 1e-14, hi = singular * (1.0 - 1e-12);
    if (!(f(lo) > 0.0) || !(f(hi) < 0.0))
        throw std::runtime_error("bisection oracle: no bracket (point not "
                                 "supercritical?)");
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace netsirs::testoracle
