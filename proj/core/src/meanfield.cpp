#include "netsirs/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "netsirs/error.hpp"
#include "netsirs/rng.hpp"

namespace netsirs {

void NodeProbs::validate(double tol) const {
    if (p_r.size() != p_i.size()) throw Error("NodeProbs: field length mismatch");
    for (std::size_t i = 0; i < p_i.size(); ++i) {
        if (!(p_r[i] >= -tol && p_r[i] <= 1.0 + tol) ||
            !(p_i[i] >= -tol && p_i[i] <= 1.0 + tol))
            throw Error("NodeProbs: component outside [0,1] at node " +
                        std::to_string(i));
        if (p_r[i] + p_i[i] > 1.0 + tol)
            throw Error("NodeProbs: p_r + p_i > 1 at node " + std::to_string(i));
    }
}

double max_distance(const NodeProbs& a, const NodeProbs& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.p_i.size(); ++i) {
        d = std::max(d, std::abs(a.p_r[i] - b.p_r[i]));
        d = std::max(d, std::abs(a.p_i[i] - b.p_i[i]));
    }
    return d;
}

NodeProbs step_nonlinear(const Graph& g, const EpidemicParams& params,
                         const NodeProbs& s) {
    params.validate();
    const int n = g.node_count();
    if (s.size() != n) throw Error("step_nonlinear: state size mismatch");
    s.validate();

    NodeProbs out(n);
    for (int i = 0; i < n; ++i) {
        double escape = 1.0;
        for (int j : g.neighbors(i)) escape *= (1.0 - params.beta * s.p_i[j]);
        const double infect = 1.0 - escape;
        const double p_s = std::max(0.0, 1.0 - s.p_r[i] - s.p_i[i]);

        switch (params.variant) {
        case Variant::Sirs:
            out.p_r[i] = (1.0 - params.gamma) * s.p_r[i] + params.delta * s.p_i[i];
            out.p_i[i] = (1.0 - params.delta) * s.p_i[i] + infect * p_s;
            break;
        case Variant::InfectionDominant:
            out.p_r[i] = (1.0 - params.gamma) * s.p_r[i] +
                         params.delta * s.p_i[i] + escape * params.theta * p_s;
            out.p_i[i] = (1.0 - params.delta) * s.p_i[i] + infect * p_s;
            break;
        case Variant::VaccinationDominant:
            out.p_r[i] = (1.0 - params.gamma) * s.p_r[i] +
                         params.delta * s.p_i[i] + params.theta * p_s;
            out.p_i[i] = (1.0 - params.delta) * s.p_i[i] +
                         (1.0 - params.theta) * infect * p_s;
            break;
        }
    }
    out.validate();
    return out;
}

LinearModel make_linear_model(const Graph& g, const EpidemicParams& params) {
    params.validate();
    LinearModel m;
    m.graph = &g;

    double p_s_star = 1.0, p_r_star = 0.0;
    if (params.variant != Variant::Sirs && params.gamma + params.theta > 0.0) {
        p_s_star = params.gamma / (params.gamma + params.theta);
        p_r_star = params.theta / (params.gamma + params.theta);
    }

    switch (params.variant) {
    case Variant::Sirs:
        m.rr = 1.0 - params.gamma;
        m.ri = params.delta;
        m.ri_adj = 0.0;
        m.ii = 1.0 - params.delta;
        m.ii_adj = params.beta;
        m.offset_r = 0.0;
        break;
    case Variant::InfectionDominant:
        m.rr = 1.0 - params.gamma - params.theta;
        m.ri = params.delta - params.theta;
        m.ri_adj = -params.theta * p_s_star * params.beta;
        m.ii = 1.0 - params.delta;
        m.ii_adj = p_s_star * params.beta;
        m.offset_r = p_r_star;
        break;
    case Variant::VaccinationDominant:
        m.rr = 1.0 - params.gamma - params.theta;
        m.ri = params.delta - params.theta;
        m.ri_adj = -params.theta * p_s_star * params.beta;
        m.ii = 1.0 - params.delta;
        m.ii_adj = (1.0 - params.theta) * p_s_star * params.beta;
        m.offset_r = p_r_star;
        break;
    }

    double rho_lower = std::abs(m.ii);
    if (m.ii_adj != 0.0 && g.edge_count() > 0) {
        const double lmax = spectral_radius(g).lambda_max;
        const double lmin = lambda_min(g);
        rho_lower = std::max(std::abs(m.ii + m.ii_adj * lmax),
                             std::abs(m.ii + m.ii_adj * lmin));
    }
    m.spectral_norm_upper = std::max(std::abs(m.rr), rho_lower);
    return m;
}

namespace {

void adjacency_apply(const Graph& g, const std::vector<double>& x,
                     std::vector<double>& y) {
    const int n = g.node_count();
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j : g.neighbors(i)) s += x[j];
        y[i] = s;
    }
}

} // namespace

NodeProbs step_linear(const LinearModel& model, const NodeProbs& s) {
    const Graph& g = *model.graph;
    const int n = g.node_count();
    if (s.size() != n) throw Error("step_linear: state size mismatch");

    std::vector<double> ax(n);
    adjacency_apply(g, s.p_i, ax);

    NodeProbs out(n);
    for (int i = 0; i < n; ++i) {
        const double dr = s.p_r[i] - model.offset_r;
        out.p_r[i] = model.offset_r + model.rr * dr + model.ri * s.p_i[i] +
                     model.ri_adj * ax[i];
        out.p_i[i] = model.ii * s.p_i[i] + model.ii_adj * ax[i];
    }
    return out;
}

double operator_norm(const LinearModel& model, double tol, int max_iter) {
    const Graph& g = *model.graph;
    const int n = g.node_count();
    const int dim = 2 * n;

    std::vector<double> v(dim), w(dim), tmp(n), ar(n), ai(n);
    for (int i = 0; i < dim; ++i)
        v[i] = 0.5 + counter_uniform(0x90a7ULL, 1, 0, static_cast<std::uint64_t>(i));
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : v) x /= nrm;

    auto normal_apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        // y = M^T (M x) with x = [x_R; x_I]
        const double* xr = x.data();
        const double* xi = x.data() + n;
        std::vector<double> yr(n), yi(n);
        for (int i = 0; i < n; ++i) tmp[i] = xi[i];
        adjacency_apply(g, tmp, ai);
        for (int i = 0; i < n; ++i) {
            yr[i] = model.rr * xr[i] + model.ri * xi[i] + model.ri_adj * ai[i];
            yi[i] = model.ii * xi[i] + model.ii_adj * ai[i];
        }
        adjacency_apply(g, yr, ar);
        adjacency_apply(g, yi, ai);
        for (int i = 0; i < n; ++i) {
            y[i] = model.rr * yr[i];
            y[n + i] = model.ri * yr[i] + model.ri_adj * ar[i] +
                       model.ii * yi[i] + model.ii_adj * ai[i];
        }
    };

    double rayleigh = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        normal_apply(v, w);
        rayleigh = 0.0;
        double wn = 0.0;
        for (int i = 0; i < dim; ++i) {
            rayleigh += v[i] * w[i];
            wn += w[i] * w[i];
        }
        double resid = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double r = w[i] - rayleigh * v[i];
            resid += r * r;
        }
        if (std::sqrt(resid) <= tol) return std::sqrt(std::max(0.0, rayleigh));
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;
        for (int i = 0; i < dim; ++i) v[i] = w[i] / wn;
    }
    throw Error("operator_norm: power iteration did not converge (estimate " +
                std::to_string(std::sqrt(std::max(0.0, rayleigh))) + ")");
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

ThresholdReport threshold_report(const EpidemicParams& params,
                                 double lambda_max) {
    params.validate();
    ThresholdReport rep;
    rep.beta = params.beta;
    rep.delta = params.delta;
    rep.lambda_max = lambda_max;

    double base;
    if (params.beta * lambda_max == 0.0)
        base = 0.0;
    else if (params.delta == 0.0)
        base = std::numeric_limits<double>::infinity();
    else
        base = params.beta * lambda_max / params.delta;

    rep.susceptible_factor =
        (params.variant != Variant::Sirs && params.gamma + params.theta > 0.0)
            ? params.gamma / (params.gamma + params.theta)
            : 1.0;
    rep.one_minus_theta = 1.0 - params.theta;

    switch (params.variant) {
    case Variant::Sirs:
        rep.ratio_local = base;
        rep.ratio_global = base;
        break;
    case Variant::InfectionDominant:
        rep.ratio_local = rep.susceptible_factor * base;
        rep.ratio_global = base;
        break;
    case Variant::VaccinationDominant:
        rep.ratio_local = rep.one_minus_theta * rep.susceptible_factor * base;
        rep.ratio_global = rep.one_minus_theta * base;
        break;
    }

    if (std::abs(rep.ratio_global - 1.0) <= 1e-9)
        rep.regime = Regime::Critical;
    else
        rep.regime = rep.ratio_global < 1.0 ? Regime::Subcritical
                                            : Regime::Supercritical;
    return rep;
}

MixingBound mixing_time_bound(const Graph& g, const EpidemicParams& params,
                              double eps) {
    if (!(eps > 0.0) || eps >= 1.0)
        throw Error("mixing_time_bound: eps must lie in (0,1)");
    const int n = g.node_count();
    MixingBound mb;
    double arg;
    if (params.variant == Variant::Sirs) {
        mb.norm = operator_norm(make_linear_model(g, params));
        arg = 2.0 * n / eps;
    } else {
        const double scale = params.variant == Variant::VaccinationDominant
                                 ? (1.0 - params.theta) * params.beta
                                 : params.beta;
        double lo = 1.0 - params.delta, hi = 1.0 - params.delta;
        if (scale > 0.0 && g.edge_count() > 0) {
            hi += scale * spectral_radius(g).lambda_max;
            lo += scale * lambda_min(g);
        }
        mb.norm = std::max(std::abs(hi), std::abs(lo));
        arg = static_cast<double>(n) / eps;
    }
    mb.valid = mb.norm < 1.0;
    if (mb.valid)
        mb.bound = mb.norm == 0.0 ? 0.0 : std::log(arg) / (-std::log(mb.norm));
    else
        mb.bound = std::numeric_limits<double>::infinity();
    return mb;
}

std::vector<double> infection_pressure(const Graph& g, double beta,
                                       const std::vector<double>& p_i) {
    const int n = g.node_count();
    std::vector<double> xi(n);
    for (int i = 0; i < n; ++i) {
        double escape = 1.0;
        for (int j : g.neighbors(i)) escape *= (1.0 - beta * p_i[j]);
        xi[i] = 1.0 - escape;
    }
    return xi;
}

double recovery_pressure(double delta, double p_r, double p_i) {
    return delta * p_i / (1.0 - p_r - p_i);
}

std::vector<double> net_pressure(const Graph& g, const EpidemicParams& params,
                                 const NodeProbs& s) {
    const int n = g.node_count();
    if (s.size() != n) throw Error("net_pressure: state size mismatch");
    for (int i = 0; i < n; ++i)
        if (s.p_r[i] + s.p_i[i] >= 1.0)
            throw Error("net_pressure: p_r + p_i >= 1 at node " +
                        std::to_string(i) + " (recovery pressure singular)");

    std::vector<double> psi = infection_pressure(g, params.beta, s.p_i);
    for (int i = 0; i < n; ++i)
        psi[i] -= recovery_pressure(params.delta, s.p_r[i], s.p_i[i]);
    return psi;
}

std::string to_string(FixedPointResult::Outcome o) {
    switch (o) {
    case FixedPointResult::Outcome::Converged: return "converged";
    case FixedPointResult::Outcome::CycleDetected: return "cycle_detected";
    case FixedPointResult::Outcome::Diverged: return "diverged";
    }
    return "?";
}

namespace {

double psi_residual(const Graph& g, const EpidemicParams& params,
                    const NodeProbs& s) {
    double worst = std::numeric_limits<double>::quiet_NaN();
    try {
        auto psi = net_pressure(g, params, s);
        worst = 0.0;
        for (double v : psi) worst = std::max(worst, std::abs(v));
    } catch (const Error&) {
        // point sits on the singular boundary; leave NaN
    }
    return worst;
}

} // namespace

FixedPointResult endemic_fixed_point(const Graph& g,
                                     const EpidemicParams& params,
                                     const EndemicOptions& opts) {
    params.validate();
    if (params.variant != Variant::Sirs)
        throw Error("endemic_fixed_point: the uniqueness result covers the "
                    "SIRS map; vaccinated variants are not supported");
    if (params.gamma <= 0.0)
        throw Error("endemic_fixed_point requires gamma > 0");

    const double lambda = spectral_radius(g).lambda_max;
    const auto thr = threshold_report(params, lambda);
    if (thr.regime != Regime::Supercritical)
        throw Error("endemic_fixed_point: regime is " + to_string(thr.regime) +
                    " (ratio " + std::to_string(thr.ratio_global) +
                    "); only the disease-free fixed point exists below threshold");

    const int n = g.node_count();
    const double relation = params.delta / params.gamma;

    NodeProbs x(n);
    if (!opts.start_p_i.empty()) {
        if (static_cast<int>(opts.start_p_i.size()) != n)
            throw Error("endemic_fixed_point: start vector size mismatch");
        x.p_i = opts.start_p_i;
    } else {
        const double c = std::min(0.5, 0.9 / (1.0 + relation));
        std::fill(x.p_i.begin(), x.p_i.end(), c);
    }
    for (int i = 0; i < n; ++i) x.p_r[i] = relation * x.p_i[i];

    double alpha = opts.damping;
    std::deque<NodeProbs> history;
    std::deque<int> drift_signs;

    FixedPointResult res;
    for (int it = 1; it <= opts.max_iter; ++it) {
        NodeProbs f = step_nonlinear(g, params, x);
        double map_resid = max_distance(f, x);
        if (map_resid <= opts.tol) {
            res.outcome = FixedPointResult::Outcome::Converged;
            res.iterations = it;
            res.p_i_star = x.p_i;
            res.p_r_star = x.p_r;
            res.residual = psi_residual(g, params, x);
            return res;
        }

        // Signed total drift of the infected block drives the damping:
        // alternating signs over a 4-step window mean the plain iteration
        // is orbiting, so halve the step blend.
        if (opts.adaptive_damping) {
            double drift = 0.0;
            for (int i = 0; i < n; ++i) drift += f.p_i[i] - x.p_i[i];
            drift_signs.push_back(drift > 0.0 ? 1 : (drift < 0.0 ? -1 : 0));
            if (drift_signs.size() > 4) drift_signs.pop_front();
            if (drift_signs.size() == 4) {
                bool alternating = true;
                for (std::size_t k = 1; k < drift_signs.size(); ++k)
                    if (drift_signs[k] == 0 ||
                        drift_signs[k] == drift_signs[k - 1])
                        alternating = false;
                if (alternating && alpha > opts.min_damping) {
                    alpha = std::max(opts.min_damping, alpha / 2.0);
                    drift_signs.clear();
                }
            }
        }

        NodeProbs next(n);
        for (int i = 0; i < n; ++i) {
            next.p_r[i] = (1.0 - alpha) * x.p_r[i] + alpha * f.p_r[i];
            next.p_i[i] = (1.0 - alpha) * x.p_i[i] + alpha * f.p_i[i];
        }

        // Cycle scan: a revisit of a non-fixed state within the trailing
        // window means the iteration is periodic.
        if (map_resid > opts.cycle_tol) {
            for (std::size_t back = 1; back < history.size(); ++back) {
                const int period = static_cast<int>(back) + 1;
                if (max_distance(next, history[history.size() - 1 - back]) <=
                    opts.cycle_tol) {
                    res.outcome = FixedPointResult::Outcome::CycleDetected;
                    res.cycle_period = period;
                    res.iterations = it;
                    res.p_i_star = next.p_i;
                    res.p_r_star = next.p_r;
                    res.residual = psi_residual(g, params, next);
                    return res;
                }
            }
        }

        history.push_back(next);
        if (static_cast<int>(history.size()) > opts.cycle_window)
            history.pop_front();
        x = std::move(next);
    }

    res.outcome = FixedPointResult::Outcome::Diverged;
    res.iterations = opts.max_iter;
    res.p_i_star = x.p_i;
    res.p_r_star = x.p_r;
    res.residual = psi_residual(g, params, x);
    return res;
}

MultiStartResult endemic_multi_start(const Graph& g,
                                     const EpidemicParams& params,
                                     int starts, std::uint64_t seed,
                                     const EndemicOptions& opts) {
    if (starts < 1) throw Error("endemic_multi_start: starts must be >= 1");
    const int n = g.node_count();
    const double relation = params.delta / params.gamma;
    const double cap = 0.9 / (1.0 + relation);

    MultiStartResult out;
    out.starts = starts;
    std::vector<FixedPointResult> results;
    for (int s = 0; s < starts; ++s) {
        EndemicOptions o = opts;
        o.start_p_i.resize(n);
        for (int i = 0; i < n; ++i) {
            const double u = counter_uniform(seed, static_cast<std::uint64_t>(s),
                                             0, static_cast<std::uint64_t>(i));
            o.start_p_i[i] = cap * (0.05 + 0.9 * u);
        }
        auto r = endemic_fixed_point(g, params, o);
        if (r.outcome == FixedPointResult::Outcome::Converged) {
            ++out.converged;
            results.push_back(std::move(r));
        }
    }
    if (results.empty())
        throw Error("endemic_multi_start: no start converged");

    for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b) {
            double d = 0.0;
            for (int i = 0; i < n; ++i) {
                d = std::max(d, std::abs(results[a].p_i_star[i] -
                                         results[b].p_i_star[i]));
                d = std::max(d, std::abs(results[a].p_r_star[i] -
                                         results[b].p_r_star[i]));
            }
            out.max_spread = std::max(out.max_spread, d);
        }

    std::size_t best = 0;
    for (std::size_t k = 1; k < results.size(); ++k)
        if (results[k].residual < results[best].residual) best = k;
    out.consensus = std::move(results[best]);
    return out;
}

std::vector<PropertyCheck> pressure_property_suite(const Graph& g,
                                                   const EpidemicParams& params,
                                                   int samples,
                                                   std::uint64_t seed) {
    params.validate();
    const int n = g.node_count();
    const double beta = params.beta;
    const double delta = params.delta;
    SplitMix64 rng(seed);

    auto xi_at = [&](int i, const std::vector<double>& p) {
        double escape = 1.0;
        for (int j : g.neighbors(i)) escape *= (1.0 - beta * p[j]);
        return 1.0 - escape;
    };

    std::vector<PropertyCheck> checks;

    {
        // Value and gradient of the infection pressure at the origin:
        // zero value, gradient beta * A.
        PropertyCheck c{"infection_pressure_origin_gradient", true, samples, 0.0};
        const double h = 1e-6;
        for (int s = 0; s < samples; ++s) {
            const int i = static_cast<int>(rng.next_below(n));
            const int j = static_cast<int>(rng.next_below(n));
            std::vector<double> p(n, 0.0);
            const double v0 = xi_at(i, p);
            p[j] = h;
            const double vp = xi_at(i, p);
            p[j] = -h;
            const double vm = xi_at(i, p);
            const double fd = (vp - vm) / (2.0 * h);
            const double expected = g.has_edge(i, j) ? beta : 0.0;
            const double err = std::max(std::abs(v0), std::abs(fd - expected));
            c.worst = std::max(c.worst, err);
            if (err > 1e-6) c.passed = false;
        }
        checks.push_back(std::move(c));
    }

    {
        // Partial derivative sign pattern matches the adjacency: strictly
        // positive toward neighbors, identically zero otherwise.
        PropertyCheck c{"infection_pressure_sign_pattern", true, samples, 0.0};
        const double h = 1e-6;
        double worst_pos = std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            const int i = static_cast<int>(rng.next_below(n));
            const int j = static_cast<int>(rng.next_below(n));
            std::vector<double> p(n);
            for (int k = 0; k < n; ++k) p[k] = 0.8 * rng.next_double();
            std::vector<double> pp = p, pm = p;
            pp[j] += h;
            pm[j] -= h;
            const double fd = (xi_at(i, pp) - xi_at(i, pm)) / (2.0 * h);
            if (g.has_edge(i, j)) {
                worst_pos = std::min(worst_pos, fd);
                if (!(fd > 0.0)) c.passed = false;
            } else {
                c.worst = std::max(c.worst, std::abs(fd));
                if (std::abs(fd) > 1e-12) c.passed = false;
            }
        }
        if (worst_pos != std::numeric_limits<double>::infinity())
            c.worst = std::max(c.worst, -worst_pos);
        checks.push_back(std::move(c));
    }

    {
        // Concavity: raw mixed second differences stay non-positive.
        PropertyCheck c{"infection_pressure_concavity", true, samples, 0.0};
        const double h = 1e-3;
        for (int s = 0; s < samples; ++s) {
            const int i = static_cast<int>(rng.next_below(n));
            const int j = static_cast<int>(rng.next_below(n));
            const int k = static_cast<int>(rng.next_below(n));
            std::vector<double> p(n);
            for (int q = 0; q < n; ++q) p[q] = 0.8 * rng.next_double();
            std::vector<double> pj = p, pk = p, pjk = p;
            pj[j] += h;
            pk[k] += h;
            pjk[j] += h;
            pjk[k] += h;
            const double d2 =
                xi_at(i, pjk) - xi_at(i, pj) - xi_at(i, pk) + xi_at(i, p);
            c.worst = std::max(c.worst, d2);
            if (d2 > 1e-10) c.passed = false;
        }
        checks.push_back(std::move(c));
    }

    {
        // Recovery pressure at the origin: zero value, slope delta in p_i.
        PropertyCheck c{"recovery_pressure_origin_slope", true, samples, 0.0};
        const double h = 1e-8;
        const double v0 = recovery_pressure(delta, 0.0, 0.0);
        const double fd = (recovery_pressure(delta, 0.0, h) - v0) / h;
        const double err = std::max(std::abs(v0), std::abs(fd - delta));
        c.worst = err;
        c.samples = 1;
        if (err > 1e-6) c.passed = false;
        checks.push_back(std::move(c));
    }

    {
        // Recovery pressure strictly increases in p_i on the interior.
        PropertyCheck c{"recovery_pressure_monotone", true, samples, 0.0};
        const double h = 1e-6;
        double worst_pos = std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            const double pr = 0.45 * rng.next_double();
            const double pi = 0.01 + 0.4 * rng.next_double();
            const double fd = (recovery_pressure(delta, pr, pi + h) -
                               recovery_pressure(delta, pr, pi - h)) /
                              (2.0 * h);
            worst_pos = std::min(worst_pos, fd);
            if (delta > 0.0 && !(fd > 0.0)) c.passed = false;
        }
        c.worst = delta > 0.0 ? -worst_pos : 0.0;
        checks.push_back(std::move(c));
    }

    {
        // The ratio recovery_pressure / p_i increases in both arguments.
        PropertyCheck c{"recovery_ratio_monotone", true, samples, 0.0};
        double worst_gap = std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            double s1 = 0.5 * rng.next_double();
            double s2 = s1 + (0.6 - s1) * (0.01 + 0.99 * rng.next_double());
            double t1 = 0.001 + 0.2 * rng.next_double();
            double t2 = t1 + (0.3 - t1) * (0.01 + 0.99 * rng.next_double());
            const double r1 = recovery_pressure(delta, s1, t1) / t1;
            const double r2 = recovery_pressure(delta, s2, t2) / t2;
            worst_gap = std::min(worst_gap, r2 - r1);
            if (delta > 0.0 && !(r1 < r2)) c.passed = false;
        }
        c.worst = delta > 0.0 ? -worst_gap : 0.0;
        checks.push_back(std::move(c));
    }

    return checks;
}

} // namespace netsirs
