#include "netsirs/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "netsirs/chain.hpp"
#include "netsirs/error.hpp"
#include "netsirs/meanfield.hpp"
#include "netsirs/montecarlo.hpp"
#include "netsirs/svg.hpp"
#include "netsirs/version.hpp"

namespace netsirs {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void fmt_double(std::ostream& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double mf_initial_level(const std::string& init, int n) {
    const InitSpec spec = InitSpec::parse(init);
    switch (spec.kind) {
    case InitSpec::Kind::AllInfected: return 1.0;
    case InitSpec::Kind::OneRandomInfected: return 1.0 / n;
    case InitSpec::Kind::Fraction: return spec.fraction;
    }
    return 0.0;
}

/// Mean-field totals sum_i P_I(t) for t = 0..steps from a uniform start.
std::vector<double> mf_total_infected(const Graph& g,
                                      const EpidemicParams& params,
                                      double init_pi, int steps) {
    NodeProbs s(g.node_count());
    std::fill(s.p_i.begin(), s.p_i.end(), init_pi);
    std::vector<double> totals;
    totals.reserve(static_cast<std::size_t>(steps) + 1);
    for (int t = 0;; ++t) {
        double total = 0.0;
        for (double v : s.p_i) total += v;
        totals.push_back(total);
        if (t == steps) break;
        s = step_nonlinear(g, params, s);
    }
    return totals;
}

/// Least-squares slope of log(total) over steps [lo, hi].
double decay_rate_fit(const std::vector<double>& totals, int lo, int hi) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int k = 0;
    for (int t = lo; t <= hi && t < static_cast<int>(totals.size()); ++t) {
        if (!(totals[t] > 0.0)) return kNaN;
        const double y = std::log(totals[t]);
        st += t;
        sy += y;
        stt += static_cast<double>(t) * t;
        sty += t * y;
        ++k;
    }
    if (k < 2) return kNaN;
    const double denom = k * stt - st * st;
    return (k * sty - st * sy) / denom;
}

/// Product distribution with independent per-node infection probability q
/// (all remaining mass on S); q = 1 collapses to the all-infected point mass.
ChainDistribution product_infected(int n, double q) {
    std::vector<ChainDistribution::Entry> entries;
    entries.emplace_back(0, 1.0);
    StateCode pow3 = 1;
    for (int i = 0; i < n; ++i) {
        const std::size_t sz = entries.size();
        for (std::size_t k = 0; k < sz; ++k) {
            if (q > 0.0)
                entries.emplace_back(entries[k].first + pow3,
                                     entries[k].second * q);
            entries[k].second *= (1.0 - q);
        }
        pow3 *= 3;
    }
    return ChainDistribution::from_entries(std::move(entries));
}

} // namespace

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("experiment spec: ") + e.what());
    }
    ExperimentSpec s;
    auto grid = [&](const char* key, std::vector<double>& out) {
        if (!j.contains(key)) return;
        if (j[key].is_number())
            out = {j[key].get<double>()};
        else
            out = j[key].get<std::vector<double>>();
    };
    if (j.contains("name")) s.name = j["name"].get<std::string>();
    if (j.contains("graph")) s.graph = j["graph"].get<std::string>();
    if (j.contains("variant"))
        s.variant = variant_from_string(j["variant"].get<std::string>());
    grid("beta", s.beta);
    grid("delta", s.delta);
    grid("gamma", s.gamma);
    grid("theta", s.theta);
    if (j.contains("layers"))
        s.layers = j["layers"].get<std::vector<std::string>>();
    if (j.contains("horizon")) s.horizon = j["horizon"].get<std::int64_t>();
    if (j.contains("replicas")) s.replicas = j["replicas"].get<int>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("init")) s.init = j["init"].get<std::string>();
    if (j.contains("eps")) s.eps = j["eps"].get<double>();
    if (j.contains("n_values")) s.n_values = j["n_values"].get<std::vector<int>>();
    if (j.contains("graph_kind")) s.graph_kind = j["graph_kind"].get<std::string>();
    if (j.contains("output_dir")) s.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("jobs")) s.jobs = j["jobs"].get<int>();
    s.validate();
    return s;
}

ExperimentSpec ExperimentSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open experiment spec " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string ExperimentSpec::to_json_text() const {
    json j;
    j["name"] = name;
    j["graph"] = graph;
    j["variant"] = to_string(variant);
    j["beta"] = beta;
    j["delta"] = delta;
    j["gamma"] = gamma;
    j["theta"] = theta;
    j["layers"] = layers;
    j["horizon"] = horizon;
    j["replicas"] = replicas;
    j["seed"] = seed;
    j["init"] = init;
    j["eps"] = eps;
    j["n_values"] = n_values;
    j["graph_kind"] = graph_kind;
    j["output_dir"] = output_dir;
    j["jobs"] = jobs;
    return j.dump(2);
}

Graph ExperimentSpec::build_graph() const {
    if (!graph.empty() && graph.front() == '@') {
        std::ifstream in(graph.substr(1));
        if (!in) throw Error("cannot open edge list " + graph.substr(1));
        return load_edge_list(in);
    }
    return graph_from_spec(graph, seed);
}

void ExperimentSpec::validate() const {
    if (beta.empty() || delta.empty() || gamma.empty() || theta.empty())
        throw Error("experiment spec: every rate grid needs at least one value");
    for (double b : beta)
        for (double d : delta)
            for (double gm : gamma)
                for (double th : theta)
                    EpidemicParams{b, d, gm, th, variant}.validate();
    if (horizon < 1) throw Error("experiment spec: horizon must be >= 1");
    if (replicas < 1) throw Error("experiment spec: replicas must be >= 1");
    InitSpec::parse(init);
}

std::vector<ThresholdSweepRow> run_threshold_sweep(const ExperimentSpec& spec) {
    spec.validate();
    const Graph g = spec.build_graph();
    const double lambda = spectral_radius(g).lambda_max;
    const bool want_mf =
        std::find(spec.layers.begin(), spec.layers.end(), "meanfield") !=
        spec.layers.end();
    const bool want_mc =
        std::find(spec.layers.begin(), spec.layers.end(), "montecarlo") !=
        spec.layers.end();
    const double init_pi = mf_initial_level(spec.init, g.node_count());

    std::vector<ThresholdSweepRow> rows;
    for (double b : spec.beta)
        for (double d : spec.delta)
            for (double gm : spec.gamma)
                for (double th : spec.theta) {
                    ThresholdSweepRow row;
                    row.beta = b;
                    row.delta = d;
                    row.gamma = gm;
                    row.theta = th;
                    row.variant = to_string(spec.variant);
                    row.lambda_max = lambda;
                    row.decay_rate_fit = kNaN;
                    row.endemic_level_mf = kNaN;
                    row.mc_survival_fraction = kNaN;
                    const EpidemicParams params{b, d, gm, th, spec.variant};
                    try {
                        const auto thr = threshold_report(params, lambda);
                        row.ratio_local = thr.ratio_local;
                        row.ratio_global = thr.ratio_global;
                        row.regime = to_string(thr.regime);

                        if (want_mf) {
                            const auto totals =
                                mf_total_infected(g, params, init_pi, 100);
                            row.decay_rate_fit = decay_rate_fit(totals, 10, 100);
                            if (thr.regime == Regime::Supercritical) {
                                if (spec.variant == Variant::Sirs && gm > 0.0) {
                                    const auto fp = endemic_fixed_point(g, params);
                                    if (fp.outcome ==
                                        FixedPointResult::Outcome::Converged) {
                                        double total = 0.0;
                                        for (double v : fp.p_i_star) total += v;
                                        row.endemic_level_mf =
                                            total / g.node_count();
                                    }
                                } else {
                                    // No uniqueness result to lean on; report
                                    // the long-run level of the iterated map.
                                    const int long_run = static_cast<int>(
                                        std::min<std::int64_t>(spec.horizon, 2000));
                                    const auto tail = mf_total_infected(
                                        g, params, init_pi, long_run);
                                    row.endemic_level_mf =
                                        tail.back() / g.node_count();
                                }
                            }
                        }
                        if (want_mc) {
                            RunOptions ropts;
                            ropts.horizon = spec.horizon;
                            const auto stats = ensemble(
                                g, params, InitSpec::parse(spec.init), ropts,
                                spec.replicas, spec.seed, spec.jobs);
                            row.mc_survival_fraction =
                                1.0 - stats.extinction_fraction;
                        }
                    } catch (const Error& e) {
                        row.error = e.what();
                    }
                    rows.push_back(std::move(row));
                }
    return rows;
}

std::vector<LayerComparisonRow> run_layer_comparison(const ExperimentSpec& spec) {
    spec.validate();
    const Graph g = spec.build_graph();
    const int n = g.node_count();
    const EpidemicParams params{spec.beta.front(), spec.delta.front(),
                                spec.gamma.front(), spec.theta.front(),
                                spec.variant};

    const InitSpec init = InitSpec::parse(spec.init);
    double q;
    switch (init.kind) {
    case InitSpec::Kind::AllInfected: q = 1.0; break;
    case InitSpec::Kind::Fraction: q = init.fraction; break;
    default:
        throw Error("layer comparison needs a marginal-matched start; use "
                    "init 'all' or 'fraction:q'");
    }

    ChainDistribution mu = product_infected(n, q);
    NodeProbs mf(n);
    std::fill(mf.p_i.begin(), mf.p_i.end(), q);

    std::vector<LayerComparisonRow> rows;
    EvolveOptions eopts;
    for (std::int64_t t = 0; t <= spec.horizon; ++t) {
        const MarginalVector exact = marginals(mu, n);
        LayerComparisonRow row;
        row.t = t;
        for (int i = 0; i < n; ++i) {
            row.max_diff_p_i =
                std::max(row.max_diff_p_i, std::abs(exact.p_i[i] - mf.p_i[i]));
            row.max_diff_p_r =
                std::max(row.max_diff_p_r, std::abs(exact.p_r[i] - mf.p_r[i]));
        }
        rows.push_back(row);
        if (t == spec.horizon) break;
        mu = evolve(g, params, mu, 1, eopts).dist;
        mf = step_nonlinear(g, params, mf);
    }
    return rows;
}

std::vector<MixingScalingRow> run_mixing_scaling(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.n_values.empty())
        throw Error("mixing scaling needs n_values in the spec");
    const EpidemicParams params{spec.beta.front(), spec.delta.front(),
                                spec.gamma.front(), spec.theta.front(),
                                spec.variant};

    std::vector<MixingScalingRow> rows;
    for (int n : spec.n_values) {
        const Graph g = graph_from_spec(spec.graph_kind + ":" +
                                        std::to_string(n), spec.seed);
        MixingScalingRow row;
        row.n = n;
        const auto mix = mixing_time(g, params, spec.eps);
        row.t_mix = mix.steps;
        row.converged = mix.converged;
        const auto mb = mixing_time_bound(g, params, spec.eps);
        row.bound = mb.bound;
        row.norm = mb.norm;
        row.bound_valid = mb.valid;
        rows.push_back(row);
    }
    return rows;
}

void write_threshold_sweep_csv(std::ostream& out,
                               const std::vector<ThresholdSweepRow>& rows) {
    out << "beta,delta,gamma,theta,variant,lambda_max,ratio_local,"
           "ratio_global,regime,decay_rate_fit,endemic_level_mf,"
           "mc_survival_fraction,error\n";
    for (const auto& r : rows) {
        fmt_double(out, r.beta);
        out << ',';
        fmt_double(out, r.delta);
        out << ',';
        fmt_double(out, r.gamma);
        out << ',';
        fmt_double(out, r.theta);
        out << ',' << r.variant << ',';
        fmt_double(out, r.lambda_max);
        out << ',';
        fmt_double(out, r.ratio_local);
        out << ',';
        fmt_double(out, r.ratio_global);
        out << ',' << r.regime << ',';
        fmt_double(out, r.decay_rate_fit);
        out << ',';
        fmt_double(out, r.endemic_level_mf);
        out << ',';
        fmt_double(out, r.mc_survival_fraction);
        out << ',' << r.error << '\n';
    }
}

void write_layer_comparison_csv(std::ostream& out,
                                const std::vector<LayerComparisonRow>& rows) {
    out << "t,max_diff_p_i,max_diff_p_r\n";
    for (const auto& r : rows) {
        out << r.t << ',';
        fmt_double(out, r.max_diff_p_i);
        out << ',';
        fmt_double(out, r.max_diff_p_r);
        out << '\n';
    }
}

void write_mixing_scaling_csv(std::ostream& out,
                              const std::vector<MixingScalingRow>& rows) {
    out << "n,t_mix,converged,bound,norm,bound_valid\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.t_mix << ',' << (r.converged ? 1 : 0) << ',';
        fmt_double(out, r.bound);
        out << ',';
        fmt_double(out, r.norm);
        out << ',' << (r.bound_valid ? 1 : 0) << '\n';
    }
}

std::vector<std::filesystem::path> run_experiment_to_files(
    const ExperimentSpec& spec, const std::string& kind) {
    namespace fs = std::filesystem;
    const auto start = std::chrono::steady_clock::now();
    fs::create_directories(spec.output_dir);
    const fs::path dir(spec.output_dir);
    std::vector<fs::path> written;

    auto write_file = [&](const fs::path& p, auto&& body) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error("cannot write " + p.string());
        body(out);
        written.push_back(p);
    };

    if (kind == "threshold_sweep") {
        const auto rows = run_threshold_sweep(spec);
        write_file(dir / (spec.name + "_threshold_sweep.csv"),
                   [&](std::ostream& o) { write_threshold_sweep_csv(o, rows); });
        // One decay curve per grid point, from the mean-field layer.
        const Graph g = spec.build_graph();
        const double init_pi = mf_initial_level(spec.init, g.node_count());
        std::vector<SvgSeries> series;
        for (const auto& r : rows) {
            if (!r.error.empty()) continue;
            const EpidemicParams params{r.beta, r.delta, r.gamma, r.theta,
                                        spec.variant};
            const auto totals = mf_total_infected(
                g, params, init_pi,
                static_cast<int>(std::min<std::int64_t>(spec.horizon, 400)));
            SvgSeries s;
            std::ostringstream label;
            label << "b=" << r.beta << " d=" << r.delta << " t=" << r.theta;
            s.label = label.str();
            for (std::size_t t = 0; t < totals.size(); ++t)
                s.points.emplace_back(static_cast<double>(t),
                                      totals[t] / g.node_count());
            series.push_back(std::move(s));
        }
        write_file(dir / (spec.name + "_trajectories.svg"),
                   [&](std::ostream& o) {
                       write_line_plot(o, spec.name, "t",
                                       "mean-field infected fraction", series);
                   });
    } else if (kind == "layer_comparison") {
        const auto rows = run_layer_comparison(spec);
        write_file(dir / (spec.name + "_layer_comparison.csv"),
                   [&](std::ostream& o) { write_layer_comparison_csv(o, rows); });
        SvgSeries si{"max |p_I exact - mean-field|", {}};
        SvgSeries sr{"max |p_R exact - mean-field|", {}};
        for (const auto& r : rows) {
            si.points.emplace_back(static_cast<double>(r.t), r.max_diff_p_i);
            sr.points.emplace_back(static_cast<double>(r.t), r.max_diff_p_r);
        }
        write_file(dir / (spec.name + "_layer_comparison.svg"),
                   [&](std::ostream& o) {
                       write_line_plot(o, spec.name, "t", "discrepancy",
                                       {si, sr});
                   });
    } else if (kind == "mixing_scaling") {
        const auto rows = run_mixing_scaling(spec);
        write_file(dir / (spec.name + "_mixing_scaling.csv"),
                   [&](std::ostream& o) { write_mixing_scaling_csv(o, rows); });
        SvgSeries measured{"measured t_mix", {}};
        SvgSeries bound{"theorem bound", {}};
        for (const auto& r : rows) {
            if (r.converged)
                measured.points.emplace_back(r.n, r.t_mix);
            if (r.bound_valid)
                bound.points.emplace_back(r.n, r.bound);
        }
        write_file(dir / (spec.name + "_mixing_scaling.svg"),
                   [&](std::ostream& o) {
                       write_line_plot(o, spec.name, "n", "steps",
                                       {measured, bound});
                   });
    } else {
        throw Error("unknown experiment kind '" + kind +
                    "' (threshold_sweep, layer_comparison, mixing_scaling)");
    }

    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    const std::string spec_text = spec.to_json_text();
    json meta;
    meta["name"] = spec.name;
    meta["kind"] = kind;
    meta["spec"] = json::parse(spec_text);
    meta["spec_hash"] = fnv1a(spec_text);
    meta["version"] = kVersion;
    meta["wall_time_seconds"] = elapsed;
    write_file(dir / (spec.name + "_meta.json"), [&](std::ostream& o) {
        o << meta.dump(2) << '\n';
    });
    return written;
}

} // namespace netsirs
