// Command-line front end: every layer of the model stack behind one binary.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "netsirs/chain.hpp"
#include "netsirs/error.hpp"
#include "netsirs/experiments.hpp"
#include "netsirs/graph.hpp"
#include "netsirs/meanfield.hpp"
#include "netsirs/montecarlo.hpp"
#include "netsirs/svg.hpp"
#include "netsirs/version.hpp"

namespace {

using namespace netsirs;
using nlohmann::json;

struct GraphSource {
    std::string spec;  // generator spec
    std::string edges; // edge-list path

    Graph build(std::uint64_t seed) const {
        const bool have_spec = !spec.empty();
        const bool have_edges = !edges.empty();
        if (have_spec == have_edges)
            throw Error("give exactly one graph source: --graph or --edges");
        if (have_spec) return graph_from_spec(spec, seed);
        std::ifstream in(edges);
        if (!in) throw Error("cannot open edge list " + edges);
        return load_edge_list(in);
    }
};

struct RateFlags {
    EpidemicParams params;
    std::string variant_name = "sirs";

    EpidemicParams resolve() const {
        EpidemicParams p = params;
        p.variant = variant_from_string(variant_name);
        p.validate();
        return p;
    }
};

struct CommonFlags {
    GraphSource graph;
    RateFlags rates;
    std::uint64_t seed = 1;
    int jobs = 0; // 0 = available cores
};

void add_graph_flags(CLI::App* cmd, GraphSource& g) {
    cmd->add_option("--graph", g.spec,
                    "generator spec: complete:N | path:N | star:N | cycle:N | er:N:P");
    cmd->add_option("--edges", g.edges, "edge-list file (one edge per line)");
}

void add_rate_flags(CLI::App* cmd, RateFlags& r) {
    cmd->add_option("--beta", r.params.beta, "infection probability per link");
    cmd->add_option("--delta", r.params.delta, "recovery probability");
    cmd->add_option("--gamma", r.params.gamma, "immunity-loss probability");
    cmd->add_option("--theta", r.params.theta, "vaccination probability");
    cmd->add_option("--variant", r.variant_name,
                    "sirs | infection_dominant | vaccination_dominant");
}

// Config file carries ExperimentSpec field names; explicit flags win.
void apply_config(CLI::App* cmd, const std::string& config_path,
                  CommonFlags& c) {
    if (config_path.empty()) return;
    const auto spec = ExperimentSpec::from_json_file(config_path);
    auto absent = [&](const std::string& flag) {
        auto* opt = cmd->get_option_no_throw(flag);
        return opt != nullptr && opt->count() == 0;
    };
    if (absent("--graph") && absent("--edges")) c.graph.spec = spec.graph;
    if (absent("--beta")) c.rates.params.beta = spec.beta.front();
    if (absent("--delta")) c.rates.params.delta = spec.delta.front();
    if (absent("--gamma")) c.rates.params.gamma = spec.gamma.front();
    if (absent("--theta")) c.rates.params.theta = spec.theta.front();
    if (absent("--variant")) c.rates.variant_name = to_string(spec.variant);
    if (absent("--seed")) c.seed = spec.seed;
    if (absent("--jobs")) c.jobs = spec.jobs;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    return out;
}

int effective_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr - buf);
}

json threshold_to_json(const ThresholdReport& t) {
    json j;
    j["ratio_local"] = t.ratio_local;
    j["ratio_global"] = t.ratio_global;
    j["regime"] = to_string(t.regime);
    j["beta"] = t.beta;
    j["delta"] = t.delta;
    j["lambda_max"] = t.lambda_max;
    j["susceptible_factor"] = t.susceptible_factor;
    j["one_minus_theta"] = t.one_minus_theta;
    return j;
}

json fixed_point_to_json(const FixedPointResult& r) {
    json j;
    j["p_i_star"] = r.p_i_star;
    j["p_r_star"] = r.p_r_star;
    j["residual"] = r.residual;
    j["outcome"] = to_string(r.outcome);
    j["cycle_period"] = r.cycle_period;
    j["iterations"] = r.iterations;
    return j;
}

ChainDistribution initial_chain_distribution(const std::string& init, int n) {
    if (init == "all_s") return ChainDistribution::point_mass(0);
    if (init.rfind("code:", 0) == 0) {
        StateCode code = 0;
        const std::string num = init.substr(5);
        auto [p, e] = std::from_chars(num.data(), num.data() + num.size(), code);
        if (e != std::errc() || code >= chaincode::state_count(n))
            throw Error("bad state code '" + num + "'");
        return ChainDistribution::point_mass(code);
    }
    const InitSpec spec = InitSpec::parse(init);
    switch (spec.kind) {
    case InitSpec::Kind::AllInfected:
        return ChainDistribution::point_mass(chaincode::uniform(Health::I, n));
    case InitSpec::Kind::OneRandomInfected:
        // Deterministic surrogate: node 0 infected.
        return ChainDistribution::point_mass(1);
    case InitSpec::Kind::Fraction: {
        // Product distribution with per-node infection weight q.
        std::vector<ChainDistribution::Entry> entries{{0, 1.0}};
        StateCode pow3 = 1;
        for (int i = 0; i < n; ++i) {
            const std::size_t sz = entries.size();
            for (std::size_t k = 0; k < sz; ++k) {
                if (spec.fraction > 0.0)
                    entries.emplace_back(entries[k].first + pow3,
                                         entries[k].second * spec.fraction);
                entries[k].second *= 1.0 - spec.fraction;
            }
            pow3 *= 3;
        }
        return ChainDistribution::from_entries(std::move(entries));
    }
    }
    throw Error("unsupported init spec");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIRS / SIV epidemics on graphs: exact chain, mean-field and "
                 "Monte Carlo layers"};
    app.set_version_flag("--version", std::string("netsirs ") + kVersion);
    app.require_subcommand(1);

    CommonFlags c;
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config with experiment-spec field names; flags override")
        ->expected(1);
    app.add_option("--seed", c.seed, "RNG seed");
    app.add_option("--jobs", c.jobs, "worker cap (default: available cores)");

    // graph gen | info ------------------------------------------------------
    auto* graph_cmd = app.add_subcommand("graph", "generate or inspect graphs");
    graph_cmd->require_subcommand(1);
    auto* gen = graph_cmd->add_subcommand("gen", "write an edge list");
    add_graph_flags(gen, c.graph);
    std::string gen_out = "graph.edges";
    gen->add_option("--out", gen_out, "output edge-list path");
    auto* info = graph_cmd->add_subcommand("info", "node/edge/spectral summary");
    add_graph_flags(info, c.graph);
    double info_tol = 1e-12;
    info->add_option("--tol", info_tol, "power-iteration tolerance");

    // threshold -------------------------------------------------------------
    auto* thr_cmd = app.add_subcommand("threshold", "spectral threshold report");
    add_graph_flags(thr_cmd, c.graph);
    add_rate_flags(thr_cmd, c.rates);
    std::string thr_json;
    thr_cmd->add_option("--json", thr_json, "write the report as JSON");

    // meanfield run | fixed-point --------------------------------------------
    auto* mf_cmd = app.add_subcommand("meanfield", "2n-state nonlinear map");
    mf_cmd->require_subcommand(1);
    auto* mf_run = mf_cmd->add_subcommand("run", "iterate the map, write CSV");
    add_graph_flags(mf_run, c.graph);
    add_rate_flags(mf_run, c.rates);
    std::int64_t mf_steps = 100;
    std::string mf_init = "fraction:0.05";
    std::string mf_out = "meanfield.csv";
    bool mf_linear = false;
    mf_run->add_option("--steps", mf_steps, "number of map applications");
    mf_run->add_option("--init", mf_init, "one_random | all | fraction:q");
    mf_run->add_option("--out", mf_out, "trajectory CSV path");
    mf_run->add_flag("--linear", mf_linear, "iterate the linearized map instead");
    auto* mf_fp = mf_cmd->add_subcommand("fixed-point", "endemic fixed point");
    add_graph_flags(mf_fp, c.graph);
    add_rate_flags(mf_fp, c.rates);
    EndemicOptions fp_opts;
    int fp_starts = 1;
    std::string fp_json;
    mf_fp->add_option("--tol", fp_opts.tol, "map-residual tolerance");
    mf_fp->add_option("--max-iter", fp_opts.max_iter, "iteration budget");
    mf_fp->add_option("--damping", fp_opts.damping, "initial step blend");
    bool fp_no_adaptive = false;
    mf_fp->add_flag("--no-adaptive-damping", fp_no_adaptive,
                    "keep the step blend fixed");
    mf_fp->add_option("--starts", fp_starts, "multi-start uniqueness probe");
    mf_fp->add_option("--json", fp_json, "write the result as JSON");

    // exact ... --------------------------------------------------------------
    auto* ex_cmd = app.add_subcommand("exact", "3^n-state Markov chain");
    ex_cmd->require_subcommand(1);
    auto* ex_evolve = ex_cmd->add_subcommand("evolve", "push a distribution");
    add_graph_flags(ex_evolve, c.graph);
    add_rate_flags(ex_evolve, c.rates);
    int ev_steps = 10;
    std::string ev_init = "all_infected";
    std::string ev_out = "distribution.csv";
    double ev_prune = 1e-15;
    ex_evolve->add_option("--steps", ev_steps, "number of steps");
    ex_evolve->add_option("--init", ev_init,
                          "all_infected | all_s | fraction:q | code:K");
    ex_evolve->add_option("--prune-tol", ev_prune, "per-entry prune threshold");
    ex_evolve->add_option("--out", ev_out, "distribution CSV path");
    auto* ex_mix = ex_cmd->add_subcommand("mixing-time", "TV mixing time");
    add_graph_flags(ex_mix, c.graph);
    add_rate_flags(ex_mix, c.rates);
    double mix_eps = 0.25;
    int mix_budget = 5000;
    ex_mix->add_option("--eps", mix_eps, "total-variation target");
    ex_mix->add_option("--budget", mix_budget, "step budget");
    auto* ex_stat = ex_cmd->add_subcommand("stationary", "stationary distribution");
    add_graph_flags(ex_stat, c.graph);
    add_rate_flags(ex_stat, c.rates);
    std::string stat_out = "stationary.csv";
    ex_stat->add_option("--out", stat_out, "distribution CSV path");
    auto* ex_dom = ex_cmd->add_subcommand("verify-domination",
                                          "linear bound on exact marginals");
    add_graph_flags(ex_dom, c.graph);
    add_rate_flags(ex_dom, c.rates);
    int dom_steps = 50;
    std::string dom_init = "all_infected";
    ex_dom->add_option("--steps", dom_steps, "steps to verify");
    ex_dom->add_option("--init", dom_init, "start distribution");

    // mc run | ensemble -------------------------------------------------------
    auto* mc_cmd = app.add_subcommand("mc", "agent-based Monte Carlo");
    mc_cmd->require_subcommand(1);
    auto* mc_run = mc_cmd->add_subcommand("run", "single trajectory CSV");
    add_graph_flags(mc_run, c.graph);
    add_rate_flags(mc_run, c.rates);
    RunOptions run_opts;
    std::string mc_init = "one_random";
    std::string mc_out = "trajectory.csv";
    mc_run->add_option("--horizon", run_opts.horizon, "steps to simulate");
    mc_run->add_flag("--stop-at-extinction", run_opts.stop_at_extinction,
                     "stop once no node is infected");
    mc_run->add_option("--init", mc_init, "one_random | all | fraction:q");
    mc_run->add_option("--out", mc_out, "trajectory CSV path");
    auto* mc_ens = mc_cmd->add_subcommand("ensemble", "replica aggregate CSV");
    add_graph_flags(mc_ens, c.graph);
    add_rate_flags(mc_ens, c.rates);
    int ens_runs = 20;
    std::string ens_out = "ensemble.csv";
    std::int64_t ens_horizon = 100;
    std::string ens_init = "one_random";
    mc_ens->add_option("--runs", ens_runs, "number of replicas");
    mc_ens->add_option("--horizon", ens_horizon, "steps per replica");
    mc_ens->add_option("--init", ens_init, "one_random | all | fraction:q");
    mc_ens->add_option("--out", ens_out, "aggregate CSV path");

    // experiment --------------------------------------------------------------
    auto* exp_cmd = app.add_subcommand("experiment", "run a JSON experiment spec");
    std::string exp_spec_path;
    std::string exp_kind = "threshold_sweep";
    exp_cmd->add_option("spec", exp_spec_path, "experiment spec JSON path")
        ->required();
    exp_cmd->add_option("--kind", exp_kind,
                        "threshold_sweep | layer_comparison | mixing_scaling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        apply_config(&app, config_path, c);

        if (gen->parsed()) {
            const Graph g = c.graph.build(c.seed);
            auto out = open_out(gen_out);
            save_edge_list(g, out);
            std::cout << "wrote " << gen_out << ": n=" << g.node_count()
                      << " edges=" << g.edge_count() << "\n";
        } else if (info->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto rep = spectral_radius(g, info_tol);
            std::cout << "nodes " << g.node_count() << "\nedges "
                      << g.edge_count() << "\nmax_degree " << g.max_degree()
                      << "\navg_degree " << fmt(g.average_degree())
                      << "\nlambda_max " << fmt(rep.lambda_max)
                      << " (iterations " << rep.iterations << ", residual "
                      << fmt(rep.residual) << ")\ncomponents "
                      << rep.components << "\n";
            if (rep.disconnected)
                std::cout << "warning: graph is disconnected; lambda_max is "
                             "the maximum over components\n";
        } else if (thr_cmd->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            const auto rep =
                threshold_report(params, spectral_radius(g).lambda_max);
            std::cout << "lambda_max " << fmt(rep.lambda_max)
                      << "\nratio_local " << fmt(rep.ratio_local)
                      << "\nratio_global " << fmt(rep.ratio_global)
                      << "\nregime " << to_string(rep.regime) << "\n";
            if (!thr_json.empty()) {
                auto out = open_out(thr_json);
                out << threshold_to_json(rep).dump(2) << '\n';
            }
        } else if (mf_run->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            const int n = g.node_count();
            const InitSpec init = InitSpec::parse(mf_init);
            NodeProbs s(n);
            double q = 0.0;
            switch (init.kind) {
            case InitSpec::Kind::AllInfected: q = 1.0; break;
            case InitSpec::Kind::OneRandomInfected: q = 1.0 / n; break;
            case InitSpec::Kind::Fraction: q = init.fraction; break;
            }
            std::fill(s.p_i.begin(), s.p_i.end(), q);
            const LinearModel model =
                mf_linear ? make_linear_model(g, params) : LinearModel{};
            auto out = open_out(mf_out);
            out << "t,mean_p_s,mean_p_i,mean_p_r\n";
            for (std::int64_t t = 0; t <= mf_steps; ++t) {
                double si = 0.0, sr = 0.0;
                for (int i = 0; i < n; ++i) {
                    si += s.p_i[i];
                    sr += s.p_r[i];
                }
                out << t << ',' << fmt(1.0 - (si + sr) / n) << ','
                    << fmt(si / n) << ',' << fmt(sr / n) << '\n';
                if (t == mf_steps) break;
                s = mf_linear ? step_linear(model, s)
                              : step_nonlinear(g, params, s);
            }
            std::cout << "wrote " << mf_out << "\n";
        } else if (mf_fp->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            fp_opts.adaptive_damping = !fp_no_adaptive;
            FixedPointResult result;
            if (fp_starts > 1) {
                const auto multi =
                    endemic_multi_start(g, params, fp_starts, c.seed, fp_opts);
                result = multi.consensus;
                std::cout << "starts " << multi.starts << " converged "
                          << multi.converged << " max_spread "
                          << fmt(multi.max_spread) << "\n";
            } else {
                result = endemic_fixed_point(g, params, fp_opts);
            }
            double mean_pi = 0.0;
            for (double v : result.p_i_star) mean_pi += v;
            mean_pi /= g.node_count();
            std::cout << "outcome " << to_string(result.outcome);
            if (result.outcome == FixedPointResult::Outcome::CycleDetected)
                std::cout << " (period " << result.cycle_period << ")";
            std::cout << "\nmean_p_i_star " << fmt(mean_pi) << "\nresidual "
                      << fmt(result.residual) << "\niterations "
                      << result.iterations << "\n";
            if (!fp_json.empty()) {
                auto out = open_out(fp_json);
                out << fixed_point_to_json(result).dump(2) << '\n';
            }
            if (result.outcome != FixedPointResult::Outcome::Converged)
                return 1;
        } else if (ex_evolve->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            EvolveOptions opts;
            opts.prune_tol = ev_prune;
            const auto mu0 =
                initial_chain_distribution(ev_init, g.node_count());
            const auto res = evolve(g, params, mu0, ev_steps, opts);
            auto out = open_out(ev_out);
            res.dist.to_csv(out);
            double pruned = 0.0;
            for (const auto& s : res.steps) pruned += s.pruned_mass;
            std::cout << "wrote " << ev_out << ": support "
                      << res.dist.support_size() << ", pruned mass "
                      << fmt(pruned) << "\n";
        } else if (ex_mix->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            MixingOptions opts;
            opts.step_budget = mix_budget;
            const auto res = mixing_time(g, params, mix_eps, opts);
            const auto bound = mixing_time_bound(g, params, mix_eps);
            if (!res.converged) {
                std::cout << "budget " << mix_budget
                          << " exhausted at TV " << fmt(res.tv)
                          << ": slow mixing suspected\n";
                return 1;
            }
            std::cout << "t_mix " << res.steps << "\ntv " << fmt(res.tv)
                      << "\nbound "
                      << (bound.valid ? fmt(bound.bound) : "n/a (norm >= 1)")
                      << "\nnorm " << fmt(bound.norm) << "\n";
        } else if (ex_stat->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            const auto pi = stationary_distribution(g, params);
            auto out = open_out(stat_out);
            pi.to_csv(out);
            std::cout << "wrote " << stat_out << ": support "
                      << pi.support_size() << "\n";
        } else if (ex_dom->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            const auto mu0 =
                initial_chain_distribution(dom_init, g.node_count());
            const auto rep =
                verify_linear_domination(g, params, mu0, dom_steps);
            std::cout << "steps " << rep.steps << "\nmin_slack_infected "
                      << fmt(rep.min_slack_infected) << "\n";
            if (rep.min_slack_joint)
                std::cout << "min_slack_joint " << fmt(*rep.min_slack_joint)
                          << "\n";
            if (rep.min_slack_infected < -1e-10) {
                std::cout << "domination violated beyond tolerance\n";
                return 1;
            }
        } else if (mc_run->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            const auto traj =
                run(g, params, InitSpec::parse(mc_init), run_opts, c.seed);
            auto out = open_out(mc_out);
            traj.to_csv(out);
            std::cout << "wrote " << mc_out;
            if (traj.extinction_step)
                std::cout << " (extinct at t=" << *traj.extinction_step << ")";
            std::cout << "\n";
        } else if (mc_ens->parsed()) {
            const Graph g = c.graph.build(c.seed);
            const auto params = c.rates.resolve();
            RunOptions opts;
            opts.horizon = ens_horizon;
            const auto stats =
                ensemble(g, params, InitSpec::parse(ens_init), opts, ens_runs,
                         c.seed, effective_jobs(c.jobs));
            auto out = open_out(ens_out);
            stats.to_csv(out);
            std::cout << "wrote " << ens_out << ": extinction_fraction "
                      << fmt(stats.extinction_fraction) << "\n";
        } else if (exp_cmd->parsed()) {
            auto spec = ExperimentSpec::from_json_file(exp_spec_path);
            if (c.jobs > 0) spec.jobs = c.jobs;
            const auto files = run_experiment_to_files(spec, exp_kind);
            for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
