#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netsirs/graph.hpp"
#include "netsirs/params.hpp"

namespace netsirs {

/// Declarative description of a scripted experiment. Rate fields are grids;
/// a sweep visits their cartesian product. Loadable from JSON with the same
/// field names.
struct ExperimentSpec {
    std::string name = "experiment";
    /// Generator spec ("er:500:0.02", "complete:10", ...) or "@path" to an
    /// edge-list file.
    std::string graph = "er:500:0.02";
    Variant variant = Variant::Sirs;
    std::vector<double> beta{0.02};
    std::vector<double> delta{0.5};
    std::vector<double> gamma{0.5};
    std::vector<double> theta{0.0};
    std::vector<std::string> layers{"meanfield", "montecarlo"};
    std::int64_t horizon = 2000;
    int replicas = 20;
    std::uint64_t seed = 1;
    std::string init = "fraction:0.05";
    double eps = 0.25;             ///< mixing-time target
    std::vector<int> n_values;     ///< graph sizes for the mixing scan
    std::string graph_kind = "path"; ///< family used by the mixing scan
    std::string output_dir = ".";
    int jobs = 1;

    static ExperimentSpec from_json_file(const std::filesystem::path& path);
    static ExperimentSpec from_json_text(const std::string& text);
    std::string to_json_text() const;

    Graph build_graph() const;
    void validate() const; ///< every grid point must pass params validation
};

struct ThresholdSweepRow {
    double beta = 0, delta = 0, gamma = 0, theta = 0;
    std::string variant;
    double lambda_max = 0;
    double ratio_local = 0, ratio_global = 0;
    std::string regime;
    double decay_rate_fit = 0;    ///< log-linear slope of total P_I, steps 10..100
    double endemic_level_mf = 0;  ///< mean endemic P_I (solver for SIRS, long-run map otherwise)
    double mc_survival_fraction = 0;
    std::string error;            ///< non-empty when a layer failed at this point
};

struct LayerComparisonRow {
    std::int64_t t = 0;
    double max_diff_p_i = 0;
    double max_diff_p_r = 0;
};

struct MixingScalingRow {
    int n = 0;
    int t_mix = 0;
    bool converged = false; ///< false: budget exhausted, slow mixing suspected
    double bound = 0;
    double norm = 0;
    bool bound_valid = false;
};

std::vector<ThresholdSweepRow> run_threshold_sweep(const ExperimentSpec& spec);
std::vector<LayerComparisonRow> run_layer_comparison(const ExperimentSpec& spec);
std::vector<MixingScalingRow> run_mixing_scaling(const ExperimentSpec& spec);

/// Runs the experiment named by the spec (threshold_sweep, layer_comparison
/// or mixing_scaling selected by `kind`), writes one CSV per table, one SVG
/// per plot and a JSON metadata record into output_dir. Returns the list of
/// files written.
std::vector<std::filesystem::path> run_experiment_to_files(
    const ExperimentSpec& spec, const std::string& kind);

void write_threshold_sweep_csv(std::ostream& out,
                               const std::vector<ThresholdSweepRow>& rows);
void write_layer_comparison_csv(std::ostream& out,
                                const std::vector<LayerComparisonRow>& rows);
void write_mixing_scaling_csv(std::ostream& out,
                              const std::vector<MixingScalingRow>& rows);

} // namespace netsirs
