#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "weakprobe/analysis.hpp"
#include "weakprobe/detector.hpp"
#include "weakprobe/qubit.hpp"
#include "weakprobe/tomography.hpp"

namespace weakprobe {

// All knobs for the four experiment runners. Values come from a flat
// key=value config file, overridden by same-named CLI flags.
struct ExperimentConfig {
    std::string experiment; // fig2 | fig3 | tomo | traj
    std::vector<double> g_values;
    std::vector<double> beta_values;
    std::vector<std::string> init_states;
    std::size_t n_runs = 200;
    double duration_tau = 10.0; // measurement duration in units of tau_m
    double energy = 1.0;
    double delta_t = 0.01;
    double sigma = 1.0;
    double bin_width = 0.1;
    double bin_range_sigmas = 6.0;
    std::uint64_t master_seed = 20100401;
    std::string out_dir = "out";
    int workers = 1;
    // fig3 duration grid, in units of tau_m
    double duration_min_tau = 0.5;
    double duration_max_tau = 20.0;
    int duration_points = 20;

    void validate() const;
};

ExperimentConfig default_config(const std::string& experiment);

// Flat key=value file; '#' starts a comment. Unknown keys are rejected.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

// "L", "R", "ground", "excited", "+x", or explicit "r,theta,phi".
DensityMatrix parse_initial_state(const std::string& spec, const QubitParams& qp);
BlochVector bloch_of_state_spec(const std::string& spec, const QubitParams& qp);

// ---- experiment results (in-memory; CSV/JSON writers live in the CLI path)

struct OutcomeRow {
    std::size_t run_index;
    BlochVector basis;  // canonical axis
    double fidelity;
    BlochVector result; // inferred pre-measurement state direction
    double w1;
    bool degenerate;
};

struct Fig2Group {
    double g;
    std::string init;
    std::vector<OutcomeRow> rows;
};

struct Fig3Curve {
    double beta;
    std::vector<double> duration_tau;    // grid in units of tau_m
    std::vector<double> mean_fidelity;
    std::vector<double> std_error;
};

struct TomoStateReport {
    std::string init;
    BlochVector true_bloch;
    TomographyEstimate estimate;
    std::size_t excluded;
    double bloch_error; // Euclidean distance of Cartesian Bloch vectors
    bool moment_warning;
};

struct TrajStep {
    std::size_t step_index;
    std::uint32_t bin_index;
    double bin_center;
    BlochVector state;
    double running_fidelity;
};

std::vector<Fig2Group> run_fig2(const ExperimentConfig& cfg);
std::vector<Fig3Curve> run_fig3(const ExperimentConfig& cfg);
std::vector<TomoStateReport> run_tomo(const ExperimentConfig& cfg);
std::vector<TrajStep> run_traj(const ExperimentConfig& cfg);

// CSV/JSON emission (deterministic %.17g formatting, '#' header block
// with the full parameter snapshot).
void write_fig2_csv(const ExperimentConfig& cfg, const std::vector<Fig2Group>& groups);
void write_fig3_csv(const ExperimentConfig& cfg, const std::vector<Fig3Curve>& curves);
void write_tomo_json(const ExperimentConfig& cfg, const std::vector<TomoStateReport>& reports);
void write_traj_csv(const ExperimentConfig& cfg, const std::vector<TrajStep>& steps);

// Runs the experiment named in cfg and writes its outputs under cfg.out_dir.
void run_and_write(const ExperimentConfig& cfg);

} // namespace weakprobe
