#include "weakprobe/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "weakprobe/trajectory.hpp"

namespace weakprobe {

namespace {

constexpr const char* kVersion = "weakprobe 1.0.0";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw ConfigError("empty numeric list");
    return out;
}

std::vector<std::string> parse_string_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    if (out.empty()) throw ConfigError("empty state list");
    return out;
}

std::size_t steps_for(double duration_tau, double tau_m, double delta_t) {
    const auto n = static_cast<std::size_t>(
        std::llround(duration_tau * tau_m / delta_t));
    return std::max<std::size_t>(n, 1);
}

// Static index partition; slots are written by index so the worker count
// never changes the merged result.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(workers, n);
    const std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            const std::size_t end = std::min(n, (t + 1) * chunk);
            for (std::size_t i = t * chunk; i < end; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

OutcomeRow outcome_row(std::size_t run_index, const MeasurementOutcome& out) {
    OutcomeRow row;
    row.run_index = run_index;
    row.basis = out.basis_angles;
    row.fidelity = out.fidelity;
    row.result = out.degenerate ? bloch_from_state(out.psi1)
                                : result_direction(out);
    row.w1 = out.w1;
    row.degenerate = out.degenerate;
    return row;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '/' || c == ' ') c = '-';
    }
    return s;
}

void write_header(std::ofstream& f, const ExperimentConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>& extra) {
    f << "# " << kVersion << "\n";
    f << "# experiment = " << cfg.experiment << "\n";
    for (const auto& [k, v] : extra) f << "# " << k << " = " << v << "\n";
    f << "# energy = " << fmt(cfg.energy) << "\n";
    f << "# delta_t = " << fmt(cfg.delta_t) << "\n";
    f << "# sigma = " << fmt(cfg.sigma) << "\n";
    f << "# bin_width = " << fmt(cfg.bin_width) << "\n";
    f << "# bin_range_sigmas = " << fmt(cfg.bin_range_sigmas) << "\n";
    f << "# master_seed = " << cfg.master_seed << "\n";
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.out_dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path);
    return f;
}

} // namespace

void ExperimentConfig::validate() const {
    if (experiment != "fig2" && experiment != "fig3" && experiment != "tomo" &&
        experiment != "traj")
        throw ConfigError("unknown experiment: " + experiment);
    if (!(energy > 0.0) || !(delta_t > 0.0) || !(sigma > 0.0) ||
        !(bin_width > 0.0) || !(bin_range_sigmas > 0.0))
        throw ConfigError("physical parameters must be positive");
    if (g_values.empty() || beta_values.empty() || init_states.empty())
        throw ConfigError("g, beta and init lists must be non-empty");
    for (double g : g_values)
        if (!(g > 0.0)) throw ConfigError("g must be positive");
    if (n_runs < 1) throw ConfigError("n_runs must be >= 1");
    if (!(duration_tau > 0.0)) throw ConfigError("duration must be positive");
    if (duration_points < 1) throw ConfigError("duration_points must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (double g : g_values) {
        const double tau_m = 2.0 * kPi * g / energy;
        if (steps_for(duration_tau, tau_m, delta_t) < 1)
            throw ConfigError("duration yields zero steps");
    }
}

ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (const char* env = std::getenv("WEAKPROBE_WORKERS")) {
        cfg.workers = std::max(1, std::atoi(env));
    }
    if (experiment == "fig2") {
        cfg.g_values = {0.01, 0.2, 5.0};
        cfg.beta_values = {kPi / 4.0};
        cfg.init_states = {"L", "ground"};
        cfg.n_runs = 200;
    } else if (experiment == "fig3") {
        cfg.g_values = {5.0};
        cfg.beta_values = {0.0, kPi / 4.0, kPi / 2.0};
        cfg.init_states = {"L"};
        cfg.n_runs = 500;
    } else if (experiment == "tomo") {
        cfg.g_values = {5.0};
        cfg.beta_values = {kPi / 4.0};
        cfg.init_states = {"ground", "L", "+x"};
        cfg.n_runs = 1000;
    } else if (experiment == "traj") {
        cfg.g_values = {5.0};
        cfg.beta_values = {kPi / 4.0};
        cfg.init_states = {"L"};
        cfg.n_runs = 1;
    } else {
        throw ConfigError("unknown experiment: " + experiment);
    }
    return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
    try {
        if (key == "g") cfg.g_values = parse_double_list(value);
        else if (key == "beta") cfg.beta_values = parse_double_list(value);
        else if (key == "init") cfg.init_states = parse_string_list(value);
        else if (key == "n_runs") cfg.n_runs = std::stoull(value);
        else if (key == "duration") cfg.duration_tau = std::stod(value);
        else if (key == "E") cfg.energy = std::stod(value);
        else if (key == "delta_t") cfg.delta_t = std::stod(value);
        else if (key == "sigma") cfg.sigma = std::stod(value);
        else if (key == "delta_i") cfg.bin_width = std::stod(value);
        else if (key == "bin_range_sigmas") cfg.bin_range_sigmas = std::stod(value);
        else if (key == "seed") cfg.master_seed = std::stoull(value);
        else if (key == "out") cfg.out_dir = value;
        else if (key == "workers") cfg.workers = std::stoi(value);
        else if (key == "duration_min") cfg.duration_min_tau = std::stod(value);
        else if (key == "duration_max") cfg.duration_max_tau = std::stod(value);
        else if (key == "duration_points") cfg.duration_points = std::stoi(value);
        else throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for key '" + key + "': " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("value out of range for key '" + key + "': " + value);
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

BlochVector bloch_of_state_spec(const std::string& spec, const QubitParams& qp) {
    const ChargeStates cs = charge_states(qp);
    if (spec == "L") return bloch_from_state(cs.state_L);
    if (spec == "R") return bloch_from_state(cs.state_R);
    if (spec == "ground" || spec == "0") return {1.0, 0.0, 0.0};
    if (spec == "excited" || spec == "1") return {1.0, kPi, 0.0};
    if (spec == "+x") return {1.0, kPi / 2.0, 0.0};
    std::vector<double> v;
    try {
        v = parse_double_list(spec);
    } catch (const std::exception&) {
        throw ConfigError("unrecognized initial state spec: " + spec);
    }
    if (v.size() != 3)
        throw ConfigError("initial state spec must be a name or r,theta,phi: " +
                          spec);
    if (v[0] < 0.0 || v[0] > 1.0 + 1e-12)
        throw ConfigError("initial state r must be in [0,1]");
    return {v[0], v[1], wrap_phi(v[2])};
}

DensityMatrix parse_initial_state(const std::string& spec,
                                  const QubitParams& qp) {
    const BlochVector bv = bloch_of_state_spec(spec, qp);
    return density_from_direction(bv.r, dir_from_bloch(bv));
}

std::vector<Fig2Group> run_fig2(const ExperimentConfig& cfg) {
    cfg.validate();
    const double beta = cfg.beta_values.front();
    std::vector<Fig2Group> groups;
    std::uint64_t group_id = 0;
    for (double g : cfg.g_values) {
        const QubitParams qp(cfg.energy, beta);
        DetectorParams dp = calibrate(g, cfg.energy, cfg.delta_t, cfg.sigma);
        dp.bin_width = cfg.bin_width;
        dp.bin_range_sigmas = cfg.bin_range_sigmas;
        const BinSet bins = build_bins(dp, qp);
        const double tau_m = measurement_time(dp);
        const std::size_t n_steps = steps_for(cfg.duration_tau, tau_m, cfg.delta_t);
        const double duration = static_cast<double>(n_steps) * cfg.delta_t;
        for (const std::string& init : cfg.init_states) {
            const DensityMatrix rho0 = parse_initial_state(init, qp);
            Fig2Group grp;
            grp.g = g;
            grp.init = init;
            grp.rows.resize(cfg.n_runs);
            const std::uint64_t base = group_id << 32;
            parallel_for(cfg.n_runs, cfg.workers, [&](std::size_t j) {
                TrajectoryResult tr = run_trajectory(
                    rho0, duration, bins, qp, cfg.delta_t, cfg.master_seed,
                    base + j);
                grp.rows[j] = outcome_row(j, analyze(tr.propagator));
            });
            groups.push_back(std::move(grp));
            ++group_id;
        }
    }
    return groups;
}

std::vector<Fig3Curve> run_fig3(const ExperimentConfig& cfg) {
    cfg.validate();
    const double g = cfg.g_values.front();
    std::vector<Fig3Curve> curves;
    for (std::size_t bi = 0; bi < cfg.beta_values.size(); ++bi) {
        const double beta = cfg.beta_values[bi];
        const QubitParams qp(cfg.energy, beta);
        DetectorParams dp = calibrate(g, cfg.energy, cfg.delta_t, cfg.sigma);
        dp.bin_width = cfg.bin_width;
        dp.bin_range_sigmas = cfg.bin_range_sigmas;
        const BinSet bins = build_bins(dp, qp);
        const double tau_m = measurement_time(dp);
        const DensityMatrix rho0 =
            parse_initial_state(cfg.init_states.front(), qp);

        Fig3Curve curve;
        curve.beta = beta;
        const int np = cfg.duration_points;
        curve.duration_tau.resize(np);
        curve.mean_fidelity.resize(np);
        curve.std_error.resize(np);
        for (int p = 0; p < np; ++p) {
            curve.duration_tau[p] =
                np == 1 ? cfg.duration_min_tau
                        : cfg.duration_min_tau +
                              (cfg.duration_max_tau - cfg.duration_min_tau) *
                                  static_cast<double>(p) / (np - 1);
            const std::size_t n_steps =
                steps_for(curve.duration_tau[p], tau_m, cfg.delta_t);
            const double duration = static_cast<double>(n_steps) * cfg.delta_t;
            std::vector<double> fid(cfg.n_runs);
            const std::uint64_t base =
                (static_cast<std::uint64_t>(bi) << 44) |
                (static_cast<std::uint64_t>(p) << 24);
            parallel_for(cfg.n_runs, cfg.workers, [&](std::size_t j) {
                TrajectoryResult tr = run_trajectory(
                    rho0, duration, bins, qp, cfg.delta_t, cfg.master_seed,
                    base + j);
                fid[j] = analyze(tr.propagator).fidelity;
            });
            double mean = 0.0;
            for (double f : fid) mean += f;
            mean /= static_cast<double>(fid.size());
            double var = 0.0;
            for (double f : fid) var += (f - mean) * (f - mean);
            var /= static_cast<double>(fid.size() > 1 ? fid.size() - 1 : 1);
            curve.mean_fidelity[p] = mean;
            curve.std_error[p] = std::sqrt(var / static_cast<double>(fid.size()));
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

std::vector<TomoStateReport> run_tomo(const ExperimentConfig& cfg) {
    cfg.validate();
    const double g = cfg.g_values.front();
    const double beta = cfg.beta_values.front();
    const QubitParams qp(cfg.energy, beta);
    DetectorParams dp = calibrate(g, cfg.energy, cfg.delta_t, cfg.sigma);
    dp.bin_width = cfg.bin_width;
    dp.bin_range_sigmas = cfg.bin_range_sigmas;
    const BinSet bins = build_bins(dp, qp);
    const double tau_m = measurement_time(dp);
    const std::size_t n_steps = steps_for(cfg.duration_tau, tau_m, cfg.delta_t);
    const double duration = static_cast<double>(n_steps) * cfg.delta_t;

    std::vector<TomoStateReport> reports;
    std::uint64_t state_id = 0;
    for (const std::string& init : cfg.init_states) {
        const BlochVector true_bloch = bloch_of_state_spec(init, qp);
        const DensityMatrix rho0 =
            density_from_direction(true_bloch.r, dir_from_bloch(true_bloch));
        // Distinct seed per state so ensembles stay independent.
        const std::uint64_t seed = cfg.master_seed + state_id * 0x9e3779b97f4a7c15ULL;
        DirectionSet ds = collect_directions(rho0, cfg.n_runs, duration, bins,
                                             qp, cfg.delta_t, seed, cfg.workers);
        TomoStateReport rep;
        rep.init = init;
        rep.true_bloch = true_bloch;
        rep.estimate = reconstruct(ds.directions);
        rep.excluded = ds.excluded;
        const Dir3 nt = dir_from_bloch(true_bloch);
        const Dir3 ne = dir_from_bloch(rep.estimate.bloch);
        const double dx = true_bloch.r * nt.x - rep.estimate.bloch.r * ne.x;
        const double dy = true_bloch.r * nt.y - rep.estimate.bloch.r * ne.y;
        const double dz = true_bloch.r * nt.z - rep.estimate.bloch.r * ne.z;
        rep.bloch_error = std::sqrt(dx * dx + dy * dy + dz * dz);
        rep.moment_warning =
            rep.estimate.moment_condition < kMomentConditionWarning;
        reports.push_back(std::move(rep));
        ++state_id;
    }
    return reports;
}

std::vector<TrajStep> run_traj(const ExperimentConfig& cfg) {
    cfg.validate();
    const double g = cfg.g_values.front();
    const QubitParams qp(cfg.energy, cfg.beta_values.front());
    DetectorParams dp = calibrate(g, cfg.energy, cfg.delta_t, cfg.sigma);
    dp.bin_width = cfg.bin_width;
    dp.bin_range_sigmas = cfg.bin_range_sigmas;
    const BinSet bins = build_bins(dp, qp);
    const double tau_m = measurement_time(dp);
    const std::size_t n_steps = steps_for(cfg.duration_tau, tau_m, cfg.delta_t);

    DensityMatrix state = parse_initial_state(cfg.init_states.front(), qp);
    ScaledPropagator acc;
    Rng rng = Rng::stream(cfg.master_seed, 0);
    const Mat2 u_h = hamiltonian_step(qp, cfg.delta_t);

    std::vector<TrajStep> steps;
    steps.reserve(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const std::size_t k = step(state, acc, bins, u_h, rng);
        TrajStep ts;
        ts.step_index = i;
        ts.bin_index = static_cast<std::uint32_t>(k);
        ts.bin_center = bins.bin_centers[k];
        const HermEig2 e = herm_eig(state.m);
        ts.state = bloch_from_state(e.vec_hi);
        ts.state.r = e.eig_hi - e.eig_lo;
        ts.running_fidelity = analyze(acc).fidelity;
        steps.push_back(ts);
    }
    return steps;
}

void write_fig2_csv(const ExperimentConfig& cfg,
                    const std::vector<Fig2Group>& groups) {
    for (const Fig2Group& grp : groups) {
        char gname[64];
        std::snprintf(gname, sizeof(gname), "fig2_g%g_%s.csv", grp.g,
                      sanitize(grp.init).c_str());
        std::ofstream f = open_output(cfg, gname);
        write_header(f, cfg,
                     {{"g", fmt(grp.g)},
                      {"init", grp.init},
                      {"beta", fmt(cfg.beta_values.front())},
                      {"n_runs", std::to_string(cfg.n_runs)},
                      {"duration_tau_m", fmt(cfg.duration_tau)}});
        f << "run_index,theta,phi,fidelity,result_theta,result_phi,w1,"
             "degenerate_flag\n";
        for (const OutcomeRow& r : grp.rows) {
            f << r.run_index << ',' << fmt(r.basis.theta) << ','
              << fmt(r.basis.phi) << ',' << fmt(r.fidelity) << ','
              << fmt(r.result.theta) << ',' << fmt(r.result.phi) << ','
              << fmt(r.w1) << ',' << (r.degenerate ? 1 : 0) << '\n';
        }
    }
}

void write_fig3_csv(const ExperimentConfig& cfg,
                    const std::vector<Fig3Curve>& curves) {
    std::ofstream f = open_output(cfg, "fig3.csv");
    write_header(f, cfg,
                 {{"g", fmt(cfg.g_values.front())},
                  {"init", cfg.init_states.front()},
                  {"n_runs", std::to_string(cfg.n_runs)}});
    f << "beta,duration_tau_m,mean_fidelity,std_error,n_runs\n";
    for (const Fig3Curve& c : curves) {
        for (std::size_t p = 0; p < c.duration_tau.size(); ++p) {
            f << fmt(c.beta) << ',' << fmt(c.duration_tau[p]) << ','
              << fmt(c.mean_fidelity[p]) << ',' << fmt(c.std_error[p]) << ','
              << cfg.n_runs << '\n';
        }
    }
}

void write_tomo_json(const ExperimentConfig& cfg,
                     const std::vector<TomoStateReport>& reports) {
    nlohmann::ordered_json doc;
    doc["version"] = kVersion;
    doc["experiment"] = "tomo";
    doc["g"] = cfg.g_values.front();
    doc["beta"] = cfg.beta_values.front();
    doc["n_runs"] = cfg.n_runs;
    doc["duration_tau_m"] = cfg.duration_tau;
    doc["energy"] = cfg.energy;
    doc["delta_t"] = cfg.delta_t;
    doc["sigma"] = cfg.sigma;
    doc["bin_width"] = cfg.bin_width;
    doc["master_seed"] = cfg.master_seed;
    doc["states"] = nlohmann::ordered_json::array();
    for (const TomoStateReport& r : reports) {
        nlohmann::ordered_json s;
        s["init"] = r.init;
        s["true_bloch"] = {{"r", r.true_bloch.r},
                           {"theta", r.true_bloch.theta},
                           {"phi", r.true_bloch.phi}};
        s["estimate"] = {{"r", r.estimate.bloch.r},
                         {"theta", r.estimate.bloch.theta},
                         {"phi", r.estimate.bloch.phi}};
        s["residual"] = r.estimate.residual;
        s["n_used"] = r.estimate.n_runs;
        s["excluded"] = r.excluded;
        s["moment_condition"] = r.estimate.moment_condition;
        s["moment_warning"] = r.moment_warning;
        s["bloch_error"] = r.bloch_error;
        doc["states"].push_back(std::move(s));
    }
    std::ofstream f = open_output(cfg, "tomo.json");
    f << doc.dump(2) << '\n';
}

void write_traj_csv(const ExperimentConfig& cfg,
                    const std::vector<TrajStep>& steps) {
    std::ofstream f = open_output(cfg, "traj.csv");
    write_header(f, cfg,
                 {{"g", fmt(cfg.g_values.front())},
                  {"init", cfg.init_states.front()},
                  {"beta", fmt(cfg.beta_values.front())},
                  {"duration_tau_m", fmt(cfg.duration_tau)}});
    f << "step_index,bin_index,bin_center_current,r,theta,phi,"
         "running_fidelity\n";
    for (const TrajStep& s : steps) {
        f << s.step_index << ',' << s.bin_index << ',' << fmt(s.bin_center)
          << ',' << fmt(s.state.r) << ',' << fmt(s.state.theta) << ','
          << fmt(s.state.phi) << ',' << fmt(s.running_fidelity) << '\n';
    }
}

void run_and_write(const ExperimentConfig& cfg) {
    if (cfg.experiment == "fig2") {
        write_fig2_csv(cfg, run_fig2(cfg));
    } else if (cfg.experiment == "fig3") {
        write_fig3_csv(cfg, run_fig3(cfg));
    } else if (cfg.experiment == "tomo") {
        write_tomo_json(cfg, run_tomo(cfg));
    } else if (cfg.experiment == "traj") {
        write_traj_csv(cfg, run_traj(cfg));
    } else {
        throw ConfigError("unknown experiment: " + cfg.experiment);
    }
}

} // namespace weakprobe
