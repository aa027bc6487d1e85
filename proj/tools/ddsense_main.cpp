// Command-line front end: single runs, parameter sweeps, and the datasets
// behind the standard figures. Outputs are CSV/JSON only; plot with any
// external tool.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddsense/io.hpp"
#include "ddsense/rng.hpp"

namespace fs = std::filesystem;
using namespace ddsense;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonOpts {
  std::string out_dir = ".";
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool serial = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  cmd->add_flag("--serial", opts.serial, "deterministic single-threaded mode");
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void emit_result(const fs::path& dir, const std::string& stem,
                 const ExperimentResult& result) {
  auto json_out = open_output(dir / (stem + ".json"));
  write_result_json(json_out, result);
  auto csv_out = open_output(dir / (stem + ".csv"));
  write_result_csv(csv_out, result);
  std::cout << stem << ": er_min = " << result.curve.er_min << " +- "
            << result.curve.er_min_stderr << " at tau_opt = " << result.curve.tau_opt
            << (result.curve.boundary_minimum ? " (boundary!)" : "") << ", "
            << result.wall_seconds << " s\n";
  if (result.config.protocol.protocol == Protocol::RF && !result.rf_fd_converged) {
    std::cerr << "warning: RF gradient step-halving mismatch "
              << result.rf_fd_max_mismatch << " exceeds 5%\n";
  }
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const CommonOpts& opts, const std::string& dump_clusters) {
  ExperimentConfig config;
  if (!config_path.empty()) config = parse_config_file(config_path);
  for (const std::string& kv : overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
    apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed_set) config.seed = opts.seed;
  config.validate();

  const ExperimentResult result = run_experiment(config, opts.threads, opts.serial);
  emit_result(opts.out_dir, "result", result);

  if (!dump_clusters.empty()) {
    std::vector<ClusterGeometry> clusters;
    clusters.reserve(config.n_clusters);
    for (long q = 0; q < config.n_clusters; ++q) {
      RngStream rng(config.seed, static_cast<uint64_t>(q));
      clusters.push_back(sample_cluster(config.cluster_size, rng, config.min_distance));
    }
    auto out = open_output(dump_clusters);
    write_clusters_csv(out, clusters);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::vector<double>& values, const CommonOpts& opts) {
  ExperimentConfig config;
  if (!config_path.empty()) config = parse_config_file(config_path);
  if (opts.seed_set) config.seed = opts.seed;

  SweepAxis axis;
  if (axis_name == "M") axis = SweepAxis::ClusterSize;
  else if (axis_name == "s") axis = SweepAxis::SpinQuantumNumber;
  else if (axis_name == "omega_ratio") axis = SweepAxis::OmegaRatio;
  else throw ConfigError("sweep axis must be one of M, s, omega_ratio");

  const auto points = sweep(config, axis, values, opts.threads, opts.serial);

  auto csv = open_output(fs::path(opts.out_dir) / "sweep.csv");
  csv << axis_name << ",er_min,er_min_stderr,tau_opt,boundary_minimum,error\n";
  bool any_failed = false;
  for (const SweepPoint& p : points) {
    if (p.ok) {
      csv << p.value << ',' << p.result.curve.er_min << ','
          << p.result.curve.er_min_stderr << ',' << p.result.curve.tau_opt << ','
          << (p.result.curve.boundary_minimum ? 1 : 0) << ",\n";
      std::cout << axis_name << " = " << p.value
                << ": er_min = " << p.result.curve.er_min << '\n';
    } else {
      any_failed = true;
      csv << p.value << ",,,,,\"" << p.error << "\"\n";
      std::cerr << axis_name << " = " << p.value << " failed: " << p.error << '\n';
    }
  }
  return any_failed ? kExitRuntimeError : 0;
}

ExperimentConfig fig1_config() {
  ExperimentConfig c;
  c.species.s = 0.5;
  c.cluster_size = 2;
  c.n_clusters = 40000;
  c.protocol.protocol = Protocol::DC;
  c.protocol.model = Model::Secular;
  return c;
}

int cmd_figure(const std::string& name, const std::string& scale, const CommonOpts& opts) {
  const bool desk = scale == "desk";
  const fs::path dir(opts.out_dir);
  const uint64_t seed = opts.seed_set ? opts.seed : 1;

  if (name == "fig1") {
    ExperimentConfig c = fig1_config();
    c.seed = seed;
    const ExperimentResult r = run_experiment(c, opts.threads, opts.serial);
    auto csv = open_output(dir / "fig1.csv");
    csv << "tau,mean_sx_per_spin,rms_sx,mean_sy_per_spin,rms_sy,er_over_hbar,stderr\n";
    for (size_t t = 0; t < r.curve.tau.size(); ++t) {
      csv << r.curve.tau[t] << ',' << r.mean_per_spin[t].x() << ','
          << std::sqrt(std::max(0.0, r.var_per_spin[t].x())) << ','
          << r.mean_per_spin[t].y() << ','
          << std::sqrt(std::max(0.0, r.var_per_spin[t].y())) << ','
          << r.curve.er_over_hbar[t] << ',' << r.curve.stderr_er[t] << '\n';
    }
    emit_result(dir, "fig1_result", r);
    return 0;
  }

  if (name == "fig2" || name == "figS1") {
    const bool rf = name == "figS1";
    std::vector<double> spins;
    int max_m;
    long q_clusters;
    if (desk) {
      spins = rf ? std::vector<double>{0.5} : std::vector<double>{0.5, 1.0};
      max_m = rf ? 5 : 6;
      q_clusters = 10000;
    } else {
      spins = rf ? std::vector<double>{0.5, 1.0, 1.5, 2.0}
                 : std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
      max_m = rf ? 7 : 6;
      q_clusters = rf ? 10000 : 40000;
    }
    auto csv = open_output(dir / (name + ".csv"));
    csv << "s,M,er_min,er_min_stderr,tau_opt\n";
    for (double s : spins) {
      ExperimentConfig c;
      c.species.s = s;
      c.n_clusters = q_clusters;
      c.protocol.protocol = rf ? Protocol::RF : Protocol::DC;
      c.protocol.model = Model::Secular;
      const int d = c.species.local_dim();
      for (int m = 2; m <= max_m; ++m) {
        long dim = 1;
        for (int i = 0; i < m; ++i) dim *= d;
        if (dim > kMaxHilbertDim) break;
        c.cluster_size = m;
        c.seed = derive_seed(seed, static_cast<uint64_t>(100 * s * 10 + m));
        const ExperimentResult r = run_experiment(c, opts.threads, opts.serial);
        csv << s << ',' << m << ',' << r.curve.er_min << ','
            << r.curve.er_min_stderr << ',' << r.curve.tau_opt << '\n';
        std::cout << name << " s=" << s << " M=" << m
                  << ": er_min = " << r.curve.er_min << " (" << r.wall_seconds
                  << " s)\n";
      }
    }
    return 0;
  }

  if (name == "fig3") {
    const std::vector<double> ratios{0.5, 1.0, 2.0, 5.0, 20.0, 100.0};
    ExperimentConfig c = fig1_config();
    c.n_clusters = desk ? 4000 : 40000;
    c.seed = seed;

    ExperimentConfig sec = c;
    sec.protocol.model = Model::Secular;
    const ExperimentResult ref = run_experiment(sec, opts.threads, opts.serial);
    std::cout << "fig3 secular reference: er_min = " << ref.curve.er_min << '\n';

    c.protocol.model = Model::Full;
    const auto points =
        sweep(c, SweepAxis::OmegaRatio, ratios, opts.threads, opts.serial);

    auto csv = open_output(dir / "fig3.csv");
    csv << "omega_ratio,model,er_min,er_min_stderr,tau_opt\n";
    csv << "inf,secular," << ref.curve.er_min << ',' << ref.curve.er_min_stderr << ','
        << ref.curve.tau_opt << '\n';
    bool any_failed = false;
    for (const SweepPoint& p : points) {
      if (!p.ok) {
        any_failed = true;
        std::cerr << "omega_ratio = " << p.value << " failed: " << p.error << '\n';
        continue;
      }
      csv << p.value << ",full," << p.result.curve.er_min << ','
          << p.result.curve.er_min_stderr << ',' << p.result.curve.tau_opt << '\n';
      std::cout << "fig3 omega_ratio=" << p.value
                << ": er_min = " << p.result.curve.er_min << " (" << p.result.wall_seconds
                << " s)\n";
    }
    return any_failed ? kExitRuntimeError : 0;
  }

  throw ConfigError("unknown figure '" + name + "' (expected fig1, fig2, fig3, figS1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo energy-resolution limits of dipolar spin-ensemble magnetometers"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, fig_opts;

  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  std::string run_config;
  std::vector<std::string> run_overrides;
  std::string dump_clusters;
  run->add_option("--config", run_config, "config file (key = value lines)");
  run->add_option("--set", run_overrides, "override, key=value (repeatable)");
  run->add_option("--dump-clusters", dump_clusters, "also write sampled cluster geometries (CSV)");
  add_common(run, run_opts);

  auto* sw = app.add_subcommand("sweep", "sweep one parameter axis");
  std::string sweep_config, sweep_axis;
  std::vector<double> sweep_values;
  sw->add_option("--config", sweep_config, "base config file");
  sw->add_option("--axis", sweep_axis, "M, s, or omega_ratio")->required();
  sw->add_option("--values", sweep_values, "axis values")->required()->delimiter(',');
  add_common(sw, sweep_opts);

  auto* fig = app.add_subcommand("figure", "regenerate a standard figure dataset");
  std::string fig_name, fig_scale = "desk";
  fig->add_option("name", fig_name, "fig1, fig2, fig3, or figS1")->required();
  fig->add_option("--scale", fig_scale, "full or desk")
      ->check(CLI::IsMember({"full", "desk"}));
  add_common(fig, fig_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, run_overrides, run_opts, dump_clusters);
    if (sw->parsed()) return cmd_sweep(sweep_config, sweep_axis, sweep_values, sweep_opts);
    if (fig->parsed()) return cmd_figure(fig_name, fig_scale, fig_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return 0;
}
