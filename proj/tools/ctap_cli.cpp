// Copyright 2026 The ctap-chain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end for the CTAP chain simulator.
//
//   ctap simulate     --config run.cfg --out results/
//   ctap spectrum     --n 3 --tmax 25 --out results/
//   ctap sweep        --config sweep.cfg --workers 4
//   ctap optimize     --n 9 --gamma 0.005
//   ctap miscalibrate --config misc.cfg
//   ctap swap-compare --config swap.cfg
//
// Exit status: 0 success, 1 error, 2 usage error, 3 partial success (some
// sweep points failed). Errors are also reported as one JSON line on stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ctap/analysis.hpp"
#include "ctap/dynamics.hpp"
#include "ctap/errors.hpp"
#include "ctap/io.hpp"
#include "ctap/spectral.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitPartial = 3;

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  int workers = 1;
  std::optional<int> samples;
  std::optional<double> t_max;
  std::optional<double> gamma;
  std::optional<int> n_dqd;
  std::optional<double> omega_max;
  std::vector<std::string> settings;
};

ctap::ExperimentConfig load(const Options& opt) {
  ctap::ExperimentConfig cfg =
      opt.config_path.empty() ? ctap::ExperimentConfig{} : ctap::parse_config(opt.config_path);
  for (const auto& s : opt.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ctap::ConfigError("--set expects key=value, got '" + s + "'");
    ctap::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (opt.samples) cfg.chain.samples = *opt.samples;
  if (opt.t_max) cfg.chain.t_max = *opt.t_max;
  if (opt.gamma) cfg.chain.gamma = *opt.gamma;
  if (opt.n_dqd) cfg.chain.n_dqd = *opt.n_dqd;
  if (opt.omega_max) cfg.chain.omega_max = *opt.omega_max;
  // Re-validate the merged result through the parser.
  return ctap::parse_config_text(ctap::serialize_config(cfg));
}

class Writer {
 public:
  Writer(const Options& opt, const ctap::ExperimentConfig& cfg) : opt_(opt), cfg_(cfg) {
    fs::create_directories(opt.out_dir);
  }

  template <class Fn>
  void data(const std::string& name, Fn&& write, ctap::Metadata meta = {}) {
    const fs::path path = fs::path(opt_.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ctap::Error("cannot write '" + path.string() + "'");
    write(out);
    meta.command = opt_.command;
    meta.config_path = opt_.config_path;
    meta.output_file = name;
    std::ofstream side(path.string() + ".meta", std::ios::binary);
    ctap::write_metadata(side, meta, cfg_, ctap::make_schedule(cfg_.chain));
    std::cout << path.string() << "\n";
  }

 private:
  const Options& opt_;
  const ctap::ExperimentConfig& cfg_;
};

int run_simulate(const Options& opt, const ctap::ExperimentConfig& cfg) {
  const auto schedule = ctap::make_schedule(cfg.chain);
  const auto rho0 = ctap::DensityMatrix::basis_state(cfg.chain.dim(), 0);
  ctap::EvolveOptions eo;
  eo.full_state_stride = cfg.full_state_stride;
  const auto traj = ctap::evolve(cfg.chain, schedule, rho0, eo);

  ctap::Metadata meta;
  const int last = cfg.chain.dim() - 1;
  meta.extra["rho_ff"] = ctap::format_number(traj.final_population(last));
  meta.extra["max_trace_error"] = ctap::format_number(traj.max_trace_error);
  meta.extra["max_hermiticity_drift"] = ctap::format_number(traj.max_hermiticity_drift);
  meta.extra["min_snapshot_eigenvalue"] = ctap::format_number(traj.min_snapshot_eigenvalue);
  meta.extra["min_purity"] = ctap::format_number(traj.min_purity);
  Writer w(opt, cfg);
  w.data("trajectory.csv",
         [&](std::ostream& out) { ctap::write_trajectory_csv(out, traj, cfg.chain.omega_max); },
         meta);
  if (cfg.full_state_stride > 0) {
    const auto leak = ctap::leakage(traj, schedule);
    w.data("leakage.csv", [&](std::ostream& out) {
      out << "t,leakage\n";
      const double to_units = cfg.chain.omega_max / std::numbers::pi;
      for (std::size_t i = 0; i < leak.size(); ++i)
        out << ctap::format_number(traj.full_states[i].time * to_units) << ","
            << ctap::format_number(leak[i]) << "\n";
    });
  }
  return 0;
}

int run_spectrum(const Options& opt, const ctap::ExperimentConfig& cfg) {
  const auto schedule = ctap::make_schedule(cfg.chain);
  const double unit = std::numbers::pi / cfg.chain.omega_max;
  const double t0 = cfg.spectrum_t0.value_or(0.0) * unit;
  const double t1 = cfg.spectrum_t1.value_or(cfg.chain.t_max) * unit;
  const auto spectra =
      ctap::spectrum_series(schedule, cfg.chain.n_dqd, t0, t1, cfg.spectrum_samples);
  Writer(opt, cfg).data("spectrum.csv", [&](std::ostream& out) {
    ctap::write_spectrum_csv(out, spectra, cfg.chain.omega_max);
  });
  return 0;
}

int run_sweep(const Options& opt, const ctap::ExperimentConfig& cfg) {
  if (cfg.axes.empty()) throw ctap::ConfigError("sweep needs at least axis1");
  ctap::SweepSpec spec{cfg.chain, cfg.axes, cfg.observable, {}};
  if (cfg.observable == ctap::Observable::kInfidelityDelta) spec.miscalibration = cfg.miscalibration;
  const auto result = ctap::run_sweep(spec, opt.workers);
  ctap::Metadata meta;
  const int failures = result.failures();
  meta.status = failures == 0 ? "ok" : "partial";
  meta.extra["failed_points"] = std::to_string(failures);
  meta.extra["workers"] = std::to_string(opt.workers);
  Writer(opt, cfg).data(
      "sweep.csv", [&](std::ostream& out) { ctap::write_sweep_csv(out, result); }, meta);
  if (failures > 0) {
    nlohmann::json summary{{"status", "partial"},
                           {"command", opt.command},
                           {"failed_points", failures},
                           {"total_points", result.points.size()}};
    for (const auto& p : result.points)
      if (!p.ok) summary["errors"].push_back({{"coords", p.coords}, {"message", p.error}});
    std::cerr << summary.dump() << "\n";
    return kExitPartial;
  }
  return 0;
}

int run_optimize(const Options& opt, const ctap::ExperimentConfig& cfg) {
  const auto best =
      ctap::find_optimal_tmax(cfg.chain, cfg.opt_lo, cfg.opt_hi, cfg.opt_resolution, opt.workers);
  ctap::Metadata meta;
  meta.extra["t_max_opt"] = ctap::format_number(best.t_max_units);
  meta.extra["rho_ff_max"] = ctap::format_number(best.rho_ff);
  Writer(opt, cfg).data(
      "optimum.csv", [&](std::ostream& out) { ctap::write_optimum_csv(out, best); }, meta);
  return 0;
}

int run_miscalibrate(const Options& opt, const ctap::ExperimentConfig& cfg) {
  ctap::SweepAxis axis{ctap::SweepParameter::kTMax, cfg.misc_tmax_min, cfg.misc_tmax_max,
                       std::max(2, cfg.misc_tmax_count)};
  std::vector<double> t_axis =
      cfg.misc_tmax_count == 1 ? std::vector<double>{cfg.misc_tmax_min} : axis.values();
  const auto curve = ctap::miscalibration_curve(cfg.chain, cfg.miscalibration, t_axis, opt.workers);
  ctap::Metadata meta;
  meta.extra["target"] = std::string(ctap::to_string(cfg.miscalibration.target));
  meta.extra["kind"] = std::string(ctap::to_string(cfg.miscalibration.kind));
  meta.extra["fraction"] = ctap::format_number(cfg.miscalibration.fraction);
  Writer(opt, cfg).data(
      "miscalibration.csv",
      [&](std::ostream& out) { ctap::write_miscalibration_csv(out, curve); }, meta);
  return 0;
}

int run_swap_compare(const Options& opt, const ctap::ExperimentConfig& cfg) {
  Writer w(opt, cfg);
  std::vector<std::optional<double>> ctap_units;
  for (std::size_t i = 0; i < cfg.swap_omegas.size(); ++i) {
    ctap::SwapComparisonSpec spec = cfg.swap;
    spec.omega_max = cfg.swap_omegas[i];
    const auto table = ctap::ctap_vs_swap(spec, cfg.chain, ctap_units, opt.workers);
    if (ctap_units.empty())
      for (const auto& row : table.rows)
        ctap_units.push_back(row.t_ctap ? std::optional<double>(row.t_ctap_units) : std::nullopt);
    ctap::Metadata meta;
    meta.extra["omega_max"] = ctap::format_number(spec.omega_max);
    meta.extra["crossover_n"] = table.crossover_n ? std::to_string(*table.crossover_n) : "none";
    const std::string name =
        cfg.swap_omegas.size() == 1 ? "swap_compare.csv"
                                    : "swap_compare_" + std::to_string(i + 1) + ".csv";
    w.data(name, [&](std::ostream& out) { ctap::write_comparison_csv(out, table); }, meta);
  }
  return 0;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "Experiment file (key = value)");
  sub->add_option("--out", opt.out_dir, "Output directory");
  sub->add_option("--workers", opt.workers, "Parallel workers for grid evaluations")
      ->check(CLI::PositiveNumber);
  sub->add_option("--samples", opt.samples, "Trajectory samples");
  sub->add_option("--tmax", opt.t_max, "Pulse time t_max in pi/omega_max");
  sub->add_option("--gamma", opt.gamma, "Dephasing rate in omega_max");
  sub->add_option("--n", opt.n_dqd, "Number of double quantum dots (odd)");
  sub->add_option("--omega-max", opt.omega_max, "Peak external tunnelling rate");
  sub->add_option("--set", opt.settings, "Override any config key: key=value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent tunnelling by adiabatic passage across a double-quantum-dot chain"};
  app.set_version_flag("--version", std::string(ctap::kToolVersion));
  app.require_subcommand(1);
  Options opt;
  for (const char* name :
       {"simulate", "spectrum", "sweep", "optimize", "miscalibrate", "swap-compare"}) {
    add_common(app.add_subcommand(name), opt);
  }
  CLI11_PARSE(app, argc, argv);
  opt.command = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = load(opt);
    if (opt.command == "simulate") return run_simulate(opt, cfg);
    if (opt.command == "spectrum") return run_spectrum(opt, cfg);
    if (opt.command == "sweep") return run_sweep(opt, cfg);
    if (opt.command == "optimize") return run_optimize(opt, cfg);
    if (opt.command == "miscalibrate") return run_miscalibrate(opt, cfg);
    return run_swap_compare(opt, cfg);
  } catch (const std::exception& e) {
    nlohmann::json summary{{"status", "error"}, {"command", opt.command}, {"message", e.what()}};
    std::cerr << summary.dump() << "\n";
    return kExitError;
  }
}
