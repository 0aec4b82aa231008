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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctap/analysis.hpp"
#include "ctap/chain_model.hpp"
#include "ctap/dynamics.hpp"
#include "ctap/spectral.hpp"

namespace ctap {

inline constexpr const char* kToolVersion = "1.0.0";

/// Everything an experiment file can describe. The chain section is shared by
/// every command; the remaining sections only matter to the command that
/// reads them.
///
/// File format: one `key = value` per line, `#` starts a comment. Keys:
///
///   n_dqd, omega_max, omega_s_ratio, t_max [pi/omega_max], sigma_ratio,
///   gamma [omega_max], margin_ratio, steps_per_tmax, samples
///   full_state_stride                           (simulate)
///   spectrum_samples, spectrum_t0, spectrum_t1  (spectrum, t in pi/omega_max)
///   axis1, axis2, axis3 = "<param> <min> <max> <count> [log]"
///   observable = transfer_probability | infidelity_delta         (sweep)
///   opt_lo, opt_hi, opt_resolution                              (optimize)
///   misc_target = omega_i | omega_interior | omega_f
///   misc_kind = amplitude | peak_time, misc_fraction
///   misc_tmax = "<min> <max> <count>"                         (miscalibrate)
///   swap_n = "3 5 7 9", swap_omega_max = "<w1> [w2 ...]", swap_delta_e_st,
///   swap_t_swap, swap_threshold, swap_scan_lo, swap_scan_hi,
///   swap_scan_resolution                                    (swap-compare)
struct ExperimentConfig {
  ChainConfig chain;

  int full_state_stride = 0;

  int spectrum_samples = 100;
  std::optional<double> spectrum_t0;
  std::optional<double> spectrum_t1;

  std::vector<SweepAxis> axes;
  Observable observable = Observable::kTransferProbability;

  double opt_lo = 5.0;
  double opt_hi = 60.0;
  double opt_resolution = 2.5;

  MiscalibrationSpec miscalibration;
  double misc_tmax_min = 5.0;
  double misc_tmax_max = 50.0;
  int misc_tmax_count = 10;

  /// swap.omega_max always equals swap_omegas.front().
  SwapComparisonSpec swap;
  std::vector<double> swap_omegas{1.0};

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses config text. Unknown keys, malformed values and violated invariants
/// raise ConfigError with the line number and key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Writes every effective key, defaults included, so the output parses back
/// to an identical config.
std::string serialize_config(const ExperimentConfig& config);

/// Applies one `key = value` assignment (used for CLI overrides).
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// 17 significant digits, used for every CSV value.
std::string format_number(double value);
/// Shortest representation that parses back to the same double.
std::string format_short(double value);

// CSV writers. All use pair-major basis labels P{a}S{b}.
// Times are written in pi/omega_max, energies in omega_max.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, double omega_max);
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumSample>& spectra,
                        double omega_max);
void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_miscalibration_csv(std::ostream& out, const std::vector<MiscalibrationPoint>& points);
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);
void write_optimum_csv(std::ostream& out, const OptimumResult& result);

/// Key-value provenance sidecar written next to every data file.
struct Metadata {
  std::string command;
  std::string config_path;
  std::string output_file;
  std::string status = "ok";
  std::map<std::string, std::string> extra;
};

void write_metadata(std::ostream& out, const Metadata& meta, const ExperimentConfig& config,
                    const PulseSchedule& schedule);

}  // namespace ctap
