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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctap/chain_model.hpp"

namespace ctap {

// ---------------------------------------------------------------------------
// Miscalibration

enum class MiscalibrationKind { kAmplitude, kPeakTime };

/// Perturbs one pulse family: amplitude scaled by (1 + fraction), or peak
/// time shifted by fraction * (ideal peak time).
struct MiscalibrationSpec {
  PulseFamily target = PulseFamily::kInitial;
  MiscalibrationKind kind = MiscalibrationKind::kAmplitude;
  double fraction = 0.0;

  bool operator==(const MiscalibrationSpec&) const = default;
};

std::string_view to_string(MiscalibrationKind kind);

PulseSchedule perturb_schedule(const PulseSchedule& schedule, const MiscalibrationSpec& spec);

struct MiscalibrationPoint {
  double t_max_units = 0.0;
  double ideal = 0.0;
  double perturbed = 0.0;
  double delta = 0.0;  // |perturbed - ideal|
};

/// |rho_ff - rho_ideal| for each t_max (in pi/omega_max) on the axis.
std::vector<MiscalibrationPoint> miscalibration_curve(const ChainConfig& config,
                                                      const MiscalibrationSpec& spec,
                                                      const std::vector<double>& t_max_axis,
                                                      int workers = 1);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParameter { kTMax, kGamma, kOmegaMax, kNDqd };
enum class Observable { kTransferProbability, kInfidelityDelta };

std::string_view to_string(SweepParameter p);
std::string_view to_string(Observable o);
SweepParameter parse_sweep_parameter(std::string_view name);

/// One swept parameter. t_max values are in pi/omega_ref and gamma values in
/// omega_ref, where omega_ref is the base config's omega_max; omega_max values
/// are absolute. Sweeping omega_max therefore holds the physical pulse time and
/// dephasing rate fixed while gamma/omega_max changes.
struct SweepAxis {
  SweepParameter parameter = SweepParameter::kTMax;
  double min = 0.0;
  double max = 1.0;
  int count = 2;
  bool log_spacing = false;

  std::vector<double> values() const;
  bool operator==(const SweepAxis&) const = default;
};

struct SweepSpec {
  ChainConfig base;
  std::vector<SweepAxis> axes;
  Observable observable = Observable::kTransferProbability;
  /// Required when observable == kInfidelityDelta.
  std::optional<MiscalibrationSpec> miscalibration;

  void validate() const;
  /// Config at a grid point, coordinates in axis order.
  ChainConfig config_at(const std::vector<double>& coords) const;
};

struct SweepPoint {
  std::vector<double> coords;
  double value = 0.0;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::vector<double>> grid;  // per axis
  std::vector<SweepPoint> points;         // row-major, last axis fastest

  int failures() const;
};

/// Evaluates every grid point, in parallel over `workers` threads. The result
/// does not depend on the worker count.
SweepResult run_sweep(const SweepSpec& spec, int workers = 1);

/// Reference implementation, strictly serial, evaluating grid points in the
/// order given by `order` (all points in natural order when empty).
SweepResult run_sweep_serial(const SweepSpec& spec, const std::vector<std::size_t>& order = {});

// ---------------------------------------------------------------------------
// Optimum pulse time

struct OptimumResult {
  double t_max_units = 0.0;
  double rho_ff = 0.0;
  /// Grid scanned before refinement.
  std::vector<double> scan_t;
  std::vector<double> scan_rho;
};

/// Grid scan over [lo, hi] (pi/omega_max units) at `resolution`, then one
/// quadratic refinement through the best triple. At gamma = 0 the maximum is
/// a plateau and the smallest grid t_max within 1e-4 of the supremum is
/// returned instead.
OptimumResult find_optimal_tmax(const ChainConfig& config, double lo, double hi,
                                double resolution, int workers = 1);

/// Smallest t_max (pi/omega_max units) with transfer probability >= threshold:
/// scan at `resolution` until the first passing point, then bisect down to
/// `tolerance`. Empty when the threshold is not reached within [lo, hi].
std::optional<double> minimal_transfer_time(const ChainConfig& config, double threshold,
                                            double lo, double hi, double resolution,
                                            double tolerance = 0.05);

// ---------------------------------------------------------------------------
// CTAP versus successive SWAPs

/// Energies share one arbitrary unit; times are reported in h / delta_e_st.
struct SwapComparisonSpec {
  std::vector<int> n_values{3, 5, 7, 9};
  double omega_max = 1.0;
  double delta_e_st = 1.0;
  double t_swap_units = 11.254;
  double ctap_threshold = 0.99;
  /// t_max scan for the CTAP time, pi/omega_max units.
  double scan_lo = 1.0;
  double scan_hi = 80.0;
  double scan_resolution = 2.5;

  void validate() const;
  bool operator==(const SwapComparisonSpec&) const = default;
};

/// (n - 1) t_swap (delta_e_st / omega_max)^2, in h / delta_e_st.
double swap_transfer_time(const SwapComparisonSpec& spec, int n);

/// Converts a CTAP time in pi/omega_max to h / delta_e_st.
double ctap_time_in_swap_units(const SwapComparisonSpec& spec, double t_max_units);

struct ComparisonRow {
  int n = 0;
  std::optional<double> t_ctap;  // h / delta_e_st; empty when unreachable
  double t_ctap_units = 0.0;     // pi / omega_max
  double t_swap = 0.0;
  std::string faster;  // "ctap", "swap" or "unreachable"
};

struct ComparisonTable {
  SwapComparisonSpec spec;
  std::vector<ComparisonRow> rows;
  /// First N at which the preferred method differs from the previous row.
  std::optional<int> crossover_n;
};

/// CTAP times are minimal t_max at gamma = 0 reaching the threshold. They are
/// scale free in pi/omega_max, so `ctap_units` may carry precomputed values
/// (one per entry of n_values) to reuse across tunnelling rates.
ComparisonTable ctap_vs_swap(const SwapComparisonSpec& spec, const ChainConfig& config_template,
                             const std::vector<std::optional<double>>& ctap_units = {},
                             int workers = 1);

}  // namespace ctap
