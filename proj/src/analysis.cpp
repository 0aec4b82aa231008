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

#include "ctap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "ctap/dynamics.hpp"
#include "ctap/errors.hpp"

namespace ctap {

namespace {

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception raised by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(int count, int workers, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(ctap_parallel_for_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string_view to_string(MiscalibrationKind kind) {
  return kind == MiscalibrationKind::kAmplitude ? "amplitude" : "peak_time";
}

PulseSchedule perturb_schedule(const PulseSchedule& schedule, const MiscalibrationSpec& spec) {
  const bool present = std::find(schedule.families.begin(), schedule.families.end(),
                                 spec.target) != schedule.families.end();
  if (!present)
    throw TargetUnavailableError(std::string(to_string(spec.target)) +
                                 " does not exist for a chain of " +
                                 std::to_string(schedule.n_dqd()) + " double dots");
  PulseSchedule out = schedule;
  for (std::size_t k = 0; k < out.links.size(); ++k) {
    if (out.families[k] != spec.target) continue;
    GaussianPulse& pulse = out.links[k];
    if (spec.kind == MiscalibrationKind::kAmplitude)
      pulse.amplitude *= 1.0 + spec.fraction;
    else
      pulse.peak_time += spec.fraction * pulse.peak_time;
  }
  return out;
}

std::vector<MiscalibrationPoint> miscalibration_curve(const ChainConfig& config,
                                                      const MiscalibrationSpec& spec,
                                                      const std::vector<double>& t_max_axis,
                                                      int workers) {
  config.validate();
  // Fail fast on an unavailable target before launching any integration.
  perturb_schedule(make_schedule(config), spec);

  std::vector<MiscalibrationPoint> out(t_max_axis.size());
  const int count = static_cast<int>(t_max_axis.size());
  parallel_for(count, workers, [&](int i) {
    ChainConfig c = config;
    c.t_max = t_max_axis[i];
    const PulseSchedule ideal = make_schedule(c);
    MiscalibrationPoint p;
    p.t_max_units = t_max_axis[i];
    p.ideal = transfer_probability(c, ideal);
    p.perturbed = spec.fraction == 0.0 ? p.ideal
                                       : transfer_probability(c, perturb_schedule(ideal, spec));
    p.delta = std::abs(p.perturbed - p.ideal);
    out[i] = p;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kTMax:
      return "t_max";
    case SweepParameter::kGamma:
      return "gamma";
    case SweepParameter::kOmegaMax:
      return "omega_max";
    case SweepParameter::kNDqd:
      return "n_dqd";
  }
  return "unknown";
}

std::string_view to_string(Observable o) {
  return o == Observable::kTransferProbability ? "transfer_probability" : "infidelity_delta";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "t_max" || name == "tmax") return SweepParameter::kTMax;
  if (name == "gamma") return SweepParameter::kGamma;
  if (name == "omega_max") return SweepParameter::kOmegaMax;
  if (name == "n_dqd" || name == "n") return SweepParameter::kNDqd;
  throw ArgumentError("unknown sweep parameter '" + std::string(name) + "'");
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    v[i] = log_spacing ? min * std::pow(max / min, f) : min + (max - min) * f;
  }
  v.back() = max;
  return v;
}

void SweepSpec::validate() const {
  base.validate();
  if (axes.empty() || axes.size() > 3) throw ArgumentError("a sweep needs 1 to 3 axes");
  for (const auto& axis : axes) {
    const std::string name(to_string(axis.parameter));
    if (axis.count < 2) throw ArgumentError("axis " + name + " needs count >= 2");
    if (axis.max < axis.min) throw ArgumentError("axis " + name + " has an inverted range");
    if (axis.log_spacing && !(axis.min > 0.0))
      throw ArgumentError("axis " + name + " uses log spacing with a nonpositive bound");
    switch (axis.parameter) {
      case SweepParameter::kTMax:
      case SweepParameter::kOmegaMax:
        if (!(axis.min > 0.0)) throw ArgumentError("axis " + name + " must be positive");
        break;
      case SweepParameter::kGamma:
        if (axis.min < 0.0) throw ArgumentError("axis gamma must be nonnegative");
        break;
      case SweepParameter::kNDqd:
        for (double v : axis.values()) {
          if (v != std::round(v) || static_cast<long>(v) % 2 == 0 || v < 3)
            throw ArgumentError("axis n_dqd values must be odd integers >= 3");
        }
        break;
    }
  }
  if (observable == Observable::kInfidelityDelta && !miscalibration)
    throw ArgumentError("infidelity_delta needs a miscalibration spec");
}

ChainConfig SweepSpec::config_at(const std::vector<double>& coords) const {
  // Absolute pulse time and dephasing rate of the base config are held fixed
  // unless swept, so a pure omega_max sweep changes t_max and gamma in
  // omega_max units.
  const double omega_ref = base.omega_max;
  double omega = base.omega_max;
  double t_ref = base.t_max;
  double gamma_ref = base.gamma;
  ChainConfig c = base;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const double v = coords.at(i);
    switch (axes[i].parameter) {
      case SweepParameter::kTMax:
        t_ref = v;
        break;
      case SweepParameter::kGamma:
        gamma_ref = v;
        break;
      case SweepParameter::kOmegaMax:
        omega = v;
        break;
      case SweepParameter::kNDqd:
        c.n_dqd = static_cast<int>(std::lround(v));
        break;
    }
  }
  c.omega_max = omega;
  c.t_max = t_ref * omega / omega_ref;
  c.gamma = gamma_ref * omega_ref / omega;
  return c;
}

int SweepResult::failures() const {
  return static_cast<int>(
      std::count_if(points.begin(), points.end(), [](const SweepPoint& p) { return !p.ok; }));
}

namespace {

SweepResult prepare(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  std::size_t total = 1;
  for (const auto& axis : spec.axes) {
    result.grid.push_back(axis.values());
    total *= result.grid.back().size();
  }
  result.points.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> coords(spec.axes.size());
    std::size_t rest = flat;
    for (std::size_t i = spec.axes.size(); i-- > 0;) {
      const std::size_t n = result.grid[i].size();
      coords[i] = result.grid[i][rest % n];
      rest /= n;
    }
    result.points[flat].coords = std::move(coords);
  }
  return result;
}

void evaluate(const SweepSpec& spec, SweepPoint& point) {
  try {
    const ChainConfig c = spec.config_at(point.coords);
    const PulseSchedule ideal = make_schedule(c);
    if (spec.observable == Observable::kTransferProbability) {
      point.value = transfer_probability(c, ideal);
    } else {
      const double a = transfer_probability(c, ideal);
      const double b = transfer_probability(c, perturb_schedule(ideal, *spec.miscalibration));
      point.value = std::abs(b - a);
    }
    point.ok = true;
  } catch (const Error& e) {
    point.ok = false;
    point.value = std::nan("");
    point.error = e.what();
  }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int workers) {
  SweepResult result = prepare(spec);
  const long total = static_cast<long>(result.points.size());
  parallel_for(static_cast<int>(total), workers,
               [&](int i) { evaluate(spec, result.points[i]); });
  return result;
}

SweepResult run_sweep_serial(const SweepSpec& spec, const std::vector<std::size_t>& order) {
  SweepResult result = prepare(spec);
  if (order.empty()) {
    for (auto& point : result.points) evaluate(spec, point);
  } else {
    if (order.size() != result.points.size()) throw ArgumentError("order has wrong length");
    for (std::size_t i : order) evaluate(spec, result.points.at(i));
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

double transfer_at_units(const ChainConfig& config, double t_units) {
  ChainConfig c = config;
  c.t_max = t_units;
  return transfer_probability(c);
}

}  // namespace

OptimumResult find_optimal_tmax(const ChainConfig& config, double lo, double hi,
                                double resolution, int workers) {
  config.validate();
  if (!(lo > 0.0) || !(hi > lo)) throw ArgumentError("search range is empty or inverted");
  if (!(resolution > 0.0)) throw ArgumentError("resolution must be positive");

  OptimumResult out;
  const int count = static_cast<int>(std::floor((hi - lo) / resolution + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) out.scan_t.push_back(lo + resolution * i);
  if (out.scan_t.back() < hi - 1e-9 * resolution) out.scan_t.push_back(hi);
  out.scan_rho.resize(out.scan_t.size());
  const int n = static_cast<int>(out.scan_t.size());
  parallel_for(n, workers,
               [&](int i) { out.scan_rho[i] = transfer_at_units(config, out.scan_t[i]); });

  const auto best_it = std::max_element(out.scan_rho.begin(), out.scan_rho.end());
  const std::size_t best = static_cast<std::size_t>(best_it - out.scan_rho.begin());

  if (config.gamma == 0.0) {
    const double supremum = *best_it;
    for (std::size_t i = 0; i < out.scan_rho.size(); ++i) {
      if (out.scan_rho[i] >= supremum - 1e-4) {
        out.t_max_units = out.scan_t[i];
        out.rho_ff = out.scan_rho[i];
        return out;
      }
    }
  }

  out.t_max_units = out.scan_t[best];
  out.rho_ff = out.scan_rho[best];
  if (best == 0 || best + 1 >= out.scan_t.size()) return out;

  const double x0 = out.scan_t[best - 1], x1 = out.scan_t[best], x2 = out.scan_t[best + 1];
  const double y0 = out.scan_rho[best - 1], y1 = out.scan_rho[best], y2 = out.scan_rho[best + 1];
  // Vertex of the parabola through three (possibly unevenly spaced) points.
  const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (den == 0.0) return out;
  const double vertex = std::clamp(x1 - 0.5 * num / den, x0, x2);
  const double refined = transfer_at_units(config, vertex);
  if (refined >= out.rho_ff) {
    out.t_max_units = vertex;
    out.rho_ff = refined;
  }
  return out;
}

std::optional<double> minimal_transfer_time(const ChainConfig& config, double threshold,
                                            double lo, double hi, double resolution,
                                            double tolerance) {
  config.validate();
  if (!(lo > 0.0) || !(hi > lo)) throw ArgumentError("search range is empty or inverted");
  if (!(resolution > 0.0) || !(tolerance > 0.0))
    throw ArgumentError("resolution and tolerance must be positive");

  double previous = lo;
  for (double t = lo; t <= hi + 1e-9 * resolution; t += resolution) {
    if (transfer_at_units(config, t) >= threshold) {
      if (t == lo) return t;
      double fail = previous, pass = t;
      while (pass - fail > tolerance) {
        const double mid = 0.5 * (fail + pass);
        (transfer_at_units(config, mid) >= threshold ? pass : fail) = mid;
      }
      return pass;
    }
    previous = t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

void SwapComparisonSpec::validate() const {
  if (!(omega_max > 0.0) || !(delta_e_st > 0.0) || !(t_swap_units > 0.0))
    throw ArgumentError("energies and t_swap must be positive");
  if (!(ctap_threshold > 0.5 && ctap_threshold < 1.0))
    throw ArgumentError("ctap_threshold must lie in (0.5, 1)");
  for (int n : n_values)
    if (n < 3 || n % 2 == 0) throw ArgumentError("chain lengths must be odd and >= 3");
}

double swap_transfer_time(const SwapComparisonSpec& spec, int n) {
  if (n < 3 || n % 2 == 0) throw ArgumentError("chain length must be odd and >= 3");
  if (!(spec.omega_max > 0.0) || !(spec.delta_e_st > 0.0))
    throw ArgumentError("energies must be positive");
  const double r = spec.delta_e_st / spec.omega_max;
  return static_cast<double>(n - 1) * spec.t_swap_units * r * r;
}

double ctap_time_in_swap_units(const SwapComparisonSpec& spec, double t_max_units) {
  // t = T pi hbar / omega_max = T h / (2 omega_max); divide by h / delta_e_st.
  return t_max_units * spec.delta_e_st / (2.0 * spec.omega_max);
}

ComparisonTable ctap_vs_swap(const SwapComparisonSpec& spec, const ChainConfig& config_template,
                             const std::vector<std::optional<double>>& ctap_units, int workers) {
  spec.validate();
  if (!ctap_units.empty() && ctap_units.size() != spec.n_values.size())
    throw ArgumentError("precomputed CTAP times do not match n_values");

  ComparisonTable table;
  table.spec = spec;
  const int count = static_cast<int>(spec.n_values.size());
  std::vector<std::optional<double>> units = ctap_units;
  if (units.empty()) {
    units.resize(count);
    parallel_for(count, workers, [&](int i) {
      ChainConfig c = config_template;
      c.n_dqd = spec.n_values[i];
      c.gamma = 0.0;
      units[i] = minimal_transfer_time(c, spec.ctap_threshold, spec.scan_lo, spec.scan_hi,
                                       spec.scan_resolution);
    });
  }

  for (int i = 0; i < count; ++i) {
    ComparisonRow row;
    row.n = spec.n_values[i];
    row.t_swap = swap_transfer_time(spec, row.n);
    if (units[i]) {
      row.t_ctap_units = *units[i];
      row.t_ctap = ctap_time_in_swap_units(spec, *units[i]);
      row.faster = *row.t_ctap <= row.t_swap ? "ctap" : "swap";
    } else {
      row.faster = "unreachable";
    }
    if (!table.rows.empty() && !table.crossover_n && table.rows.back().faster != row.faster &&
        row.faster != "unreachable" && table.rows.back().faster != "unreachable")
      table.crossover_n = row.n;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace ctap
