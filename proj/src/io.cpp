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

#include "ctap/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ctap/errors.hpp"

namespace ctap {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_short(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

double parse_double(const std::string& key, std::string text, bool allow_pi = false) {
  text = trim(text);
  // Times are already in pi/omega_max, so "25pi" is accepted as a restatement
  // of the unit.
  if (allow_pi) {
    for (const std::string suffix : {"pi", "\xcf\x80"}) {  // "π" in UTF-8
      if (text.size() > suffix.size() && text.ends_with(suffix)) {
        text = trim(text.substr(0, text.size() - suffix.size()));
        break;
      }
    }
  }
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != last)
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("key '" + key + "': cannot parse '" + t + "' as an integer");
  return value;
}

PulseFamily parse_family(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "omega_i") return PulseFamily::kInitial;
  if (t == "omega_interior") return PulseFamily::kInterior;
  if (t == "omega_f") return PulseFamily::kFinal;
  throw ConfigError("key '" + key + "': unknown pulse family '" + t + "'");
}

SweepAxis parse_axis(const std::string& key, const std::string& text) {
  const auto words = split_words(trim(text));
  if (words.size() != 4 && words.size() != 5)
    throw ConfigError("key '" + key + "': expected '<param> <min> <max> <count> [log]'");
  SweepAxis axis;
  try {
    axis.parameter = parse_sweep_parameter(words[0]);
  } catch (const ArgumentError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
  axis.min = parse_double(key, words[1]);
  axis.max = parse_double(key, words[2]);
  axis.count = parse_int(key, words[3]);
  if (words.size() == 5) {
    if (words[4] != "log" && words[4] != "linear")
      throw ConfigError("key '" + key + "': spacing must be 'log' or 'linear'");
    axis.log_spacing = words[4] == "log";
  }
  return axis;
}

std::string axis_text(const SweepAxis& axis) {
  return std::string(to_string(axis.parameter)) + " " + format_short(axis.min) + " " +
         format_short(axis.max) + " " + std::to_string(axis.count) +
         (axis.log_spacing ? " log" : " linear");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto real = [](double ChainConfig::*field, bool allow_pi = false) {
      return [field, allow_pi](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.chain.*field = parse_double(k, v, allow_pi);
      };
    };
    m["n_dqd"] = [](auto& c, auto& k, auto& v) { c.chain.n_dqd = parse_int(k, v); };
    m["omega_max"] = real(&ChainConfig::omega_max);
    m["omega_s_ratio"] = real(&ChainConfig::omega_s_ratio);
    m["t_max"] = real(&ChainConfig::t_max, true);
    m["sigma_ratio"] = real(&ChainConfig::sigma_ratio);
    m["gamma"] = real(&ChainConfig::gamma);
    m["margin_ratio"] = real(&ChainConfig::margin_ratio);
    m["steps_per_tmax"] = [](auto& c, auto& k, auto& v) { c.chain.steps_per_tmax = parse_int(k, v); };
    m["samples"] = [](auto& c, auto& k, auto& v) { c.chain.samples = parse_int(k, v); };
    m["full_state_stride"] = [](auto& c, auto& k, auto& v) {
      c.full_state_stride = parse_int(k, v);
    };

    m["spectrum_samples"] = [](auto& c, auto& k, auto& v) { c.spectrum_samples = parse_int(k, v); };
    m["spectrum_t0"] = [](auto& c, auto& k, auto& v) { c.spectrum_t0 = parse_double(k, v, true); };
    m["spectrum_t1"] = [](auto& c, auto& k, auto& v) { c.spectrum_t1 = parse_double(k, v, true); };

    for (int i = 1; i <= 3; ++i) {
      m["axis" + std::to_string(i)] = [i](ExperimentConfig& c, const std::string& k,
                                          const std::string& v) {
        if (static_cast<int>(c.axes.size()) < i - 1)
          throw ConfigError("key '" + k + "': axis" + std::to_string(i - 1) + " must come first");
        if (static_cast<int>(c.axes.size()) < i) c.axes.resize(i);
        c.axes[i - 1] = parse_axis(k, v);
      };
    }
    m["observable"] = [](auto& c, auto& k, auto& v) {
      const std::string t = trim(v);
      if (t == "transfer_probability")
        c.observable = Observable::kTransferProbability;
      else if (t == "infidelity_delta")
        c.observable = Observable::kInfidelityDelta;
      else
        throw ConfigError("key '" + k + "': unknown observable '" + t + "'");
    };

    m["opt_lo"] = [](auto& c, auto& k, auto& v) { c.opt_lo = parse_double(k, v, true); };
    m["opt_hi"] = [](auto& c, auto& k, auto& v) { c.opt_hi = parse_double(k, v, true); };
    m["opt_resolution"] = [](auto& c, auto& k, auto& v) {
      c.opt_resolution = parse_double(k, v, true);
    };

    m["misc_target"] = [](auto& c, auto& k, auto& v) {
      c.miscalibration.target = parse_family(k, v);
    };
    m["misc_kind"] = [](auto& c, auto& k, auto& v) {
      const std::string t = trim(v);
      if (t == "amplitude")
        c.miscalibration.kind = MiscalibrationKind::kAmplitude;
      else if (t == "peak_time")
        c.miscalibration.kind = MiscalibrationKind::kPeakTime;
      else
        throw ConfigError("key '" + k + "': unknown miscalibration kind '" + t + "'");
    };
    m["misc_fraction"] = [](auto& c, auto& k, auto& v) {
      c.miscalibration.fraction = parse_double(k, v);
    };
    m["misc_tmax"] = [](auto& c, auto& k, auto& v) {
      const auto words = split_words(trim(v));
      if (words.size() != 3) throw ConfigError("key '" + k + "': expected '<min> <max> <count>'");
      c.misc_tmax_min = parse_double(k, words[0], true);
      c.misc_tmax_max = parse_double(k, words[1], true);
      c.misc_tmax_count = parse_int(k, words[2]);
    };

    m["swap_n"] = [](auto& c, auto& k, auto& v) {
      c.swap.n_values.clear();
      for (const auto& w : split_words(trim(v))) c.swap.n_values.push_back(parse_int(k, w));
      if (c.swap.n_values.empty()) throw ConfigError("key '" + k + "': no chain lengths given");
    };
    m["swap_omega_max"] = [](auto& c, auto& k, auto& v) {
      c.swap_omegas.clear();
      for (const auto& w : split_words(trim(v))) c.swap_omegas.push_back(parse_double(k, w));
      if (c.swap_omegas.empty()) throw ConfigError("key '" + k + "': no tunnelling rates given");
      c.swap.omega_max = c.swap_omegas.front();
    };
    m["swap_delta_e_st"] = [](auto& c, auto& k, auto& v) {
      c.swap.delta_e_st = parse_double(k, v);
    };
    m["swap_t_swap"] = [](auto& c, auto& k, auto& v) { c.swap.t_swap_units = parse_double(k, v); };
    m["swap_threshold"] = [](auto& c, auto& k, auto& v) {
      c.swap.ctap_threshold = parse_double(k, v);
    };
    m["swap_scan_lo"] = [](auto& c, auto& k, auto& v) { c.swap.scan_lo = parse_double(k, v, true); };
    m["swap_scan_hi"] = [](auto& c, auto& k, auto& v) { c.swap.scan_hi = parse_double(k, v, true); };
    m["swap_scan_resolution"] = [](auto& c, auto& k, auto& v) {
      c.swap.scan_resolution = parse_double(k, v, true);
    };
    return m;
  }();
  return table;
}

void validate_experiment(const ExperimentConfig& c) {
  try {
    c.chain.validate();
    if (!c.axes.empty()) {
      SweepSpec spec{c.chain, c.axes, c.observable, {}};
      if (c.observable == Observable::kInfidelityDelta) spec.miscalibration = c.miscalibration;
      spec.validate();
    }
    c.swap.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (c.full_state_stride < 0) throw ConfigError("full_state_stride must be nonnegative");
  if (c.spectrum_samples < 2) throw ConfigError("spectrum_samples must be >= 2");
  if (!(c.opt_lo > 0.0) || !(c.opt_hi > c.opt_lo) || !(c.opt_resolution > 0.0))
    throw ConfigError("opt_lo, opt_hi, opt_resolution must describe a nonempty range");
  if (!(c.misc_tmax_min > 0.0) || c.misc_tmax_max < c.misc_tmax_min || c.misc_tmax_count < 1)
    throw ConfigError("misc_tmax must describe a nonempty positive range");
  for (double w : c.swap_omegas)
    if (!(w > 0.0)) throw ConfigError("swap_omega_max values must be positive");
}

}  // namespace

void apply_setting(ExperimentConfig& config, const std::string& raw_key, const std::string& value) {
  const auto& table = setters();
  const std::string key = trim(raw_key);
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(config, key, value);
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_experiment(config);
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto kv = [&out](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
  out << "# chain\n";
  kv("n_dqd", std::to_string(c.chain.n_dqd));
  kv("omega_max", format_short(c.chain.omega_max));
  kv("omega_s_ratio", format_short(c.chain.omega_s_ratio));
  kv("t_max", format_short(c.chain.t_max));
  kv("sigma_ratio", format_short(c.chain.sigma_ratio));
  kv("gamma", format_short(c.chain.gamma));
  kv("margin_ratio", format_short(c.chain.margin_ratio));
  kv("steps_per_tmax", std::to_string(c.chain.steps_per_tmax));
  kv("samples", std::to_string(c.chain.samples));
  kv("full_state_stride", std::to_string(c.full_state_stride));
  out << "# spectrum\n";
  kv("spectrum_samples", std::to_string(c.spectrum_samples));
  if (c.spectrum_t0) kv("spectrum_t0", format_short(*c.spectrum_t0));
  if (c.spectrum_t1) kv("spectrum_t1", format_short(*c.spectrum_t1));
  out << "# sweep\n";
  for (std::size_t i = 0; i < c.axes.size(); ++i)
    kv("axis" + std::to_string(i + 1), axis_text(c.axes[i]));
  kv("observable", std::string(to_string(c.observable)));
  out << "# optimize\n";
  kv("opt_lo", format_short(c.opt_lo));
  kv("opt_hi", format_short(c.opt_hi));
  kv("opt_resolution", format_short(c.opt_resolution));
  out << "# miscalibrate\n";
  kv("misc_target", std::string(to_string(c.miscalibration.target)));
  kv("misc_kind", std::string(to_string(c.miscalibration.kind)));
  kv("misc_fraction", format_short(c.miscalibration.fraction));
  kv("misc_tmax", format_short(c.misc_tmax_min) + " " + format_short(c.misc_tmax_max) + " " +
                      std::to_string(c.misc_tmax_count));
  out << "# swap-compare\n";
  std::string ns, ws;
  for (int n : c.swap.n_values) ns += (ns.empty() ? "" : " ") + std::to_string(n);
  for (double w : c.swap_omegas) ws += (ws.empty() ? "" : " ") + format_short(w);
  kv("swap_n", ns);
  kv("swap_omega_max", ws);
  kv("swap_delta_e_st", format_short(c.swap.delta_e_st));
  kv("swap_t_swap", format_short(c.swap.t_swap_units));
  kv("swap_threshold", format_short(c.swap.ctap_threshold));
  kv("swap_scan_lo", format_short(c.swap.scan_lo));
  kv("swap_scan_hi", format_short(c.swap.scan_hi));
  kv("swap_scan_resolution", format_short(c.swap.scan_resolution));
  return out.str();
}

// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double omega_max) {
  const int d = traj.n_dqd * traj.n_dqd;
  out << "t";
  for (int k = 0; k < d; ++k) out << "," << basis_name(k, traj.n_dqd);
  out << ",trace,purity\n";
  const double to_units = omega_max / std::numbers::pi;
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    out << format_number(traj.times[s] * to_units);
    for (double p : traj.populations[s]) out << "," << format_number(p);
    out << "," << format_number(traj.traces[s]) << "," << format_number(traj.purities[s]) << "\n";
  }
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumSample>& spectra,
                        double omega_max) {
  if (spectra.empty()) return;
  const std::size_t m = spectra.front().eigenvalues.size();
  out << "t";
  for (std::size_t k = 1; k <= m; ++k) out << ",lambda_" << k;
  out << ",zero_multiplicity\n";
  const double to_units = omega_max / std::numbers::pi;
  for (const auto& s : spectra) {
    out << format_number(s.time * to_units);
    for (double e : s.eigenvalues) out << "," << format_number(e / omega_max);
    out << "," << s.zero_multiplicity << "\n";
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  for (const auto& axis : result.spec.axes) out << to_string(axis.parameter) << ",";
  out << to_string(result.spec.observable) << ",status\n";
  for (const auto& p : result.points) {
    for (double c : p.coords) out << format_number(c) << ",";
    out << (p.ok ? format_number(p.value) : std::string("nan")) << ","
        << (p.ok ? "ok" : "error") << "\n";
  }
}

void write_miscalibration_csv(std::ostream& out, const std::vector<MiscalibrationPoint>& points) {
  out << "t_max,rho_ideal,rho_ff,abs_delta\n";
  for (const auto& p : points) {
    out << format_number(p.t_max_units) << "," << format_number(p.ideal) << ","
        << format_number(p.perturbed) << "," << format_number(p.delta) << "\n";
  }
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
  out << "N,t_ctap,t_swap,faster\n";
  for (const auto& row : table.rows) {
    out << row.n << "," << (row.t_ctap ? format_number(*row.t_ctap) : std::string("nan")) << ","
        << format_number(row.t_swap) << "," << row.faster << "\n";
  }
}

void write_optimum_csv(std::ostream& out, const OptimumResult& result) {
  out << "t_max,rho_ff,kind\n";
  for (std::size_t i = 0; i < result.scan_t.size(); ++i)
    out << format_number(result.scan_t[i]) << "," << format_number(result.scan_rho[i]) << ",scan\n";
  out << format_number(result.t_max_units) << "," << format_number(result.rho_ff) << ",optimum\n";
}

void write_metadata(std::ostream& out, const Metadata& meta, const ExperimentConfig& config,
                    const PulseSchedule& schedule) {
  out << "# ctap run metadata\n";
  out << "tool_version = " << kToolVersion << "\n";
  out << "command = " << meta.command << "\n";
  out << "config_path = " << meta.config_path << "\n";
  out << "output_file = " << meta.output_file << "\n";
  out << "status = " << meta.status << "\n";
  out << "seedless = true\n";
  out << "integrator = rk4_fixed_step\n";
  out << "hermitize_each_step = true\n";
  out << "time_unit = pi/omega_max\n";
  out << "rate_unit = omega_max\n";
  for (const auto& [k, v] : meta.extra) out << k << " = " << v << "\n";
  out << "# schedule (absolute units, hbar = 1)\n";
  for (int k = 0; k < schedule.n_links(); ++k) {
    const auto& p = schedule.links[k];
    out << "link" << (k + 1) << " = " << to_string(schedule.families[k])
        << " amplitude=" << format_number(p.amplitude) << " peak=" << format_number(p.peak_time)
        << " stddev=" << format_number(p.stddev) << "\n";
  }
  out << "# effective configuration\n";
  out << serialize_config(config);
}

}  // namespace ctap
