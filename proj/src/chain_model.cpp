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

#include "ctap/chain_model.hpp"

#include <cmath>
#include <string>

#include "ctap/errors.hpp"

namespace ctap {

void ChainConfig::validate() const {
  if (n_dqd < 3) throw ConfigError("n_dqd must be >= 3");
  if (n_dqd % 2 == 0) throw ConfigError("n_dqd must be odd");
  if (!(omega_max > 0.0)) throw ConfigError("omega_max must be positive");
  if (!(omega_s_ratio > 0.0)) throw ConfigError("omega_s_ratio must be positive");
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (!(sigma_ratio > 0.0 && sigma_ratio < 0.5))
    throw ConfigError("sigma_ratio must lie in (0, 1/2)");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  if (!(margin_ratio >= 0.0)) throw ConfigError("margin_ratio must be nonnegative");
  if (steps_per_tmax < 1) throw ConfigError("steps_per_tmax must be >= 1");
  if (samples < 2) throw ConfigError("samples must be >= 2");
}

BasisIndex basis_label(int flat, int n_dqd) {
  if (n_dqd < 1) throw ArgumentError("n_dqd must be positive");
  if (flat < 0 || flat >= n_dqd * n_dqd)
    throw IndexError("basis index " + std::to_string(flat) + " out of range for N = " +
                     std::to_string(n_dqd));
  return {flat / n_dqd + 1, flat % n_dqd + 1, flat};
}

int flat_index(int pair_site, int single_site, int n_dqd) {
  if (pair_site < 1 || pair_site > n_dqd || single_site < 1 || single_site > n_dqd)
    throw IndexError("site out of range");
  return (pair_site - 1) * n_dqd + (single_site - 1);
}

std::string basis_name(int flat, int n_dqd) {
  const BasisIndex b = basis_label(flat, n_dqd);
  return "P" + std::to_string(b.pair_site) + "S" + std::to_string(b.single_site);
}

std::string_view to_string(PulseFamily family) {
  switch (family) {
    case PulseFamily::kInitial:
      return "omega_i";
    case PulseFamily::kInterior:
      return "omega_interior";
    case PulseFamily::kFinal:
      return "omega_f";
  }
  return "unknown";
}

double GaussianPulse::operator()(double t) const {
  const double x = (t - peak_time) / stddev;
  return amplitude * std::exp(-0.5 * x * x);
}

void PulseSchedule::rates_at(double t, std::vector<double>& out) const {
  out.resize(links.size());
  for (std::size_t k = 0; k < links.size(); ++k) out[k] = links[k](t);
}

std::vector<double> PulseSchedule::rates_at(double t) const {
  std::vector<double> out;
  rates_at(t, out);
  return out;
}

PulseSchedule make_schedule(const ChainConfig& config) {
  config.validate();
  const double sigma = config.sigma();
  const double centre = 0.5 * config.pulse_time();
  const int n_links = config.n_dqd - 1;

  PulseSchedule schedule;
  schedule.links.reserve(n_links);
  for (int k = 0; k < n_links; ++k) {
    if (k == 0) {
      schedule.links.push_back({config.omega_max, centre + sigma, sigma});
      schedule.families.push_back(PulseFamily::kInitial);
    } else if (k == n_links - 1) {
      schedule.links.push_back({config.omega_max, centre - sigma, sigma});
      schedule.families.push_back(PulseFamily::kFinal);
    } else {
      schedule.links.push_back({config.omega_s_max(), centre, std::sqrt(2.0) * sigma});
      schedule.families.push_back(PulseFamily::kInterior);
    }
  }
  return schedule;
}

PulseSchedule time_reversed(const PulseSchedule& schedule, double t_end) {
  PulseSchedule out = schedule;
  for (auto& pulse : out.links) pulse.peak_time = t_end - pulse.peak_time;
  return out;
}

Eigen::MatrixXd hopping_matrix(const std::vector<double>& rates) {
  const int n = static_cast<int>(rates.size()) + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    a(k, k + 1) = -rates[k];
    a(k + 1, k) = -rates[k];
  }
  return a;
}

Eigen::MatrixXd hamiltonian_from_rates(const std::vector<double>& rates) {
  const int n = static_cast<int>(rates.size()) + 1;
  const int dim = n * n;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int row = a * n + b;
      // single-electron hop b -> b+1 (W^(1))
      if (b + 1 < n) {
        w(row, row + 1) = -rates[b];
        w(row + 1, row) = -rates[b];
      }
      // pair hop a -> a+1 (W^(2))
      if (a + 1 < n) {
        w(row, row + n) = -rates[a];
        w(row + n, row) = -rates[a];
      }
    }
  }
  return w;
}

HamiltonianFrame build_hamiltonian(const PulseSchedule& schedule, double t, int n_dqd) {
  if (schedule.n_dqd() != n_dqd)
    throw DimensionError("schedule has " + std::to_string(schedule.n_links()) +
                         " links but n_dqd = " + std::to_string(n_dqd));
  return {hamiltonian_from_rates(schedule.rates_at(t)), t};
}

}  // namespace ctap
