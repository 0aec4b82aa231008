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

#include <Eigen/Dense>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace ctap {

/// Complete definition of one transfer experiment.
///
/// Rates are in units of omega_max and times in units of pi/omega_max, so
/// `t_max = 25` means 25 pi/omega_max and `gamma = 0.05` means 0.05 omega_max.
/// omega_max itself is an absolute rate (hbar = 1); the accessors below give
/// the absolute times and rates used by the integrator.
struct ChainConfig {
  int n_dqd = 3;
  double omega_max = 1.0;
  double omega_s_ratio = 10.0;
  double t_max = 25.0;
  double sigma_ratio = 1.0 / 8.0;
  double gamma = 0.0;
  double margin_ratio = 0.1;

  /// Integrator steps per t_max (step h = t_max / steps_per_tmax).
  int steps_per_tmax = 50000;
  /// Number of evenly spaced samples stored in a trajectory.
  int samples = 2000;

  double pulse_time() const { return t_max * std::numbers::pi / omega_max; }
  double dephasing_rate() const { return gamma * omega_max; }
  double sigma() const { return sigma_ratio * pulse_time(); }
  double omega_s_max() const { return omega_s_ratio * omega_max; }
  double t_end() const { return pulse_time() * (1.0 + margin_ratio); }
  int dim() const { return n_dqd * n_dqd; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  bool operator==(const ChainConfig&) const = default;
};

/// |P_a S_b>: pair of electrons in double dot `pair_site`, single electron in
/// double dot `single_site`. Sites are 1-based, the flat index is pair-major.
struct BasisIndex {
  int pair_site = 1;
  int single_site = 1;
  int flat_index = 0;

  bool operator==(const BasisIndex&) const = default;
};

BasisIndex basis_label(int flat_index, int n_dqd);
int flat_index(int pair_site, int single_site, int n_dqd);
/// "P{a}S{b}", used for CSV column headers.
std::string basis_name(int flat_index, int n_dqd);

enum class PulseFamily { kInitial, kInterior, kFinal };

std::string_view to_string(PulseFamily family);

/// One Gaussian tunnelling pulse, evaluated analytically at any time.
struct GaussianPulse {
  double amplitude = 0.0;
  double peak_time = 0.0;
  double stddev = 1.0;

  double operator()(double t) const;
  bool operator==(const GaussianPulse&) const = default;
};

/// The N-1 tunnelling rates omega_{k,k+1}(t). links[k] couples double dots
/// k+1 and k+2 (1-based).
struct PulseSchedule {
  std::vector<GaussianPulse> links;
  std::vector<PulseFamily> families;

  int n_links() const { return static_cast<int>(links.size()); }
  int n_dqd() const { return n_links() + 1; }

  /// Fills `out` (size n_links) with the rates at time t.
  void rates_at(double t, std::vector<double>& out) const;
  std::vector<double> rates_at(double t) const;

  bool operator==(const PulseSchedule&) const = default;
};

/// Counter-intuitive Gaussian sequence: the final link peaks at
/// t_max/2 - sigma, the first link at t_max/2 + sigma, and every interior link
/// shares a broader pulse (stddev sqrt(2) sigma) of height omega_s_max
/// centred on t_max/2.
PulseSchedule make_schedule(const ChainConfig& config);

/// Schedule whose rates are omega'(t) = omega(t_end - t).
PulseSchedule time_reversed(const PulseSchedule& schedule, double t_end);

/// W(t) at a fixed time.
struct HamiltonianFrame {
  Eigen::MatrixXd matrix;
  double time = 0.0;
};

/// N x N tridiagonal single-particle hopping matrix with off-diagonals
/// -omega_{k,k+1}.
Eigen::MatrixXd hopping_matrix(const std::vector<double>& rates);

/// Assembles W(t) = A(t) (+) A(t) in the |P_a S_b> basis. Pair hops change a,
/// single-electron hops change b; never both.
HamiltonianFrame build_hamiltonian(const PulseSchedule& schedule, double t,
                                   int n_dqd);

/// W for explicit rates, no schedule involved.
Eigen::MatrixXd hamiltonian_from_rates(const std::vector<double>& rates);

}  // namespace ctap
