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
#include <complex>
#include <vector>

#include "ctap/chain_model.hpp"

namespace ctap {

using Complex = std::complex<double>;

/// rho(t) in the |P_a S_b> basis (pair-major ordering).
struct DensityMatrix {
  Eigen::MatrixXcd matrix;
  double time = 0.0;

  int dim() const { return static_cast<int>(matrix.rows()); }

  /// |k><k| for basis index k.
  static DensityMatrix basis_state(int dim, int index);
};

/// Tolerances used when validating density matrices.
struct StateTolerance {
  double hermiticity = 1e-10;
  double trace = 1e-8;
  double positivity = 1e-8;
};

/// Throws StateValidityError when any of the density-matrix invariants fails.
void validate_state(const DensityMatrix& rho, const StateTolerance& tol = {});

double hermiticity_error(const Eigen::MatrixXcd& rho);
double purity(const Eigen::MatrixXcd& rho);
double min_eigenvalue(const Eigen::MatrixXcd& rho);

/// Reference right-hand side: -i[W, rho] - gamma (rho - diag(rho)), computed
/// with dense matrix products.
Eigen::MatrixXcd rhs(const DensityMatrix& rho, const HamiltonianFrame& w, double gamma);

/// Sparse right-hand side exploiting W = A (+) A. Every row of W has at most
/// four nonzeros, so the commutator costs O(dim^2) instead of O(dim^3).
class StructuredRhs {
 public:
  explicit StructuredRhs(int n_dqd);

  int n_dqd() const { return n_; }
  int dim() const { return n_ * n_; }

  /// out = -i[W(rates), rho] - gamma (rho - diag(rho)). `out` is resized.
  void operator()(const Eigen::MatrixXcd& rho, const std::vector<double>& rates,
                  double gamma, Eigen::MatrixXcd& out);

  /// Fused Runge-Kutta stage: with k = f(x),
  ///   acc += acc_weight * k  and, when stage_out is given,
  ///   *stage_out = base + stage_weight * k.
  /// Only the upper triangle (rounded up to whole n-row blocks) of acc is
  /// updated; stage_out is completed by mirroring. x must be Hermitian and
  /// stage_out must not alias x or base.
  void stage(const Eigen::MatrixXcd& x, const std::vector<double>& rates, double gamma,
             const Eigen::MatrixXcd& base, double stage_weight, Eigen::MatrixXcd* stage_out,
             double acc_weight, Eigen::MatrixXcd& acc);

 private:
  void prepare(const Eigen::MatrixXcd& rho, const std::vector<double>& rates);
  void column(const Eigen::MatrixXcd& x, int c, double gamma, int blocks);

  int n_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  // lower_/upper_ duplicated per (re, im) component.
  std::vector<double> lower2_;
  std::vector<double> upper2_;
  Eigen::VectorXcd column_;
};

/// Copies the upper triangle onto the lower one (conjugated) and clears the
/// imaginary part of the diagonal, making m exactly Hermitian.
void mirror_upper(Eigen::MatrixXcd& m);

/// Populations and diagnostics sampled along an integration.
struct Trajectory {
  int n_dqd = 0;
  std::vector<double> times;
  /// populations[s][k]: diagonal entry k of rho at times[s].
  std::vector<std::vector<double>> populations;
  std::vector<double> traces;
  std::vector<double> purities;
  /// Optional snapshots, every `full_state_stride` samples plus the last one.
  std::vector<DensityMatrix> full_states;

  /// Worst invariant violations observed during the run.
  double max_trace_error = 0.0;
  double max_hermiticity_drift = 0.0;
  double min_snapshot_eigenvalue = 1.0;
  double min_purity = 1.0;
  double max_purity = 0.0;

  DensityMatrix final_state;

  double final_population(int index) const { return populations.back().at(index); }
  /// max over samples of the population of basis state `index`.
  double peak_population(int index) const;
};

struct EvolveOptions {
  /// Store a full density-matrix snapshot every this many samples; 0 keeps
  /// only the final state.
  int full_state_stride = 0;
  StateTolerance tolerance;
};

/// Integrates the dephasing master equation with fixed-step RK4 over
/// [0, t_max (1 + margin_ratio)]. Deterministic for a fixed config.
Trajectory evolve(const ChainConfig& config, const PulseSchedule& schedule,
                  const DensityMatrix& rho0, const EvolveOptions& options = {});

/// Worst invariant values over every completed evolve() call since the last
/// reset, across all threads.
struct IntegrationAudit {
  long long runs = 0;
  double max_trace_error = 0.0;
  double max_hermiticity_drift = 0.0;
  double min_snapshot_eigenvalue = 1.0;
  /// max |tr(rho^2) - 1| over samples of runs with gamma = 0 and a pure rho0.
  double max_purity_error = 0.0;
};

IntegrationAudit integration_audit();
void reset_integration_audit();

/// Final population of |P_N S_N> starting from |P_1 S_1>.
double transfer_probability(const ChainConfig& config, const PulseSchedule& schedule);

/// Same as above with the unperturbed schedule of `config`.
double transfer_probability(const ChainConfig& config);

/// |rho_ff(h) - rho_ff(h/2)| for the configured step h.
double step_halving_delta(const ChainConfig& config, const PulseSchedule& schedule);

}  // namespace ctap
