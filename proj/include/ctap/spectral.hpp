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
#include <array>
#include <vector>

#include "ctap/chain_model.hpp"
#include "ctap/dynamics.hpp"

namespace ctap {

/// Relative tolerance for counting zero eigenvalues, in units of omega_max.
inline constexpr double kDegeneracyTolerance = 1e-9;

struct SpectrumSample {
  double time = 0.0;
  std::vector<double> eigenvalues;  // ascending
  int zero_multiplicity = 0;
};

/// Reference rate of a schedule: the largest external (first/last link)
/// peak amplitude.
double reference_rate(const PulseSchedule& schedule);

SpectrumSample spectrum_at(const PulseSchedule& schedule, double t, int n_dqd);

/// Evenly spaced spectra over [t0, t1], `count` samples.
std::vector<SpectrumSample> spectrum_series(const PulseSchedule& schedule, int n_dqd, double t0,
                                            double t1, int count);

/// Zero-energy eigenstates |D_0>, |D_-1>, |D_1> of the three-double-dot
/// coupling matrix, in that order (9-component vectors).
std::array<Eigen::VectorXd, 3> degenerate_triplet(double omega_i, double omega_f);

struct DarkState {
  Eigen::VectorXd vector;
  double omega_i = 0.0;
  double omega_f = 0.0;
};

/// Transport dark state for three double dots:
/// [wf^2 |P1S1> - wi wf (|P1S3> + |P3S1>) + wi^2 |P3S3>] / (wi^2 + wf^2).
/// No weight ever sits on the central double dot.
DarkState dark_state(double omega_i, double omega_f);

/// Projector onto the eigenvectors of `w` whose eigenvalue magnitude is
/// below `tolerance`.
Eigen::MatrixXd zero_energy_projector(const Eigen::MatrixXd& w, double tolerance);

/// 1 - tr(P0(t) rho(t)) for every stored snapshot of the trajectory.
std::vector<double> leakage(const Trajectory& trajectory, const PulseSchedule& schedule);

}  // namespace ctap
