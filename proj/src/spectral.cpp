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

#include "ctap/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ctap/errors.hpp"

namespace ctap {

namespace {

constexpr int kP1S1 = 0, kP1S2 = 1, kP1S3 = 2, kP2S1 = 3, kP2S2 = 4, kP2S3 = 5, kP3S1 = 6,
              kP3S2 = 7, kP3S3 = 8;

void require_nondegenerate(double omega_i, double omega_f) {
  if (!(omega_i * omega_i + omega_f * omega_f > 0.0))
    throw DegenerateInputError("omega_i and omega_f are both zero");
}

}  // namespace

double reference_rate(const PulseSchedule& schedule) {
  if (schedule.links.empty()) return 1.0;
  return std::max(schedule.links.front().amplitude, schedule.links.back().amplitude);
}

SpectrumSample spectrum_at(const PulseSchedule& schedule, double t, int n_dqd) {
  const HamiltonianFrame frame = build_hamiltonian(schedule, t, n_dqd);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(frame.matrix, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");

  SpectrumSample sample;
  sample.time = t;
  const Eigen::VectorXd& ev = solver.eigenvalues();
  sample.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(sample.eigenvalues.begin(), sample.eigenvalues.end());
  const double tol = kDegeneracyTolerance * reference_rate(schedule);
  sample.zero_multiplicity = static_cast<int>(std::count_if(
      sample.eigenvalues.begin(), sample.eigenvalues.end(),
      [tol](double x) { return std::abs(x) <= tol; }));
  return sample;
}

std::vector<SpectrumSample> spectrum_series(const PulseSchedule& schedule, int n_dqd, double t0,
                                            double t1, int count) {
  if (count < 2) throw ArgumentError("spectrum series needs at least two samples");
  std::vector<SpectrumSample> out(count);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / (count - 1);
    out[i] = spectrum_at(schedule, t, n_dqd);
  }
  return out;
}

std::array<Eigen::VectorXd, 3> degenerate_triplet(double wi, double wf) {
  require_nondegenerate(wi, wf);
  std::array<Eigen::VectorXd, 3> out;
  for (auto& v : out) v = Eigen::VectorXd::Zero(9);

  Eigen::VectorXd& d0 = out[0];
  d0[kP1S1] = -(wf * wf - wi * wi);
  d0[kP1S3] = wi * wf;
  d0[kP3S1] = wi * wf;
  d0[kP2S2] = -wi * wi;
  d0 /= std::sqrt(2.0 * std::pow(wi, 4) + std::pow(wf, 4));

  Eigen::VectorXd& dm1 = out[1];
  dm1[kP1S2] = wi;
  dm1[kP2S1] = -wi;
  dm1[kP2S3] = -wf;
  dm1[kP3S2] = wf;
  dm1 /= std::sqrt(2.0 * (wi * wi + wf * wf));

  Eigen::VectorXd& d1 = out[2];
  d1[kP1S1] = 1.0;
  d1[kP2S2] = -1.0;
  d1[kP3S3] = 1.0;
  d1 /= std::sqrt(3.0);
  return out;
}

DarkState dark_state(double wi, double wf) {
  require_nondegenerate(wi, wf);
  const double norm = wi * wi + wf * wf;
  DarkState d;
  d.omega_i = wi;
  d.omega_f = wf;
  d.vector = Eigen::VectorXd::Zero(9);
  d.vector[kP1S1] = wf * wf / norm;
  d.vector[kP1S3] = -wi * wf / norm;
  d.vector[kP3S1] = -wi * wf / norm;
  d.vector[kP3S3] = wi * wi / norm;
  return d;
}

Eigen::MatrixXd zero_energy_projector(const Eigen::MatrixXd& w, double tolerance) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(w.rows(), w.cols());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev[k]) <= tolerance) p += vecs.col(k) * vecs.col(k).transpose();
  }
  return p;
}

std::vector<double> leakage(const Trajectory& trajectory, const PulseSchedule& schedule) {
  if (trajectory.full_states.empty())
    throw InsufficientDataError("trajectory carries no full-state snapshots");
  const double tol = kDegeneracyTolerance * reference_rate(schedule);
  std::vector<double> out;
  out.reserve(trajectory.full_states.size());
  for (const auto& rho : trajectory.full_states) {
    const HamiltonianFrame frame = build_hamiltonian(schedule, rho.time, trajectory.n_dqd);
    const Eigen::MatrixXd p = zero_energy_projector(frame.matrix, tol);
    const double inside = (p.cast<Complex>() * rho.matrix).trace().real();
    out.push_back(1.0 - inside);
  }
  return out;
}

}  // namespace ctap
