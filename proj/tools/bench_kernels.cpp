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

// Timing comparison of the serial reference paths against the structured
// and OpenMP-parallel ones.
//
//   bench_kernels [n_dqd] [repeats] [workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ctap/analysis.hpp"
#include "ctap/chain_model.hpp"
#include "ctap/dynamics.hpp"

namespace {

template <class Fn>
double seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 9;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 200;
  const int workers = argc > 3 ? std::atoi(argv[3]) : 4;

  ctap::ChainConfig config;
  config.n_dqd = n;
  const auto schedule = ctap::make_schedule(config);
  const double t = 0.5 * config.pulse_time();
  const auto frame = ctap::build_hamiltonian(schedule, t, n);
  auto rho = ctap::DensityMatrix::basis_state(config.dim(), 0);
  rho.matrix(0, 1) = rho.matrix(1, 0) = 0.1;

  Eigen::MatrixXcd dense_out;
  const double t_dense = seconds([&] {
    for (int i = 0; i < repeats; ++i) dense_out = ctap::rhs(rho, frame, 0.05);
  });

  ctap::StructuredRhs f(n);
  Eigen::MatrixXcd fast_out;
  const auto rates = schedule.rates_at(t);
  const double t_fast = seconds([&] {
    for (int i = 0; i < repeats; ++i) f(rho.matrix, rates, 0.05, fast_out);
  });

  std::printf("rhs n=%d dim=%d repeats=%d\n", n, config.dim(), repeats);
  std::printf("  dense      %10.3f ms/call\n", 1e3 * t_dense / repeats);
  std::printf("  structured %10.3f ms/call  (x%.1f)\n", 1e3 * t_fast / repeats, t_dense / t_fast);
  std::printf("  max |diff| %.3e\n", (dense_out - fast_out).cwiseAbs().maxCoeff());

  ctap::SweepSpec spec;
  spec.base.n_dqd = 3;
  spec.base.steps_per_tmax = 5000;
  spec.axes = {{ctap::SweepParameter::kTMax, 5.0, 40.0, 8},
               {ctap::SweepParameter::kGamma, 0.0, 0.05, 2}};
  ctap::SweepResult serial, parallel;
  const double t_serial = seconds([&] { serial = ctap::run_sweep_serial(spec); });
  const double t_parallel = seconds([&] { parallel = ctap::run_sweep(spec, workers); });
  bool same = serial.points.size() == parallel.points.size();
  for (std::size_t i = 0; same && i < serial.points.size(); ++i)
    same = serial.points[i].value == parallel.points[i].value;
  std::printf("sweep %zu points\n", serial.points.size());
  std::printf("  serial     %10.3f s\n", t_serial);
  std::printf("  %d workers  %10.3f s  (x%.2f)  identical=%s\n", workers, t_parallel,
              t_serial / t_parallel, same ? "yes" : "no");
  return same ? 0 : 1;
}
