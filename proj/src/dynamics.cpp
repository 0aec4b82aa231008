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

#include "ctap/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <mutex>

#include "ctap/errors.hpp"

namespace ctap {

namespace {

std::mutex audit_mutex;
IntegrationAudit audit;

void record_audit(const Trajectory& traj, bool pure_unitary) {
  std::lock_guard lock(audit_mutex);
  ++audit.runs;
  audit.max_trace_error = std::max(audit.max_trace_error, traj.max_trace_error);
  audit.max_hermiticity_drift = std::max(audit.max_hermiticity_drift, traj.max_hermiticity_drift);
  audit.min_snapshot_eigenvalue =
      std::min(audit.min_snapshot_eigenvalue, traj.min_snapshot_eigenvalue);
  if (pure_unitary)
    audit.max_purity_error = std::max(
        {audit.max_purity_error, 1.0 - traj.min_purity, traj.max_purity - 1.0});
}

}  // namespace

IntegrationAudit integration_audit() {
  std::lock_guard lock(audit_mutex);
  return audit;
}

void reset_integration_audit() {
  std::lock_guard lock(audit_mutex);
  audit = {};
}

DensityMatrix DensityMatrix::basis_state(int dim, int index) {
  if (index < 0 || index >= dim) throw IndexError("basis state index out of range");
  DensityMatrix rho{Eigen::MatrixXcd::Zero(dim, dim), 0.0};
  rho.matrix(index, index) = 1.0;
  return rho;
}

double hermiticity_error(const Eigen::MatrixXcd& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double purity(const Eigen::MatrixXcd& rho) {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.squaredNorm();
}

double min_eigenvalue(const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return solver.eigenvalues().minCoeff();
}

void validate_state(const DensityMatrix& rho, const StateTolerance& tol) {
  if (!rho.matrix.allFinite()) throw StateValidityError("non-finite density matrix", rho.time);
  if (hermiticity_error(rho.matrix) > tol.hermiticity)
    throw StateValidityError("density matrix is not Hermitian", rho.time);
  if (std::abs(rho.matrix.trace() - Complex(1.0)) > tol.trace)
    throw StateValidityError("density matrix trace differs from 1", rho.time);
  if (min_eigenvalue(rho.matrix) < -tol.positivity)
    throw StateValidityError("density matrix has a negative eigenvalue", rho.time);
}

Eigen::MatrixXcd rhs(const DensityMatrix& rho, const HamiltonianFrame& w, double gamma) {
  if (rho.matrix.rows() != w.matrix.rows() || rho.matrix.cols() != w.matrix.cols())
    throw DimensionError("density matrix and Hamiltonian dimensions differ");
  const Eigen::MatrixXcd wc = w.matrix.cast<Complex>();
  Eigen::MatrixXcd out = Complex(0.0, -1.0) * (wc * rho.matrix - rho.matrix * wc);
  if (gamma != 0.0) {
    Eigen::MatrixXcd coherences = rho.matrix;
    coherences.diagonal().setZero();
    out -= gamma * coherences;
  }
  return out;
}

StructuredRhs::StructuredRhs(int n_dqd) : n_(n_dqd) {
  if (n_dqd < 2) throw DimensionError("chain needs at least two double dots");
  lower_.assign(n_, 0.0);
  upper_.assign(n_, 0.0);
  lower2_.assign(2 * n_, 0.0);
  upper2_.assign(2 * n_, 0.0);
  column_.resize(dim());
}

void StructuredRhs::prepare(const Eigen::MatrixXcd& rho, const std::vector<double>& rates) {
  const int n = n_;
  const int d = dim();
  if (rho.rows() != d || rho.cols() != d) throw DimensionError("density matrix has wrong size");
  if (static_cast<int>(rates.size()) != n - 1) throw DimensionError("wrong number of rates");
  // Site k couples to k-1 with rate lower_[k] and to k+1 with upper_[k].
  for (int k = 0; k < n; ++k) {
    lower_[k] = k > 0 ? rates[k - 1] : 0.0;
    upper_[k] = k + 1 < n ? rates[k] : 0.0;
    lower2_[2 * k] = lower2_[2 * k + 1] = lower_[k];
    upper2_[2 * k] = upper2_[2 * k + 1] = upper_[k];
  }
}

// Column c of -i[W, x] - gamma (x - diag(x)) into column_. Every access is to
// a contiguous column: W x acts inside column c, and column c of x W is a
// combination of the (at most four) columns of x adjacent to c. Complex
// columns are processed as interleaved (re, im) doubles; all coefficients are
// real.
void StructuredRhs::column(const Eigen::MatrixXcd& x, int c, double gamma, int blocks) {
  const int n = n_;
  const int d = dim();
  const int row_len = 2 * n;
  const double* __restrict src =
      reinterpret_cast<const double*>(x.data() + static_cast<std::ptrdiff_t>(c) * d);
  double* __restrict out = reinterpret_cast<double*>(column_.data());
  const double* __restrict lo = lower2_.data();
  const double* __restrict up = upper2_.data();

  // W x: each column is an n x n block indexed (a, b), b fastest. Pair hops
  // move whole rows of the block, single hops move within a row. Only the
  // first `blocks` rows of the block are produced.
  for (int a = 0; a < blocks; ++a) {
    const double* row = src + a * row_len;
    double* out_row = out + a * row_len;
    const double wl = lower_[a];
    const double wu = upper_[a];
    const double* prev = a > 0 ? row - row_len : row;
    const double* next = a + 1 < n ? row + row_len : row;
    for (int i = 0; i < row_len; ++i) out_row[i] = -(wl * prev[i] + wu * next[i]);
    out_row[0] -= up[0] * row[2];
    out_row[1] -= up[1] * row[3];
    for (int i = 2; i < row_len - 2; ++i)
      out_row[i] -= lo[i] * row[i - 2] + up[i] * row[i + 2];
    out_row[row_len - 2] -= lo[row_len - 2] * row[row_len - 4];
    out_row[row_len - 1] -= lo[row_len - 1] * row[row_len - 3];
  }

  // - x W: add back rate * x[:, j] for each neighbour j of c.
  const int ac = c / n;
  const int bc = c % n;
  const int len = 2 * n * blocks;
  auto add = [&](int j, double w) {
    const double* __restrict col =
        reinterpret_cast<const double*>(x.data() + static_cast<std::ptrdiff_t>(j) * d);
    for (int i = 0; i < len; ++i) out[i] += w * col[i];
  };
  if (ac > 0) add(c - n, lower_[ac]);
  if (ac + 1 < n) add(c + n, upper_[ac]);
  if (bc > 0) add(c - 1, lower_[bc]);
  if (bc + 1 < n) add(c + 1, upper_[bc]);

  // Multiply by -i and dephase the coherences.
  for (int r = 0; r < n * blocks; ++r) {
    const double re = out[2 * r];
    const double im = out[2 * r + 1];
    out[2 * r] = im - gamma * src[2 * r];
    out[2 * r + 1] = -re - gamma * src[2 * r + 1];
  }
  out[2 * c] += gamma * src[2 * c];
  out[2 * c + 1] += gamma * src[2 * c + 1];
}

void StructuredRhs::operator()(const Eigen::MatrixXcd& rho, const std::vector<double>& rates,
                               double gamma, Eigen::MatrixXcd& out) {
  prepare(rho, rates);
  const int d = dim();
  out.resize(d, d);
  for (int c = 0; c < d; ++c) {
    column(rho, c, gamma, n_);
    out.col(c) = column_;
  }
}

void StructuredRhs::stage(const Eigen::MatrixXcd& x, const std::vector<double>& rates,
                          double gamma, const Eigen::MatrixXcd& base, double stage_weight,
                          Eigen::MatrixXcd* stage_out, double acc_weight, Eigen::MatrixXcd& acc) {
  prepare(x, rates);
  const int n = n_;
  const int d = dim();
  if (stage_out) stage_out->resize(d, d);
  for (int c = 0; c < d; ++c) {
    // Rows 0..c are the upper triangle; round up to whole blocks.
    const int blocks = c / n + 1;
    const int len = 2 * n * blocks;
    column(x, c, gamma, blocks);
    const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(c) * d;
    const double* __restrict k = reinterpret_cast<const double*>(column_.data());
    double* __restrict a = reinterpret_cast<double*>(acc.data() + offset);
    for (int i = 0; i < len; ++i) a[i] += acc_weight * k[i];
    if (stage_out) {
      const double* __restrict b = reinterpret_cast<const double*>(base.data() + offset);
      double* __restrict s = reinterpret_cast<double*>(stage_out->data() + offset);
      for (int i = 0; i < len; ++i) s[i] = b[i] + stage_weight * k[i];
    }
  }
  if (stage_out) mirror_upper(*stage_out);
}

void mirror_upper(Eigen::MatrixXcd& m) {
  const Eigen::Index d = m.rows();
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < c; ++r) m(c, r) = std::conj(m(r, c));
    m(c, c) = Complex(m(c, c).real(), 0.0);
  }
}

double Trajectory::peak_population(int index) const {
  double peak = 0.0;
  for (const auto& p : populations) peak = std::max(peak, p.at(index));
  return peak;
}

namespace {

std::vector<long long> sample_steps(long long n_steps, int samples) {
  std::vector<long long> steps;
  steps.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const long long s = (static_cast<long long>(i) * n_steps) / (samples - 1);
    if (steps.empty() || s > steps.back()) steps.push_back(s);
  }
  return steps;
}

}  // namespace

Trajectory evolve(const ChainConfig& config, const PulseSchedule& schedule,
                  const DensityMatrix& rho0, const EvolveOptions& options) {
  config.validate();
  const int n = config.n_dqd;
  const int d = n * n;
  if (schedule.n_dqd() != n) throw DimensionError("schedule does not match n_dqd");
  if (rho0.dim() != d) throw DimensionError("initial state has wrong dimension");
  validate_state(rho0, options.tolerance);

  const double t_end = config.t_end();
  const long long n_steps = std::max<long long>(
      1, std::llround(static_cast<double>(config.steps_per_tmax) * (1.0 + config.margin_ratio)));
  const double h = t_end / static_cast<double>(n_steps);
  const double gamma = config.dephasing_rate();
  const auto samples = sample_steps(n_steps, config.samples);

  StructuredRhs f(n);
  Eigen::MatrixXcd rho = rho0.matrix;
  Eigen::MatrixXcd acc(d, d), stage_a(d, d), stage_b(d, d);
  std::vector<double> rates;

  Trajectory traj;
  traj.n_dqd = n;
  traj.times.reserve(samples.size());
  traj.populations.reserve(samples.size());

  std::size_t next_sample = 0;
  int sample_count = 0;
  auto record = [&](long long step) {
    const double t = static_cast<double>(step) * h;
    if (!rho.allFinite()) throw IntegrationError("integrator produced a non-finite state", t);
    std::vector<double> pop(d);
    for (int k = 0; k < d; ++k) pop[k] = rho(k, k).real();
    const double p = purity(rho);
    traj.times.push_back(t);
    traj.populations.push_back(std::move(pop));
    traj.traces.push_back(rho.trace().real());
    traj.purities.push_back(p);
    traj.min_purity = std::min(traj.min_purity, p);
    traj.max_purity = std::max(traj.max_purity, p);
    const bool last = next_sample + 1 == samples.size();
    const bool stride_hit =
        options.full_state_stride > 0 && sample_count % options.full_state_stride == 0;
    if (stride_hit || last) {
      const double lambda = min_eigenvalue(rho);
      traj.min_snapshot_eigenvalue = std::min(traj.min_snapshot_eigenvalue, lambda);
      if (lambda < -options.tolerance.positivity)
        throw StateValidityError("density matrix has a negative eigenvalue", t);
      if (stride_hit) traj.full_states.push_back({rho, t});
    }
    ++sample_count;
    ++next_sample;
  };

  record(0);
  for (long long step = 0; step < n_steps; ++step) {
    const double t = static_cast<double>(step) * h;

    acc = rho;
    schedule.rates_at(t, rates);
    f.stage(rho, rates, gamma, rho, 0.5 * h, &stage_a, h / 6.0, acc);
    schedule.rates_at(t + 0.5 * h, rates);
    f.stage(stage_a, rates, gamma, rho, 0.5 * h, &stage_b, h / 3.0, acc);
    f.stage(stage_b, rates, gamma, rho, h, &stage_a, h / 3.0, acc);
    schedule.rates_at(t + h, rates);
    f.stage(stage_a, rates, gamma, rho, 0.0, nullptr, h / 6.0, acc);
    rho.swap(acc);

    const long long done = step + 1;
    const bool sampling = next_sample < samples.size() && samples[next_sample] == done;
    if (sampling) {
      // Only the upper triangle is integrated, so the diagonal's imaginary
      // part is the part of the drift that mirroring discards.
      traj.max_hermiticity_drift =
          std::max(traj.max_hermiticity_drift, rho.diagonal().imag().cwiseAbs().maxCoeff());
    }
    mirror_upper(rho);

    double trace = 0.0;
    for (int k = 0; k < d; ++k) trace += rho(k, k).real();
    if (!std::isfinite(trace))
      throw IntegrationError("integrator produced a non-finite state", done * h);
    const double trace_error = std::abs(trace - 1.0);
    traj.max_trace_error = std::max(traj.max_trace_error, trace_error);
    if (trace_error > options.tolerance.trace)
      throw StateValidityError("trace drifted beyond tolerance", done * h);

    if (sampling) record(done);
  }

  traj.final_state = {rho, t_end};
  if (traj.full_states.empty() || traj.full_states.back().time != traj.times.back())
    traj.full_states.push_back(traj.final_state);
  record_audit(traj, gamma == 0.0 && std::abs(purity(rho0.matrix) - 1.0) < 1e-12);
  return traj;
}

double transfer_probability(const ChainConfig& config, const PulseSchedule& schedule) {
  ChainConfig lean = config;
  lean.samples = 2;
  const int d = config.dim();
  const Trajectory traj = evolve(lean, schedule, DensityMatrix::basis_state(d, 0));
  return traj.final_population(d - 1);
}

double transfer_probability(const ChainConfig& config) {
  return transfer_probability(config, make_schedule(config));
}

double step_halving_delta(const ChainConfig& config, const PulseSchedule& schedule) {
  ChainConfig fine = config;
  fine.steps_per_tmax = 2 * config.steps_per_tmax;
  return std::abs(transfer_probability(config, schedule) - transfer_probability(fine, schedule));
}

}  // namespace ctap
