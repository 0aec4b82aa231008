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

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ctap/chain_model.hpp"
#include "ctap/errors.hpp"

namespace ctap {
namespace {

// Printed 9x9 coupling matrix for three double dots, row by row, with
// 'i' = -omega_i, 'f' = -omega_f and '.' = 0.
Eigen::MatrixXd printed_three_dot_matrix(double wi, double wf) {
  const char* rows[9] = {".i.i.....", "i.f.i....", ".f...i...", "i...i.f..", ".i.i.f.f.",
                         "..i.f...f", "...f...i.", "....f.i.f", ".....f.f."};
  Eigen::MatrixXd m(9, 9);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c)
      m(r, c) = rows[r][c] == 'i' ? -wi : rows[r][c] == 'f' ? -wf : 0.0;
  return m;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

TEST(ChainConfig, DefaultsAreValid) {
  ChainConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c.sigma(), c.pulse_time() / 8.0);
  EXPECT_DOUBLE_EQ(c.omega_s_max(), 10.0);
  EXPECT_DOUBLE_EQ(c.pulse_time(), 25.0 * std::numbers::pi);
}

TEST(ChainConfig, RejectsInvalid) {
  ChainConfig c;
  c.n_dqd = 4;
  try {
    c.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "n_dqd must be odd");
  }
  c = {};
  c.t_max = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.gamma = -1e-3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.sigma_ratio = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(make_schedule(c), ConfigError);
}

TEST(BasisLabel, Examples) {
  EXPECT_EQ(basis_label(0, 3), (BasisIndex{1, 1, 0}));
  EXPECT_EQ(basis_label(8, 3), (BasisIndex{3, 3, 8}));
  EXPECT_EQ(basis_label(5, 3), (BasisIndex{2, 3, 5}));
  EXPECT_EQ(basis_name(5, 3), "P2S3");
  EXPECT_THROW(basis_label(9, 3), IndexError);
  EXPECT_THROW(basis_label(-1, 3), IndexError);
}

TEST(BasisLabel, RoundTripsFlatIndex) {
  for (int n : {3, 5, 9})
    for (int k = 0; k < n * n; ++k) {
      const auto b = basis_label(k, n);
      EXPECT_EQ(flat_index(b.pair_site, b.single_site, n), k);
      EXPECT_EQ(k, (b.pair_site - 1) * n + (b.single_site - 1));
    }
}

TEST(Schedule, PeakValues) {
  ChainConfig c;
  const auto s = make_schedule(c);
  ASSERT_EQ(s.n_links(), 2);
  const double t = 0.5 * c.pulse_time() + c.sigma();
  EXPECT_EQ(s.links[0](t), 1.0);
  EXPECT_NEAR(s.links[1](t), std::exp(-2.0), 1e-15);
  EXPECT_EQ(s.families[0], PulseFamily::kInitial);
  EXPECT_EQ(s.families[1], PulseFamily::kFinal);

  c.n_dqd = 5;
  const auto s5 = make_schedule(c);
  ASSERT_EQ(s5.n_links(), 4);
  for (int k = 1; k <= 2; ++k) {
    EXPECT_EQ(s5.families[k], PulseFamily::kInterior);
    EXPECT_DOUBLE_EQ(s5.links[k](0.5 * c.pulse_time()), 10.0);
    EXPECT_DOUBLE_EQ(s5.links[k].stddev, std::sqrt(2.0) * c.sigma());
  }
}

TEST(Schedule, CounterIntuitiveOrder) {
  ChainConfig c;
  c.n_dqd = 7;
  const auto s = make_schedule(c);
  EXPECT_LT(s.links.back().peak_time, s.links.front().peak_time);
  EXPECT_DOUBLE_EQ(s.links.back().peak_time, 0.5 * c.pulse_time() - c.sigma());
}

TEST(Schedule, MirrorSymmetry) {
  ChainConfig c;
  c.t_max = 17.3;
  const auto s = make_schedule(c);
  const double mid = 0.5 * c.pulse_time();
  for (double d = -40.0; d <= 40.0; d += 0.37)
    EXPECT_NEAR(s.links[0](mid + d), s.links[1](mid - d), 1e-15);
}

TEST(Schedule, NonNegative) {
  ChainConfig c;
  c.n_dqd = 5;
  const auto s = make_schedule(c);
  for (double t = -100.0; t < 200.0; t += 0.9)
    for (double r : s.rates_at(t)) EXPECT_GE(r, 0.0);
}

TEST(Schedule, TimeReversal) {
  ChainConfig c;
  c.n_dqd = 5;
  const auto s = make_schedule(c);
  const auto r = time_reversed(s, c.t_end());
  for (double t = 0.0; t < c.t_end(); t += 3.1)
    for (int k = 0; k < s.n_links(); ++k) EXPECT_NEAR(r.links[k](t), s.links[k](c.t_end() - t), 1e-14);
}

TEST(Hamiltonian, MatchesPrintedMatrix) {
  ChainConfig c;
  const auto s = make_schedule(c);
  for (double t : {0.2 * c.pulse_time(), 0.5 * c.pulse_time(), 0.71 * c.pulse_time()}) {
    const auto rates = s.rates_at(t);
    const auto w = build_hamiltonian(s, t, 3);
    EXPECT_EQ(w.time, t);
    EXPECT_TRUE(w.matrix == printed_three_dot_matrix(rates[0], rates[1]));
  }
  EXPECT_TRUE(hamiltonian_from_rates({0.3, 0.7}) == printed_three_dot_matrix(0.3, 0.7));
}

TEST(Hamiltonian, VanishesFarFromPulses) {
  ChainConfig c;
  c.n_dqd = 5;
  const auto s = make_schedule(c);
  EXPECT_TRUE(build_hamiltonian(s, -1e4, 5).matrix.isZero(0.0));
}

TEST(Hamiltonian, KroneckerSumOracle) {
  ChainConfig c;
  c.n_dqd = 5;
  const auto s = make_schedule(c);
  for (double t : {0.3 * c.pulse_time(), 0.55 * c.pulse_time()}) {
    const auto a = hopping_matrix(s.rates_at(t));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(5, 5);
    const Eigen::MatrixXd oracle = kron(a, id) + kron(id, a);
    const auto w = build_hamiltonian(s, t, 5).matrix;
    EXPECT_LE((w - oracle).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Hamiltonian, StructuralInvariants) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int n : {3, 5, 7}) {
    std::vector<double> rates(n - 1);
    for (auto& r : rates) r = u(rng);
    const auto w = hamiltonian_from_rates(rates);
    EXPECT_TRUE(w == w.transpose());
    EXPECT_TRUE(w.diagonal().isZero(0.0));
    for (int i = 0; i < n * n; ++i)
      for (int j = 0; j < n * n; ++j) {
        if (w(i, j) == 0.0) continue;
        const auto bi = basis_label(i, n), bj = basis_label(j, n);
        const int da = std::abs(bi.pair_site - bj.pair_site);
        const int db = std::abs(bi.single_site - bj.single_site);
        EXPECT_EQ(da + db, 1) << i << "," << j;
      }
  }
}

TEST(Hamiltonian, EigenvaluesArePairSums) {
  const std::vector<double> rates{0.4, 3.0, 2.2, 0.9};
  const auto a = hopping_matrix(rates);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a);
  std::vector<double> sums;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) sums.push_back(ea.eigenvalues()(i) + ea.eigenvalues()(j));
  std::sort(sums.begin(), sums.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ew(hamiltonian_from_rates(rates));
  for (int k = 0; k < 25; ++k) EXPECT_NEAR(ew.eigenvalues()(k), sums[k], 1e-10);
}

TEST(Hamiltonian, DimensionMismatch) {
  const auto s = make_schedule(ChainConfig{});
  EXPECT_THROW(build_hamiltonian(s, 0.0, 5), DimensionError);
}

}  // namespace
}  // namespace ctap
