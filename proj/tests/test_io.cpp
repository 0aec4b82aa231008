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

#include <charconv>
#include <random>
#include <sstream>

#include "ctap/errors.hpp"
#include "ctap/io.hpp"

namespace ctap {
namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(ParseConfig, RejectsEvenChain) {
  EXPECT_NE(config_error("n_dqd = 4\n").find("n_dqd must be odd"), std::string::npos);
}

TEST(ParseConfig, MinimalConfigGetsDefaults) {
  const auto cfg = parse_config_text("n_dqd = 3\nt_max = 25pi\ngamma = 0\n");
  EXPECT_EQ(cfg.chain.n_dqd, 3);
  EXPECT_EQ(cfg.chain.t_max, 25.0);
  EXPECT_EQ(cfg.chain.sigma_ratio, 0.125);
  EXPECT_EQ(cfg.chain.omega_s_ratio, 10.0);
  EXPECT_EQ(cfg.chain.margin_ratio, 0.1);
  EXPECT_DOUBLE_EQ(cfg.chain.sigma(), cfg.chain.pulse_time() / 8);
  EXPECT_EQ(parse_config_text("t_max = 25 π").chain.t_max, 25.0);
  EXPECT_EQ(parse_config_text("").chain, ChainConfig{});
}

TEST(ParseConfig, ZeroMarginEchoedInMetadata) {
  const auto cfg = parse_config_text("margin_ratio = 0  # no tail\n");
  EXPECT_EQ(cfg.chain.margin_ratio, 0.0);
  std::ostringstream meta;
  write_metadata(meta, Metadata{"simulate", "x.cfg", "trajectory.csv"}, cfg,
                 make_schedule(cfg.chain));
  const auto text = meta.str();
  EXPECT_NE(text.find("margin_ratio = 0\n"), std::string::npos);
  EXPECT_NE(text.find("sigma_ratio = 0.125\n"), std::string::npos);
  EXPECT_NE(text.find("omega_s_ratio = 10\n"), std::string::npos);
  EXPECT_NE(text.find("seedless = true\n"), std::string::npos);
  EXPECT_NE(text.find("tool_version = 1.0.0\n"), std::string::npos);
}

TEST(ParseConfig, ErrorsNameLineAndKey) {
  EXPECT_EQ(config_error("n_dqd = 3\nsigmaa = 0.1\n"), "line 2: unknown key 'sigmaa'");
  EXPECT_NE(config_error("gamma = abc").find("gamma"), std::string::npos);
  EXPECT_NE(config_error("just words").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("axis2 = gamma 0 1 3").find("axis1 must come first"), std::string::npos);
  EXPECT_NE(config_error("axis1 = t_max 1 2").find("axis1"), std::string::npos);
  EXPECT_NE(config_error("sigma_ratio = 0.7").find("sigma_ratio"), std::string::npos);
  EXPECT_THROW(parse_config("/nonexistent/ctap.cfg"), ConfigError);
}

TEST(ParseConfig, CommandSections) {
  const auto cfg = parse_config_text(R"(
    axis1 = t_max 5 40 8
    axis2 = gamma 0.001 0.1 3 log
    observable = infidelity_delta
    misc_target = omega_f
    misc_kind = peak_time
    misc_fraction = 0.1
    misc_tmax = 10 30 5
    swap_n = 3 5 7
    swap_omega_max = 0.1 10
    swap_delta_e_st = 500
  )");
  ASSERT_EQ(cfg.axes.size(), 2u);
  EXPECT_EQ(cfg.axes[1], (SweepAxis{SweepParameter::kGamma, 0.001, 0.1, 3, true}));
  EXPECT_EQ(cfg.observable, Observable::kInfidelityDelta);
  EXPECT_EQ(cfg.miscalibration,
            (MiscalibrationSpec{PulseFamily::kFinal, MiscalibrationKind::kPeakTime, 0.1}));
  EXPECT_EQ(cfg.misc_tmax_count, 5);
  EXPECT_EQ(cfg.swap.n_values, (std::vector<int>{3, 5, 7}));
  EXPECT_EQ(cfg.swap_omegas, (std::vector<double>{0.1, 10}));
  EXPECT_EQ(cfg.swap.delta_e_st, 500.0);
}

TEST(SerializeConfig, RoundTrip) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ExperimentConfig cfg;
    cfg.chain.n_dqd = 3 + 2 * static_cast<int>(u(rng) * 4);
    cfg.chain.omega_max = 0.1 + 10 * u(rng);
    cfg.chain.t_max = 1 + 60 * u(rng);
    cfg.chain.gamma = 0.2 * u(rng);
    cfg.chain.sigma_ratio = 0.05 + 0.4 * u(rng);
    cfg.chain.margin_ratio = u(rng) / 3;
    cfg.chain.samples = 2 + static_cast<int>(u(rng) * 5000);
    cfg.full_state_stride = static_cast<int>(u(rng) * 10);
    if (u(rng) < 0.5) cfg.spectrum_t0 = u(rng);
    cfg.axes = {{SweepParameter::kTMax, 1, 1 + 50 * u(rng), 2 + trial % 7}};
    if (trial % 2) cfg.axes.push_back({SweepParameter::kOmegaMax, 0.5, 20 * u(rng) + 1, 3, true});
    cfg.miscalibration.fraction = u(rng) - 0.5;
    cfg.swap_omegas = {u(rng) + 0.01, 3 * u(rng) + 0.01};
    cfg.swap.omega_max = cfg.swap_omegas.front();
    const auto once = parse_config_text(serialize_config(cfg));
    EXPECT_EQ(once, cfg);
    EXPECT_EQ(parse_config_text(serialize_config(once)), once);
    EXPECT_EQ(serialize_config(once), serialize_config(cfg));
  }
}

TEST(ApplySetting, Overrides) {
  ExperimentConfig cfg;
  apply_setting(cfg, "gamma", "0.05");
  apply_setting(cfg, " n_dqd ", "5");
  EXPECT_EQ(cfg.chain.gamma, 0.05);
  EXPECT_EQ(cfg.chain.n_dqd, 5);
  EXPECT_THROW(apply_setting(cfg, "bogus", "1"), ConfigError);
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_short(0.1), "0.1");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    for (const auto& s : {format_number(x), format_short(x)}) {
      double y = 0;
      std::from_chars(s.data(), s.data() + s.size(), y);
      EXPECT_EQ(x, y);
    }
  }
}

TEST(Csv, Trajectory) {
  Trajectory traj;
  traj.n_dqd = 3;
  traj.times = {0.0, std::numbers::pi};
  traj.populations = {std::vector<double>(9, 0.0), std::vector<double>(9, 0.0)};
  traj.populations[0][0] = 1.0;
  traj.populations[1][8] = 1.0;
  traj.traces = {1.0, 1.0};
  traj.purities = {1.0, 0.5};
  std::ostringstream out;
  write_trajectory_csv(out, traj, 2.0);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "t,P1S1,P1S2,P1S3,P2S1,P2S2,P2S3,P3S1,P3S2,P3S3,trace,purity");
  EXPECT_EQ(l[1], "0,1,0,0,0,0,0,0,0,0,1,1");
  EXPECT_EQ(l[2], "2,0,0,0,0,0,0,0,0,1,1,0.5");
}

TEST(Csv, Spectrum) {
  std::ostringstream out;
  write_spectrum_csv(out, {{std::numbers::pi, {-1.0, 0.0, 0.0, 0.0, 1.0}, 3}}, 1.0);
  const auto l = lines(out.str());
  EXPECT_EQ(l[0], "t,lambda_1,lambda_2,lambda_3,lambda_4,lambda_5,zero_multiplicity");
  EXPECT_EQ(l[1], "1,-1,0,0,0,1,3");
}

TEST(Csv, SweepMarksErrors) {
  SweepResult r;
  r.spec.axes = {{SweepParameter::kTMax, 1, 200, 2}};
  r.grid = {{1, 200}};
  r.points = {{{1.0}, 0.25, true, ""}, {{200.0}, 0.0, false, "trace drifted"}};
  std::ostringstream out;
  write_sweep_csv(out, r);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "t_max,transfer_probability,status");
  EXPECT_EQ(l[1], "1,0.25,ok");
  EXPECT_EQ(l[2], "200,nan,error");
}

TEST(Csv, Comparison) {
  ComparisonTable t;
  t.rows = {{3, 5.0, 10.0, 22.508, "ctap"}, {5, std::nullopt, 0.0, 45.016, "unreachable"}};
  std::ostringstream out;
  write_comparison_csv(out, t);
  const auto l = lines(out.str());
  EXPECT_EQ(l[0], "N,t_ctap,t_swap,faster");
  EXPECT_EQ(l[1], "3,5,22.507999999999999,ctap");
  EXPECT_EQ(l[2].substr(0, 6), "5,nan,");
}

}  // namespace
}  // namespace ctap
