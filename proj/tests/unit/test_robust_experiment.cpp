// SPDX-License-Identifier: Apache-2.0
//
// irscovert: covert beamforming for IRS-assisted MISO links
// Copyright (C) 2026 The irscovert authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "irscovert/channel.hpp"
#include "irscovert/covert_robust.hpp"
#include "irscovert/experiment.hpp"

using namespace irscovert;

namespace {

ChannelSet instance(std::uint64_t seed, Index n = 4, Index m = 4) {
  Geometry g;
  g.n_tx = n;
  g.n_irs = m;
  return sample_channels(g, FadingParams{}, seed);
}

RobustParams robust_params(double eps, KlCase kc) {
  RobustParams rp;
  rp.p_total = dbm_to_watts(-10.0);
  rp.sigma_b2 = rp.sigma_w2 = dbm_to_watts(-80.0);
  rp.epsilon = eps;
  rp.kl_case = kc;
  return rp;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

long columns(const std::string& line) { return std::count(line.begin(), line.end(), ',') + 1; }

}  // namespace

TEST(RobustInterval, SecondCaseInvertsTheFirst) {
  const RatioInterval a = ratio_interval(0.1, KlCase::Kl01);
  const RatioInterval b = ratio_interval(0.1, KlCase::Kl10);
  EXPECT_LT(a.lo, 1.0);
  EXPECT_GT(a.hi, 1.0);
  EXPECT_DOUBLE_EQ(b.lo, 1.0 / a.hi);
  EXPECT_DOUBLE_EQ(b.hi, 1.0 / a.lo);
  const RobustParams rp = robust_params(0.1, KlCase::Kl01);
  EXPECT_GT(rp.power_hi(), 0.0);
  EXPECT_LT(rp.power_lo(), 0.0);
  // The upper power bound is larger in the first case.
  EXPECT_GT(rp.power_hi(), robust_params(0.1, KlCase::Kl10).power_hi());
  EXPECT_EQ(kl_case_from_string(to_string(KlCase::Kl10)), KlCase::Kl10);
  EXPECT_THROW(kl_case_from_string("kl11"), ContractViolation);
}

TEST(RobustModel, ValidationAndStacking) {
  const ChannelSet ch = instance(1);
  EllipsoidModel bad = EllipsoidModel::balls(4, 4, 1e-4);
  bad.v_aw = -1.0;
  EXPECT_THROW(bad.validate(4, 4), DomainError);
  EXPECT_THROW(EllipsoidModel::balls(3, 4, 1e-4).validate(4, 4), DimensionError);

  const ComplexVector q = ComplexVector::Ones(4);
  const StackedEllipsoid st = stacked_ellipsoid(ch, q, EllipsoidModel::balls(4, 4, 1e-4));
  EXPECT_EQ(st.e.rows(), 8);
  const ComplexRowVector t_w = effective_channels(ch, q).t_w;
  EXPECT_LE((st.t_hat() - t_w).norm(), 1e-12 * t_w.norm());
  EXPECT_DOUBLE_EQ(st.v, 1e-4);

  const StackedEllipsoid direct = stacked_ellipsoid(instance(1, 4, 0), ComplexVector(0),
                                                    EllipsoidModel::balls(4, 0, 1e-4));
  EXPECT_EQ(direct.e.rows(), 4);
}

TEST(RobustModel, WorstCasePowerBoundsSampledErrors) {
  const ChannelSet ch = instance(2);
  const ComplexVector q = ComplexVector::Ones(4);
  const EllipsoidModel model = EllipsoidModel::balls(4, 4, 2e-4);
  const StackedEllipsoid st = stacked_ellipsoid(ch, q, model);
  CounterRng rng(9);
  const ComplexVector w = 1e-2 * rng.complex_normal_vector(4);
  const double bound = st.worst_case_power(w);
  const ComplexVector hw = ch.h_ai * w;
  for (int i = 0; i < 2000; ++i) {
    const ComplexVector daw = sample_ellipsoid(model.c_aw, model.v_aw, i % 2 == 0, rng);
    const ComplexVector diw = sample_ellipsoid(model.c_iw, model.v_iw, i % 2 == 0, rng);
    const Complex y = (ch.h_aw + daw).dot(w) + (ch.h_iw + diw).conjugate().cwiseProduct(q).cwiseProduct(hw).sum();
    EXPECT_LE(std::norm(y), bound * (1.0 + 1e-12));
  }
}

TEST(RobustModel, EllipsoidSamplesRespectTheShape) {
  CounterRng rng(3);
  const ComplexMatrix b = rng.complex_normal_matrix(3, 3);
  const HermitianMatrix c(ComplexMatrix(b * b.adjoint() + ComplexMatrix::Identity(3, 3)));
  for (int i = 0; i < 200; ++i) {
    const bool boundary = i % 2 == 0;
    const ComplexVector d = sample_ellipsoid(c, 0.3, boundary, rng);
    const double f = c.quadratic_form(d);
    if (boundary) {
      EXPECT_NEAR(f, 0.3, 1e-12);
    } else {
      EXPECT_LE(f, 0.3 * (1.0 + 1e-12));
    }
  }
  EXPECT_EQ(sample_ellipsoid(c, 0.0, true, rng).norm(), 0.0);
}

TEST(RobustLmi, MatricesAreHermitianWithExpectedCorners) {
  CounterRng rng(5);
  const ComplexVector w = rng.complex_normal_vector(3);
  const HermitianMatrix wm = HermitianMatrix::outer(w);
  const ComplexVector g = rng.complex_normal_vector(3);
  const HermitianMatrix c = HermitianMatrix::identity(3);
  const RatioInterval r{0.5, 1.5};
  const LmiPair p = build_lmis(wm, g, c, 0.2, r, 2.0, 0.7, 1.1);
  EXPECT_EQ(p.lower.dim(), 4);
  const double gwg = wm.quadratic_form(g);
  EXPECT_NEAR(p.lower(3, 3).real(), gwg - 2.0 * (0.5 - 1.0) - 0.7 * 0.2, 1e-12 * (1.0 + gwg));
  EXPECT_NEAR(p.upper(3, 3).real(), -gwg + 2.0 * (1.5 - 1.0) - 1.1 * 0.2, 1e-12 * (1.0 + gwg));
  EXPECT_NEAR(p.upper(0, 0).real(), -std::norm(w(0)) + 1.1, 1e-12);
  EXPECT_THROW(build_lmis(wm, g, c, 0.2, r, 2.0, -1.0, 0.0), DomainError);
  EXPECT_THROW(build_lmis(wm, ComplexVector(2), c, 0.2, r, 2.0, 0.0, 0.0), DimensionError);
}

TEST(RobustLmi, UpperLmiIsFeasibleExactlyWhenTheBoundHolds) {
  // S-lemma: some eta makes the upper matrix PSD iff the bound holds on the
  // whole ball, whose worst case has a closed form here.
  CounterRng rng(6);
  auto certifiable = [](const HermitianMatrix& wm, const ComplexVector& g, double v, double hi) {
    for (double eta = 1e-3; eta < 1e4; eta *= 1.02) {
      const LmiPair p = build_lmis(wm, g, HermitianMatrix::identity(g.size()), v, {0.5, hi}, 1.0, 0.0, eta);
      if (lambda_min(p.upper) >= 0.0) return true;
    }
    return false;
  };
  for (int t = 0; t < 20; ++t) {
    const ComplexVector w = rng.complex_normal_vector(3);
    const HermitianMatrix wm = HermitianMatrix::outer(w);
    const ComplexVector g = rng.complex_normal_vector(3);
    const double v = 0.05;
    const double worst = std::pow(std::abs(g.dot(w)) + std::sqrt(v) * w.norm(), 2);
    EXPECT_TRUE(certifiable(wm, g, v, 1.0 + 1.1 * worst));
    EXPECT_FALSE(certifiable(wm, g, v, 1.0 + 0.9 * worst));
    for (int i = 0; i < 200; ++i) {
      const ComplexVector d = sample_ellipsoid(HermitianMatrix::identity(3), v, i % 2 == 0, rng);
      EXPECT_LE(wm.quadratic_form(g + d), worst * (1.0 + 1e-12));
    }
  }
}

TEST(RobustTransmit, RelaxedSolutionSatisfiesTheLmiAndSamples) {
  const RobustParams rp = robust_params(0.1, KlCase::Kl01);
  const ChannelSet ch = instance(11);
  const ComplexVector q = ComplexVector::Ones(4);
  const EllipsoidModel model = EllipsoidModel::balls(4, 4, 2e-4);
  const RobustTransmitStep s = solve_robust_w(ch, q, model, rp);
  const StackedEllipsoid st = stacked_ellipsoid(ch, q, model);
  EXPECT_LE(st.worst_case_power(s.w), rp.power_hi() * (1.0 + 1e-9));
  EXPECT_LE(s.w.squaredNorm(), rp.p_total * (1.0 + 1e-8));
  EXPECT_GE(s.eta2, 0.0);
  EXPECT_GT(received_power(effective_channels(ch, q).t_b, s.w), 0.0);
  // Sampled warden power for the relaxed matrix stays under the bound.
  CounterRng rng(1);
  const HermitianMatrix w_hat = s.relaxed.congruence(st.e);
  for (int i = 0; i < 500; ++i) {
    const ComplexVector d = sample_ellipsoid(st.c, st.v, true, rng);
    EXPECT_LE(w_hat.quadratic_form(st.g_hat + d), rp.power_hi() * (1.0 + 1e-4));
  }
}

TEST(RobustTransmit, ZeroErrorUsesNominalInterval) {
  const RobustParams rp = robust_params(0.1, KlCase::Kl01);
  const ChannelSet ch = instance(12);
  const ComplexVector q = ComplexVector::Ones(4);
  const RobustTransmitStep s = solve_robust_w(ch, q, EllipsoidModel::balls(4, 4, 0.0), rp);
  const double p_w = received_power(effective_channels(ch, q).t_w, s.w);
  EXPECT_LE(p_w, rp.power_hi() * (1.0 + 1e-9));
  // Nominal KL budget is met at the design point.
  EXPECT_LE(kl_value(KlCase::Kl01, rp.sigma_w2, rp.sigma_w2 + p_w), 2.0 * 0.01 * (1.0 + 1e-6));
}

TEST(RobustDesign, NoSampledViolationsAndComparatorViolates) {
  int comparator_hits = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ChannelSet ch = instance(40 + seed);
    const EllipsoidModel model = EllipsoidModel::balls(4, 4, 2e-4);
    for (KlCase kc : {KlCase::Kl01, KlCase::Kl10}) {
      const RobustParams rp = robust_params(0.1, kc);
      const RobustSolution r = robust_alternate(ch, model, rp, seed);
      EXPECT_LE(r.worst_case_power, rp.power_hi() * (1.0 + 1e-9));
      for (std::size_t k = 1; k < r.solution.objective_trace.size(); ++k) {
        EXPECT_GE(r.solution.objective_trace[k], r.solution.objective_trace[k - 1] - 1e-8);
      }
      const KlSampling ks = worst_case_kl(ch, r.solution.w_b, r.solution.q, model, rp.sigma_w2, 0.1, kc, 1000, seed);
      EXPECT_EQ(ks.violation_fraction, 0.0) << "seed " << seed;
      EXPECT_LE(ks.max_kl, 2.0 * 0.01);
      EXPECT_GE(r.report.xi, 1.0 - 0.1);
      EXPECT_LE(r.report.p_fa, r.report.p_md);
    }
    const RobustParams rp = robust_params(0.1, KlCase::Kl01);
    const RobustSolution naive = robust_alternate(ch, EllipsoidModel::balls(4, 4, 0.0), rp, seed);
    const KlSampling ks = worst_case_kl(ch, naive.solution.w_b, naive.solution.q, model, rp.sigma_w2, 0.1,
                                        KlCase::Kl01, 1000, seed);
    if (ks.violation_fraction > 0.0) ++comparator_hits;
  }
  EXPECT_GE(comparator_hits, 2);
}

TEST(RobustDesign, ZeroSizeSamplingEqualsNominal) {
  const ChannelSet ch = instance(13);
  CounterRng rng(2);
  const ComplexVector w = 1e-3 * rng.complex_normal_vector(4);
  const ComplexVector q = ComplexVector::Ones(4);
  const KlSampling ks = worst_case_kl(ch, w, q, EllipsoidModel::balls(4, 4, 0.0), 1e-11, 0.1, KlCase::Kl01, 50, 1);
  EXPECT_EQ(ks.max_kl, ks.nominal_kl);
  ASSERT_EQ(ks.sorted_kl.size(), 50u);
  EXPECT_DOUBLE_EQ(ks.cdf_at(49), 1.0);
  EXPECT_TRUE(std::is_sorted(ks.sorted_kl.begin(), ks.sorted_kl.end()));
  const std::string csv = cdf_csv(ks);
  EXPECT_EQ(csv.rfind("kl_value,cdf\n", 0), 0u);
  EXPECT_EQ(split_lines(csv).size(), 51u);
  EXPECT_THROW(worst_case_kl(ch, w, q, EllipsoidModel::balls(4, 4, 0.0), 1e-11, 0.1, KlCase::Kl01, 0, 1),
               DomainError);
}

TEST(Config, ParsesScalarsListsAndRejectsUnknownKeys) {
  const ScenarioConfig c = config_from_json(Json::parse(R"({
    "name": "x", "n_tx": [2, 4], "n_irs": 3, "p_total_dbm": -15, "epsilon": [0.05, 0.1],
    "method": ["perfect", "robust_kl10"], "kl_case": "kl10", "trials": 2, "master_seed": 9,
    "geometry": {"willie": [4, 1]}, "path_loss_exponents": {"ai": 2.5}, "eval_v_w": 1e-4})"));
  EXPECT_EQ(c.n_tx, (std::vector<Index>{2, 4}));
  EXPECT_EQ(c.n_irs, (std::vector<Index>{3}));
  EXPECT_EQ(c.p_total_dbm, (std::vector<double>{-15.0}));
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::Perfect, Method::RobustKl10}));
  EXPECT_EQ(c.kl_case, KlCase::Kl10);
  EXPECT_DOUBLE_EQ(c.geometry.willie.x, 4.0);
  EXPECT_DOUBLE_EQ(c.fading.alpha.ai, 2.5);
  ASSERT_TRUE(c.eval_v_w.has_value());

  const ScenarioConfig back = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(back), config_to_json(c));

  EXPECT_THROW(config_from_json(Json::parse(R"({"n_txx": 4})")), ContractViolation);
  EXPECT_THROW(config_from_json(Json::parse(R"({"geometry": {"eve": [0, 0]}})")), ContractViolation);
  EXPECT_THROW(config_from_json(Json::parse(R"({"epsilon": 1.5})")), DomainError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"method": "greedy"})")), ContractViolation);
  EXPECT_THROW(config_from_json(Json::parse("[1, 2]")), ContractViolation);
}

TEST(Grid, OrderAndCommonRandomNumbers) {
  ScenarioConfig c;
  c.n_tx = {2, 4};
  c.p_total_dbm = {-20.0, -10.0, 0.0};
  c.methods = {Method::Perfect, Method::NoIrs};
  const auto grid = expand_grid(c);
  ASSERT_EQ(grid.size(), 12u);
  EXPECT_EQ(grid[1].method, Method::NoIrs);
  EXPECT_EQ(grid[2].p_total_dbm, -10.0);
  EXPECT_EQ(grid[6].n_tx, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(grid[i].index, i);
  EXPECT_EQ(channel_seed(c, grid[0], 3), channel_seed(c, grid[5], 3));
  EXPECT_NE(channel_seed(c, grid[0], 3), channel_seed(c, grid[6], 3));
  EXPECT_NE(channel_seed(c, grid[0], 3), channel_seed(c, grid[0], 4));
  EXPECT_NE(algorithm_seed(c, grid[0], 3), algorithm_seed(c, grid[1], 3));
  const ChannelSet a = trial_channels(c, grid[0], 1);
  const ChannelSet b = trial_channels(c, grid[4], 1);
  EXPECT_EQ((a.h_ai - b.h_ai).norm(), 0.0);
}

TEST(Runner, ParallelForVisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(97);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 3, [](std::size_t) { FAIL(); });
}

TEST(Runner, SweepIsDeterministicAndWellFormed) {
  ScenarioConfig c;
  c.p_total_dbm = {-20.0, -10.0};
  c.methods = {Method::Perfect, Method::Discrete, Method::NoIrs};
  c.v_w = {0.0};
  c.trials = 2;
  c.master_seed = 3;
  const SweepResult a = run_sweep(c, 1);
  const SweepResult b = run_sweep(c, 3);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.failures, 0u);
  const auto lines = split_lines(a.csv);
  ASSERT_EQ(lines.size(), 1u + 12u + 12u);
  EXPECT_EQ(lines[0], sweep_csv_header());
  const long cols = columns(lines[0]);
  for (const auto& l : lines) EXPECT_EQ(columns(l), cols) << l;
  EXPECT_EQ(lines[1].rfind("trial,0,0,", 0), 0u);
  EXPECT_EQ(lines.back().rfind("std,5,", 0), 0u);
  c.master_seed = 4;
  EXPECT_NE(run_sweep(c, 1).csv, a.csv);
}

TEST(Runner, DetectionReportFlagsHold) {
  ScenarioConfig c;
  c.methods = {Method::Perfect, Method::RobustKl01, Method::RobustKl10};
  c.epsilon = {0.05, 0.2};
  c.v_w = {1e-4};
  c.kl_samples = 10;
  const SweepResult r = run_detection_report(c, 2);
  EXPECT_EQ(r.failures, 0u);
  const auto lines = split_lines(r.csv);
  ASSERT_EQ(lines.size(), 1u + 4u + 8u);
  EXPECT_EQ(lines[0], detection_csv_header());
  const long cols = columns(lines[0]);
  for (std::size_t i = 1; i <= 4; ++i) {
    EXPECT_EQ(columns(lines[i]), cols);
    // ...,pfa_le_pmd,xi_ge_1_minus_eps,error
    EXPECT_NE(lines[i].find(",1,1,"), std::string::npos) << lines[i];
  }
}

TEST(Runner, DesignOutcomeCarriesSamplingOnlyWhenAsked) {
  ScenarioConfig c;
  c.v_w = {0.0};
  c.kl_samples = 20;
  const auto grid = expand_grid(c);
  const ChannelSet ch = trial_channels(c, grid[0], 0);
  EXPECT_FALSE(run_design(c, grid[0], ch, 1).sampling.has_value());
  c.eval_v_w = 2e-4;
  const DesignOutcome o = run_design(c, grid[0], ch, 1, true);
  ASSERT_TRUE(o.sampling.has_value());
  EXPECT_EQ(o.sampling->sorted_kl.size(), 20u);
  EXPECT_LE(o.solution.covert_residual, 1e-8);
  // A perfectly covert design shows no divergence at the nominal channel.
  EXPECT_LE(o.report.kl_01, 1e-6);
}
