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

#include <cmath>
#include <cstdio>
#include <set>

#include <gtest/gtest.h>

#include "irscovert/channel.hpp"
#include "irscovert/channel_io.hpp"
#include "irscovert/detection.hpp"
#include "irscovert/numerics.hpp"
#include "irscovert/random.hpp"

using namespace irscovert;

namespace {

ComplexMatrix random_psd(Index n, Index rank, CounterRng& rng) {
  const ComplexMatrix b = rng.complex_normal_matrix(n, rank);
  return b * b.adjoint();
}

}  // namespace

TEST(Hermitian, RejectsAsymmetricInput) {
  ComplexMatrix a(2, 2);
  a << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
  EXPECT_THROW(HermitianMatrix{a}, ContractViolation);
  EXPECT_THROW(HermitianMatrix(ComplexMatrix(2, 3)), DimensionError);
}

TEST(Hermitian, InnerProductIsTraceOfProduct) {
  CounterRng rng(1);
  const HermitianMatrix a(random_psd(4, 4, rng));
  const HermitianMatrix b(random_psd(4, 2, rng));
  EXPECT_NEAR(a.inner(b), (a.matrix() * b.matrix()).trace().real(), 1e-12 * a.norm() * b.norm());
}

TEST(Eigen, DecompositionReconstructsAndSortsDescending) {
  CounterRng rng(2);
  for (Index n : {1, 2, 5, 8}) {
    const HermitianMatrix a(random_psd(n, n, rng));
    const EigenDecomposition e = hermitian_eig(a);
    for (Index i = 1; i < n; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
    const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT((back - a.matrix()).norm(), 1e-12 * a.norm());
  }
}

TEST(Eigen, DiagonalExample) {
  const HermitianMatrix a = HermitianMatrix::diagonal(RealVector::LinSpaced(3, 1.0, 3.0));
  EXPECT_DOUBLE_EQ(lambda_max(a), 3.0);
  EXPECT_DOUBLE_EQ(lambda_min(a), 1.0);
}

TEST(PsdSqrt, SquaresBack) {
  CounterRng rng(3);
  const HermitianMatrix a(random_psd(5, 3, rng));
  const HermitianMatrix s = psd_sqrt(a);
  EXPECT_LT((s.matrix() * s.matrix() - a.matrix()).norm(), 1e-10 * a.norm());
  EXPECT_TRUE(is_psd(s));
}

TEST(PsdSqrt, RejectsIndefiniteInput) {
  const HermitianMatrix a = HermitianMatrix::diagonal(RealVector::LinSpaced(2, -1.0, 1.0));
  EXPECT_THROW(psd_sqrt(a), NotPsdError);
  try {
    psd_sqrt(a);
  } catch (const NotPsdError& e) {
    EXPECT_DOUBLE_EQ(e.min_eigenvalue(), -1.0);
  }
}

TEST(PsdClamp, RemovesNegativePart) {
  const HermitianMatrix a = HermitianMatrix::diagonal(RealVector::LinSpaced(3, -2.0, 2.0));
  const HermitianMatrix c = psd_clamp(a);
  EXPECT_NEAR(lambda_min(c), 0.0, 1e-15);
  EXPECT_NEAR(lambda_max(c), 2.0, 1e-15);
}

TEST(NullProjector, IsIdempotentAndAnnihilates) {
  CounterRng rng(4);
  const ComplexVector t = rng.complex_normal_vector(4);
  const HermitianMatrix p = null_projector(t);
  EXPECT_LT((p.matrix() * p.matrix() - p.matrix()).norm(), 1e-14);
  EXPECT_LT((p.matrix() * t).norm(), 1e-14 * t.norm());
  EXPECT_LT((null_projector(ComplexVector::Zero(3)).matrix() - ComplexMatrix::Identity(3, 3)).norm(), 0.0 + 1e-300);
}

TEST(RankOne, ExtractRecoversVectorUpToPhase) {
  CounterRng rng(5);
  const ComplexVector w = rng.complex_normal_vector(4);
  const ComplexVector v = rank_one_extract(HermitianMatrix::outer(w));
  EXPECT_NEAR(std::abs(v.dot(w)), w.squaredNorm(), 1e-12 * w.squaredNorm());
  EXPECT_NEAR(v.norm(), w.norm(), 1e-12 * w.norm());
  EXPECT_LT(rank_one_residual(HermitianMatrix::outer(w)), 1e-15);
  EXPECT_EQ(rank_one_extract(HermitianMatrix::zero(3)).norm(), 0.0);
}

TEST(Units, Conversions) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(-80.0), 1e-11);
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_NEAR(watts_to_dbm(1e-3), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(db_to_linear(-30.0), 1e-3);
}

TEST(Random, CounterGeneratorIsReproducible) {
  CounterRng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Random, DerivedSeedsDependOnPath) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 20; ++i)
    for (std::uint64_t j = 0; j < 20; ++j) seen.insert(derive_seed(7, {i, j}));
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
}

TEST(Random, ComplexNormalHasUnitVariance) {
  CounterRng rng(9);
  const int n = 200000;
  double re2 = 0.0, im2 = 0.0, mean_re = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.complex_normal();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    mean_re += z.real();
  }
  EXPECT_NEAR(re2 / n, 0.5, 0.01);
  EXPECT_NEAR(im2 / n, 0.5, 0.01);
  EXPECT_NEAR(mean_re / n, 0.0, 0.01);
}

TEST(Random, ExponentialMean) {
  CounterRng rng(10);
  double s = 0.0;
  for (int i = 0; i < 200000; ++i) s += rng.exponential(2.5);
  EXPECT_NEAR(s / 200000.0, 2.5, 0.03);
}

TEST(Channel, PathLossValue) {
  // sqrt(1e-3 * 10^-2.2)
  EXPECT_NEAR(path_loss(10.0, 2.2, -30.0), 0.00251188643150958, 1e-15);
  EXPECT_DOUBLE_EQ(path_loss(1.0, 3.0, -30.0), std::sqrt(1e-3));
}

TEST(Channel, SteeringVectorHasUnitModulusEntries) {
  const ComplexVector a = steering_vector(6, 0.3);
  for (Index i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a(i)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(a(0) - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Channel, SampleHasDeclaredShapesAndIsSeeded) {
  Geometry g;
  g.n_tx = 3;
  g.n_irs = 5;
  const ChannelSet a = sample_channels(g, FadingParams{}, 11);
  const ChannelSet b = sample_channels(g, FadingParams{}, 11);
  const ChannelSet c = sample_channels(g, FadingParams{}, 12);
  EXPECT_EQ(a.n_tx(), 3);
  EXPECT_EQ(a.n_irs(), 5);
  EXPECT_EQ(a.h_ai.rows(), 5);
  EXPECT_EQ(a.h_ai.cols(), 3);
  EXPECT_EQ((a.h_ai - b.h_ai).norm(), 0.0);
  EXPECT_GT((a.h_ab - c.h_ab).norm(), 0.0);
  EXPECT_NO_THROW(a.validate());
}

TEST(Channel, NoSurfaceElements) {
  Geometry g;
  g.n_irs = 0;
  const ChannelSet ch = sample_channels(g, FadingParams{}, 3);
  EXPECT_EQ(ch.n_irs(), 0);
  const ComplexRowVector t = composite_channel(ch.h_ib, ch.h_ai, ComplexVector(0), ch.h_ab);
  EXPECT_LT((t - ch.h_ab.adjoint()).norm(), 1e-300);
}

TEST(Channel, LargeRicianFactorApproachesLineOfSight) {
  Geometry g;
  FadingParams f;
  f.rician_k = 1e12;
  const ChannelSet ch = sample_channels(g, f, 5);
  const LinkAngles ang = angles(g.alice, g.irs);
  const ComplexMatrix los = steering_vector(g.n_irs, ang.phi_r) * steering_vector(g.n_tx, ang.phi_t).adjoint();
  const double pl = path_loss(distance(g.alice, g.irs), f.alpha.ai, f.zeta0_db);
  EXPECT_LT((ch.h_ai - pl * los).norm(), 1e-5 * pl * los.norm());
}

TEST(Channel, AverageGainMatchesPathLoss) {
  Geometry g;
  double acc = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) acc += sample_channels(g, FadingParams{}, static_cast<std::uint64_t>(t)).h_ab.squaredNorm();
  const double pl = path_loss(distance(g.alice, g.bob), 3.0, -30.0);
  EXPECT_NEAR(acc / trials / (g.n_tx * pl * pl), 1.0, 0.05);
}

TEST(Channel, CompositeMatchesDefinition) {
  Geometry g;
  const ChannelSet ch = sample_channels(g, FadingParams{}, 8);
  CounterRng rng(8);
  ComplexVector q(g.n_irs);
  for (Index i = 0; i < q.size(); ++i) q(i) = std::polar(1.0, 2.0 * kPi * rng.uniform());
  const ComplexMatrix qd = q.asDiagonal();
  const ComplexRowVector ref = ch.h_ib.adjoint() * qd * ch.h_ai + ch.h_ab.adjoint();
  EXPECT_LT((composite_channel(ch.h_ib, ch.h_ai, q, ch.h_ab) - ref).norm(), 1e-15 * ref.norm());
}

TEST(Channel, JsonRoundTrip) {
  const ChannelSet ch = sample_channels(Geometry{}, FadingParams{}, 21);
  const ChannelSet back = channel_from_json(Json::parse(channel_to_json(ch).dump()));
  EXPECT_EQ((back.h_ai - ch.h_ai).norm(), 0.0);
  EXPECT_EQ((back.h_iw - ch.h_iw).norm(), 0.0);
  const std::string path = ::testing::TempDir() + "irscovert_channel.json";
  write_channel_file(ch, path);
  EXPECT_EQ((read_channel_file(path).h_ab - ch.h_ab).norm(), 0.0);
  std::remove(path.c_str());
}

TEST(Channel, InvalidGeometryRejected) {
  Geometry g;
  g.bob = g.alice;
  EXPECT_THROW(g.validate(), DomainError);
  FadingParams f;
  f.rician_k = -1.0;
  EXPECT_THROW(f.validate(), DomainError);
}

TEST(Detection, DivergencesAtRatioTwo) {
  EXPECT_NEAR(kl_01(1.0, 2.0), std::log(2.0) - 0.5, 1e-15);
  EXPECT_NEAR(kl_10(1.0, 2.0), 1.0 - std::log(2.0), 1e-15);
  EXPECT_NEAR(kl_01(3.0, 6.0), kl_01(1.0, 2.0), 1e-15);
}

TEST(Detection, ClosedFormsAtRatioTwo) {
  // Densities cross at 2 ln 2; p_fa = e^{-2 ln 2}, p_md = 1 - e^{-ln 2}.
  const ReceptionStats s(1.0, 2.0);
  EXPECT_NEAR(optimal_threshold(s), 2.0 * std::log(2.0), 1e-15);
  const auto p = detection_probabilities(s);
  EXPECT_NEAR(p.p_fa, 0.25, 1e-15);
  EXPECT_NEAR(p.p_md, 0.5, 1e-15);
}

TEST(Detection, EqualPowersLimit) {
  const auto p = detection_probabilities(ReceptionStats(1e-11, 1e-11));
  EXPECT_DOUBLE_EQ(p.p_fa, std::exp(-1.0));
  EXPECT_DOUBLE_EQ(p.p_md, 1.0 - std::exp(-1.0));
  EXPECT_DOUBLE_EQ(optimal_threshold(ReceptionStats(2.0, 2.0)), 2.0);
  const auto near = detection_probabilities(ReceptionStats(1.0, 1.0 + 1e-9));
  EXPECT_NEAR(near.p_fa, std::exp(-1.0), 1e-8);
}

TEST(Detection, InvalidStatsRejected) {
  EXPECT_THROW(ReceptionStats(0.0, 1.0), DomainError);
  EXPECT_THROW(ReceptionStats(2.0, 1.0), DomainError);
  EXPECT_THROW(pinsker_bound(-0.1), DomainError);
}

TEST(Detection, ErrorSumRespectsPinsker) {
  for (double ratio : {1.001, 1.05, 1.3, 2.0, 5.0, 20.0}) {
    const DetectionReport r = DetectionReport::from(ReceptionStats(1.0, ratio));
    EXPECT_GE(r.xi, 1.0 - pinsker_bound(r.kl_01) - 1e-12) << ratio;
    EXPECT_LE(r.p_fa, r.p_md) << ratio;
  }
}

TEST(Detection, ErrorProbabilitiesDecreaseWithRatio) {
  double fa = 1.0, md = 1.0;
  for (double ratio : {1.01, 1.1, 1.5, 2.0, 4.0, 10.0}) {
    const auto p = detection_probabilities(ReceptionStats(1.0, ratio));
    EXPECT_LT(p.p_fa, fa);
    EXPECT_LT(p.p_md + p.p_fa, md + fa);
    fa = p.p_fa;
    md = p.p_md;
  }
}

TEST(CovertInterval, FrozenValues) {
  struct Row {
    double eps, a, b;
  };
  // Independent high-precision root finding.
  const Row rows[] = {{0.01, 0.9802638048069867, 1.0202695830484947},
                      {0.05, 0.9063218953935888, 1.1070455687571776},
                      {0.1, 0.8240288750487662, 1.2298532886955198},
                      {0.3, 0.5795286913160456, 1.9473986551592262}};
  for (const Row& r : rows) {
    const CovertInterval ci = covert_interval(r.eps);
    EXPECT_NEAR(ci.a_bar, r.a, 1e-12) << r.eps;
    EXPECT_NEAR(ci.b_bar, r.b, 1e-12) << r.eps;
    EXPECT_LE(std::abs(kl_function(ci.a_bar) - 2 * r.eps * r.eps), 1e-12);
    EXPECT_LE(std::abs(kl_function(ci.b_bar) - 2 * r.eps * r.eps), 1e-12);
  }
}

TEST(CovertInterval, ZeroBudgetAndMonotonicity) {
  const CovertInterval z = covert_interval(0.0);
  EXPECT_EQ(z.a_bar, 1.0);
  EXPECT_EQ(z.b_bar, 1.0);
  double a = 1.0, b = 1.0;
  for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4}) {
    const CovertInterval ci = covert_interval(eps);
    EXPECT_LT(ci.a_bar, a);
    EXPECT_GT(ci.b_bar, b);
    a = ci.a_bar;
    b = ci.b_bar;
  }
  EXPECT_THROW(covert_interval(-0.1), DomainError);
}

TEST(DetectionReport, CsvRowHasHeaderArity) {
  const DetectionReport r = DetectionReport::from(ReceptionStats(1.0, 1.5));
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(count(DetectionReport::csv_header()), count(r.csv_row()));
}
