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
#include <sstream>

#include <gtest/gtest.h>

#include "irscovert/random.hpp"
#include "irscovert/randomization.hpp"
#include "irscovert/sdp.hpp"

using namespace irscovert;
using sdp::Relation;
using sdp::Status;

namespace {

HermitianMatrix diag2(double a, double b) {
  RealVector d(2);
  d << a, b;
  return HermitianMatrix::diagonal(d);
}

HermitianMatrix random_hermitian(Index n, CounterRng& rng) {
  const ComplexMatrix b = rng.complex_normal_matrix(n, n);
  return HermitianMatrix(ComplexMatrix(0.5 * (b + b.adjoint())));
}

}  // namespace

TEST(Sdp, MaxEigenvalueOfDiagonal) {
  sdp::SdpProblem p;
  const auto b = p.add_block(2);
  p.add_objective(b, diag2(3.0, 1.0));
  p.add_constraint(b, HermitianMatrix::identity(2), Relation::Equal, 1.0);
  const auto s = sdp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, 3.0, 1e-8);
  EXPECT_NEAR(s.primal_blocks[0](0, 0).real(), 1.0, 1e-7);
  EXPECT_NEAR(s.duality_gap, 0.0, 1e-7);
}

TEST(Sdp, RandomComplexMaxEigenvalue) {
  CounterRng rng(17);
  for (int t = 0; t < 12; ++t) {
    const Index n = 2 + t % 7;
    const HermitianMatrix a = random_hermitian(n, rng);
    sdp::SdpProblem p;
    const auto b = p.add_block(n);
    p.add_objective(b, a);
    p.add_constraint(b, HermitianMatrix::identity(n), Relation::Equal, 1.0);
    const auto s = sdp::solve(p);
    ASSERT_EQ(s.status, Status::Optimal);
    EXPECT_NEAR(s.objective_value, lambda_max(a), 1e-6 * std::max(1.0, std::abs(lambda_max(a))));
    EXPECT_LE(p.max_violation(s.primal_blocks), 1e-7);
  }
}

TEST(Sdp, ScalarLmi) {
  // max x  s.t. [[1, x], [x, 1]] >= 0  ->  x = 1
  sdp::SdpProblem p;
  const auto b = p.add_block(1);
  p.add_objective(b, HermitianMatrix::identity(1));
  RealMatrix d(2, 2);
  d << 0.0, 1.0, 1.0, 0.0;
  p.add_lmi({HermitianMatrix::identity(2), {}, {{b, HermitianMatrix::from_real(d)}}});
  const auto s = sdp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, 1.0, 1e-7);
}

TEST(Sdp, CongruenceLmiBoundsQuadraticForm) {
  // max t^H X t  s.t. Tr X <= 1,  c - g^H X g >= 0 written as an LMI.
  CounterRng rng(3);
  const Index n = 3;
  const ComplexVector t = rng.complex_normal_vector(n);
  const ComplexVector g = rng.complex_normal_vector(n);
  sdp::SdpProblem p;
  const auto b = p.add_block(n);
  p.add_objective(b, HermitianMatrix::outer(t));
  p.add_constraint(b, HermitianMatrix::identity(n), Relation::LessEqual, 1.0);
  const double c = 0.05 * g.squaredNorm();
  p.add_lmi({HermitianMatrix::identity(1) * c, {{b, ComplexMatrix(g.adjoint()), -1.0}}, {}});
  const auto s = sdp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_LE(s.primal_blocks[0].quadratic_form(g), c * (1.0 + 1e-6));
  // Same problem with the constraint as a trace inequality.
  sdp::SdpProblem q;
  const auto bq = q.add_block(n);
  q.add_objective(bq, HermitianMatrix::outer(t));
  q.add_constraint(bq, HermitianMatrix::identity(n), Relation::LessEqual, 1.0);
  q.add_constraint(bq, HermitianMatrix::outer(g), Relation::LessEqual, c);
  const auto sq = sdp::solve(q);
  ASSERT_EQ(sq.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, sq.objective_value, 1e-6 * sq.objective_value);
}

TEST(Sdp, DetectsInfeasibility) {
  sdp::SdpProblem p;
  const auto b = p.add_block(2);
  p.add_objective(b, HermitianMatrix::identity(2));
  p.add_constraint(b, HermitianMatrix::identity(2), Relation::Equal, -1.0);
  EXPECT_EQ(sdp::solve(p).status, Status::Infeasible);
}

TEST(Sdp, DetectsUnboundedness) {
  sdp::SdpProblem p;
  const auto b = p.add_block(2);
  p.add_objective(b, HermitianMatrix::identity(2));
  p.add_constraint(b, diag2(1.0, 0.0), Relation::LessEqual, 1.0);
  EXPECT_EQ(sdp::solve(p).status, Status::Unbounded);
}

TEST(Sdp, GreaterEqualConstraint) {
  // min Tr X (max -Tr X) s.t. X_00 >= 2
  sdp::SdpProblem p;
  const auto b = p.add_block(2);
  p.add_objective(b, HermitianMatrix::identity(2) * -1.0);
  p.add_constraint(b, diag2(1.0, 0.0), Relation::GreaterEqual, 2.0);
  const auto s = sdp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, -2.0, 1e-7);
}

TEST(Sdp, ZeroTraceEqualityIsExactWithFacialReduction) {
  CounterRng rng(23);
  const Index n = 4;
  const ComplexVector tb = rng.complex_normal_vector(n);
  const ComplexVector tw = rng.complex_normal_vector(n);
  for (bool fr : {true, false}) {
    sdp::SdpProblem p;
    const auto b = p.add_block(n);
    p.add_objective(b, HermitianMatrix::outer(tb));
    p.add_constraint(b, HermitianMatrix::outer(tw) * (1.0 / tw.squaredNorm()), Relation::Equal, 0.0);
    p.add_constraint(b, HermitianMatrix::identity(n), Relation::LessEqual, 1.0);
    sdp::SdpSettings st;
    st.facial_reduction = fr;
    const auto s = sdp::solve(p, st);
    const ComplexVector perp = null_projector(tw).matrix() * tb;
    if (fr) {
      ASSERT_EQ(s.status, Status::Optimal);
      EXPECT_NEAR(s.objective_value, perp.squaredNorm(), 1e-6 * perp.squaredNorm());
      EXPECT_LE(s.primal_blocks[0].quadratic_form(tw), 1e-14 * tw.squaredNorm());
    } else if (s.status == Status::Optimal) {
      EXPECT_NEAR(s.objective_value, perp.squaredNorm(), 1e-4 * perp.squaredNorm());
    }
  }
}

TEST(Sdp, MultipleBlocksAndScalarTerms) {
  // max x + Tr(C Y)  s.t. x <= 2 (as LMI 2 - x >= 0), Tr Y = 1.
  sdp::SdpProblem p;
  const auto bx = p.add_block(1);
  const auto by = p.add_block(2);
  p.add_objective(bx, HermitianMatrix::identity(1));
  p.add_objective(by, diag2(0.5, 4.0));
  p.add_constraint(by, HermitianMatrix::identity(2), Relation::Equal, 1.0);
  p.add_lmi({HermitianMatrix::identity(1) * 2.0, {}, {{bx, HermitianMatrix::identity(1) * -1.0}}});
  const auto s = sdp::solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, 6.0, 1e-7);
}

TEST(Sdp, GapHistoryShrinks) {
  CounterRng rng(5);
  const HermitianMatrix a = random_hermitian(5, rng);
  sdp::SdpProblem p;
  const auto b = p.add_block(5);
  p.add_objective(b, a);
  p.add_constraint(b, HermitianMatrix::identity(5), Relation::Equal, 1.0);
  const auto s = sdp::solve(p);
  ASSERT_GE(s.gap_history.size(), 2u);
  EXPECT_LT(s.gap_history.back(), s.gap_history.front());
}

TEST(Sdp, RejectsMalformedProblems) {
  sdp::SdpProblem p;
  EXPECT_THROW(p.add_block(0), DimensionError);
  const auto b = p.add_block(2);
  EXPECT_THROW(p.add_objective(b, HermitianMatrix::identity(3)), DimensionError);
  EXPECT_THROW(p.add_constraint(b + 1, HermitianMatrix::identity(2), Relation::Equal, 1.0), DimensionError);
  EXPECT_THROW(p.add_constraint(b, HermitianMatrix::identity(2), Relation::Equal, std::nan("")),
               ContractViolation);
  EXPECT_THROW(p.add_lmi({HermitianMatrix::identity(2), {}, {{b, HermitianMatrix::identity(2)}}}),
               DimensionError);
  EXPECT_THROW(sdp::solve(sdp::SdpProblem{}), DimensionError);
}

TEST(Sdp, DebugDumpListsEveryPart) {
  sdp::SdpProblem p;
  const auto b = p.add_block(2);
  const auto x = p.add_block(1);
  p.add_objective(b, diag2(1.0, 2.0));
  p.add_constraint(b, HermitianMatrix::identity(2), Relation::LessEqual, 1.0);
  p.add_lmi({HermitianMatrix::identity(1), {{b, ComplexMatrix::Ones(1, 2), 1.0}}, {{x, HermitianMatrix::identity(1)}}});
  std::ostringstream os;
  sdp::write_debug_dump(p, os);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("irscovert-sdp 1\nblocks 2 2 1\n", 0), 0u);
  EXPECT_NE(s.find("constraint <= 1 1"), std::string::npos);
  EXPECT_NE(s.find("lmi 1 1 1"), std::string::npos);
  EXPECT_NE(s.find("congruence 0 1"), std::string::npos);
  EXPECT_NE(s.find("scalar 1"), std::string::npos);
}

TEST(Randomization, KeepsBestFeasibleCandidate) {
  CounterRng rng(1);
  const ComplexVector v = rng.complex_normal_vector(3);
  const HermitianMatrix w = HermitianMatrix::outer(v) + HermitianMatrix::identity(3) * 0.01;
  auto objective = [&](const ComplexVector& z) { return std::norm(v.dot(z)); };
  auto project = [](const ComplexVector& z) { return std::optional<ComplexVector>(unit_modulus_projection(z)); };
  const auto a = gaussian_randomization_full(w, 50, project, objective, 9);
  const auto b = gaussian_randomization_full(w, 50, project, objective, 9);
  EXPECT_EQ(a.feasible_count, 50u);
  EXPECT_EQ((a.vector - b.vector).norm(), 0.0);
  for (Index i = 0; i < a.vector.size(); ++i) EXPECT_NEAR(std::abs(a.vector(i)), 1.0, 1e-12);
  EXPECT_NEAR(a.objective, objective(a.vector), 1e-12);
}

TEST(Randomization, AllInfeasibleRaises) {
  const HermitianMatrix w = HermitianMatrix::identity(2);
  auto never = [](const ComplexVector&) { return std::optional<ComplexVector>(); };
  auto obj = [](const ComplexVector& z) { return z.squaredNorm(); };
  EXPECT_THROW(gaussian_randomization_full(w, 10, never, obj, 1), RandomizationFailure);
  EXPECT_THROW(gaussian_randomization_full(w, 0, never, obj, 1), ContractViolation);
}

TEST(Randomization, UnitModulusProjectionFixesLastEntry) {
  ComplexVector v(3);
  v << Complex(2.0, 1.0), Complex(0.0, 0.0), Complex(0.0, -3.0);
  const ComplexVector u = unit_modulus_projection(v);
  EXPECT_EQ(u(2), Complex(1.0, 0.0));
  EXPECT_EQ(u(1), Complex(1.0, 0.0));
  EXPECT_NEAR(std::abs(u(0)), 1.0, 1e-15);
  // Relative phase between entries 0 and 2 is preserved.
  EXPECT_NEAR(std::arg(u(0)), std::arg(v(0) * std::conj(v(2))), 1e-14);
}
