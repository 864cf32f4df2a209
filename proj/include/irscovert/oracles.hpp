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

#ifndef IRSCOVERT_ORACLES_HPP
#define IRSCOVERT_ORACLES_HPP

// Oracle checks that compare the solver pipeline against independent
// references: eigenvalues, closed-form null-space beamforming, Monte Carlo
// sampling and direct root residuals. Shared by `irscovert validate` and the
// acceptance runner, which differ only in instance counts.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "irscovert/covert_perfect.hpp"
#include "irscovert/detection.hpp"
#include "irscovert/random.hpp"
#include "irscovert/sdp.hpp"

namespace irscovert::oracles {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline ComplexMatrix random_hermitian(Index n, CounterRng& rng) {
  const ComplexMatrix b = rng.complex_normal_matrix(n, n);
  return 0.5 * (b + b.adjoint());
}

// max Tr(A X) s.t. Tr(X) = 1, X >= 0 equals lambda_max(A).
inline CheckResult sdp_max_eigenvalue(int instances, std::uint64_t seed, double rel_tol = 1e-6,
                                      double time_limit_ms = 50.0) {
  CheckResult r{"sdp max-eigenvalue oracle", true, ""};
  double worst_err = 0.0;
  double worst_ms = 0.0;
  int failures = 0;
  for (int k = 0; k < instances; ++k) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    const Index n = 2 + static_cast<Index>(k % 7);
    const HermitianMatrix a(random_hermitian(n, rng));
    const double ref = hermitian_eig(a).values(0);
    sdp::SdpProblem p;
    const auto b = p.add_block(n);
    p.add_objective(b, a);
    p.add_constraint(b, HermitianMatrix::identity(n), sdp::Relation::Equal, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    const sdp::SdpSolution s = sdp::solve(p);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const double err = std::abs(s.objective_value - ref) / std::max(1.0, std::abs(ref));
    worst_err = std::max(worst_err, err);
    worst_ms = std::max(worst_ms, ms);
    if (s.status != sdp::Status::Optimal || err > rel_tol || ms > time_limit_ms) ++failures;
  }
  r.passed = failures == 0;
  std::ostringstream os;
  os << instances << " instances, worst relative error " << worst_err << ", slowest "
     << worst_ms << " ms, failures " << failures;
  r.detail = os.str();
  return r;
}

// Random unit-scale channel pair for transmit-step checks.
struct RowPair {
  ComplexRowVector t_b;
  ComplexRowVector t_w;
};

inline RowPair random_rows(Index n, CounterRng& rng) {
  return {rng.complex_normal_vector(n).transpose(), rng.complex_normal_vector(n).transpose()};
}

// Transmit SDR + projection against P ||P_perp(t_w) t_b^H||^2 and the
// rank-one residual of the projected matrix.
inline CheckResult transmit_null_space(int instances, std::uint64_t seed) {
  CheckResult r{"transmit SDR vs null-space closed form", true, ""};
  double worst_err = 0.0, worst_rank = 0.0, worst_cov = 0.0;
  int failures = 0;
  for (int k = 0; k < instances; ++k) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    const Index n = 2 + static_cast<Index>(k % 7);
    const RowPair rows = random_rows(n, rng);
    CovertParams params;
    params.p_total = std::exp(rng.uniform() * 4.0 - 2.0);
    const TransmitStep st = solve_w_sdr(rows.t_b, rows.t_w, params);
    // Closed form: project t_b^H onto the orthogonal complement of t_w^H.
    const ComplexVector tb = rows.t_b.adjoint();
    const ComplexVector tw = rows.t_w.adjoint();
    const ComplexVector perp = tb - tw * (tw.dot(tb) / tw.squaredNorm());
    const double ref = params.p_total * perp.squaredNorm();
    const double got = std::norm((rows.t_b * st.w)(0, 0));
    const double err = std::abs(got - ref) / ref;
    const double rank = rank_one_residual(st.projected);
    const double cov = std::norm((rows.t_w * st.w)(0, 0)) / (params.p_total * rows.t_w.squaredNorm());
    worst_err = std::max(worst_err, err);
    worst_rank = std::max(worst_rank, rank);
    worst_cov = std::max(worst_cov, cov);
    if (err > 1e-4 || rank > 1e-6 || cov > 1e-8 || st.w.squaredNorm() > params.p_total * (1.0 + 1e-12)) ++failures;
  }
  r.passed = failures == 0;
  std::ostringstream os;
  os << instances << " instances, worst relative error " << worst_err
     << ", worst rank-one residual " << worst_rank << ", worst covert residual " << worst_cov
     << ", failures " << failures;
  r.detail = os.str();
  return r;
}

// Projection contract on random rank-3 PSD matrices with Tr(T_w W) = 0.
inline CheckResult projection_contract(int instances, std::uint64_t seed) {
  CheckResult r{"rank-one projection contract", true, ""};
  double worst_obj = 0.0, worst_trace = -1e300, worst_cov = 0.0;
  int failures = 0;
  for (int k = 0; k < instances; ++k) {
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    const Index n = 4 + static_cast<Index>(k % 5);
    const RowPair rows = random_rows(n, rng);
    const ComplexMatrix pp = null_projector(rows.t_w.adjoint()).matrix();
    const ComplexMatrix b = pp * rng.complex_normal_matrix(n, 3);
    ComplexMatrix wm = b * b.adjoint();
    wm /= wm.trace().real();
    const HermitianMatrix w(wm);
    const HermitianMatrix wb = project_rank_one(w, rows.t_b);
    const double obj = w.quadratic_form(rows.t_b.adjoint());
    const double obj_b = wb.quadratic_form(rows.t_b.adjoint());
    const double e_obj = std::abs(obj_b - obj) / std::max(obj, 1e-300);
    const double d_trace = wb.trace() - w.trace();
    const double cov = std::abs(wb.quadratic_form(rows.t_w.adjoint())) / rows.t_w.squaredNorm();
    worst_obj = std::max(worst_obj, e_obj);
    worst_trace = std::max(worst_trace, d_trace);
    worst_cov = std::max(worst_cov, cov);
    if (e_obj > 1e-9 || d_trace > 1e-12 || cov > 1e-10 || rank_one_residual(wb) > 1e-6) ++failures;
  }
  r.passed = failures == 0;
  std::ostringstream os;
  os << instances << " inputs, worst objective change " << worst_obj
     << ", largest trace change " << worst_trace << ", worst warden form " << worst_cov
     << ", failures " << failures;
  r.detail = os.str();
  return r;
}

// Crossing of the two exponential densities by bisection on the log-ratio.
inline double density_crossing(double l0, double l1) {
  auto g = [&](double x) { return (-std::log(l0) - x / l0) - (-std::log(l1) - x / l1); };
  double lo = 0.0, hi = l1;
  while (g(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline CheckResult detection_monte_carlo(std::size_t samples, std::uint64_t seed, double tol = 2e-3) {
  CheckResult r{"detection closed forms vs Monte Carlo", true, ""};
  std::ostringstream os;
  int failures = 0;
  int k = 0;
  for (double ratio : {1.01, 1.2, 2.0, 4.0}) {
    const ReceptionStats s(1.0, ratio);
    const double phi = optimal_threshold(s);
    const DetectionProbabilities p = detection_probabilities(s);
    CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(k++)}));
    std::size_t fa = 0, md = 0;
    for (std::size_t i = 0; i < samples; ++i) {
      if (rng.exponential(1.0) > phi) ++fa;
      if (rng.exponential(ratio) < phi) ++md;
    }
    const double fa_mc = static_cast<double>(fa) / static_cast<double>(samples);
    const double md_mc = static_cast<double>(md) / static_cast<double>(samples);
    const double phi_ref = density_crossing(1.0, ratio);
    const double e = std::max({std::abs(fa_mc - p.p_fa), std::abs(md_mc - p.p_md), std::abs(phi - phi_ref)});
    if (!(e <= tol)) ++failures;
    os << "ratio " << ratio << ": max deviation " << e << "; ";
  }
  r.passed = failures == 0;
  r.detail = os.str() + "failures " + std::to_string(failures);
  return r;
}

inline CheckResult covert_interval_residuals(double tol = 1e-12) {
  CheckResult r{"covert interval residuals", true, ""};
  std::ostringstream os;
  for (double eps : {0.01, 0.05, 0.1, 0.3}) {
    const CovertInterval ci = covert_interval(eps);
    const double t = 2.0 * eps * eps;
    const double ra = std::abs(std::log(ci.a_bar) + 1.0 / ci.a_bar - 1.0 - t);
    const double rb = std::abs(std::log(ci.b_bar) + 1.0 / ci.b_bar - 1.0 - t);
    if (!(ra <= tol && rb <= tol && ci.a_bar < 1.0 && 1.0 < ci.b_bar)) r.passed = false;
    os << "eps " << eps << ": [" << ci.a_bar << ", " << ci.b_bar << "] residuals " << ra << ", " << rb << "; ";
  }
  r.detail = os.str();
  return r;
}

}  // namespace irscovert::oracles

#endif  // IRSCOVERT_ORACLES_HPP
