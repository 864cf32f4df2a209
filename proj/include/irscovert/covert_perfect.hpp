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

#ifndef IRSCOVERT_COVERT_PERFECT_HPP
#define IRSCOVERT_COVERT_PERFECT_HPP

// Joint transmit/reflect beamforming with a perfectly known warden channel:
// alternate between the transmit SDR (with rank-one projection) and the
// reflect SDR (with Gaussian randomization) under |t_w w|^2 = 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irscovert/channel.hpp"
#include "irscovert/numerics.hpp"
#include "irscovert/random.hpp"
#include "irscovert/randomization.hpp"
#include "irscovert/sdp.hpp"

namespace irscovert {

struct CovertParams {
  double p_total = 1e-4;    // W
  double sigma_b2 = 1e-11;  // W
  double sigma_w2 = 1e-11;  // W
  double epsilon = 0.0;
  double convergence_eps = 1e-4;
  int max_outer_iters = 50;
  std::size_t randomization_samples = 200;
  sdp::SdpSettings sdp;

  void validate() const {
    if (!(p_total > 0.0) || !(sigma_b2 > 0.0) || !(sigma_w2 > 0.0)) {
      throw DomainError("CovertParams: powers must be > 0");
    }
    if (!(convergence_eps > 0.0)) throw DomainError("CovertParams: convergence_eps must be > 0");
    if (max_outer_iters < 1) throw DomainError("CovertParams: max_outer_iters must be >= 1");
    if (randomization_samples < 1) throw DomainError("CovertParams: randomization_samples must be >= 1");
  }
};

enum class Method { Perfect, Discrete, NoIrs, RobustKl01, RobustKl10 };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::Perfect: return "perfect";
    case Method::Discrete: return "discrete";
    case Method::NoIrs: return "no_irs";
    case Method::RobustKl01: return "robust_kl01";
    case Method::RobustKl10: return "robust_kl10";
  }
  return "unknown";
}

inline Method method_from_string(const std::string& s) {
  for (Method m : {Method::Perfect, Method::Discrete, Method::NoIrs,
                   Method::RobustKl01, Method::RobustKl10}) {
    if (to_string(m) == s) return m;
  }
  throw ContractViolation("unknown method '" + s + "'");
}

struct BeamformerSolution {
  Method method = Method::Perfect;
  ComplexVector w_b;
  ComplexVector q;
  std::vector<long long> phase_indices;  // discrete designs only
  int phase_bits = 0;
  double rate_bits = 0.0;
  std::vector<double> objective_trace;  // rate per outer iteration
  std::vector<double> residual_trace;   // covert residual before the transmit step restores it
  int iterations = 0;
  double covert_residual = 0.0;  // |t_w w|^2 / (P ||t_w||^2)
  bool baseline = false;
  bool converged = false;
};

struct EffectiveChannels {
  ComplexRowVector t_b;
  ComplexRowVector t_w;
};

inline EffectiveChannels effective_channels(const ChannelSet& ch, const ComplexVector& q) {
  if (q.size() != ch.n_irs()) throw DimensionError("effective_channels: q has wrong length");
  return {composite_channel(ch.h_ib, ch.h_ai, q, ch.h_ab),
          composite_channel(ch.h_iw, ch.h_ai, q, ch.h_aw)};
}

inline double received_power(const ComplexRowVector& t, const ComplexVector& w) {
  return std::norm((t * w)(0, 0));
}

inline double rate_bits(const ChannelSet& ch, const ComplexVector& w,
                        const ComplexVector& q, double sigma_b2) {
  return std::log2(1.0 + received_power(effective_channels(ch, q).t_b, w) / sigma_b2);
}

inline double covert_residual(const ComplexRowVector& t_w, const ComplexVector& w, double p_total) {
  const double tn = t_w.squaredNorm();
  if (tn == 0.0) return 0.0;
  return received_power(t_w, w) / (p_total * tn);
}

// Scales w down onto the power sphere if it exceeds it by round-off.
inline ComplexVector clip_power(const ComplexVector& w, double p_total) {
  const double e = w.squaredNorm();
  if (e > p_total) return w * std::sqrt(p_total / e);
  return w;
}

// Accepts Optimal solutions and MaxIterations solutions whose best iterate is
// accurate to 1e-6; throws SolverFailure otherwise.
inline void require_usable(const sdp::SdpSolution& sol, const sdp::SdpProblem& prob,
                           const char* what) {
  if (sol.status == sdp::Status::Optimal) return;
  if (sol.status == sdp::Status::MaxIterations) {
    const double scale = std::max(1.0, std::abs(sol.objective_value));
    if (sol.duality_gap <= 1e-6 * scale && prob.max_violation(sol.primal_blocks) <= 1e-6) return;
  }
  throw SolverFailure(std::string(what) + ": SDP returned " + sdp::to_string(sol.status) +
                      " after " + std::to_string(sol.iterations) + " iterations (gap " +
                      std::to_string(sol.duality_gap) + ", primal residual " +
                      std::to_string(sol.primal_residual) + ")");
}

// W^{1/2} P W^{1/2} with P the projector onto W^{1/2} t_b^H: rank one, same
// value of t_b W t_b^H, no larger trace, and no larger t_w W t_w^H for any t_w.
inline HermitianMatrix project_rank_one(const HermitianMatrix& w, const ComplexRowVector& t_b) {
  if (t_b.size() != w.dim()) throw DimensionError("project_rank_one: t_b length mismatch");
  const HermitianMatrix s = psd_sqrt(w);
  const ComplexVector u = s.matrix() * t_b.adjoint();
  const double un = u.squaredNorm();
  if (un == 0.0) return HermitianMatrix::zero(w.dim());
  const ComplexVector su = s.matrix() * u;
  return HermitianMatrix(ComplexMatrix(su * su.adjoint() / un));
}

struct TransmitStep {
  ComplexVector w;
  HermitianMatrix relaxed;    // SDR solution in Watts
  HermitianMatrix projected;  // after rank-one projection
  double sdr_objective = 0.0;  // t_b W t_b^H at the SDR optimum
  sdp::SdpSolution sdp;
};

// Transmit SDR in normalized units W = P W':
//   max Tr(T_b W') / ||t_b||^2  s.t.  Tr(T_w W') = 0,  Tr(W') <= 1,  W' >= 0.
inline TransmitStep solve_w_sdr(const ComplexRowVector& t_b, const ComplexRowVector& t_w,
                                const CovertParams& params) {
  const Index n = t_b.size();
  TransmitStep out;
  const double tb2 = t_b.squaredNorm();
  if (tb2 == 0.0) {
    out.w = ComplexVector::Zero(n);
    out.relaxed = out.projected = HermitianMatrix::zero(n);
    out.sdp.status = sdp::Status::Optimal;
    return out;
  }
  sdp::SdpProblem prob;
  const auto b = prob.add_block(n);
  prob.add_objective(b, HermitianMatrix::outer(t_b.adjoint()) * (1.0 / tb2));
  const double tw2 = t_w.squaredNorm();
  if (tw2 > 0.0) {
    prob.add_constraint(b, HermitianMatrix::outer(t_w.adjoint()) * (1.0 / tw2),
                        sdp::Relation::Equal, 0.0);
  }
  prob.add_constraint(b, HermitianMatrix::identity(n), sdp::Relation::LessEqual, 1.0);
  out.sdp = sdp::solve(prob, params.sdp);
  require_usable(out.sdp, prob, "transmit beamformer");
  out.relaxed = out.sdp.primal_blocks[0] * params.p_total;
  out.sdr_objective = out.relaxed.quadratic_form(t_b.adjoint());
  out.projected = project_rank_one(out.relaxed, t_b);
  out.w = clip_power(rank_one_extract(out.projected), params.p_total);
  return out;
}

inline ComplexVector solve_w_given_q(const ChannelSet& ch, const ComplexVector& q,
                                     const CovertParams& params) {
  const EffectiveChannels e = effective_channels(ch, q);
  return solve_w_sdr(e.t_b, e.t_w, params).w;
}

// |t(q) w|^2 = qbar^H G qbar + h with qbar = [q; 1]. `g` is the vector with
// G~ = g g^H covering the full (M+1)-dimensional form; G is G~ with its
// corner removed and h the corner value.
struct ReflectQuadratic {
  ComplexVector g;
  HermitianMatrix G;
  double h = 0.0;

  HermitianMatrix full() const { return HermitianMatrix::outer(g); }
  double value(const ComplexVector& qbar) const { return std::norm(g.dot(qbar)); }
};

inline ReflectQuadratic reflect_quadratic(const ComplexVector& h_irs, const ComplexMatrix& h_ai,
                                          const ComplexVector& h_direct, const ComplexVector& w) {
  const Index m = h_irs.size();
  ReflectQuadratic r;
  r.g.resize(m + 1);
  // t(q) w = sum_m q_m a_m + b with a_m = conj(h_irs,m) (H_ai w)_m.
  const ComplexVector hw = h_ai * w;
  for (Index i = 0; i < m; ++i) r.g(i) = std::conj(std::conj(h_irs(i)) * hw(i));
  const Complex bb = h_direct.dot(w);
  r.g(m) = std::conj(bb);
  ComplexMatrix full = r.g * r.g.adjoint();
  r.h = std::norm(bb);
  full(m, m) = 0.0;
  r.G = HermitianMatrix(full);
  return r;
}

inline ComplexVector augment(const ComplexVector& q) {
  ComplexVector qb(q.size() + 1);
  qb.head(q.size()) = q;
  qb(q.size()) = 1.0;
  return qb;
}

struct ReflectStep {
  ComplexVector q;
  ComplexVector w;       // transmit beamformer made covert for q
  double objective = 0.0;  // |t_b(q) w|^2
  bool improved = false;
  sdp::Status status = sdp::Status::Optimal;
};

// Removes the component of w along t_w(q), restoring |t_w w| = 0.
inline ComplexVector restore_covertness(const ChannelSet& ch, const ComplexVector& q,
                                        const ComplexVector& w) {
  const EffectiveChannels e = effective_channels(ch, q);
  return null_projector(e.t_w.adjoint()).matrix() * w;
}

// Reflect SDR over Qbar ((M+1) x (M+1)):
//   max Tr(G~_B Qbar)  s.t.  Tr(G~_W Qbar) = 0,  Qbar_mm = 1,  Qbar >= 0.
// With w held fixed the equality pins q close to its previous value, so a
// second candidate pool comes from the same relaxation without the warden
// term. Every candidate is projected to unit modulus and scored after
// covertness restoration; the previous q is kept unless a candidate is at
// least as good.
inline HermitianMatrix reflect_sdr(const ReflectQuadratic& bob, const ReflectQuadratic* willie,
                                   const sdp::SdpSettings& settings, sdp::Status* status) {
  const Index dim = bob.g.size();
  sdp::SdpProblem prob;
  const auto blk = prob.add_block(dim);
  prob.add_objective(blk, bob.full() * (1.0 / bob.g.squaredNorm()));
  if (willie != nullptr && willie->g.squaredNorm() > 0.0) {
    prob.add_constraint(blk, willie->full() * (1.0 / willie->g.squaredNorm()),
                        sdp::Relation::Equal, 0.0);
  }
  for (Index i = 0; i < dim; ++i) {
    RealVector e = RealVector::Zero(dim);
    e(i) = 1.0;
    prob.add_constraint(blk, HermitianMatrix::diagonal(e), sdp::Relation::Equal, 1.0);
  }
  const sdp::SdpSolution sol = sdp::solve(prob, settings);
  *status = sol.status;
  if (sol.status != sdp::Status::Optimal && sol.status != sdp::Status::MaxIterations) {
    return HermitianMatrix();
  }
  return sol.primal_blocks[0];
}

inline ReflectStep solve_q_given_w(const ChannelSet& ch, const ComplexVector& w,
                                   const ComplexVector& q_prev, const CovertParams& params,
                                   std::uint64_t seed) {
  const Index m = ch.n_irs();
  ReflectStep out;
  out.q = q_prev;
  out.w = w;
  out.objective = received_power(effective_channels(ch, q_prev).t_b, w);
  if (m == 0) return out;

  const ReflectQuadratic qb = reflect_quadratic(ch.h_ib, ch.h_ai, ch.h_ab, w);
  if (qb.g.head(m).squaredNorm() == 0.0) return out;
  const ReflectQuadratic qw = reflect_quadratic(ch.h_iw, ch.h_ai, ch.h_aw, w);

  auto score = [&](const ComplexVector& qbar) {
    const ComplexVector q = qbar.head(m);
    return received_power(effective_channels(ch, q).t_b, restore_covertness(ch, q, w));
  };
  ComplexVector best;
  double best_score = -1.0;
  auto consider = [&](const HermitianMatrix& relaxed, std::uint64_t pool_seed) {
    if (relaxed.dim() == 0) return;
    const ComplexVector lead = unit_modulus_projection(rank_one_extract(relaxed));
    const double lead_score = score(lead);
    if (lead_score > best_score) {
      best = lead;
      best_score = lead_score;
    }
    const RandomizationResult r = gaussian_randomization_full(
        psd_clamp(relaxed), params.randomization_samples,
        [](const ComplexVector& z) { return std::optional<ComplexVector>(unit_modulus_projection(z)); },
        score, pool_seed);
    if (r.objective > best_score) {
      best = r.vector;
      best_score = r.objective;
    }
  };
  sdp::Status covert_status = sdp::Status::Optimal;
  sdp::Status free_status = sdp::Status::Optimal;
  consider(reflect_sdr(qb, &qw, params.sdp, &covert_status), derive_seed(seed, {0}));
  consider(reflect_sdr(qb, nullptr, params.sdp, &free_status), derive_seed(seed, {1}));
  out.status = covert_status;
  if (best_score >= out.objective) {
    out.improved = best_score > out.objective;
    out.q = best.head(m);
    out.w = restore_covertness(ch, out.q, w);
    out.objective = best_score;
  }
  return out;
}

inline BeamformerSolution no_irs_baseline(const ChannelSet& ch, const CovertParams& params) {
  params.validate();
  BeamformerSolution s;
  s.method = Method::NoIrs;
  s.baseline = true;
  s.q = ComplexVector::Zero(ch.n_irs());
  const ComplexVector v = null_projector(ch.h_aw).matrix() * ch.h_ab;
  const double vn = v.norm();
  s.w_b = vn > 0.0 ? ComplexVector(std::sqrt(params.p_total) * v / vn)
                   : ComplexVector(ComplexVector::Zero(ch.n_tx()));
  s.rate_bits = std::log2(1.0 + std::norm(ch.h_ab.dot(s.w_b)) / params.sigma_b2);
  s.objective_trace = {s.rate_bits};
  s.iterations = 1;
  s.converged = true;
  s.covert_residual = covert_residual(ch.h_aw.adjoint(), s.w_b, params.p_total);
  return s;
}

// Relative-improvement stopping test on consecutive rates.
inline bool rate_converged(double previous, double current, double eps) {
  if (current <= 0.0) return true;
  return (current - previous) / current < eps;
}

inline BeamformerSolution alternate_optimize(const ChannelSet& ch, const CovertParams& params,
                                             std::uint64_t seed) {
  params.validate();
  ch.validate();
  const Index n = ch.n_tx();
  const Index m = ch.n_irs();
  BeamformerSolution s;
  s.method = Method::Perfect;

  // Starting point: maximum-ratio transmission toward Bob's direct link and
  // all-ones reflection. It is not covert, so it seeds the first transmit step
  // only and does not enter the rate trace.
  ComplexVector q = ComplexVector::Ones(m);
  ComplexVector w = ch.h_ab.norm() > 0.0
                        ? ComplexVector(std::sqrt(params.p_total) * ch.h_ab / ch.h_ab.norm())
                        : ComplexVector(ComplexVector::Zero(n));
  for (int k = 1; k <= params.max_outer_iters; ++k) {
    const EffectiveChannels e = effective_channels(ch, q);
    const ComplexVector w_new = solve_w_sdr(e.t_b, e.t_w, params).w;
    // The previous beamformer is feasible for this step whenever it is covert.
    if (k == 1 || received_power(e.t_b, w_new) >= received_power(e.t_b, w)) w = w_new;

    const ReflectStep rs = solve_q_given_w(ch, w, q, params, derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    q = rs.q;
    w = rs.w;
    const double power = received_power(effective_channels(ch, q).t_b, w);
    const double rate = std::log2(1.0 + power / params.sigma_b2);
    s.objective_trace.push_back(rate);
    s.iterations = k;
    if (k >= 2 && rate_converged(s.objective_trace[s.objective_trace.size() - 2], rate,
                                 params.convergence_eps)) {
      s.converged = true;
      break;
    }
  }
  s.w_b = w;
  s.q = q;
  s.rate_bits = rate_bits(ch, w, q, params.sigma_b2);
  s.covert_residual = covert_residual(effective_channels(ch, q).t_w, w, params.p_total);
  return s;
}

}  // namespace irscovert

#endif  // IRSCOVERT_COVERT_PERFECT_HPP
