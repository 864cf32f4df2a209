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

#ifndef IRSCOVERT_COVERT_ROBUST_HPP
#define IRSCOVERT_COVERT_ROBUST_HPP

// Robust design when the warden's channels are known only up to ellipsoids.
// The transmit step enforces the covertness interval for every channel in the
// (stacked) ellipsoid through two S-lemma LMIs; the reflect step works on the
// estimated channels with the upper bound tightened by the worst-case error
// term of the current beamformer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "irscovert/covert_perfect.hpp"
#include "irscovert/detection.hpp"

namespace irscovert {

enum class KlCase { Kl01, Kl10 };

inline std::string to_string(KlCase c) { return c == KlCase::Kl01 ? "kl01" : "kl10"; }

inline KlCase kl_case_from_string(const std::string& s) {
  if (s == "kl01") return KlCase::Kl01;
  if (s == "kl10") return KlCase::Kl10;
  throw ContractViolation("unknown kl case '" + s + "'");
}

inline double kl_value(KlCase c, double l0, double l1) {
  return std::max(0.0, c == KlCase::Kl01 ? kl_01(l0, l1) : kl_10(l0, l1));
}

// Admissible range of lambda1 / lambda0. D(p0||p1) = f(l1/l0) and
// D(p1||p0) = f(l0/l1), so the second case inverts the interval.
struct RatioInterval {
  double lo;
  double hi;
};

inline RatioInterval ratio_interval(double epsilon, KlCase c) {
  const CovertInterval ci = covert_interval(epsilon);
  if (c == KlCase::Kl01) return {ci.a_bar, ci.b_bar};
  return {1.0 / ci.b_bar, 1.0 / ci.a_bar};
}

struct RobustParams : CovertParams {
  KlCase kl_case = KlCase::Kl01;

  void validate() const {
    CovertParams::validate();
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("RobustParams: epsilon must be in (0, 1)");
  }
  RatioInterval interval() const { return ratio_interval(epsilon, kl_case); }
  // Bounds on the received signal power at the warden.
  double power_lo() const { return sigma_w2 * (interval().lo - 1.0); }
  double power_hi() const { return sigma_w2 * (interval().hi - 1.0); }
};

// {dh : dh^H C dh <= v} for each of the two warden links.
struct EllipsoidModel {
  HermitianMatrix c_aw;
  HermitianMatrix c_iw;
  double v_aw = 0.0;
  double v_iw = 0.0;

  double v_w() const { return v_aw + v_iw; }

  // Balls (C = I) splitting v_w evenly between the links.
  static EllipsoidModel balls(Index n_tx, Index n_irs, double v_w) {
    EllipsoidModel e;
    e.c_aw = HermitianMatrix::identity(n_tx);
    e.c_iw = n_irs > 0 ? HermitianMatrix::identity(n_irs) : HermitianMatrix();
    e.v_aw = 0.5 * v_w;
    e.v_iw = 0.5 * v_w;
    return e;
  }

  void validate(Index n_tx, Index n_irs) const {
    if (!(v_aw >= 0.0) || !(v_iw >= 0.0) || !std::isfinite(v_aw) || !std::isfinite(v_iw)) {
      throw DomainError("EllipsoidModel: sizes must be finite and >= 0");
    }
    if (c_aw.dim() != n_tx) throw DimensionError("EllipsoidModel: c_aw dimension mismatch");
    if (!(lambda_min(c_aw) > 0.0)) throw DomainError("EllipsoidModel: c_aw must be positive definite");
    if (n_irs > 0) {
      if (c_iw.dim() != n_irs) throw DimensionError("EllipsoidModel: c_iw dimension mismatch");
      if (!(lambda_min(c_iw) > 0.0)) throw DomainError("EllipsoidModel: c_iw must be positive definite");
    }
  }
};

// Stacked error model for g_W^H w_hat with w_hat = E w. The reflected error
// H_ai^H Q^H dh_iw lies in a ball of squared radius
// v_iw sigma_max(H_ai)^2 / lambda_min(C_iw) for every unit-modulus Q, so the
// first block of C_w is gamma I with gamma = lambda_min(C_iw) / sigma_max(H_ai)^2
// and the stacked set {dg^H C_w dg <= v_aw + v_iw} contains every admissible
// error pair. Without a cascaded link the stack collapses to the direct block.
struct StackedEllipsoid {
  ComplexMatrix e;      // d x N
  ComplexVector g_hat;  // d
  HermitianMatrix c;    // d x d
  double v = 0.0;

  ComplexRowVector t_hat() const { return g_hat.adjoint() * e; }
  // lambda_max(E^H C^{-1} E)
  HermitianMatrix error_gram() const {
    return HermitianMatrix(ComplexMatrix(e.adjoint() * c.matrix().ldlt().solve(e)));
  }
  // (|g^H E w| + sqrt(v (Ew)^H C^{-1} (Ew)))^2, the largest signal power over the set.
  double worst_case_power(const ComplexVector& w) const {
    const double a = std::abs((t_hat() * w)(0, 0));
    const double r = std::sqrt(std::max(0.0, v * error_gram().quadratic_form(w)));
    return (a + r) * (a + r);
  }
  double error_radius(const ComplexVector& w) const {
    return std::sqrt(std::max(0.0, v * error_gram().quadratic_form(w)));
  }
};

inline StackedEllipsoid stacked_ellipsoid(const ChannelSet& ch_hat, const ComplexVector& q,
                                          const EllipsoidModel& model) {
  const Index n = ch_hat.n_tx();
  const Index m = ch_hat.n_irs();
  model.validate(n, m);
  StackedEllipsoid s;
  s.v = model.v_w();
  const double smax = m > 0 ? Eigen::JacobiSVD<ComplexMatrix>(ch_hat.h_ai).singularValues()(0) : 0.0;
  if (m == 0 || smax == 0.0) {
    s.e = ComplexMatrix::Identity(n, n);
    s.g_hat = ch_hat.h_aw;
    s.c = model.c_aw;
    return s;
  }
  const double gamma = lambda_min(model.c_iw) / (smax * smax);
  s.e.resize(2 * n, n);
  s.e << ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(n, n);
  s.g_hat.resize(2 * n);
  s.g_hat << ch_hat.h_ai.adjoint() * q.conjugate().cwiseProduct(ch_hat.h_iw), ch_hat.h_aw;
  ComplexMatrix c = ComplexMatrix::Zero(2 * n, 2 * n);
  c.topLeftCorner(n, n) = gamma * ComplexMatrix::Identity(n, n);
  c.bottomRightCorner(n, n) = model.c_aw.matrix();
  s.c = HermitianMatrix(c);
  return s;
}

struct LmiPair {
  HermitianMatrix lower;  // PSD => |g^H W_hat g| >= sigma^2 (lo - 1) over the set
  HermitianMatrix upper;  // PSD => |g^H W_hat g| <= sigma^2 (hi - 1) over the set
};

// The two S-lemma matrices at given multipliers, in unscaled form.
inline LmiPair build_lmis(const HermitianMatrix& w_hat, const ComplexVector& g_hat,
                          const HermitianMatrix& c_w, double v_w, const RatioInterval& ratio,
                          double sigma_w2, double eta1, double eta2) {
  const Index d = w_hat.dim();
  if (g_hat.size() != d || c_w.dim() != d) throw DimensionError("build_lmis: dimension mismatch");
  if (!(eta1 >= 0.0) || !(eta2 >= 0.0)) throw DomainError("build_lmis: multipliers must be >= 0");
  const ComplexVector wg = w_hat.matrix() * g_hat;
  const double gwg = w_hat.quadratic_form(g_hat);
  ComplexMatrix lo(d + 1, d + 1);
  lo.topLeftCorner(d, d) = w_hat.matrix() + eta1 * c_w.matrix();
  lo.topRightCorner(d, 1) = wg;
  lo.bottomLeftCorner(1, d) = wg.adjoint();
  lo(d, d) = gwg - sigma_w2 * (ratio.lo - 1.0) - eta1 * v_w;
  ComplexMatrix hi(d + 1, d + 1);
  hi.topLeftCorner(d, d) = -w_hat.matrix() + eta2 * c_w.matrix();
  hi.topRightCorner(d, 1) = -wg;
  hi.bottomLeftCorner(1, d) = -wg.adjoint();
  hi(d, d) = -gwg + sigma_w2 * (ratio.hi - 1.0) - eta2 * v_w;
  return {HermitianMatrix(lo), HermitianMatrix(hi)};
}

class RobustInfeasible : public SolverFailure {
 public:
  RobustInfeasible(const std::string& what, double a_bar, double b_bar, double v_w)
      : SolverFailure(what + " (a_bar " + std::to_string(a_bar) + ", b_bar " +
                      std::to_string(b_bar) + ", v_w " + std::to_string(v_w) + ")"),
        a_bar_(a_bar), b_bar_(b_bar), v_w_(v_w) {}
  double a_bar() const { return a_bar_; }
  double b_bar() const { return b_bar_; }
  double v_w() const { return v_w_; }

 private:
  double a_bar_, b_bar_, v_w_;
};

// Scales w down until the worst-case warden power is within the upper bound
// and the power budget holds. The lower bound is below zero for every
// epsilon in (0, 1), so it never binds.
inline ComplexVector robust_restore(const StackedEllipsoid& st, const ComplexVector& w,
                                    double power_hi, double p_total) {
  ComplexVector out = clip_power(w, p_total);
  const double wc = st.worst_case_power(out);
  if (wc > power_hi) out *= std::sqrt(power_hi / wc);
  return out;
}

struct RobustTransmitStep {
  ComplexVector w;
  HermitianMatrix relaxed;  // SDR solution in Watts
  double eta1 = 0.0;
  double eta2 = 0.0;
  double sdr_objective = 0.0;
  sdp::SdpSolution sdp;
};

// max t_b W t_b^H  s.t.  Tr(W) <= P, both LMIs, W >= 0, eta >= 0.
// Internally W = s_W W' and eta = (c_hi / v) eta', and both LMIs are
// congruence-scaled by diag(sqrt(v / c_hi) I, 1 / sqrt(c_hi)) so that every
// entry is O(1). With v = 0 the LMIs reduce to the nominal interval, which is
// imposed directly as two trace constraints.
inline RobustTransmitStep solve_robust_w(const ChannelSet& ch_hat, const ComplexVector& q,
                                         const EllipsoidModel& model, const RobustParams& rp) {
  rp.validate();
  const Index n = ch_hat.n_tx();
  const StackedEllipsoid st = stacked_ellipsoid(ch_hat, q, model);
  const EffectiveChannels eff = effective_channels(ch_hat, q);
  const ComplexRowVector& t_b = eff.t_b;
  const ComplexRowVector t_w = st.t_hat();
  const double c_hi = rp.power_hi();
  const double c_lo = rp.power_lo();
  const double tw2 = t_w.squaredNorm();
  const double tb2 = t_b.squaredNorm();
  const double v = st.v;

  RobustTransmitStep out;
  if (tb2 == 0.0) {
    out.w = ComplexVector::Zero(n);
    out.relaxed = HermitianMatrix::zero(n);
    out.sdp.status = sdp::Status::Optimal;
    return out;
  }
  const double kappa = v > 0.0 ? lambda_max(st.error_gram()) : 0.0;
  const double denom = tw2 + v * kappa;
  const double s_w = denom > 0.0 ? std::min(rp.p_total, c_hi / denom) : rp.p_total;

  sdp::SdpProblem prob;
  const auto wb = prob.add_block(n);
  prob.add_objective(wb, HermitianMatrix::outer(t_b.adjoint()) * (1.0 / tb2));
  prob.add_constraint(wb, HermitianMatrix::identity(n), sdp::Relation::LessEqual, rp.p_total / s_w);
  std::size_t eb1 = 0, eb2 = 0;
  if (v > 0.0) {
    eb1 = prob.add_block(1);
    eb2 = prob.add_block(1);
    const Index d = st.e.rows();
    ComplexMatrix k(d + 1, n);
    k.topRows(d) = st.e;
    k.bottomRows(1) = t_w;
    const double alpha = std::sqrt(v / c_hi);
    const double beta = 1.0 / std::sqrt(c_hi);
    RealVector dscale = RealVector::Constant(d + 1, alpha);
    dscale(d) = beta;
    const ComplexMatrix dk = dscale.cast<Complex>().asDiagonal() * k;
    ComplexMatrix ceta = ComplexMatrix::Zero(d + 1, d + 1);
    ceta.topLeftCorner(d, d) = st.c.matrix();
    ceta(d, d) = -1.0;
    const HermitianMatrix eta_coeff(ceta);

    RealVector lo_const = RealVector::Zero(d + 1);
    lo_const(d) = -c_lo / c_hi;
    prob.add_lmi({HermitianMatrix::diagonal(lo_const), {{wb, dk, s_w}}, {{eb1, eta_coeff}}});
    RealVector hi_const = RealVector::Zero(d + 1);
    hi_const(d) = 1.0;
    prob.add_lmi({HermitianMatrix::diagonal(hi_const), {{wb, dk, -s_w}}, {{eb2, eta_coeff}}});
  } else if (tw2 > 0.0) {
    const HermitianMatrix tw_n = HermitianMatrix::outer(t_w.adjoint()) * (1.0 / tw2);
    prob.add_constraint(wb, tw_n, sdp::Relation::LessEqual, c_hi / (s_w * tw2));
    prob.add_constraint(wb, tw_n, sdp::Relation::GreaterEqual, c_lo / (s_w * tw2));
  }
  out.sdp = sdp::solve(prob, rp.sdp);
  if (out.sdp.status == sdp::Status::Infeasible) {
    const CovertInterval ci = covert_interval(rp.epsilon);
    throw RobustInfeasible("robust transmit step is infeasible", ci.a_bar, ci.b_bar, v);
  }
  require_usable(out.sdp, prob, "robust transmit beamformer");
  out.relaxed = psd_clamp(out.sdp.primal_blocks[wb]) * s_w;
  if (v > 0.0) {
    out.eta1 = out.sdp.primal_blocks[eb1](0, 0).real() * c_hi / v;
    out.eta2 = out.sdp.primal_blocks[eb2](0, 0).real() * c_hi / v;
  }
  out.sdr_objective = out.relaxed.quadratic_form(t_b.adjoint());
  // W^{1/2} P W^{1/2} <= W in the Loewner order, so every warden quadratic
  // form can only shrink and the upper LMI stays satisfied.
  const HermitianMatrix projected = project_rank_one(out.relaxed, t_b);
  out.w = robust_restore(st, rank_one_extract(projected), c_hi, rp.p_total);
  return out;
}

// Reflect step on the estimated channels. The upper bound on |t_w(q) w|^2 is
// tightened to (sqrt(c_hi) - r)^2 where r is the worst-case error term of w,
// which does not depend on q; this keeps the pair robust-feasible.
inline ReflectStep solve_robust_q(const ChannelSet& ch_hat, const ComplexVector& w,
                                  const ComplexVector& q_prev, const EllipsoidModel& model,
                                  const RobustParams& rp, std::uint64_t seed) {
  const Index m = ch_hat.n_irs();
  ReflectStep out;
  out.q = q_prev;
  out.w = w;
  out.objective = received_power(effective_channels(ch_hat, q_prev).t_b, w);
  if (m == 0) return out;
  const ReflectQuadratic qb = reflect_quadratic(ch_hat.h_ib, ch_hat.h_ai, ch_hat.h_ab, w);
  if (qb.g.head(m).squaredNorm() == 0.0) return out;
  const ReflectQuadratic qw = reflect_quadratic(ch_hat.h_iw, ch_hat.h_ai, ch_hat.h_aw, w);

  const double c_hi = rp.power_hi();
  const double c_lo = rp.power_lo();
  const StackedEllipsoid st_prev = stacked_ellipsoid(ch_hat, q_prev, model);
  const double r = st_prev.error_radius(w);
  const double root = std::sqrt(c_hi) - r;
  if (root <= 0.0) return out;
  const double bound_hi = root * root;

  auto score = [&](const ComplexVector& qbar) {
    const ComplexVector q = qbar.head(m);
    const StackedEllipsoid st = stacked_ellipsoid(ch_hat, q, model);
    const ComplexVector wr = robust_restore(st, w, c_hi, rp.p_total);
    return received_power(effective_channels(ch_hat, q).t_b, wr);
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
    const RandomizationResult rr = gaussian_randomization_full(
        psd_clamp(relaxed), rp.randomization_samples,
        [](const ComplexVector& z) { return std::optional<ComplexVector>(unit_modulus_projection(z)); },
        score, pool_seed);
    if (rr.objective > best_score) {
      best = rr.vector;
      best_score = rr.objective;
    }
  };

  {
    const Index dim = m + 1;
    sdp::SdpProblem prob;
    const auto blk = prob.add_block(dim);
    prob.add_objective(blk, qb.full() * (1.0 / qb.g.squaredNorm()));
    const double gw = qw.g.squaredNorm();
    if (gw > 0.0) {
      const HermitianMatrix gn = qw.full() * (1.0 / gw);
      prob.add_constraint(blk, gn, sdp::Relation::LessEqual, bound_hi / gw);
      prob.add_constraint(blk, gn, sdp::Relation::GreaterEqual, c_lo / gw);
    }
    for (Index i = 0; i < dim; ++i) {
      RealVector e = RealVector::Zero(dim);
      e(i) = 1.0;
      prob.add_constraint(blk, HermitianMatrix::diagonal(e), sdp::Relation::Equal, 1.0);
    }
    const sdp::SdpSolution sol = sdp::solve(prob, rp.sdp);
    out.status = sol.status;
    if (sol.status == sdp::Status::Optimal || sol.status == sdp::Status::MaxIterations) {
      consider(sol.primal_blocks[0], derive_seed(seed, {0}));
    }
  }
  sdp::Status free_status = sdp::Status::Optimal;
  consider(reflect_sdr(qb, nullptr, rp.sdp, &free_status), derive_seed(seed, {1}));

  if (best_score >= out.objective) {
    out.improved = best_score > out.objective;
    out.q = best.head(m);
    out.w = robust_restore(stacked_ellipsoid(ch_hat, out.q, model), w, c_hi, rp.p_total);
    out.objective = best_score;
  }
  return out;
}

struct RobustSolution {
  BeamformerSolution solution;
  DetectionReport report;  // at the estimated (nominal) warden channel
  double worst_case_power = 0.0;
};

inline DetectionReport nominal_report(const ChannelSet& ch_hat, const ComplexVector& w,
                                      const ComplexVector& q, double sigma_w2) {
  const double s = received_power(effective_channels(ch_hat, q).t_w, w);
  return DetectionReport::from(ReceptionStats::from_powers(sigma_w2, s));
}

inline RobustSolution robust_alternate(const ChannelSet& ch_hat, const EllipsoidModel& model,
                                       const RobustParams& rp, std::uint64_t seed) {
  rp.validate();
  ch_hat.validate();
  model.validate(ch_hat.n_tx(), ch_hat.n_irs());
  const Index n = ch_hat.n_tx();
  const Index m = ch_hat.n_irs();
  RobustSolution out;
  BeamformerSolution& s = out.solution;
  s.method = rp.kl_case == KlCase::Kl01 ? Method::RobustKl01 : Method::RobustKl10;

  ComplexVector q = ComplexVector::Ones(m);
  ComplexVector w = ch_hat.h_ab.norm() > 0.0
                        ? ComplexVector(std::sqrt(rp.p_total) * ch_hat.h_ab / ch_hat.h_ab.norm())
                        : ComplexVector(ComplexVector::Zero(n));
  for (int k = 1; k <= rp.max_outer_iters; ++k) {
    const ComplexVector w_new = solve_robust_w(ch_hat, q, model, rp).w;
    const ComplexRowVector t_b = effective_channels(ch_hat, q).t_b;
    if (k == 1 || received_power(t_b, w_new) >= received_power(t_b, w)) w = w_new;

    const ReflectStep rs = solve_robust_q(ch_hat, w, q, model, rp,
                                          derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    q = rs.q;
    w = rs.w;
    const double rate = rate_bits(ch_hat, w, q, rp.sigma_b2);
    s.objective_trace.push_back(rate);
    s.iterations = k;
    if (k >= 2 && rate_converged(s.objective_trace[s.objective_trace.size() - 2], rate,
                                 rp.convergence_eps)) {
      s.converged = true;
      break;
    }
  }
  s.w_b = w;
  s.q = q;
  s.rate_bits = rate_bits(ch_hat, w, q, rp.sigma_b2);
  s.covert_residual = covert_residual(effective_channels(ch_hat, q).t_w, w, rp.p_total);
  out.report = nominal_report(ch_hat, w, q, rp.sigma_w2);
  out.worst_case_power = stacked_ellipsoid(ch_hat, q, model).worst_case_power(w);
  return out;
}

struct KlSampling {
  double nominal_kl = 0.0;
  double max_kl = 0.0;
  double violation_fraction = 0.0;
  std::vector<double> sorted_kl;  // empirical CDF support, ascending

  double cdf_at(std::size_t i) const {
    return static_cast<double>(i + 1) / static_cast<double>(sorted_kl.size());
  }
};

// Uniform draw in {dh : dh^H C dh <= v} of complex dimension n; `boundary`
// forces the surface.
inline ComplexVector sample_ellipsoid(const HermitianMatrix& c, double v, bool boundary,
                                      CounterRng& rng) {
  const Index n = c.dim();
  if (v == 0.0) return ComplexVector::Zero(n);
  ComplexVector u = rng.complex_normal_vector(n);
  const double un = u.norm();
  if (un == 0.0) return ComplexVector::Zero(n);
  const double radius =
      std::sqrt(v) * (boundary ? 1.0 : std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(n))));
  u *= radius / un;
  // dh = C^{-1/2} u gives dh^H C dh = |u|^2.
  const EigenDecomposition e = hermitian_eig(c);
  const ComplexMatrix c_inv_sqrt =
      e.vectors * e.values.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * e.vectors.adjoint();
  return c_inv_sqrt * u;
}

// Divergence at the warden over sampled channel errors. Sample 0 is the
// nominal channel; the rest alternate between the surfaces and the interiors
// of the two link ellipsoids. A violation is a divergence above 2 eps^2.
inline KlSampling worst_case_kl(const ChannelSet& ch_hat, const ComplexVector& w,
                                const ComplexVector& q, const EllipsoidModel& model,
                                double sigma_w2, double epsilon, KlCase kl_case,
                                std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("worst_case_kl: samples must be >= 1");
  model.validate(ch_hat.n_tx(), ch_hat.n_irs());
  const double budget = 2.0 * epsilon * epsilon;
  const ComplexVector hw = ch_hat.h_ai * w;
  const Index m = ch_hat.n_irs();
  KlSampling out;
  out.sorted_kl.reserve(samples);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    ComplexVector h_aw = ch_hat.h_aw;
    ComplexVector h_iw = ch_hat.h_iw;
    if (i > 0) {
      CounterRng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
      const bool boundary = (i % 2) == 1;
      h_aw += sample_ellipsoid(model.c_aw, model.v_aw, boundary, rng);
      if (m > 0) h_iw += sample_ellipsoid(model.c_iw, model.v_iw, boundary, rng);
    }
    Complex y = h_aw.dot(w);
    for (Index j = 0; j < m; ++j) y += std::conj(h_iw(j)) * q(j) * hw(j);
    const double kl = kl_value(kl_case, sigma_w2, sigma_w2 + std::norm(y));
    if (i == 0) out.nominal_kl = kl;
    if (kl > budget) ++violations;
    out.sorted_kl.push_back(kl);
  }
  std::sort(out.sorted_kl.begin(), out.sorted_kl.end());
  out.max_kl = out.sorted_kl.back();
  out.violation_fraction = static_cast<double>(violations) / static_cast<double>(samples);
  return out;
}

}  // namespace irscovert

#endif  // IRSCOVERT_COVERT_ROBUST_HPP
