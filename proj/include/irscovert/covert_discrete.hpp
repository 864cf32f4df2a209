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

#ifndef IRSCOVERT_COVERT_DISCRETE_HPP
#define IRSCOVERT_COVERT_DISCRETE_HPP

// Discrete phase shifts: the reflect step becomes a round-robin closed-form
// update over a uniform L-bit codebook, and the transmit step re-imposes
// covertness after every sweep.

#include <cmath>
#include <cstdint>
#include <vector>

#include "irscovert/covert_perfect.hpp"

namespace irscovert {

class PhaseCodebook {
 public:
  explicit PhaseCodebook(int bits) : bits_(bits) {
    if (bits < 1 || bits > 30) throw DomainError("PhaseCodebook: bits must be in [1, 30]");
    levels_ = 1LL << bits;
    step_ = 2.0 * kPi / static_cast<double>(levels_);
  }

  int bits() const { return bits_; }
  long long levels() const { return levels_; }
  double step() const { return step_; }
  double value(long long index) const {
    if (index < 0 || index >= levels_) throw DomainError("PhaseCodebook: index out of range");
    return step_ * static_cast<double>(index);
  }

 private:
  int bits_;
  long long levels_;
  double step_;
};

inline double wrap_phase(double phi) {
  double r = std::fmod(phi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

inline double circular_distance(double a, double b) {
  const double d = std::abs(wrap_phase(a) - wrap_phase(b));
  return std::min(d, 2.0 * kPi - d);
}

// Index of the circularly nearest level; on a tie the smaller angle wins.
inline long long quantize_phase_index(double phi, const PhaseCodebook& cb) {
  const double p = wrap_phase(phi);
  const long long lo = std::min(static_cast<long long>(std::floor(p / cb.step())), cb.levels() - 1);
  const long long hi = (lo + 1) % cb.levels();
  const double dlo = circular_distance(p, cb.value(lo));
  const double dhi = circular_distance(p, cb.value(hi));
  if (dlo < dhi) return lo;
  if (dhi < dlo) return hi;
  return std::min(lo, hi);
}

inline double quantize_phase(double phi, const PhaseCodebook& cb) {
  return cb.value(quantize_phase_index(phi, cb));
}

// Expansion of |t_b(q) w|^2 around one element:
//   sum_{m,k} q_m A_mk conj(q_k) + 2 Re(sum_m q_m hbar_m) + c
// with A = a a^H, hbar_m = a_m conj(b), c = |b|^2, where t_b(q) w = sum q_m a_m + b.
struct ElementExpansion {
  ComplexMatrix a_mat;
  ComplexVector hbar;
  double c = 0.0;

  double value(const ComplexVector& q) const {
    const Complex quad = q.transpose() * a_mat * q.conjugate();
    const Complex lin = q.transpose() * hbar;
    return quad.real() + 2.0 * lin.real() + c;
  }
};

inline ElementExpansion element_expansion(const ChannelSet& ch, const ComplexVector& w) {
  const Index m = ch.n_irs();
  const ComplexVector hw = ch.h_ai * w;
  ComplexVector a(m);
  for (Index i = 0; i < m; ++i) a(i) = std::conj(ch.h_ib(i)) * hw(i);
  const Complex b = ch.h_ab.dot(w);
  ElementExpansion e;
  e.a_mat = a * a.adjoint();
  e.hbar = a * std::conj(b);
  e.c = std::norm(b);
  return e;
}

inline ComplexVector phases_to_q(const std::vector<long long>& idx, const PhaseCodebook& cb) {
  ComplexVector q(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) q(static_cast<Index>(i)) = std::polar(1.0, cb.value(idx[i]));
  return q;
}

// Best codebook index for element m with the others held fixed. Writing
// sigma_m = sum_{k != m} A_mk conj(q_k) + hbar_m = |sigma_m| e^{-j phi_m}, the
// element's contribution is 2 |sigma_m| cos(theta_m - phi_m), so the argmax
// over the codebook is the level nearest to phi_m. sigma_m = 0 leaves the
// index unchanged.
inline long long element_phase_update(const ElementExpansion& e, const std::vector<long long>& idx,
                                      Index m, const PhaseCodebook& cb) {
  const Index n = static_cast<Index>(idx.size());
  if (m < 0 || m >= n) throw DimensionError("element_phase_update: index out of range");
  const ComplexVector q = phases_to_q(idx, cb);
  Complex sigma = e.hbar(m);
  for (Index k = 0; k < n; ++k) {
    if (k != m) sigma += e.a_mat(m, k) * std::conj(q(k));
  }
  if (std::abs(sigma) == 0.0) return idx[static_cast<std::size_t>(m)];
  return quantize_phase_index(-std::arg(sigma), cb);
}

inline long long element_phase_update(const ChannelSet& ch, const ComplexVector& w,
                                      const std::vector<long long>& idx, Index m,
                                      const PhaseCodebook& cb) {
  return element_phase_update(element_expansion(ch, w), idx, m, cb);
}

struct DiscreteOptions {
  int sweeps_per_iteration = 1;
};

// Starts from the quantized continuous design (computed here unless supplied)
// and alternates transmit steps with element sweeps. A sweep is kept only when
// the transmit step that follows it raises the covert rate, so the trace is
// monotone and every recorded point is covert.
inline BeamformerSolution discrete_design(const ChannelSet& ch, const CovertParams& params,
                                          const PhaseCodebook& cb, std::uint64_t seed,
                                          const BeamformerSolution* continuous = nullptr,
                                          const DiscreteOptions& opt = {}) {
  params.validate();
  ch.validate();
  if (opt.sweeps_per_iteration < 1) throw DomainError("discrete_design: sweeps_per_iteration must be >= 1");
  const Index m = ch.n_irs();
  BeamformerSolution init;
  if (continuous == nullptr) {
    init = alternate_optimize(ch, params, seed);
    continuous = &init;
  }
  std::vector<long long> idx(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    idx[static_cast<std::size_t>(i)] = quantize_phase_index(std::arg(continuous->q(i)), cb);
  }

  BeamformerSolution s;
  s.method = Method::Discrete;
  s.phase_bits = cb.bits();
  ComplexVector q = phases_to_q(idx, cb);
  ComplexVector w = solve_w_given_q(ch, q, params);
  double rate = rate_bits(ch, w, q, params.sigma_b2);
  s.objective_trace.push_back(rate);
  s.residual_trace.push_back(covert_residual(effective_channels(ch, q).t_w, w, params.p_total));
  s.iterations = 1;
  for (int k = 2; k <= params.max_outer_iters; ++k) {
    const ElementExpansion e = element_expansion(ch, w);
    std::vector<long long> cand = idx;
    for (int sweep = 0; sweep < opt.sweeps_per_iteration; ++sweep) {
      for (Index i = 0; i < m; ++i) cand[static_cast<std::size_t>(i)] = element_phase_update(e, cand, i, cb);
    }
    if (cand == idx) {
      s.converged = true;
      break;
    }
    const ComplexVector q_cand = phases_to_q(cand, cb);
    const double residual = covert_residual(effective_channels(ch, q_cand).t_w, w, params.p_total);
    const ComplexVector w_cand = solve_w_given_q(ch, q_cand, params);
    const double rate_cand = rate_bits(ch, w_cand, q_cand, params.sigma_b2);
    if (rate_cand < rate) {
      s.converged = true;
      break;
    }
    s.residual_trace.push_back(residual);
    s.objective_trace.push_back(rate_cand);
    s.iterations = k;
    const double prev = rate;
    idx = cand;
    q = q_cand;
    w = w_cand;
    rate = rate_cand;
    if (rate_converged(prev, rate, params.convergence_eps)) {
      s.converged = true;
      break;
    }
  }
  s.w_b = w;
  s.q = q;
  s.phase_indices.assign(idx.begin(), idx.end());
  s.rate_bits = rate;
  s.covert_residual = covert_residual(effective_channels(ch, q).t_w, w, params.p_total);
  return s;
}

}  // namespace irscovert

#endif  // IRSCOVERT_COVERT_DISCRETE_HPP
