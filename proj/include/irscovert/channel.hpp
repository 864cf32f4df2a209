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

#ifndef IRSCOVERT_CHANNEL_HPP
#define IRSCOVERT_CHANNEL_HPP

// Five-link geometry-based channel model: Alice (N antennas) serves Bob via a
// direct link and an M-element reflecting surface while Willie listens.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "irscovert/errors.hpp"
#include "irscovert/numerics.hpp"
#include "irscovert/random.hpp"

namespace irscovert {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

struct Geometry {
  Point alice{0.0, 3.0};
  Point bob{8.0, 0.0};
  Point willie{5.0, 0.0};
  Point irs{10.0, 3.0};
  Index n_tx = 4;
  Index n_irs = 4;

  void validate() const {
    if (n_tx < 1) throw DomainError("Geometry: n_tx must be >= 1");
    if (n_irs < 0) throw DomainError("Geometry: n_irs must be >= 0");
    const Point* pts[] = {&alice, &bob, &willie, &irs};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (!(distance(*pts[i], *pts[j]) > 0.0)) {
          throw DomainError("Geometry: coincident nodes");
        }
  }
};

struct PathLossExponents {
  double aw = 3.0;
  double ab = 3.0;
  double iw = 3.0;
  double ib = 3.0;
  double ai = 2.2;
};

struct FadingParams {
  double zeta0_db = -30.0;
  PathLossExponents alpha;
  // Shared Rician factor of the surface-related links, with optional per-link
  // overrides.
  double rician_k = 10.0;
  std::optional<double> rician_k_ai;
  std::optional<double> rician_k_ib;
  std::optional<double> rician_k_iw;

  double k_ai() const { return rician_k_ai.value_or(rician_k); }
  double k_ib() const { return rician_k_ib.value_or(rician_k); }
  double k_iw() const { return rician_k_iw.value_or(rician_k); }

  void validate() const {
    for (double k : {rician_k, k_ai(), k_ib(), k_iw()}) {
      if (!(k >= 0.0)) throw DomainError("FadingParams: Rician factor must be >= 0");
    }
    for (double a : {alpha.aw, alpha.ab, alpha.iw, alpha.ib, alpha.ai}) {
      if (!(a > 0.0)) throw DomainError("FadingParams: path-loss exponents must be > 0");
    }
  }
};

struct ChannelSet {
  ComplexVector h_ab;  // N
  ComplexVector h_aw;  // N
  ComplexVector h_ib;  // M
  ComplexVector h_iw;  // M
  ComplexMatrix h_ai;  // M x N

  Index n_tx() const { return h_ab.size(); }
  Index n_irs() const { return h_ib.size(); }

  void validate() const {
    const Index n = n_tx();
    const Index m = n_irs();
    if (n < 1) throw DimensionError("ChannelSet: N must be >= 1");
    if (h_aw.size() != n || h_iw.size() != m || h_ai.rows() != m || h_ai.cols() != n) {
      throw DimensionError("ChannelSet: inconsistent link dimensions");
    }
    if (!h_ab.allFinite() || !h_aw.allFinite() || !h_ib.allFinite() ||
        !h_iw.allFinite() || !h_ai.allFinite()) {
      throw ContractViolation("ChannelSet: non-finite entry");
    }
  }
};

// Amplitude gain sqrt(zeta0 (d0/d)^alpha) with d0 = 1 m.
inline double path_loss(double d, double alpha, double zeta0_db) {
  if (!(d > 0.0)) throw DomainError("path_loss: distance must be > 0");
  return std::sqrt(db_to_linear(zeta0_db) * std::pow(d, -alpha));
}

// Entry k = exp(-j 2 pi (d/lambda) k sin(phi)) with element spacing ratio
// d/lambda = 2.
inline ComplexVector steering_vector(Index n, double phi) {
  constexpr double kSpacingRatio = 2.0;
  ComplexVector a(n);
  const double s = std::sin(phi);
  for (Index k = 0; k < n; ++k) {
    a(k) = std::polar(1.0, -2.0 * kPi * kSpacingRatio * static_cast<double>(k) * s);
  }
  return a;
}

struct LinkAngles {
  double phi_t;
  double phi_r;
};

// Departure angle by four-quadrant arctangent; arrival angle pi - phi_t.
inline LinkAngles angles(const Point& tx, const Point& rx) {
  if (!(distance(tx, rx) > 0.0)) throw DomainError("angles: coincident points");
  const double phi_t = std::atan2(rx.y - tx.y, rx.x - tx.x);
  return {phi_t, kPi - phi_t};
}

// Draw order is fixed (h_AB, h_AW, H_AI, h_IB, h_IW) so a seed pins the
// realization.
inline ChannelSet sample_channels(const Geometry& g, const FadingParams& f,
                                  std::uint64_t seed) {
  g.validate();
  f.validate();
  CounterRng rng(seed);
  const Index n = g.n_tx;
  const Index m = g.n_irs;
  auto rician = [](double k, const auto& los, const auto& nlos) {
    using T = std::decay_t<decltype(nlos)>;
    return T(std::sqrt(k / (1.0 + k)) * los + std::sqrt(1.0 / (1.0 + k)) * nlos);
  };

  ChannelSet ch;
  ch.h_ab = path_loss(distance(g.alice, g.bob), f.alpha.ab, f.zeta0_db) *
            rng.complex_normal_vector(n);
  ch.h_aw = path_loss(distance(g.alice, g.willie), f.alpha.aw, f.zeta0_db) *
            rng.complex_normal_vector(n);
  if (m == 0) {
    ch.h_ai.resize(0, n);
    ch.h_ib.resize(0);
    ch.h_iw.resize(0);
    return ch;
  }
  {
    const LinkAngles ang = angles(g.alice, g.irs);
    const ComplexMatrix los =
        steering_vector(m, ang.phi_r) * steering_vector(n, ang.phi_t).adjoint();
    const ComplexMatrix nlos = rng.complex_normal_matrix(m, n);
    ch.h_ai = path_loss(distance(g.alice, g.irs), f.alpha.ai, f.zeta0_db) *
              rician(f.k_ai(), los, nlos);
  }
  {
    const ComplexVector los = steering_vector(m, angles(g.irs, g.bob).phi_t);
    const ComplexVector nlos = rng.complex_normal_vector(m);
    ch.h_ib = path_loss(distance(g.irs, g.bob), f.alpha.ib, f.zeta0_db) *
              rician(f.k_ib(), los, nlos);
  }
  {
    const ComplexVector los = steering_vector(m, angles(g.irs, g.willie).phi_t);
    const ComplexVector nlos = rng.complex_normal_vector(m);
    ch.h_iw = path_loss(distance(g.irs, g.willie), f.alpha.iw, f.zeta0_db) *
              rician(f.k_iw(), los, nlos);
  }
  return ch;
}

// Composite row channel h_i^H diag(q) H_ai + h_d^H (length N).
inline ComplexRowVector composite_channel(const ComplexVector& h_irs,
                                          const ComplexMatrix& h_ai,
                                          const ComplexVector& q,
                                          const ComplexVector& h_direct) {
  ComplexRowVector t = h_direct.adjoint();
  if (h_irs.size() > 0) {
    t += (h_irs.conjugate().cwiseProduct(q)).transpose() * h_ai;
  }
  return t;
}

}  // namespace irscovert

#endif  // IRSCOVERT_CHANNEL_HPP
