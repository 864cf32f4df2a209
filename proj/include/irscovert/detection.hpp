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

#ifndef IRSCOVERT_DETECTION_HPP
#define IRSCOVERT_DETECTION_HPP

// Willie's radiometer: under H0 the received power |y|^2 is exponential with
// mean lambda0 (noise only), under H1 with mean lambda1 >= lambda0.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "irscovert/errors.hpp"

namespace irscovert {

struct ReceptionStats {
  double lambda0;
  double lambda1;

  ReceptionStats(double l0, double l1) : lambda0(l0), lambda1(l1) {
    if (!(l0 > 0.0) || !std::isfinite(l0)) throw DomainError("ReceptionStats: lambda0 must be > 0");
    if (!(l1 > 0.0) || !std::isfinite(l1)) throw DomainError("ReceptionStats: lambda1 must be > 0");
    if (l1 < l0) throw DomainError("ReceptionStats: lambda1 must be >= lambda0");
  }

  // lambda1 = signal power at Willie + noise power.
  static ReceptionStats from_powers(double noise, double signal) {
    return ReceptionStats(noise, noise + std::max(signal, 0.0));
  }
};

// f(x) = ln x + 1/x - 1, the divergence of Exp(mean 1) from Exp(mean x).
inline double kl_function(double x) { return std::log(x) + 1.0 / x - 1.0; }

// D(p0 || p1) for exponential laws with means l0, l1.
inline double kl_01(double l0, double l1) {
  const double d = (l1 - l0) / l0;
  return std::log1p(d) + l0 / l1 - 1.0;
}

// D(p1 || p0).
inline double kl_10(double l0, double l1) {
  const double d = (l1 - l0) / l0;
  return -std::log1p(d) + d;
}

struct KlPair {
  double kl_01;
  double kl_10;
};

inline KlPair kl_divergences(const ReceptionStats& s) {
  return {std::max(0.0, kl_01(s.lambda0, s.lambda1)),
          std::max(0.0, kl_10(s.lambda0, s.lambda1))};
}

inline constexpr double kNearEqualRatio = 1e-12;

// Threshold where the two exponential densities cross.
inline double optimal_threshold(const ReceptionStats& s) {
  const double d = (s.lambda1 - s.lambda0) / s.lambda0;
  if (d <= kNearEqualRatio) return s.lambda0;
  return s.lambda0 * (1.0 + d) * std::log1p(d) / d;
}

struct DetectionProbabilities {
  double p_fa;
  double p_md;
};

// Error probabilities of the test |y|^2 > threshold at the optimal threshold.
inline DetectionProbabilities detection_probabilities(const ReceptionStats& s) {
  const double d = (s.lambda1 - s.lambda0) / s.lambda0;
  if (d <= kNearEqualRatio) return {std::exp(-1.0), 1.0 - std::exp(-1.0)};
  const double l = std::log1p(d);
  const double p_fa = std::exp(-(1.0 + d) * l / d);
  const double p_md = -std::expm1(-l / d);
  return {std::clamp(p_fa, 0.0, 1.0), std::clamp(p_md, 0.0, 1.0)};
}

inline double pinsker_bound(double kl) {
  if (!(kl >= 0.0)) throw DomainError("pinsker_bound: divergence must be >= 0");
  return std::min(1.0, std::sqrt(kl / 2.0));
}

struct CovertInterval {
  double a_bar;
  double b_bar;
};

// Roots a < 1 < b of f(x) = 2 eps^2 by bisection.
inline CovertInterval covert_interval(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("covert_interval: epsilon must be >= 0");
  }
  if (epsilon == 0.0) return {1.0, 1.0};
  const double target = 2.0 * epsilon * epsilon;
  auto g = [&](double x) { return kl_function(x) - target; };
  // g is decreasing on (0, 1) and increasing on (1, inf).
  auto bisect = [&](double lo, double hi, bool increasing) {
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double v = g(mid);
      if (v == 0.0) return mid;
      if ((v > 0.0) == increasing) hi = mid; else lo = mid;
    }
    return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
  };
  double lo = 1e-9;
  while (g(lo) <= 0.0) lo *= 0.5;
  double hi = 2.0;
  while (g(hi) <= 0.0) hi *= 2.0;
  return {bisect(lo, 1.0, false), bisect(1.0, hi, true)};
}

struct DetectionReport {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double threshold = 0.0;
  double p_fa = 0.0;
  double p_md = 0.0;
  double kl_01 = 0.0;
  double kl_10 = 0.0;
  double xi = 0.0;

  static DetectionReport from(const ReceptionStats& s) {
    DetectionReport r;
    r.lambda0 = s.lambda0;
    r.lambda1 = s.lambda1;
    r.threshold = optimal_threshold(s);
    const auto p = detection_probabilities(s);
    r.p_fa = p.p_fa;
    r.p_md = p.p_md;
    const auto kl = kl_divergences(s);
    r.kl_01 = kl.kl_01;
    r.kl_10 = kl.kl_10;
    r.xi = p.p_fa + p.p_md;
    return r;
  }

  static std::string csv_header() {
    return "lambda0,lambda1,threshold,p_fa,p_md,kl_01,kl_10,xi";
  }

  std::string csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << lambda0 << ',' << lambda1 << ',' << threshold << ',' << p_fa << ','
       << p_md << ',' << kl_01 << ',' << kl_10 << ',' << xi;
    return os.str();
  }
};

}  // namespace irscovert

#endif  // IRSCOVERT_DETECTION_HPP
