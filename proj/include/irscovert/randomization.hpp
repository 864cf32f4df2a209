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

#ifndef IRSCOVERT_RANDOMIZATION_HPP
#define IRSCOVERT_RANDOMIZATION_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "irscovert/numerics.hpp"
#include "irscovert/random.hpp"

namespace irscovert {

// No sample survived the feasibility projector. Carries the best raw sample
// (by objective) for diagnostics.
class RandomizationFailure : public std::runtime_error {
 public:
  RandomizationFailure(const std::string& what, ComplexVector best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const ComplexVector& best_infeasible() const { return best_; }

 private:
  ComplexVector best_;
};

struct RandomizationResult {
  ComplexVector vector;
  double objective = -std::numeric_limits<double>::infinity();
  std::size_t feasible_count = 0;
};

// Draws z ~ CN(0, W), maps each draw through `project` (returning nullopt for
// an infeasible draw) and keeps the projected candidate with the largest
// `objective`.
template <class Projector, class Objective>
RandomizationResult gaussian_randomization_full(const HermitianMatrix& w,
                                                std::size_t samples,
                                                Projector&& project,
                                                Objective&& objective,
                                                std::uint64_t seed) {
  if (samples < 1) throw ContractViolation("gaussian_randomization: samples must be >= 1");
  const EigenDecomposition e = hermitian_eig(w);
  const Index n = w.dim();
  const double scale = max_abs_eigenvalue(e);
  if (n > 0 && e.values(n - 1) < -kPsdClampTolerance * scale) {
    throw NotPsdError("gaussian_randomization: covariance is not PSD", e.values(n - 1));
  }
  const RealVector sq = e.values.cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix factor = e.vectors * sq.cast<Complex>().asDiagonal();

  CounterRng rng(seed);
  RandomizationResult best;
  ComplexVector best_raw;
  double best_raw_obj = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const ComplexVector z = factor * rng.complex_normal_vector(n);
    std::optional<ComplexVector> cand = project(z);
    if (!cand) {
      const double v = objective(z);
      if (best_raw.size() == 0 || v > best_raw_obj) {
        best_raw = z;
        best_raw_obj = v;
      }
      continue;
    }
    ++best.feasible_count;
    const double v = objective(*cand);
    if (best.vector.size() == 0 || v > best.objective) {
      best.vector = std::move(*cand);
      best.objective = v;
    }
  }
  if (best.feasible_count == 0) {
    throw RandomizationFailure("gaussian_randomization: no feasible candidate in " +
                                   std::to_string(samples) + " samples",
                               best_raw);
  }
  return best;
}

template <class Projector, class Objective>
ComplexVector gaussian_randomization(const HermitianMatrix& w, std::size_t samples,
                                     Projector&& project, Objective&& objective,
                                     std::uint64_t seed) {
  return gaussian_randomization_full(w, samples, std::forward<Projector>(project),
                                     std::forward<Objective>(objective), seed)
      .vector;
}

// Unit-modulus projection of an augmented reflect vector [q; t]: every entry
// is mapped to the unit circle and the common phase is fixed so that the last
// entry equals 1. Zero entries map to 1.
inline ComplexVector unit_modulus_projection(const ComplexVector& v) {
  const Index n = v.size();
  if (n == 0) return v;
  const Complex last = v(n - 1);
  const Complex ref = std::abs(last) > 0.0 ? std::conj(last) / std::abs(last) : Complex(1.0, 0.0);
  ComplexVector out(n);
  for (Index i = 0; i < n; ++i) {
    const Complex u = v(i) * ref;
    out(i) = std::abs(u) > 0.0 ? u / std::abs(u) : Complex(1.0, 0.0);
  }
  out(n - 1) = Complex(1.0, 0.0);
  return out;
}

}  // namespace irscovert

#endif  // IRSCOVERT_RANDOMIZATION_HPP
