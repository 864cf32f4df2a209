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

#ifndef IRSCOVERT_NUMERICS_HPP
#define IRSCOVERT_NUMERICS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "irscovert/errors.hpp"

namespace irscovert {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexRowVector = Eigen::RowVectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Relative tolerance for accepting a matrix as Hermitian before symmetrizing.
inline constexpr double kHermitianTolerance = 1e-8;

// Relative threshold below which a negative eigenvalue is treated as
// round-off and clamped instead of rejected.
inline constexpr double kPsdClampTolerance = 1e-10;

// Dense Hermitian matrix. The constructor checks A ~ A^H and stores the exact
// symmetrization (A + A^H)/2, so downstream code can rely on exact symmetry.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const ComplexMatrix& a,
                           double tolerance = kHermitianTolerance) {
    if (a.rows() != a.cols()) {
      throw DimensionError("HermitianMatrix: matrix is " +
                           std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + ", not square");
    }
    if (!a.allFinite()) {
      throw ContractViolation("HermitianMatrix: non-finite entry");
    }
    const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
    const double asym =
        a.size() == 0 ? 0.0 : (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (asym > tolerance * scale) {
      throw ContractViolation("HermitianMatrix: asymmetry " +
                              std::to_string(asym) + " exceeds tolerance");
    }
    m_ = 0.5 * (a + a.adjoint());
  }

  static HermitianMatrix from_real(const RealMatrix& a,
                                   double tolerance = kHermitianTolerance) {
    return HermitianMatrix(ComplexMatrix(a.cast<Complex>()), tolerance);
  }

  static HermitianMatrix zero(Index n) {
    return HermitianMatrix(ComplexMatrix(ComplexMatrix::Zero(n, n)));
  }
  static HermitianMatrix identity(Index n) {
    return HermitianMatrix(ComplexMatrix(ComplexMatrix::Identity(n, n)));
  }
  // v v^H
  static HermitianMatrix outer(const ComplexVector& v) {
    return HermitianMatrix(ComplexMatrix(v * v.adjoint()));
  }
  static HermitianMatrix diagonal(const RealVector& d) {
    return HermitianMatrix(ComplexMatrix(d.cast<Complex>().asDiagonal()));
  }

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  Complex operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }
  double norm() const { return m_.norm(); }

  // Real part of Tr(A B) for Hermitian B; Tr(AB) is real for Hermitian pairs.
  double inner(const HermitianMatrix& b) const {
    return (m_.cwiseProduct(b.m_.conjugate())).sum().real();
  }
  // x^H A x
  double quadratic_form(const ComplexVector& x) const {
    return (x.adjoint() * m_ * x)(0, 0).real();
  }

  HermitianMatrix operator+(const HermitianMatrix& b) const {
    return HermitianMatrix(ComplexMatrix(m_ + b.m_));
  }
  HermitianMatrix operator-(const HermitianMatrix& b) const {
    return HermitianMatrix(ComplexMatrix(m_ - b.m_));
  }
  HermitianMatrix operator*(double s) const {
    return HermitianMatrix(ComplexMatrix(m_ * s));
  }
  // K A K^H
  HermitianMatrix congruence(const ComplexMatrix& k) const {
    if (k.cols() != dim()) {
      throw DimensionError("HermitianMatrix::congruence: factor has " +
                           std::to_string(k.cols()) + " columns, expected " +
                           std::to_string(dim()));
    }
    return HermitianMatrix(ComplexMatrix(k * m_ * k.adjoint()));
  }

 private:
  ComplexMatrix m_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return a * s;
}

struct EigenDecomposition {
  RealVector values;     // descending
  ComplexMatrix vectors;  // columns match values
};

inline EigenDecomposition hermitian_eig(const HermitianMatrix& a) {
  EigenDecomposition out;
  const Index n = a.dim();
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw SolverFailure("hermitian_eig: eigensolver did not converge");
  }
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

inline EigenDecomposition hermitian_eig(const ComplexMatrix& a) {
  return hermitian_eig(HermitianMatrix(a));
}

inline double max_abs_eigenvalue(const EigenDecomposition& e) {
  if (e.values.size() == 0) return 0.0;
  return std::max(std::abs(e.values(0)),
                  std::abs(e.values(e.values.size() - 1)));
}

inline double lambda_max(const HermitianMatrix& a) {
  return a.dim() == 0 ? 0.0 : hermitian_eig(a).values(0);
}

inline double lambda_min(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  const auto e = hermitian_eig(a);
  return e.values(e.values.size() - 1);
}

// Rebuilds V diag(f(lambda)) V^H after checking the spectrum is PSD up to the
// clamp tolerance.
template <class F>
HermitianMatrix psd_spectral_map(const HermitianMatrix& w, F f) {
  const EigenDecomposition e = hermitian_eig(w);
  const Index n = w.dim();
  if (n == 0) return w;
  const double scale = max_abs_eigenvalue(e);
  const double lmin = e.values(n - 1);
  if (lmin < -kPsdClampTolerance * scale) {
    throw NotPsdError("matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(lmin) + ")",
                      lmin);
  }
  RealVector g(n);
  for (Index i = 0; i < n; ++i) g(i) = f(std::max(e.values(i), 0.0));
  return HermitianMatrix(
      ComplexMatrix(e.vectors * g.cast<Complex>().asDiagonal() *
                    e.vectors.adjoint()));
}

inline HermitianMatrix psd_sqrt(const HermitianMatrix& w) {
  return psd_spectral_map(w, [](double x) { return std::sqrt(x); });
}

// Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero).
inline HermitianMatrix psd_clamp(const HermitianMatrix& w) {
  const EigenDecomposition e = hermitian_eig(w);
  if (w.dim() == 0) return w;
  const RealVector g = e.values.cwiseMax(0.0);
  return HermitianMatrix(ComplexMatrix(
      e.vectors * g.cast<Complex>().asDiagonal() * e.vectors.adjoint()));
}

inline bool is_psd(const HermitianMatrix& w,
                   double rel_tol = kPsdClampTolerance) {
  if (w.dim() == 0) return true;
  const auto e = hermitian_eig(w);
  return e.values(e.values.size() - 1) >= -rel_tol * max_abs_eigenvalue(e);
}

// I - t t^H / ||t||^2; identity for t = 0.
inline HermitianMatrix null_projector(const ComplexVector& t) {
  const Index n = t.size();
  const double nrm2 = t.squaredNorm();
  if (nrm2 == 0.0) return HermitianMatrix::identity(n);
  return HermitianMatrix(ComplexMatrix(ComplexMatrix::Identity(n, n) -
                                       t * t.adjoint() / nrm2));
}

// sqrt(lambda_1) v_1 for the principal eigenpair.
inline ComplexVector rank_one_extract(const HermitianMatrix& w) {
  const Index n = w.dim();
  if (n == 0) return ComplexVector(0);
  const EigenDecomposition e = hermitian_eig(w);
  const double l1 = e.values(0);
  if (!(l1 > 0.0)) return ComplexVector::Zero(n);
  return std::sqrt(l1) * e.vectors.col(0);
}

// lambda_2 / lambda_1, zero for the zero matrix.
inline double rank_one_residual(const HermitianMatrix& w) {
  if (w.dim() < 2) return 0.0;
  const auto e = hermitian_eig(w);
  if (!(e.values(0) > 0.0)) return 0.0;
  return std::max(e.values(1), 0.0) / e.values(0);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace irscovert

#endif  // IRSCOVERT_NUMERICS_HPP
