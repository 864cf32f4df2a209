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

#ifndef IRSCOVERT_SDP_HPP
#define IRSCOVERT_SDP_HPP

// Small dense semidefinite programs over complex Hermitian block variables.
//
//   maximize   sum_b Tr(C_b X_b) + constant
//   subject to sum_b Tr(A_ib X_b)  {=, <=, >=}  bound_i
//              F_0 + sum (congruence and scalar terms)  >= 0   (LMIs)
//              X_b >= 0
//
// Complex blocks are handled through the real embedding [[Re, -Im], [Im, Re]]
// and solved by a homogeneous self-dual primal-dual interior-point method with
// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "irscovert/errors.hpp"
#include "irscovert/numerics.hpp"

namespace irscovert::sdp {

enum class Relation { Equal, LessEqual, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded, MaxIterations };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "=";
    case Relation::LessEqual: return "<=";
    case Relation::GreaterEqual: return ">=";
  }
  return "?";
}

struct BlockCoefficient {
  std::size_t block;
  HermitianMatrix coefficient;
};

struct TraceConstraint {
  std::vector<BlockCoefficient> terms;
  Relation relation = Relation::Equal;
  double bound = 0.0;
};

// scale * K X_block K^H
struct CongruenceTerm {
  std::size_t block;
  ComplexMatrix factor;
  double scale = 1.0;
};

// x * D for a 1x1 block x
struct ScalarTerm {
  std::size_t block;
  HermitianMatrix coefficient;
};

struct LmiConstraint {
  HermitianMatrix constant;
  std::vector<CongruenceTerm> congruence_terms;
  std::vector<ScalarTerm> scalar_terms;

  Index dim() const { return constant.dim(); }
};

class SdpProblem {
 public:
  std::size_t add_block(Index dim) {
    if (dim < 1) throw DimensionError("SdpProblem: block dimension must be >= 1");
    dims_.push_back(dim);
    return dims_.size() - 1;
  }

  void add_objective(std::size_t block, const HermitianMatrix& c) {
    check_block(block, c.dim(), "objective");
    objective_.push_back({block, c});
  }
  void set_objective_constant(double v) { objective_constant_ = v; }

  void add_constraint(TraceConstraint c) {
    if (!std::isfinite(c.bound)) {
      throw ContractViolation("SdpProblem: constraint bound must be finite");
    }
    for (const auto& t : c.terms) check_block(t.block, t.coefficient.dim(), "constraint");
    constraints_.push_back(std::move(c));
  }

  void add_constraint(std::size_t block, const HermitianMatrix& a,
                      Relation rel, double bound) {
    add_constraint(TraceConstraint{{{block, a}}, rel, bound});
  }

  void add_lmi(LmiConstraint lmi) {
    const Index m = lmi.dim();
    if (m < 1) throw DimensionError("SdpProblem: LMI dimension must be >= 1");
    for (const auto& t : lmi.congruence_terms) {
      if (t.block >= dims_.size()) throw DimensionError("SdpProblem: LMI references unknown block");
      if (t.factor.rows() != m || t.factor.cols() != dims_[t.block]) {
        throw DimensionError("SdpProblem: LMI congruence factor is " +
                             std::to_string(t.factor.rows()) + "x" +
                             std::to_string(t.factor.cols()) + ", expected " +
                             std::to_string(m) + "x" +
                             std::to_string(dims_[t.block]));
      }
      if (!std::isfinite(t.scale)) throw ContractViolation("SdpProblem: non-finite LMI scale");
    }
    for (const auto& t : lmi.scalar_terms) {
      if (t.block >= dims_.size()) throw DimensionError("SdpProblem: LMI references unknown block");
      if (dims_[t.block] != 1) throw DimensionError("SdpProblem: scalar LMI term needs a 1x1 block");
      if (t.coefficient.dim() != m) throw DimensionError("SdpProblem: scalar LMI term dimension mismatch");
    }
    lmis_.push_back(std::move(lmi));
  }

  std::size_t num_blocks() const { return dims_.size(); }
  const std::vector<Index>& block_dims() const { return dims_; }
  const std::vector<BlockCoefficient>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }
  const std::vector<TraceConstraint>& constraints() const { return constraints_; }
  const std::vector<LmiConstraint>& lmis() const { return lmis_; }

  double objective_value(const std::vector<HermitianMatrix>& x) const {
    double v = objective_constant_;
    for (const auto& t : objective_) v += t.coefficient.inner(x.at(t.block));
    return v;
  }

  HermitianMatrix lmi_value(std::size_t i, const std::vector<HermitianMatrix>& x) const {
    const auto& l = lmis_.at(i);
    ComplexMatrix m = l.constant.matrix();
    for (const auto& t : l.congruence_terms) {
      m += t.scale * t.factor * x.at(t.block).matrix() * t.factor.adjoint();
    }
    for (const auto& t : l.scalar_terms) {
      m += x.at(t.block)(0, 0).real() * t.coefficient.matrix();
    }
    return HermitianMatrix(m);
  }

  // Largest violation over trace constraints, LMIs (negative eigenvalues) and
  // block PSD-ness.
  double max_violation(const std::vector<HermitianMatrix>& x) const {
    double v = 0.0;
    for (const auto& c : constraints_) {
      double lhs = 0.0;
      for (const auto& t : c.terms) lhs += t.coefficient.inner(x.at(t.block));
      double d = 0.0;
      switch (c.relation) {
        case Relation::Equal: d = std::abs(lhs - c.bound); break;
        case Relation::LessEqual: d = std::max(0.0, lhs - c.bound); break;
        case Relation::GreaterEqual: d = std::max(0.0, c.bound - lhs); break;
      }
      v = std::max(v, d);
    }
    for (std::size_t i = 0; i < lmis_.size(); ++i) {
      v = std::max(v, -lambda_min(lmi_value(i, x)));
    }
    for (const auto& b : x) v = std::max(v, -lambda_min(b));
    return v;
  }

 private:
  void check_block(std::size_t block, Index dim, const char* what) const {
    if (block >= dims_.size()) {
      throw DimensionError(std::string("SdpProblem: ") + what + " references unknown block");
    }
    if (dims_[block] != dim) {
      throw DimensionError(std::string("SdpProblem: ") + what + " coefficient is " +
                           std::to_string(dim) + "x" + std::to_string(dim) +
                           " for a block of dimension " +
                           std::to_string(dims_[block]));
    }
  }

  std::vector<Index> dims_;
  std::vector<BlockCoefficient> objective_;
  double objective_constant_ = 0.0;
  std::vector<TraceConstraint> constraints_;
  std::vector<LmiConstraint> lmis_;
};

struct SdpSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  int stall_iterations = 10;
  // Eliminate Tr(A X) = 0 constraints with semidefinite A by restricting X
  // to the null space of A.
  bool facial_reduction = true;
};

struct SdpSolution {
  Status status = Status::MaxIterations;
  std::vector<HermitianMatrix> primal_blocks;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::vector<double> gap_history;
};

namespace detail {

using ConeVec = std::vector<RealMatrix>;

// min c^T x  s.t.  G x + s = h,  A x = b,  s in a product of PSD cones.
struct ConeProgram {
  Index n = 0;
  std::vector<Index> dims;
  std::vector<std::vector<std::pair<Index, RealMatrix>>> g;
  ConeVec h;
  RealVector c;
  RealMatrix a;
  RealVector b;

  Index degree() const {
    Index d = 0;
    for (Index k : dims) d += k;
    return d;
  }

  ConeVec apply_g(const RealVector& x) const {
    ConeVec out(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
      out[i] = RealMatrix::Zero(dims[i], dims[i]);
      for (const auto& [k, gk] : g[i]) out[i] += x(k) * gk;
    }
    return out;
  }

  RealVector apply_gt(const ConeVec& z) const {
    RealVector out = RealVector::Zero(n);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      for (const auto& [k, gk] : g[i]) out(k) += gk.cwiseProduct(z[i]).sum();
    }
    return out;
  }
};

inline double inner(const ConeVec& u, const ConeVec& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i].cwiseProduct(v[i]).sum();
  return s;
}

inline double norm(const ConeVec& u) { return std::sqrt(inner(u, u)); }

inline ConeVec axpy(const ConeVec& x, double a, const ConeVec& y) {
  ConeVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

inline ConeVec scaled(const ConeVec& x, double a) {
  ConeVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

inline ConeVec identity_like(const std::vector<Index>& dims) {
  ConeVec e(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) e[i] = RealMatrix::Identity(dims[i], dims[i]);
  return e;
}

inline double min_eig_sym(const RealMatrix& m) {
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// s + (1 + alpha) e if s is not interior, where alpha = -lambda_min(s).
inline ConeVec push_interior(const ConeVec& s) {
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& b : s) lmin = std::min(lmin, min_eig_sym(b));
  const double alpha = -lmin;
  if (alpha < 0.0) return s;
  ConeVec out = s;
  for (auto& b : out) b += (1.0 + alpha) * RealMatrix::Identity(b.rows(), b.cols());
  return out;
}

// Nesterov-Todd scaling for one PSD cone: R^T z R = R^{-1} s R^{-T} = diag(lambda).
struct NtBlock {
  RealMatrix r;
  RealMatrix rinv;
  RealVector lambda;
};

// Scaling for the pair (s, z); with `prev` given, s and z are in prev's scaled
// coordinates and the result is composed with prev.
inline bool nt_block(const RealMatrix& s, const RealMatrix& z, NtBlock& out,
                     const NtBlock* prev = nullptr) {
  Eigen::LLT<RealMatrix> ls(s), lz(z);
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const RealMatrix Ls = ls.matrixL();
  const RealMatrix Lz = lz.matrixL();
  Eigen::JacobiSVD<RealMatrix> svd(Lz.transpose() * Ls,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector lam = svd.singularValues();
  if (!(lam.minCoeff() > 0.0) || !lam.allFinite()) return false;
  const RealVector isq = lam.cwiseSqrt().cwiseInverse();
  const RealVector sq = lam.cwiseSqrt();
  const RealMatrix Lsinv = Ls.triangularView<Eigen::Lower>().solve(
      RealMatrix::Identity(s.rows(), s.cols()));
  RealMatrix r = Ls * svd.matrixV() * isq.asDiagonal();
  RealMatrix rinv = sq.asDiagonal() * svd.matrixV().transpose() * Lsinv;
  if (prev != nullptr) {
    r = prev->r * r;
    rinv = rinv * prev->rinv;
  }
  out.r = std::move(r);
  out.rinv = std::move(rinv);
  out.lambda = lam;
  return out.r.allFinite() && out.rinv.allFinite();
}

struct KktSystem {
  const ConeProgram* cp = nullptr;
  std::vector<RealMatrix> r, rinv;          // per cone
  std::vector<std::vector<RealMatrix>> sg;  // R^{-1} G_k R^{-T}
  Eigen::PartialPivLU<RealMatrix> lu;
  RealMatrix k0;                            // unregularized reduced matrix
  bool ok = false;

  // Reduced matrix H_ij = <R^{-1} G_i R^{-T}, R^{-1} G_j R^{-T}>.
  void factor(const ConeProgram& prog, std::vector<RealMatrix> rr,
              std::vector<RealMatrix> ri) {
    cp = &prog;
    r = std::move(rr);
    rinv = std::move(ri);
    const Index n = prog.n;
    const Index p = prog.a.rows();
    RealMatrix h = RealMatrix::Zero(n, n);
    sg.assign(prog.dims.size(), {});
    for (std::size_t i = 0; i < prog.dims.size(); ++i) {
      const auto& gi = prog.g[i];
      sg[i].resize(gi.size());
      for (std::size_t j = 0; j < gi.size(); ++j) sg[i][j] = rinv[i] * gi[j].second * rinv[i].transpose();
      for (std::size_t j = 0; j < gi.size(); ++j) {
        for (std::size_t l = j; l < gi.size(); ++l) {
          const double v = sg[i][j].cwiseProduct(sg[i][l]).sum();
          h(gi[j].first, gi[l].first) += v;
          if (l != j) h(gi[l].first, gi[j].first) += v;
        }
      }
    }
    k0 = RealMatrix::Zero(n + p, n + p);
    k0.topLeftCorner(n, n) = h;
    if (p > 0) {
      k0.topRightCorner(n, p) = prog.a.transpose();
      k0.bottomLeftCorner(p, n) = prog.a;
    }
    double scale = 1.0;
    for (Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(h(i, i)));
    const double reg = 1e-13 * scale;
    RealMatrix kr = k0;
    for (Index i = 0; i < n; ++i) kr(i, i) += reg;
    for (Index i = n; i < n + p; ++i) kr(i, i) -= reg;
    lu.compute(kr);
    ok = k0.allFinite();
  }

  // G^T z for z given in scaled form z~ (z = R^{-T} z~ R^{-1}).
  RealVector gt_scaled(const ConeVec& zs) const {
    RealVector out = RealVector::Zero(cp->n);
    for (std::size_t i = 0; i < cp->dims.size(); ++i) {
      const auto& gi = cp->g[i];
      for (std::size_t j = 0; j < gi.size(); ++j) out(gi[j].first) += sg[i][j].cwiseProduct(zs[i]).sum();
    }
    return out;
  }

  void solve_reduced(const RealVector& r1, const RealVector& r2, const ConeVec& r3,
                     RealVector& x, RealVector& y, ConeVec& zs) const {
    const Index n = cp->n;
    const Index p = cp->a.rows();
    ConeVec sr3(r3.size());
    for (std::size_t i = 0; i < r3.size(); ++i) sr3[i] = rinv[i] * r3[i] * rinv[i].transpose();
    RealVector rhs(n + p);
    rhs.head(n) = r1 + gt_scaled(sr3);
    if (p > 0) rhs.tail(p) = r2;
    RealVector sol = lu.solve(rhs);
    for (int it = 0; it < 2; ++it) {
      const RealVector res = rhs - k0 * sol;
      if (!res.allFinite()) break;
      sol += lu.solve(res);
    }
    x = sol.head(n);
    y = sol.tail(p);
    const ConeVec gx = cp->apply_g(x);
    zs.resize(r3.size());
    for (std::size_t i = 0; i < r3.size(); ++i) {
      zs[i] = rinv[i] * gx[i] * rinv[i].transpose() - sr3[i];
    }
  }

  // Solves [0 A^T G^T; A 0 0; G 0 -W^T W] [x; y; z] = [r1; r2; r3] and
  // returns the scaled z~ = W z = R^T z R. The reduced solve is refined
  // against the full system.
  void solve(const RealVector& r1, const RealVector& r2, const ConeVec& r3,
             RealVector& x, RealVector& y, ConeVec& zs) const {
    const Index p = cp->a.rows();
    solve_reduced(r1, r2, r3, x, y, zs);
    for (int it = 0; it < 2; ++it) {
      RealVector e1 = r1 - gt_scaled(zs);
      if (p > 0) e1 -= cp->a.transpose() * y;
      const RealVector e2 = p > 0 ? RealVector(r2 - cp->a * x) : RealVector(0);
      const ConeVec gx = cp->apply_g(x);
      ConeVec e3(r3.size());
      for (std::size_t i = 0; i < r3.size(); ++i) {
        e3[i] = r3[i] - gx[i] + r[i] * zs[i] * r[i].transpose();
      }
      if (!e1.allFinite()) return;
      RealVector dx, dy;
      ConeVec dz;
      solve_reduced(e1, e2, e3, dx, dy, dz);
      x += dx;
      if (p > 0) y += dy;
      for (std::size_t i = 0; i < zs.size(); ++i) zs[i] += dz[i];
    }
  }
};

struct ConeResult {
  Status status = Status::MaxIterations;
  RealVector x;
  double pcost = 0.0;
  double dcost = 0.0;
  double gap = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  int iterations = 0;
  std::vector<double> gap_history;
};

// lambda o u = (Lambda u + u Lambda) / 2 and its inverse lambda \ d.
inline RealMatrix jordan_lambda_inv(const RealVector& l, const RealMatrix& d) {
  RealMatrix out(d.rows(), d.cols());
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i) out(i, j) = 2.0 * d(i, j) / (l(i) + l(j));
  return out;
}

inline RealMatrix jordan(const RealMatrix& u, const RealMatrix& v) {
  return 0.5 * (u * v + v * u);
}

// Largest alpha with diag(lambda) + alpha * d >= 0 (infinity if unbounded).
inline double max_step(const RealVector& lambda, const RealMatrix& d) {
  const RealVector isq = lambda.cwiseSqrt().cwiseInverse();
  const RealMatrix m = isq.asDiagonal() * d * isq.asDiagonal();
  const double lmin = min_eig_sym(0.5 * (m + m.transpose()));
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

inline ConeResult solve_cone_program(const ConeProgram& cp, const SdpSettings& st) {
  ConeResult res;
  const Index n = cp.n;
  const Index p = cp.a.rows();
  const std::size_t nc = cp.dims.size();
  const double deg = static_cast<double>(cp.degree());

  const double bnorm = std::max(1.0, p > 0 ? cp.b.norm() : 0.0);
  const double hnorm = std::max(1.0, norm(cp.h));
  const double cnorm = std::max(1.0, cp.c.norm());

  // Initial point from two least-squares style solves with W = I.
  KktSystem kkt;
  {
    std::vector<RealMatrix> eye(nc);
    for (std::size_t i = 0; i < nc; ++i) eye[i] = RealMatrix::Identity(cp.dims[i], cp.dims[i]);
    kkt.factor(cp, eye, eye);
  }
  RealVector x, y, xd, yd;
  ConeVec z0, zd;
  kkt.solve(RealVector::Zero(n), p > 0 ? RealVector(cp.b) : RealVector(0), cp.h, x, y, z0);
  const ConeVec s_init = push_interior(scaled(z0, -1.0));
  kkt.solve(-cp.c, RealVector::Zero(p), scaled(cp.h, 0.0), xd, yd, zd);
  y = yd;
  const ConeVec z_init = push_interior(zd);
  double tau = 1.0, kappa = 1.0;

  // The conic iterate is held as its scaling: s = R L R^T, z = R^{-T} L R^{-1}.
  std::vector<NtBlock> nt(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    if (!nt_block(s_init[i], z_init[i], nt[i])) {
      throw SolverFailure("sdp: could not build an interior starting point");
    }
  }
  auto unscale = [&](ConeVec& s, ConeVec& z) {
    s.resize(nc);
    z.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      const RealMatrix& r = nt[i].r;
      const RealMatrix& ri = nt[i].rinv;
      s[i] = r * nt[i].lambda.asDiagonal() * r.transpose();
      z[i] = ri.transpose() * nt[i].lambda.asDiagonal() * ri;
      s[i] = 0.5 * (s[i] + s[i].transpose());
      z[i] = 0.5 * (z[i] + z[i].transpose());
    }
  };

  struct Iterate {
    RealVector x, y;
    ConeVec s, z;
    double tau, kappa;
  };
  ConeVec s, z;
  unscale(s, z);
  Iterate best{x, y, s, z, tau, kappa};
  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;

  auto finish = [&](const Iterate& it, Status status, int iters) {
    res.status = status;
    res.iterations = iters;
    if (status == Status::Infeasible || status == Status::Unbounded) {
      res.x = it.x;
      return res;
    }
    res.x = it.x / it.tau;
    res.pcost = cp.c.dot(res.x);
    res.dcost = -((p > 0 ? cp.b.dot(it.y) : 0.0) + inner(cp.h, it.z)) / it.tau;
    return res;
  };

  for (int iter = 0; iter <= st.max_iter; ++iter) {
    unscale(s, z);
    // Residuals of the homogeneous embedding.
    const RealVector gtz = cp.apply_gt(z);
    const RealVector aty = p > 0 ? RealVector(cp.a.transpose() * y) : RealVector::Zero(n);
    const RealVector rx = aty + gtz + tau * cp.c;
    const RealVector ry = p > 0 ? RealVector(-cp.a * x + tau * cp.b) : RealVector(0);
    const ConeVec gx = cp.apply_g(x);
    ConeVec rz(nc);
    for (std::size_t i = 0; i < nc; ++i) rz[i] = s[i] + gx[i] - tau * cp.h[i];
    const double cx = cp.c.dot(x);
    const double by = p > 0 ? cp.b.dot(y) : 0.0;
    const double hz = inner(cp.h, z);
    const double rtau = kappa + cx + by + hz;
    double sz = 0.0;
    for (std::size_t i = 0; i < nc; ++i) sz += nt[i].lambda.squaredNorm();
    const double mu = (sz + tau * kappa) / (deg + 1.0);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap = sz / (tau * tau);
    double pres = 0.0;
    if (p > 0) pres = ry.norm() / tau / bnorm;
    pres = std::max(pres, norm(rz) / tau / hnorm);
    const double dres = rx.norm() / tau / cnorm;
    const double gap_scale = std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    const double merit = std::max({pres, dres, gap / gap_scale});
    if (std::isfinite(merit)) res.gap_history.push_back(gap);

    res.pres = pres;
    res.dres = dres;

    if (std::isfinite(merit) && merit < best_merit) {
      best_merit = merit;
      best = Iterate{x, y, s, z, tau, kappa};
      stall = 0;
    } else {
      ++stall;
    }

    if (pres <= st.feas_tol && dres <= st.feas_tol && gap <= st.gap_tol * gap_scale) {
      ConeResult out = finish(Iterate{x, y, s, z, tau, kappa}, Status::Optimal, iter);
      out.gap = gap;
      return out;
    }
    // Certificates of infeasibility.
    if (by + hz < 0.0) {
      const double pinf = (aty + gtz).norm() / cnorm / (-(by + hz));
      if (pinf <= st.feas_tol) {
        return finish(Iterate{x, y, s, z, tau, kappa}, Status::Infeasible, iter);
      }
    }
    if (cx < 0.0) {
      double dinf = 0.0;
      if (p > 0) dinf = (cp.a * x).norm() / bnorm;
      ConeVec gxs(nc);
      for (std::size_t i = 0; i < nc; ++i) gxs[i] = gx[i] + s[i];
      dinf = std::max(dinf, norm(gxs) / hnorm) / (-cx);
      if (dinf <= st.feas_tol) {
        return finish(Iterate{x, y, s, z, tau, kappa}, Status::Unbounded, iter);
      }
    }
    if (iter == st.max_iter || stall >= st.stall_iterations || !std::isfinite(merit)) break;

    {
      std::vector<RealMatrix> rr(nc), ri(nc);
      for (std::size_t i = 0; i < nc; ++i) {
        rr[i] = nt[i].r;
        ri[i] = nt[i].rinv;
      }
      kkt.factor(cp, std::move(rr), std::move(ri));
    }
    if (!kkt.ok) break;

    RealVector x1, y1;
    ConeVec z1s;
    kkt.solve(-cp.c, p > 0 ? RealVector(cp.b) : RealVector(0), cp.h, x1, y1, z1s);
    // h^T z1 evaluated in scaled coordinates: <R^{-1} h R^{-T}, z1~>.
    ConeVec hs(nc);
    for (std::size_t i = 0; i < nc; ++i) hs[i] = nt[i].rinv * cp.h[i] * nt[i].rinv.transpose();
    const double den_base = cp.c.dot(x1) + (p > 0 ? cp.b.dot(y1) : 0.0) + inner(hs, z1s);

    struct Direction {
      RealVector dx, dy;
      ConeVec ds_scaled, dz_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };

    // eta scales the residuals, ds_target is d_s in scaled coordinates.
    auto direction = [&](double eta, const ConeVec& ds_target, double dk) {
      Direction d;
      ConeVec lds(nc), r3(nc);
      for (std::size_t i = 0; i < nc; ++i) {
        lds[i] = jordan_lambda_inv(nt[i].lambda, ds_target[i]);
        // W^T(u) = R u R^T
        r3[i] = -eta * rz[i] - nt[i].r * lds[i] * nt[i].r.transpose();
      }
      RealVector x2, y2;
      ConeVec z2s;
      kkt.solve(-eta * rx, eta * ry, r3, x2, y2, z2s);
      const double num = -eta * rtau - dk / tau - cp.c.dot(x2) -
                         (p > 0 ? cp.b.dot(y2) : 0.0) - inner(hs, z2s);
      const double den = den_base - kappa / tau;
      d.dtau = num / den;
      d.dx = x2 + d.dtau * x1;
      d.dy = y2 + d.dtau * y1;
      d.dz_scaled = axpy(z2s, d.dtau, z1s);
      d.dkappa = (dk - kappa * d.dtau) / tau;
      d.ds_scaled.resize(nc);
      for (std::size_t i = 0; i < nc; ++i) d.ds_scaled[i] = lds[i] - d.dz_scaled[i];
      return d;
    };

    auto step_to_boundary = [&](const Direction& d) {
      double a = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nc; ++i) {
        a = std::min(a, max_step(nt[i].lambda, d.ds_scaled[i]));
        a = std::min(a, max_step(nt[i].lambda, d.dz_scaled[i]));
      }
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    // Predictor.
    ConeVec ds_aff(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      const RealVector& l = nt[i].lambda;
      ds_aff[i] = -RealMatrix(l.cwiseProduct(l).asDiagonal());
    }
    const Direction aff = direction(1.0, ds_aff, -tau * kappa);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    // Corrector.
    ConeVec ds_cc(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      ds_cc[i] = ds_aff[i] - jordan(aff.ds_scaled[i], aff.dz_scaled[i]) +
                 sigma * mu * RealMatrix::Identity(cp.dims[i], cp.dims[i]);
    }
    const double dk_cc = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction cc = direction(1.0 - sigma, ds_cc, dk_cc);
    const double alpha = std::min(1.0, st.step_fraction * step_to_boundary(cc));
    if (!(alpha > 0.0) || !std::isfinite(alpha)) break;

    // Update the scaling from the scaled iterate lambda + alpha * d.
    std::vector<NtBlock> next(nc);
    bool ok = true;
    for (std::size_t i = 0; i < nc && ok; ++i) {
      const RealMatrix l = nt[i].lambda.asDiagonal();
      RealMatrix sn = l + alpha * cc.ds_scaled[i];
      RealMatrix zn = l + alpha * cc.dz_scaled[i];
      sn = 0.5 * (sn + sn.transpose());
      zn = 0.5 * (zn + zn.transpose());
      ok = nt_block(sn, zn, next[i], &nt[i]);
    }
    if (!ok) break;
    nt = std::move(next);
    x += alpha * cc.dx;
    if (p > 0) y += alpha * cc.dy;
    tau += alpha * cc.dtau;
    kappa += alpha * cc.dkappa;
    res.iterations = iter + 1;
  }

  // Out of iterations or numerically stuck: report the best iterate.
  ConeResult out = finish(best, Status::MaxIterations, res.iterations);
  out.gap_history = res.gap_history;
  out.gap = inner(best.s, best.z) / (best.tau * best.tau);
  out.pres = res.pres;
  out.dres = res.dres;
  return out;
}

// Hermitian basis of dimension r: E_ii, E_ij + E_ji, i(E_ij - E_ji).
struct BasisElement {
  Index i, j;
  int kind;  // 0 diagonal, 1 symmetric, 2 antisymmetric
};

inline std::vector<BasisElement> hermitian_basis(Index r) {
  std::vector<BasisElement> out;
  out.reserve(static_cast<std::size_t>(r * r));
  for (Index i = 0; i < r; ++i) {
    out.push_back({i, i, 0});
    for (Index j = i + 1; j < r; ++j) {
      out.push_back({i, j, 1});
      out.push_back({i, j, 2});
    }
  }
  return out;
}

// Tr(C B) for a basis element B.
inline double basis_trace(const ComplexMatrix& c, const BasisElement& e) {
  switch (e.kind) {
    case 0: return c(e.i, e.i).real();
    case 1: return 2.0 * c(e.i, e.j).real();
    default: return 2.0 * c(e.i, e.j).imag();
  }
}

// K B K^H for a basis element B.
inline ComplexMatrix basis_congruence(const ComplexMatrix& k, const BasisElement& e) {
  const auto ki = k.col(e.i);
  const auto kj = k.col(e.j);
  switch (e.kind) {
    case 0: return ki * ki.adjoint();
    case 1: return ki * kj.adjoint() + kj * ki.adjoint();
    default: return Complex(0.0, 1.0) * (ki * kj.adjoint() - kj * ki.adjoint());
  }
}

inline ComplexMatrix basis_matrix(Index r, const BasisElement& e) {
  return basis_congruence(ComplexMatrix::Identity(r, r), e);
}

// Real embedding of a Hermitian matrix; 1x1 matrices stay 1x1.
inline RealMatrix embed(const ComplexMatrix& m) {
  const Index r = m.rows();
  if (r == 1) return RealMatrix::Constant(1, 1, m(0, 0).real());
  RealMatrix out(2 * r, 2 * r);
  out.topLeftCorner(r, r) = m.real();
  out.topRightCorner(r, r) = -m.imag();
  out.bottomLeftCorner(r, r) = m.imag();
  out.bottomRightCorner(r, r) = m.real();
  return 0.5 * (out + out.transpose());
}

struct CompiledProblem {
  ConeProgram cone;
  std::vector<ComplexMatrix> basis;  // per block: original dim x reduced dim
  std::vector<Index> offset;         // first variable of each block, -1 if removed
  bool trivially_infeasible = false;
};

inline CompiledProblem compile(const SdpProblem& prob, const SdpSettings& st) {
  CompiledProblem out;
  const std::size_t nb = prob.num_blocks();
  out.basis.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const Index d = prob.block_dims()[b];
    out.basis[b] = ComplexMatrix::Identity(d, d);
  }

  const auto& cons = prob.constraints();
  std::vector<bool> eliminated(cons.size(), false);
  if (st.facial_reduction) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        const auto& c = cons[ci];
        if (eliminated[ci] || c.relation != Relation::Equal || c.bound != 0.0) continue;
        if (c.terms.empty()) continue;
        const std::size_t b = c.terms.front().block;
        bool single = true;
        for (const auto& t : c.terms) single = single && t.block == b;
        if (!single) continue;
        const ComplexMatrix& u = out.basis[b];
        if (u.cols() == 0) {
          eliminated[ci] = true;
          continue;
        }
        ComplexMatrix a = ComplexMatrix::Zero(u.rows(), u.rows());
        for (const auto& t : c.terms) a += t.coefficient.matrix();
        const HermitianMatrix ar(ComplexMatrix(u.adjoint() * a * u), 1e-6);
        const EigenDecomposition e = hermitian_eig(ar);
        const double scale = max_abs_eigenvalue(e);
        if (scale == 0.0) {
          eliminated[ci] = true;
          continue;
        }
        const Index r = e.values.size();
        const double tol = 1e-9 * scale;
        const bool psd = e.values(r - 1) >= -tol;
        const bool nsd = e.values(0) <= tol;
        if (!psd && !nsd) continue;
        std::vector<Index> keep;
        for (Index i = 0; i < r; ++i) {
          if (std::abs(e.values(i)) <= tol) keep.push_back(i);
        }
        ComplexMatrix v(r, static_cast<Index>(keep.size()));
        for (std::size_t k = 0; k < keep.size(); ++k) v.col(static_cast<Index>(k)) = e.vectors.col(keep[k]);
        out.basis[b] = u * v;
        eliminated[ci] = true;
        changed = true;
      }
    }
  }

  // Variable layout.
  out.offset.assign(nb, -1);
  std::vector<std::vector<BasisElement>> bases(nb);
  Index n = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    const Index r = out.basis[b].cols();
    if (r == 0) continue;
    out.offset[b] = n;
    bases[b] = hermitian_basis(r);
    n += r * r;
  }
  ConeProgram& cp = out.cone;
  cp.n = n;
  cp.c = RealVector::Zero(n);

  auto add_cone = [&](const RealMatrix& h,
                      std::vector<std::pair<Index, RealMatrix>> g) {
    cp.dims.push_back(h.rows());
    cp.h.push_back(h);
    cp.g.push_back(std::move(g));
  };

  // Block PSD cones: s = embed(X) = -G x.
  for (std::size_t b = 0; b < nb; ++b) {
    if (out.offset[b] < 0) continue;
    const Index r = out.basis[b].cols();
    std::vector<std::pair<Index, RealMatrix>> g;
    for (std::size_t k = 0; k < bases[b].size(); ++k) {
      g.emplace_back(out.offset[b] + static_cast<Index>(k), -embed(basis_matrix(r, bases[b][k])));
    }
    const Index m = r == 1 ? 1 : 2 * r;
    add_cone(RealMatrix::Zero(m, m), std::move(g));
  }

  // Coefficient of a trace term mapped to the reduced coordinates.
  auto trace_row = [&](const std::vector<BlockCoefficient>& terms, RealVector& row) {
    row = RealVector::Zero(n);
    for (const auto& t : terms) {
      if (out.offset[t.block] < 0) continue;
      const ComplexMatrix& u = out.basis[t.block];
      const ComplexMatrix cr = u.adjoint() * t.coefficient.matrix() * u;
      for (std::size_t k = 0; k < bases[t.block].size(); ++k) {
        row(out.offset[t.block] + static_cast<Index>(k)) += basis_trace(cr, bases[t.block][k]);
      }
    }
  };

  {
    RealVector row;
    trace_row(prob.objective(), row);
    cp.c = -row;
  }

  std::vector<RealVector> eq_rows;
  std::vector<double> eq_b;
  for (std::size_t ci = 0; ci < cons.size(); ++ci) {
    if (eliminated[ci]) continue;
    const auto& c = cons[ci];
    RealVector row;
    trace_row(c.terms, row);
    const double scale = row.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) {
      const double tol = st.feas_tol * std::max(1.0, std::abs(c.bound));
      bool ok = true;
      switch (c.relation) {
        case Relation::Equal: ok = std::abs(c.bound) <= tol; break;
        case Relation::LessEqual: ok = 0.0 <= c.bound + tol; break;
        case Relation::GreaterEqual: ok = 0.0 >= c.bound - tol; break;
      }
      if (!ok) out.trivially_infeasible = true;
      continue;
    }
    row /= scale;
    const double bound = c.bound / scale;
    if (c.relation == Relation::Equal) {
      eq_rows.push_back(row);
      eq_b.push_back(bound);
      continue;
    }
    const double sgn = c.relation == Relation::LessEqual ? 1.0 : -1.0;
    std::vector<std::pair<Index, RealMatrix>> g;
    for (Index k = 0; k < n; ++k) {
      if (row(k) != 0.0) g.emplace_back(k, RealMatrix::Constant(1, 1, sgn * row(k)));
    }
    add_cone(RealMatrix::Constant(1, 1, sgn * bound), std::move(g));
  }
  cp.a = RealMatrix::Zero(static_cast<Index>(eq_rows.size()), n);
  cp.b = RealVector::Zero(static_cast<Index>(eq_rows.size()));
  for (std::size_t i = 0; i < eq_rows.size(); ++i) {
    cp.a.row(static_cast<Index>(i)) = eq_rows[i].transpose();
    cp.b(static_cast<Index>(i)) = eq_b[i];
  }

  for (const auto& l : prob.lmis()) {
    const Index m = l.dim();
    std::vector<ComplexMatrix> coeff(static_cast<std::size_t>(n));
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    auto accumulate = [&](Index k, const ComplexMatrix& v) {
      const auto kk = static_cast<std::size_t>(k);
      if (!used[kk]) {
        coeff[kk] = v;
        used[kk] = true;
      } else {
        coeff[kk] += v;
      }
    };
    for (const auto& t : l.congruence_terms) {
      if (out.offset[t.block] < 0) continue;
      const ComplexMatrix kr = t.factor * out.basis[t.block];
      for (std::size_t k = 0; k < bases[t.block].size(); ++k) {
        accumulate(out.offset[t.block] + static_cast<Index>(k),
                   t.scale * basis_congruence(kr, bases[t.block][k]));
      }
    }
    for (const auto& t : l.scalar_terms) {
      if (out.offset[t.block] < 0) continue;
      // A reduced 1x1 block keeps the coordinate x = U^H X U with |U| = 1.
      accumulate(out.offset[t.block], t.coefficient.matrix());
    }
    std::vector<std::pair<Index, RealMatrix>> g;
    for (Index k = 0; k < n; ++k) {
      if (used[static_cast<std::size_t>(k)]) g.emplace_back(k, -embed(coeff[static_cast<std::size_t>(k)]));
    }
    (void)m;
    add_cone(embed(l.constant.matrix()), std::move(g));
  }
  return out;
}

}  // namespace detail

inline SdpSolution solve(const SdpProblem& problem, const SdpSettings& settings = {}) {
  if (problem.num_blocks() == 0) throw DimensionError("SdpProblem: no variable blocks");
  SdpSolution sol;
  const detail::CompiledProblem comp = detail::compile(problem, settings);
  const std::size_t nb = problem.num_blocks();

  auto zero_blocks = [&]() {
    std::vector<HermitianMatrix> z;
    for (std::size_t b = 0; b < nb; ++b) z.push_back(HermitianMatrix::zero(problem.block_dims()[b]));
    return z;
  };

  if (comp.trivially_infeasible) {
    sol.status = Status::Infeasible;
    sol.primal_blocks = zero_blocks();
    return sol;
  }

  detail::ConeResult cr;
  if (comp.cone.n == 0) {
    cr.status = Status::Optimal;
    cr.x = RealVector(0);
    for (const auto& h : comp.cone.h) {
      if (detail::min_eig_sym(h) < -settings.feas_tol) cr.status = Status::Infeasible;
    }
    if (comp.cone.b.size() > 0 && comp.cone.b.norm() > settings.feas_tol) cr.status = Status::Infeasible;
  } else {
    cr = detail::solve_cone_program(comp.cone, settings);
  }

  sol.status = cr.status;
  sol.iterations = cr.iterations;
  sol.gap_history = cr.gap_history;
  sol.primal_residual = cr.pres;
  sol.dual_residual = cr.dres;
  if (cr.status == Status::Infeasible || cr.status == Status::Unbounded) {
    sol.primal_blocks = zero_blocks();
    return sol;
  }

  for (std::size_t b = 0; b < nb; ++b) {
    const Index d = problem.block_dims()[b];
    const ComplexMatrix& u = comp.basis[b];
    const Index r = u.cols();
    if (r == 0) {
      sol.primal_blocks.push_back(HermitianMatrix::zero(d));
      continue;
    }
    const auto basis = detail::hermitian_basis(r);
    ComplexMatrix y = ComplexMatrix::Zero(r, r);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const double v = cr.x(comp.offset[b] + static_cast<Index>(k));
      const auto& e = basis[k];
      if (e.kind == 0) {
        y(e.i, e.i) += v;
      } else if (e.kind == 1) {
        y(e.i, e.j) += v;
        y(e.j, e.i) += v;
      } else {
        y(e.i, e.j) += Complex(0.0, v);
        y(e.j, e.i) -= Complex(0.0, v);
      }
    }
    const HermitianMatrix yc = psd_clamp(HermitianMatrix(y));
    sol.primal_blocks.push_back(HermitianMatrix(ComplexMatrix(u * yc.matrix() * u.adjoint())));
  }
  sol.objective_value = problem.objective_value(sol.primal_blocks);
  sol.dual_objective = -cr.dcost + problem.objective_constant();
  sol.duality_gap = cr.gap;
  return sol;
}

// Line-oriented dump for cross-checking with external solvers. See
// docs/sdp_dump_format.md.
inline void write_debug_dump(const SdpProblem& p, std::ostream& os) {
  auto write_matrix = [&](const ComplexMatrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        os << (j ? " " : "") << m(i, j).real() << ' ' << m(i, j).imag();
      }
      os << '\n';
    }
  };
  const auto old_precision = os.precision(17);
  os << "irscovert-sdp 1\n";
  os << "blocks " << p.num_blocks();
  for (Index d : p.block_dims()) os << ' ' << d;
  os << '\n';
  os << "objective " << p.objective().size() << ' ' << p.objective_constant() << '\n';
  for (const auto& t : p.objective()) {
    os << "term " << t.block << '\n';
    write_matrix(t.coefficient.matrix());
  }
  os << "constraints " << p.constraints().size() << '\n';
  for (const auto& c : p.constraints()) {
    os << "constraint " << to_string(c.relation) << ' ' << c.bound << ' ' << c.terms.size() << '\n';
    for (const auto& t : c.terms) {
      os << "term " << t.block << '\n';
      write_matrix(t.coefficient.matrix());
    }
  }
  os << "lmis " << p.lmis().size() << '\n';
  for (const auto& l : p.lmis()) {
    os << "lmi " << l.dim() << ' ' << l.congruence_terms.size() << ' ' << l.scalar_terms.size() << '\n';
    write_matrix(l.constant.matrix());
    for (const auto& t : l.congruence_terms) {
      os << "congruence " << t.block << ' ' << t.scale << '\n';
      write_matrix(t.factor);
    }
    for (const auto& t : l.scalar_terms) {
      os << "scalar " << t.block << '\n';
      write_matrix(t.coefficient.matrix());
    }
  }
  os.precision(old_precision);
}

}  // namespace irscovert::sdp

#endif  // IRSCOVERT_SDP_HPP
