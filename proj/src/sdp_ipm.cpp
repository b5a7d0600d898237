// Copyright 2026 The instrument-rt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense interior point method for  min c'x  s.t.  Gx + s = h, Ax = b, s ∈ K.
//
// The iterate (x, y, z, τ, s, κ) lives in the homogeneous self-dual embedding
//
//   A'y + G'z + cτ = 0,   Ax = bτ,   Gx + s = hτ,   κ = -c'x - b'y - h'z,
//
// so infeasible starts are allowed and infeasibility shows up as τ → 0.
// Each iteration computes the Nesterov–Todd scaling point of (s, z), solves a
// predictor and a Mehrotra corrector Newton system and takes a damped step.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "irt/sdp.hpp"

namespace irt::sdp {

namespace {

using Index = Eigen::Index;

constexpr double kSqrt2 = 1.4142135623730951;

struct BlockLayout {
  std::vector<std::size_t> sides;
  std::vector<Index> offsets;  // into the svec-stacked cone vector
  std::size_t degree = 0;      // Σ sides
};

BlockLayout make_layout(const std::vector<std::size_t>& sides) {
  BlockLayout layout{sides, {}, 0};
  Index off = 0;
  for (std::size_t k : sides) {
    layout.offsets.push_back(off);
    off += static_cast<Index>(svec_size(k));
    layout.degree += k;
  }
  return layout;
}

RealMatrix block_mat(const RealVector& v, const BlockLayout& layout, std::size_t b) {
  const std::size_t k = layout.sides[b];
  return smat(v.segment(layout.offsets[b], static_cast<Index>(svec_size(k))), k);
}

void set_block(RealVector& v, const BlockLayout& layout, std::size_t b, const RealMatrix& m) {
  v.segment(layout.offsets[b], static_cast<Index>(svec_size(layout.sides[b]))) = svec(m);
}

/// Nesterov–Todd scaling of one block: R'ZR = R⁻¹SR⁻ᵀ = diag(λ).
struct BlockScaling {
  RealMatrix r;
  RealMatrix r_inv;
  RealVector lambda;
};

RealMatrix psd_factor(const RealMatrix& m) {
  Eigen::LLT<RealMatrix> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  const RealVector root = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

BlockScaling nt_scaling(const RealMatrix& s, const RealMatrix& z) {
  const RealMatrix l1 = psd_factor(s);
  const RealMatrix l2 = psd_factor(z);
  Eigen::JacobiSVD<RealMatrix> svd(l2.transpose() * l1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  BlockScaling out;
  out.lambda = svd.singularValues();
  const RealVector inv_root = out.lambda.cwiseSqrt().cwiseInverse();
  out.r = l1 * svd.matrixV() * inv_root.asDiagonal();
  // R⁻¹ = λ^{-1/2} Uᵀ L2ᵀ, from L2ᵀ L1 = U λ Vᵀ.
  out.r_inv = inv_root.asDiagonal() * svd.matrixU().transpose() * l2.transpose();
  return out;
}

struct Scaling {
  std::vector<BlockScaling> blocks;

  // W(u) = RᵀUR
  RealVector w(const RealVector& u, const BlockLayout& l) const {
    RealVector out(u.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& r = blocks[b].r;
      set_block(out, l, b, r.transpose() * block_mat(u, l, b) * r);
    }
    return out;
  }
  // Wᵀ(u) = RURᵀ
  RealVector wt(const RealVector& u, const BlockLayout& l) const {
    RealVector out(u.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& r = blocks[b].r;
      set_block(out, l, b, r * block_mat(u, l, b) * r.transpose());
    }
    return out;
  }
  // W⁻ᵀ(u) = R⁻¹UR⁻ᵀ
  RealVector winv_t(const RealVector& u, const BlockLayout& l) const {
    RealVector out(u.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& ri = blocks[b].r_inv;
      set_block(out, l, b, ri * block_mat(u, l, b) * ri.transpose());
    }
    return out;
  }
  // W⁻¹(u) = R⁻ᵀUR⁻¹
  RealVector winv(const RealVector& u, const BlockLayout& l) const {
    RealVector out(u.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& ri = blocks[b].r_inv;
      set_block(out, l, b, ri.transpose() * block_mat(u, l, b) * ri);
    }
    return out;
  }
};

Scaling identity_scaling(const BlockLayout& l) {
  Scaling sc;
  for (std::size_t k : l.sides) {
    sc.blocks.push_back({RealMatrix::Identity(static_cast<Index>(k), static_cast<Index>(k)),
                         RealMatrix::Identity(static_cast<Index>(k), static_cast<Index>(k)),
                         RealVector::Ones(static_cast<Index>(k))});
  }
  return sc;
}

/// Cone identity e (identity matrix in each block).
RealVector cone_identity(const BlockLayout& l, Index dim) {
  RealVector e = RealVector::Zero(dim);
  for (std::size_t b = 0; b < l.sides.size(); ++b) {
    const auto k = static_cast<Index>(l.sides[b]);
    set_block(e, l, b, RealMatrix::Identity(k, k));
  }
  return e;
}

/// Minimum eigenvalue over all blocks.
double cone_min_eig(const RealVector& v, const BlockLayout& l) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < l.sides.size(); ++b) {
    const RealMatrix blk = block_mat(v, l, b);
    if (blk.rows() == 1) {
      m = std::min(m, blk(0, 0));
    } else {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(blk, Eigen::EigenvaluesOnly);
      m = std::min(m, es.eigenvalues()(0));
    }
  }
  return m;
}

/// In the scaled basis λ is diagonal. These helpers implement the Jordan
/// product with λ and its inverse, blockwise on svec vectors.
RealVector lambda_sq(const Scaling& sc, const BlockLayout& l, Index dim) {
  RealVector out = RealVector::Zero(dim);
  for (std::size_t b = 0; b < l.sides.size(); ++b) {
    set_block(out, l, b, sc.blocks[b].lambda.array().square().matrix().asDiagonal().toDenseMatrix());
  }
  return out;
}

RealVector lambda_div(const Scaling& sc, const BlockLayout& l, const RealVector& d) {
  RealVector out(d.size());
  for (std::size_t b = 0; b < l.sides.size(); ++b) {
    RealMatrix m = block_mat(d, l, b);
    const auto& lam = sc.blocks[b].lambda;
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) *= 2.0 / (lam(i) + lam(j));
    set_block(out, l, b, m);
  }
  return out;
}

RealVector jordan(const RealVector& u, const RealVector& v, const BlockLayout& l) {
  RealVector out(u.size());
  for (std::size_t b = 0; b < l.sides.size(); ++b) {
    const RealMatrix a = block_mat(u, l, b);
    const RealMatrix c = block_mat(v, l, b);
    set_block(out, l, b, 0.5 * (a * c + c * a));
  }
  return out;
}

/// Largest α ≤ cap with diag(λ) + α·D ⪰ 0 in every block.
double max_step(const Scaling& sc, const BlockLayout& l, const RealVector& d, double cap) {
  double alpha = cap;
  for (std::size_t b = 0; b < l.sides.size(); ++b) {
    const RealVector inv_root = sc.blocks[b].lambda.cwiseSqrt().cwiseInverse();
    const RealMatrix m = inv_root.asDiagonal() * block_mat(d, l, b) * inv_root.asDiagonal();
    double lmin;
    if (m.rows() == 1) {
      lmin = m(0, 0);
    } else {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues()(0);
    }
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

/// Solves   A'dy + G'dz = px,   A dx = py,   G dx - W'W dz = pz.
class KktSolver {
 public:
  KktSolver(const ConeProblem& p, const BlockLayout& l) : p_(p), l_(l) {}

  bool factor(const Scaling& sc) {
    sc_ = &sc;
    const Index n = p_.G.cols();
    const Index m = p_.A.rows();
    gs_.resize(p_.G.rows(), n);
    for (Index j = 0; j < n; ++j) gs_.col(j) = sc.winv_t(p_.G.col(j), l_);
    RealMatrix k = RealMatrix::Zero(n + m, n + m);
    k.topLeftCorner(n, n).noalias() = gs_.transpose() * gs_;
    const double scale = std::max(1.0, k.topLeftCorner(n, n).diagonal().cwiseAbs().maxCoeff());
    const double delta = 1e-13 * scale;
    k.topLeftCorner(n, n).diagonal().array() += delta;
    if (m > 0) {
      k.topRightCorner(n, m) = p_.A.transpose();
      k.bottomLeftCorner(m, n) = p_.A;
      k.bottomRightCorner(m, m).diagonal().array() = -delta;
    }
    lu_.compute(k);
    return std::isfinite(lu_.rcond()) && lu_.rcond() > 0.0;
  }

  void solve(const RealVector& px, const RealVector& py, const RealVector& pz, RealVector& dx, RealVector& dy,
             RealVector& dz) const {
    reduced_solve(px, py, pz, dx, dy, dz);
    // Iterative refinement against the unreduced system.
    for (int it = 0; it < 3; ++it) {
      const RealVector rx = px - p_.A.transpose() * dy - p_.G.transpose() * dz;
      const RealVector ry = py - p_.A * dx;
      const RealVector rz = pz - (p_.G * dx - sc_->wt(sc_->w(dz, l_), l_));
      const double err = std::max({rx.lpNorm<Eigen::Infinity>(), ry.size() ? ry.lpNorm<Eigen::Infinity>() : 0.0,
                                   rz.lpNorm<Eigen::Infinity>()});
      const double ref = 1.0 + std::max({px.lpNorm<Eigen::Infinity>(), py.size() ? py.lpNorm<Eigen::Infinity>() : 0.0,
                                         pz.lpNorm<Eigen::Infinity>()});
      if (!(err > 1e-15 * ref)) break;
      RealVector cx, cy, cz;
      reduced_solve(rx, ry, rz, cx, cy, cz);
      dx += cx;
      dy += cy;
      dz += cz;
    }
  }

 private:
  void reduced_solve(const RealVector& px, const RealVector& py, const RealVector& pz, RealVector& dx,
                     RealVector& dy, RealVector& dz) const {
    const Index n = p_.G.cols();
    const Index m = p_.A.rows();
    const RealVector wpz = sc_->winv_t(pz, l_);
    RealVector rhs(n + m);
    rhs.head(n) = px + gs_.transpose() * wpz;
    if (m > 0) rhs.tail(m) = py;
    const RealVector sol = lu_.solve(rhs);
    dx = sol.head(n);
    dy = sol.tail(m);
    dz = sc_->winv(gs_ * dx - wpz, l_);
  }

  const ConeProblem& p_;
  const BlockLayout& l_;
  const Scaling* sc_ = nullptr;
  RealMatrix gs_;
  Eigen::PartialPivLU<RealMatrix> lu_;
};

/// Keeps a maximal linearly independent subset of the rows of A.
/// Returns false if the dropped rows are inconsistent with b.
bool reduce_equalities(const RealMatrix& a, const RealVector& b, std::vector<Index>& keep) {
  keep.clear();
  if (a.rows() == 0) return true;
  Eigen::ColPivHouseholderQR<RealMatrix> qr(a.transpose());
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  qr.setThreshold(1e-11 * scale / std::max(1.0, std::sqrt(static_cast<double>(a.cols()))));
  const Index rank = qr.rank();
  for (Index i = 0; i < rank; ++i) keep.push_back(qr.colsPermutation().indices()(i));
  std::sort(keep.begin(), keep.end());
  if (rank == a.rows()) return true;
  RealMatrix ak(rank, a.cols());
  RealVector bk(rank);
  for (Index i = 0; i < rank; ++i) ak.row(i) = a.row(keep[i]), bk(i) = b(keep[i]);
  const RealVector x0 = ak.completeOrthogonalDecomposition().solve(bk);
  return (a * x0 - b).norm() <= 1e-9 * (1.0 + b.norm());
}

double norm_or_zero(const RealVector& v) { return v.size() ? v.norm() : 0.0; }

}  // namespace

std::size_t ConeProblem::cone_dimension() const {
  std::size_t n = 0;
  for (std::size_t k : blocks) n += svec_size(k);
  return n;
}

void ConeProblem::check() const {
  const Index n = c.size();
  const auto dim = static_cast<Index>(cone_dimension());
  if (G.rows() != dim || G.cols() != n || h.size() != dim) throw DimensionError("ConeProblem: G/h do not match the cone");
  if (A.cols() != n || A.rows() != b.size()) throw DimensionError("ConeProblem: A/b shape mismatch");
}

RealVector svec(const RealMatrix& m) {
  const auto k = static_cast<std::size_t>(m.rows());
  RealVector v(static_cast<Index>(svec_size(k)));
  Index idx = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    v(idx++) = m(j, j);
    for (Index i = j + 1; i < m.rows(); ++i) v(idx++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
  return v;
}

RealMatrix smat(const RealVector& v, std::size_t side) {
  const auto k = static_cast<Index>(side);
  RealMatrix m(k, k);
  Index idx = 0;
  for (Index j = 0; j < k; ++j) {
    m(j, j) = v(idx++);
    for (Index i = j + 1; i < k; ++i) {
      m(i, j) = m(j, i) = v(idx++) / kSqrt2;
    }
  }
  return m;
}

ConeResult solve_cone(const ConeProblem& input, const ConeOptions& options) {
  input.check();
  ConeResult result;

  std::vector<Index> keep;
  if (!reduce_equalities(input.A, input.b, keep)) {
    result.status = Status::infeasible;
    return result;
  }
  ConeProblem p = input;
  if (static_cast<Index>(keep.size()) != input.A.rows()) {
    p.A.resize(static_cast<Index>(keep.size()), input.A.cols());
    p.b.resize(static_cast<Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      p.A.row(static_cast<Index>(i)) = input.A.row(keep[i]);
      p.b(static_cast<Index>(i)) = input.b(keep[i]);
    }
  }

  const BlockLayout layout = make_layout(p.blocks);
  const Index n = p.c.size();
  const Index m = p.A.rows();
  const auto dim = static_cast<Index>(p.cone_dimension());
  const RealVector e = cone_identity(layout, dim);

  const double resx0 = std::max(1.0, p.c.norm());
  const double resy0 = std::max(1.0, norm_or_zero(p.b));
  const double resz0 = std::max(1.0, p.h.norm());

  auto finish = [&](Status status, const RealVector& x, const RealVector& y, const RealVector& z,
                    const RealVector& s, double scale, int iters) {
    result.status = status;
    result.x = x / scale;
    result.s = s / scale;
    result.z = z / scale;
    result.y = RealVector::Zero(input.A.rows());
    const RealVector ys = y / scale;
    for (std::size_t i = 0; i < keep.size(); ++i) result.y(keep[i]) = ys(static_cast<Index>(i));
    result.primal_value = p.c.dot(result.x);
    result.dual_value = -(p.b.dot(ys) + p.h.dot(result.z));
    result.gap = result.s.dot(result.z);
    result.iterations = iters;
    return result;
  };

  // Starting point from two least-squares problems.
  KktSolver kkt(p, layout);
  Scaling sc = identity_scaling(layout);
  if (!kkt.factor(sc)) return result;
  RealVector x, y, z, s;
  {
    RealVector x0, y0, z0;
    kkt.solve(RealVector::Zero(n), p.b, p.h, x0, y0, z0);
    x = x0;
    s = -z0;
    kkt.solve(-p.c, RealVector::Zero(m), RealVector::Zero(dim), x0, y0, z0);
    y = y0;
    z = z0;
    const double ap = -cone_min_eig(s, layout);
    if (ap >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + std::max(ap, 0.0)) * e;
    const double ad = -cone_min_eig(z, layout);
    if (ad >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + std::max(ad, 0.0)) * e;
  }
  double tau = 1.0;
  double kappa = 1.0;

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    if (!x.allFinite() || !z.allFinite() || !s.allFinite() || !std::isfinite(tau)) break;

    const RealVector hrx = -(p.A.transpose() * y) - p.G.transpose() * z;
    const RealVector hry = p.A * x;
    const RealVector hrz = s + p.G * x;
    const RealVector rx = -hrx + p.c * tau;  // A'y + G'z + cτ
    const RealVector ry = -hry + p.b * tau;  // -Ax + bτ
    const RealVector rz = hrz - p.h * tau;   // Gx + s - hτ
    const double cx = p.c.dot(x);
    const double by_hz = p.b.dot(y) + p.h.dot(z);
    const double rt = kappa + cx + by_hz;
    const double gap = s.dot(z);
    const double mu = (gap + kappa * tau) / static_cast<double>(layout.degree + 1);

    const double pcost = cx / tau;
    const double dcost = -by_hz / tau;
    const double pres = std::max(norm_or_zero(ry) / resy0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double scaled_gap = gap / (tau * tau);
    const double obj_scale = std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

    result.primal_residual = pres;
    result.dual_residual = dres;

    if (pres <= options.tol && dres <= options.tol && scaled_gap <= options.tol * obj_scale &&
        std::abs(pcost - dcost) <= options.tol * obj_scale) {
      return finish(Status::optimal, x, y, z, s, tau, iter);
    }
    if (by_hz < 0.0) {
      const double pinf = hrx.norm() / resx0 / (-by_hz);
      if (pinf <= options.tol) {
        finish(Status::infeasible, x, y, z, s, -by_hz, iter);
        return result;
      }
    }
    if (cx < 0.0) {
      const double dinf = std::max(norm_or_zero(hry) / resy0, hrz.norm() / resz0) / (-cx);
      if (dinf <= options.tol) {
        finish(Status::unbounded, x, y, z, s, -cx, iter);
        return result;
      }
    }
    if (iter == options.max_iterations) break;

    // Scaling point.
    for (std::size_t b = 0; b < layout.sides.size(); ++b) {
      sc.blocks[b] = nt_scaling(block_mat(s, layout, b), block_mat(z, layout, b));
    }
    if (!kkt.factor(sc)) break;
    RealVector lam = RealVector::Zero(dim);
    for (std::size_t b = 0; b < layout.sides.size(); ++b) {
      set_block(lam, layout, b, sc.blocks[b].lambda.asDiagonal().toDenseMatrix());
    }
    const RealVector lam_sq = lambda_sq(sc, layout, dim);

    RealVector x1, y1, z1;
    kkt.solve(-p.c, p.b, p.h, x1, y1, z1);
    const double denom1 = p.c.dot(x1) + p.b.dot(y1) + p.h.dot(z1);

    struct Direction {
      RealVector dx, dy, dz, ds_scaled, dz_scaled;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto newton = [&](double eta, const RealVector& d_s, double d_k) {
      Direction d;
      const RealVector ld = lambda_div(sc, layout, d_s);
      const RealVector bx = -(1.0 - eta) * rx;
      const RealVector by = -(1.0 - eta) * ry;
      const RealVector bz = -(1.0 - eta) * rz - sc.wt(ld, layout);
      const double bt = -(1.0 - eta) * rt;
      RealVector x2, y2, z2;
      kkt.solve(bx, -by, bz, x2, y2, z2);
      d.dtau = (bt - d_k / tau - p.c.dot(x2) - p.b.dot(y2) - p.h.dot(z2)) / (denom1 - kappa / tau);
      d.dx = x2 + d.dtau * x1;
      d.dy = y2 + d.dtau * y1;
      d.dz = z2 + d.dtau * z1;
      d.dkappa = (d_k - kappa * d.dtau) / tau;
      d.dz_scaled = sc.w(d.dz, layout);
      d.ds_scaled = ld - d.dz_scaled;
      return d;
    };
    auto step_to_boundary = [&](const Direction& d) {
      double a = std::numeric_limits<double>::infinity();
      a = max_step(sc, layout, d.ds_scaled, a);
      a = max_step(sc, layout, d.dz_scaled, a);
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    // Predictor.
    const Direction aff = newton(0.0, -lam_sq, -kappa * tau);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3.0);

    // Corrector.
    RealVector d_s = -lam_sq - jordan(aff.ds_scaled, aff.dz_scaled, layout) + sigma * mu * e;
    const double d_k = -kappa * tau - aff.dtau * aff.dkappa + sigma * mu;
    const Direction dir = newton(sigma, d_s, d_k);
    const double alpha = std::min(1.0, 0.99 * step_to_boundary(dir));
    if (!(alpha > 1e-12)) break;

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
    const RealVector s_scaled = lam + alpha * dir.ds_scaled;
    const RealVector z_scaled = lam + alpha * dir.dz_scaled;
    s = sc.wt(s_scaled, layout);
    z = sc.winv(z_scaled, layout);
    result.iterations = iter + 1;
  }

  finish(Status::numerical_failure, x, y, z, s, tau > 0.0 ? tau : 1.0, result.iterations);
  return result;
}

}  // namespace irt::sdp
