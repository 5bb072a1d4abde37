#include "ehdg/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ehdg/quadrature.hpp"

namespace ehdg {

Eigen::VectorXd jacobi_p(const Eigen::VectorXd& x, double alpha, double beta, int n) {
  const Eigen::Index np = x.size();
  const double gamma0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) *
                        std::tgamma(beta + 1.0) / std::tgamma(alpha + beta + 2.0);
  Eigen::VectorXd p_prev = Eigen::VectorXd::Constant(np, 1.0 / std::sqrt(gamma0));
  if (n == 0) return p_prev;
  const double gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
  Eigen::VectorXd p =
      ((alpha + beta + 2.0) * x.array() / 2.0 + (alpha - beta) / 2.0) / std::sqrt(gamma1);
  double aold = 2.0 / (2.0 + alpha + beta) *
                std::sqrt((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0));
  for (int i = 1; i < n; ++i) {
    const double h1 = 2.0 * i + alpha + beta;
    const double anew = 2.0 / (h1 + 2.0) *
                        std::sqrt((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) *
                                  (i + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0));
    const double bnew = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
    Eigen::VectorXd p_next = (-aold * p_prev.array() + (x.array() - bnew) * p.array()) / anew;
    p_prev = std::move(p);
    p = std::move(p_next);
    aold = anew;
  }
  return p;
}

Eigen::VectorXd grad_jacobi_p(const Eigen::VectorXd& x, double alpha, double beta, int n) {
  if (n == 0) return Eigen::VectorXd::Zero(x.size());
  return std::sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1);
}

namespace {

using Eigen::ArrayXd;
using Eigen::VectorXd;

// Collapsed coordinates from biunit simplex coordinates.
void rs_to_ab(const VectorXd& r, const VectorXd& s, VectorXd& a, VectorXd& b) {
  a.resize(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i)
    a(i) = (std::abs(1.0 - s(i)) > 1e-14) ? 2.0 * (1.0 + r(i)) / (1.0 - s(i)) - 1.0 : -1.0;
  b = s;
}

void rst_to_abc(const VectorXd& r, const VectorXd& s, const VectorXd& t, VectorXd& a,
                VectorXd& b, VectorXd& c) {
  const Eigen::Index n = r.size();
  a.resize(n);
  b.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = (std::abs(s(i) + t(i)) > 1e-14) ? 2.0 * (1.0 + r(i)) / (-s(i) - t(i)) - 1.0 : -1.0;
    b(i) = (std::abs(1.0 - t(i)) > 1e-14) ? 2.0 * (1.0 + s(i)) / (1.0 - t(i)) - 1.0 : -1.0;
  }
  c = t;
}

ArrayXd ipow(const ArrayXd& x, int p) {
  ArrayXd out = ArrayXd::Ones(x.size());
  for (int i = 0; i < p; ++i) out *= x;
  return out;
}

// Warp function for 1D node redistribution (equidistant -> LGL), divided by the blend.
VectorXd warp_factor(int n, const VectorXd& rout) {
  VectorXd lgl = gauss_lobatto(n + 1);
  VectorXd req = VectorXd::LinSpaced(n + 1, -1.0, 1.0);
  Eigen::MatrixXd veq(n + 1, n + 1);
  for (int j = 0; j <= n; ++j) veq.col(j) = jacobi_p(req, 0, 0, j);
  Eigen::MatrixXd pmat(n + 1, rout.size());
  for (int i = 0; i <= n; ++i) pmat.row(i) = jacobi_p(rout, 0, 0, i).transpose();
  Eigen::MatrixXd lmat = veq.transpose().partialPivLu().solve(pmat);
  VectorXd warp = lmat.transpose() * (lgl - req);
  for (Eigen::Index i = 0; i < rout.size(); ++i) {
    const bool interior = std::abs(rout(i)) < 1.0 - 1e-10;
    if (interior)
      warp(i) /= 1.0 - rout(i) * rout(i);
    else
      warp(i) = 0.0;
  }
  return warp;
}

const double kAlpha2D[] = {0.0000, 0.0000, 1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832,
                           1.3648, 1.4773, 1.4959, 1.5743, 1.5770, 1.6223, 1.6258};
const double kAlpha3D[] = {0, 0, 0, 0.1002, 1.1332, 1.5608, 1.3413, 1.2577,
                           1.1603, 1.10153, 0.6080, 0.4523, 0.8856, 0.8717, 0.9655};

RefPoints<2> nodes_2d(int n) {
  const double alpha = n < 16 ? kAlpha2D[n - 1] : 5.0 / 3.0;
  const int np = (n + 1) * (n + 2) / 2;
  ArrayXd l1(np), l2(np), l3(np);
  int sk = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j, ++sk) {
      l1(sk) = double(i) / n;
      l3(sk) = double(j) / n;
      l2(sk) = 1.0 - l1(sk) - l3(sk);
    }
  ArrayXd x = -l2 + l3;
  ArrayXd y = (-l2 - l3 + 2.0 * l1) / std::sqrt(3.0);
  const ArrayXd blend1 = 4.0 * l2 * l3, blend2 = 4.0 * l1 * l3, blend3 = 4.0 * l1 * l2;
  const ArrayXd wf1 = warp_factor(n, (l3 - l2).matrix()).array();
  const ArrayXd wf2 = warp_factor(n, (l1 - l3).matrix()).array();
  const ArrayXd wf3 = warp_factor(n, (l2 - l1).matrix()).array();
  const ArrayXd w1 = blend1 * wf1 * (1.0 + (alpha * l1).square());
  const ArrayXd w2 = blend2 * wf2 * (1.0 + (alpha * l2).square());
  const ArrayXd w3 = blend3 * wf3 * (1.0 + (alpha * l3).square());
  const double pi = std::numbers::pi;
  x += w1 + std::cos(2 * pi / 3) * w2 + std::cos(4 * pi / 3) * w3;
  y += std::sin(2 * pi / 3) * w2 + std::sin(4 * pi / 3) * w3;
  // Equilateral triangle to biunit (r,s), then to the unit simplex.
  const double s3 = std::sqrt(3.0);
  ArrayXd L1 = (s3 * y + 1.0) / 3.0;
  ArrayXd L2 = (-3.0 * x - s3 * y + 2.0) / 6.0;
  ArrayXd L3 = (3.0 * x - s3 * y + 2.0) / 6.0;
  RefPoints<2> out(2, np);
  out.row(0) = (0.5 * ((-L2 + L3 - L1) + 1.0)).matrix().transpose();
  out.row(1) = (0.5 * ((-L2 - L3 + L1) + 1.0)).matrix().transpose();
  return out;
}

ArrayXd eval_warp(int p, const VectorXd& xnodes, const ArrayXd& xout) {
  ArrayXd warp = ArrayXd::Zero(xout.size());
  VectorXd xeq(p + 1);
  for (int i = 0; i <= p; ++i) xeq(i) = -1.0 + 2.0 * (p - i) / p;
  for (int i = 0; i <= p; ++i) {
    ArrayXd d = ArrayXd::Constant(xout.size(), xnodes(i) - xeq(i));
    for (int j = 1; j < p; ++j)
      if (i != j) d = d * (xout - xeq(j)) / (xeq(i) - xeq(j));
    if (i != 0) d = -d / (xeq(i) - xeq(0));
    if (i != p) d = d / (xeq(i) - xeq(p));
    warp += d;
  }
  return warp;
}

void eval_shift(int p, double pval, const ArrayXd& l1, const ArrayXd& l2, const ArrayXd& l3,
                ArrayXd& dx, ArrayXd& dy) {
  VectorXd gauss_x = -gauss_lobatto(p + 1);
  const ArrayXd warp1 = eval_warp(p, gauss_x, l3 - l2);
  const ArrayXd warp2 = eval_warp(p, gauss_x, l1 - l3);
  const ArrayXd warp3 = eval_warp(p, gauss_x, l2 - l1);
  const ArrayXd blend1 = l2 * l3, blend2 = l1 * l3, blend3 = l1 * l2;
  const ArrayXd wf1 = 4.0 * blend1 * warp1 * (1.0 + (pval * l1).square());
  const ArrayXd wf2 = 4.0 * blend2 * warp2 * (1.0 + (pval * l2).square());
  const ArrayXd wf3 = 4.0 * blend3 * warp3 * (1.0 + (pval * l3).square());
  const double pi = std::numbers::pi;
  dx = wf1 + std::cos(2 * pi / 3) * wf2 + std::cos(4 * pi / 3) * wf3;
  dy = std::sin(2 * pi / 3) * wf2 + std::sin(4 * pi / 3) * wf3;
}

RefPoints<3> nodes_3d(int n) {
  const double alpha = n <= 15 ? kAlpha3D[n - 1] : 1.0;
  const double tol = 1e-10;
  const int np = (n + 1) * (n + 2) * (n + 3) / 6;
  ArrayXd r(np), s(np), t(np);
  int sk = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n - i; ++j)
      for (int k = 0; k <= n - i - j; ++k, ++sk) {
        r(sk) = -1.0 + 2.0 * k / n;
        s(sk) = -1.0 + 2.0 * j / n;
        t(sk) = -1.0 + 2.0 * i / n;
      }
  const ArrayXd L1 = (1.0 + t) / 2.0, L2 = (1.0 + s) / 2.0, L3 = -(1.0 + r + s + t) / 2.0,
                L4 = (1.0 + r) / 2.0;
  const Eigen::RowVector3d v1(-1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0));
  const Eigen::RowVector3d v2(1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0));
  const Eigen::RowVector3d v3(0.0, 2.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0));
  const Eigen::RowVector3d v4(0.0, 0.0, 3.0 / std::sqrt(6.0));
  Eigen::Matrix<double, 4, 3> t1, t2;
  t1.row(0) = v2 - v1;
  t1.row(1) = v2 - v1;
  t1.row(2) = v3 - v2;
  t1.row(3) = v3 - v1;
  t2.row(0) = v3 - 0.5 * (v1 + v2);
  t2.row(1) = v4 - 0.5 * (v1 + v2);
  t2.row(2) = v4 - 0.5 * (v2 + v3);
  t2.row(3) = v4 - 0.5 * (v1 + v3);
  for (int f = 0; f < 4; ++f) {
    t1.row(f).normalize();
    t2.row(f).normalize();
  }
  Eigen::MatrixXd xyz = L3.matrix() * v1 + L4.matrix() * v2 + L2.matrix() * v3 + L1.matrix() * v4;
  Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(np, 3);
  for (int f = 0; f < 4; ++f) {
    ArrayXd La, Lb, Lc, Ld;
    switch (f) {
      case 0: La = L1; Lb = L2; Lc = L3; Ld = L4; break;
      case 1: La = L2; Lb = L1; Lc = L3; Ld = L4; break;
      case 2: La = L3; Lb = L1; Lc = L4; Ld = L2; break;
      default: La = L4; Lb = L1; Lc = L3; Ld = L2; break;
    }
    ArrayXd warp1, warp2;
    eval_shift(n, alpha, Lb, Lc, Ld, warp1, warp2);
    ArrayXd blend = Lb * Lc * Ld;
    const ArrayXd denom = (Lb + 0.5 * La) * (Lc + 0.5 * La) * (Ld + 0.5 * La);
    for (int i = 0; i < np; ++i)
      if (denom(i) > tol) blend(i) = (1.0 + (alpha * La(i)) * (alpha * La(i))) * blend(i) / denom(i);
    for (int i = 0; i < np; ++i) {
      shift.row(i) += blend(i) * warp1(i) * t1.row(f) + blend(i) * warp2(i) * t2.row(f);
      const int n_pos = (Lb(i) > tol) + (Lc(i) > tol) + (Ld(i) > tol);
      if (La(i) < tol && n_pos < 3) shift.row(i) = warp1(i) * t1.row(f) + warp2(i) * t2.row(f);
    }
  }
  xyz += shift;
  // Equilateral tetrahedron to biunit (r,s,t).
  Eigen::Matrix3d A;
  A.col(0) = 0.5 * (v2 - v1).transpose();
  A.col(1) = 0.5 * (v3 - v1).transpose();
  A.col(2) = 0.5 * (v4 - v1).transpose();
  const Eigen::Vector3d off = 0.5 * (v2 + v3 + v4 - v1).transpose();
  Eigen::Matrix3Xd rhs = xyz.transpose().colwise() - off;
  Eigen::Matrix3Xd rst = A.partialPivLu().solve(rhs);
  return 0.5 * (rst.array() + 1.0).matrix();
}

}  // namespace

template <int D>
RefPoints<D> simplex_nodes(int order) {
  if (order < 0) throw std::invalid_argument("simplex_nodes: negative order");
  if (order == 0) return RefPoints<D>::Constant(D, 1, 1.0 / (D + 1));
  if constexpr (D == 1) {
    RefPoints<1> out(1, order + 1);
    out.row(0) = (0.5 * (gauss_lobatto(order + 1).array() + 1.0)).matrix().transpose();
    return out;
  } else if constexpr (D == 2) {
    return nodes_2d(order);
  } else {
    return nodes_3d(order);
  }
}

template <int D>
Eigen::MatrixXd modal_values(int order, const RefPoints<D>& pts) {
  const Eigen::Index np = pts.cols();
  Eigen::MatrixXd v(np, poly_dim(D, order));
  if constexpr (D == 1) {
    VectorXd r = (2.0 * pts.row(0).array() - 1.0).matrix().transpose();
    for (int i = 0; i <= order; ++i) v.col(i) = jacobi_p(r, 0, 0, i);
  } else if constexpr (D == 2) {
    VectorXd r = (2.0 * pts.row(0).array() - 1.0).matrix().transpose();
    VectorXd s = (2.0 * pts.row(1).array() - 1.0).matrix().transpose();
    VectorXd a, b;
    rs_to_ab(r, s, a, b);
    int sk = 0;
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= order - i; ++j, ++sk)
        v.col(sk) = std::sqrt(2.0) * jacobi_p(a, 0, 0, i).array() *
                    jacobi_p(b, 2 * i + 1, 0, j).array() * ipow(1.0 - b.array(), i);
  } else {
    VectorXd r = (2.0 * pts.row(0).array() - 1.0).matrix().transpose();
    VectorXd s = (2.0 * pts.row(1).array() - 1.0).matrix().transpose();
    VectorXd t = (2.0 * pts.row(2).array() - 1.0).matrix().transpose();
    VectorXd a, b, c;
    rst_to_abc(r, s, t, a, b, c);
    int sk = 0;
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= order - i; ++j)
        for (int k = 0; k <= order - i - j; ++k, ++sk)
          v.col(sk) = 2.0 * std::sqrt(2.0) * jacobi_p(a, 0, 0, i).array() *
                      jacobi_p(b, 2 * i + 1, 0, j).array() * ipow(1.0 - b.array(), i) *
                      jacobi_p(c, 2 * (i + j) + 2, 0, k).array() *
                      ipow(1.0 - c.array(), i + j);
  }
  return v;
}

template <int D>
std::array<Eigen::MatrixXd, D> modal_gradients(int order, const RefPoints<D>& pts) {
  const Eigen::Index np = pts.cols();
  const int m = poly_dim(D, order);
  std::array<Eigen::MatrixXd, D> g;
  for (auto& gi : g) gi.resize(np, m);
  // Derivatives are taken in biunit coordinates; d/dxi = 2 d/dr.
  if constexpr (D == 1) {
    VectorXd r = (2.0 * pts.row(0).array() - 1.0).matrix().transpose();
    for (int i = 0; i <= order; ++i) g[0].col(i) = 2.0 * grad_jacobi_p(r, 0, 0, i);
  } else if constexpr (D == 2) {
    VectorXd r = (2.0 * pts.row(0).array() - 1.0).matrix().transpose();
    VectorXd s = (2.0 * pts.row(1).array() - 1.0).matrix().transpose();
    VectorXd a, b;
    rs_to_ab(r, s, a, b);
    const ArrayXd hb = 0.5 * (1.0 - b.array());
    int sk = 0;
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= order - i; ++j, ++sk) {
        const ArrayXd fa = jacobi_p(a, 0, 0, i).array();
        const ArrayXd dfa = grad_jacobi_p(a, 0, 0, i).array();
        const ArrayXd gb = jacobi_p(b, 2 * i + 1, 0, j).array();
        const ArrayXd dgb = grad_jacobi_p(b, 2 * i + 1, 0, j).array();
        ArrayXd dr = dfa * gb;
        if (i > 0) dr *= ipow(hb, i - 1);
        ArrayXd ds = dfa * (gb * (0.5 * (1.0 + a.array())));
        if (i > 0) ds *= ipow(hb, i - 1);
        ArrayXd tmp = dgb * ipow(hb, i);
        if (i > 0) tmp -= 0.5 * i * gb * ipow(hb, i - 1);
        ds += fa * tmp;
        const double scale = std::pow(2.0, i + 0.5) * 2.0;
        g[0].col(sk) = scale * dr.matrix();
        g[1].col(sk) = scale * ds.matrix();
      }
  } else {
    VectorXd r = (2.0 * pts.row(0).array() - 1.0).matrix().transpose();
    VectorXd s = (2.0 * pts.row(1).array() - 1.0).matrix().transpose();
    VectorXd t = (2.0 * pts.row(2).array() - 1.0).matrix().transpose();
    VectorXd a, b, c;
    rst_to_abc(r, s, t, a, b, c);
    const ArrayXd hb = 0.5 * (1.0 - b.array());
    const ArrayXd hc = 0.5 * (1.0 - c.array());
    int sk = 0;
    for (int i = 0; i <= order; ++i)
      for (int j = 0; j <= order - i; ++j)
        for (int k = 0; k <= order - i - j; ++k, ++sk) {
          const ArrayXd fa = jacobi_p(a, 0, 0, i).array();
          const ArrayXd dfa = grad_jacobi_p(a, 0, 0, i).array();
          const ArrayXd gb = jacobi_p(b, 2 * i + 1, 0, j).array();
          const ArrayXd dgb = grad_jacobi_p(b, 2 * i + 1, 0, j).array();
          const ArrayXd h = jacobi_p(c, 2 * (i + j) + 2, 0, k).array();
          const ArrayXd dh = grad_jacobi_p(c, 2 * (i + j) + 2, 0, k).array();
          ArrayXd vr = dfa * (gb * h);
          if (i > 0) vr *= ipow(hb, i - 1);
          if (i + j > 0) vr *= ipow(hc, i + j - 1);
          ArrayXd vs = 0.5 * (1.0 + a.array()) * vr;
          ArrayXd tmp = dgb * ipow(hb, i);
          if (i > 0) tmp += -0.5 * i * (gb * ipow(hb, i - 1));
          if (i + j > 0) tmp *= ipow(hc, i + j - 1);
          tmp = fa * (tmp * h);
          vs += tmp;
          ArrayXd vt = 0.5 * (1.0 + a.array()) * vr + 0.5 * (1.0 + b.array()) * tmp;
          tmp = dh * ipow(hc, i + j);
          if (i + j > 0) tmp -= 0.5 * (i + j) * (h * ipow(hc, i + j - 1));
          tmp = fa * (gb * tmp);
          tmp *= ipow(hb, i);
          vt += tmp;
          const double scale = std::pow(2.0, 2 * i + j + 1.5) * 2.0;
          g[0].col(sk) = scale * vr.matrix();
          g[1].col(sk) = scale * vs.matrix();
          g[2].col(sk) = scale * vt.matrix();
        }
  }
  return g;
}

template <int D>
SimplexBasis<D>::SimplexBasis(int order) : order_(order), nodes_(simplex_nodes<D>(order)) {
  Eigen::MatrixXd v = modal_values<D>(order, nodes_);
  vinv_ = v.partialPivLu().inverse();
}

template <int D>
Eigen::MatrixXd SimplexBasis<D>::eval(const RefPoints<D>& pts) const {
  return modal_values<D>(order_, pts) * vinv_;
}

template <int D>
std::array<Eigen::MatrixXd, D> SimplexBasis<D>::grad(const RefPoints<D>& pts) const {
  auto g = modal_gradients<D>(order_, pts);
  for (auto& gi : g) gi = gi * vinv_;
  return g;
}

template RefPoints<1> simplex_nodes<1>(int);
template RefPoints<2> simplex_nodes<2>(int);
template RefPoints<3> simplex_nodes<3>(int);
template Eigen::MatrixXd modal_values<1>(int, const RefPoints<1>&);
template Eigen::MatrixXd modal_values<2>(int, const RefPoints<2>&);
template Eigen::MatrixXd modal_values<3>(int, const RefPoints<3>&);
template std::array<Eigen::MatrixXd, 1> modal_gradients<1>(int, const RefPoints<1>&);
template std::array<Eigen::MatrixXd, 2> modal_gradients<2>(int, const RefPoints<2>&);
template std::array<Eigen::MatrixXd, 3> modal_gradients<3>(int, const RefPoints<3>&);
template class SimplexBasis<1>;
template class SimplexBasis<2>;
template class SimplexBasis<3>;

}  // namespace ehdg
