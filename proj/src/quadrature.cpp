#include "ehdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ehdg {

void gauss_jacobi(int n, double alpha, double beta, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
  const double mu0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) *
                     std::tgamma(beta + 1.0) / std::tgamma(alpha + beta + 2.0);
  if (n == 1) {
    x.resize(1);
    w.resize(1);
    x(0) = (beta - alpha) / (alpha + beta + 2.0);
    w(0) = mu0;
    return;
  }
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double h = 2.0 * i + alpha + beta;
    J(i, i) = (h == 0.0) ? (beta - alpha) / (alpha + beta + 2.0)
                         : (beta * beta - alpha * alpha) / (h * (h + 2.0));
    if (i + 1 < n) {
      const double k = i + 1.0;
      const double hk = 2.0 * k + alpha + beta;
      const double b = 2.0 / hk *
                       std::sqrt(k * (k + alpha + beta) * (k + alpha) * (k + beta) /
                                 ((hk - 1.0) * (hk + 1.0)));
      J(i, i + 1) = b;
      J(i + 1, i) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  w = mu0 * es.eigenvectors().row(0).transpose().array().square();
}

Eigen::VectorXd gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: need at least 2 points");
  Eigen::VectorXd x(n);
  x(0) = -1.0;
  x(n - 1) = 1.0;
  if (n > 2) {
    Eigen::VectorXd xi, wi;
    gauss_jacobi(n - 2, 1.0, 1.0, xi, wi);
    x.segment(1, n - 2) = xi;
  }
  return x;
}

template <int D>
SimplexQuadrature<D> make_quadrature(int degree) {
  if (degree < 0) degree = 0;
  SimplexQuadrature<D> q;
  q.degree = degree;
  const int n = degree / 2 + 1;
  if constexpr (D == 0) {
    q.points.resize(0, 1);
    q.weights = Eigen::VectorXd::Ones(1);
  } else if constexpr (D == 1) {
    Eigen::VectorXd x, w;
    gauss_jacobi(n, 0.0, 0.0, x, w);
    q.points.resize(1, n);
    q.points.row(0) = (0.5 * (x.array() + 1.0)).transpose();
    q.weights = 0.5 * w;
  } else if constexpr (D == 2) {
    Eigen::VectorXd xa, wa, xb, wb;
    gauss_jacobi(n, 0.0, 0.0, xa, wa);
    gauss_jacobi(n, 1.0, 0.0, xb, wb);
    q.points.resize(2, n * n);
    q.weights.resize(n * n);
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++p) {
        const double a = xa(i), b = xb(j);
        const double r = 0.5 * (1.0 + a) * (1.0 - b) - 1.0;
        const double s = b;
        q.points(0, p) = 0.5 * (r + 1.0);
        q.points(1, p) = 0.5 * (s + 1.0);
        q.weights(p) = wa(i) * wb(j) * 0.5 * 0.25;
      }
  } else {
    Eigen::VectorXd xa, wa, xb, wb, xc, wc;
    gauss_jacobi(n, 0.0, 0.0, xa, wa);
    gauss_jacobi(n, 1.0, 0.0, xb, wb);
    gauss_jacobi(n, 2.0, 0.0, xc, wc);
    q.points.resize(3, n * n * n);
    q.weights.resize(n * n * n);
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k, ++p) {
          const double a = xa(i), b = xb(j), c = xc(k);
          const double r = 0.25 * (1.0 + a) * (1.0 - b) * (1.0 - c) - 1.0;
          const double s = 0.5 * (1.0 + b) * (1.0 - c) - 1.0;
          const double t = c;
          q.points(0, p) = 0.5 * (r + 1.0);
          q.points(1, p) = 0.5 * (s + 1.0);
          q.points(2, p) = 0.5 * (t + 1.0);
          q.weights(p) = wa(i) * wb(j) * wc(k) * 0.5 * 0.25 * 0.125;
        }
  }
  return q;
}

template SimplexQuadrature<0> make_quadrature<0>(int);
template SimplexQuadrature<1> make_quadrature<1>(int);
template SimplexQuadrature<2> make_quadrature<2>(int);
template SimplexQuadrature<3> make_quadrature<3>(int);

}  // namespace ehdg
