#pragma once

#include <Eigen/Dense>

namespace ehdg {

// Gauss-Jacobi points and weights on [-1,1] for weight (1-x)^alpha (1+x)^beta, n points.
void gauss_jacobi(int n, double alpha, double beta, Eigen::VectorXd& x, Eigen::VectorXd& w);

// Gauss-Lobatto-Jacobi points (alpha=beta=0 gives LGL), n >= 2 points.
Eigen::VectorXd gauss_lobatto(int n);

// Rule on the unit reference simplex {xi >= 0, sum xi <= 1} of dimension D (0..3).
// Weights sum to 1/D!.
template <int D>
struct SimplexQuadrature {
  Eigen::Matrix<double, D, Eigen::Dynamic> points;
  Eigen::VectorXd weights;
  int degree = 0;
  int size() const { return static_cast<int>(weights.size()); }
};

// Collapsed-coordinate Gauss-Jacobi rule exact for polynomials of total degree <= degree.
template <int D>
SimplexQuadrature<D> make_quadrature(int degree);

}  // namespace ehdg
