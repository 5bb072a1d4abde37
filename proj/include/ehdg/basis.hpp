#pragma once

#include <array>

#include <Eigen/Dense>

namespace ehdg {

template <int D>
using RefPoints = Eigen::Matrix<double, D, Eigen::Dynamic>;

// Orthonormal Jacobi polynomial P_n^{(alpha,beta)} on [-1,1] and its derivative.
Eigen::VectorXd jacobi_p(const Eigen::VectorXd& x, double alpha, double beta, int n);
Eigen::VectorXd grad_jacobi_p(const Eigen::VectorXd& x, double alpha, double beta, int n);

// Number of polynomials of total degree <= k in D variables.
constexpr int poly_dim(int D, int k) {
  int num = 1, den = 1;
  for (int i = 1; i <= D; ++i) {
    num *= (k + i);
    den *= i;
  }
  return num / den;
}

// Interpolation nodes on the unit reference simplex: Gauss-Lobatto in 1D,
// warp & blend in 2D and 3D. Order 0 returns the centroid.
template <int D>
RefPoints<D> simplex_nodes(int order);

// PKD modal basis evaluated on the unit simplex, values and reference gradients. Orthonormal
// on the biunit simplex, so the unit-simplex Gram matrix is 2^-D I.
template <int D>
Eigen::MatrixXd modal_values(int order, const RefPoints<D>& pts);
template <int D>
std::array<Eigen::MatrixXd, D> modal_gradients(int order, const RefPoints<D>& pts);

// Nodal Lagrange basis of total degree `order` on the unit simplex of dimension D.
template <int D>
class SimplexBasis {
 public:
  SimplexBasis() = default;
  explicit SimplexBasis(int order);

  int order() const { return order_; }
  int size() const { return static_cast<int>(nodes_.cols()); }
  const RefPoints<D>& nodes() const { return nodes_; }

  // (n_points x size) values.
  Eigen::MatrixXd eval(const RefPoints<D>& pts) const;
  // Per reference direction, (n_points x size) derivatives.
  std::array<Eigen::MatrixXd, D> grad(const RefPoints<D>& pts) const;

 private:
  int order_ = 0;
  RefPoints<D> nodes_;
  Eigen::MatrixXd vinv_;
};

// True when the point lies in the closed unit simplex up to tol.
template <int D>
bool in_reference_simplex(const Eigen::Matrix<double, D, 1>& xi, double tol = 1e-12) {
  return xi.minCoeff() >= -tol && xi.sum() <= 1.0 + tol;
}

}  // namespace ehdg
