#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ehdg/basis.hpp"
#include "ehdg/quadrature.hpp"

using namespace ehdg;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b z^c over the unit simplex: a! b! c! / (a+b+c+D)!.
template <int D>
double monomial_integral(const std::array<int, 3>& p) {
  int s = 0;
  double num = 1.0;
  for (int i = 0; i < D; ++i) {
    num *= factorial(p[i]);
    s += p[i];
  }
  return num / factorial(s + D);
}

template <int D>
double quad_monomial(const SimplexQuadrature<D>& q, const std::array<int, 3>& p) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    double v = 1.0;
    for (int d = 0; d < D; ++d) v *= std::pow(q.points(d, i), p[d]);
    s += q.weights(i) * v;
  }
  return s;
}

template <int D>
RefPoints<D> random_ref_points(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RefPoints<D> pts(D, n);
  for (int i = 0; i < n; ++i) {
    Eigen::Matrix<double, D, 1> x;
    do {
      for (int d = 0; d < D; ++d) x(d) = u(rng);
    } while (x.sum() > 1.0);
    pts.col(i) = x;
  }
  return pts;
}

}  // namespace

TEST(Quadrature, KnownIntegral) {
  // int_T x^2 y = 2! 1! / 5! = 1/60.
  EXPECT_NEAR(quad_monomial(make_quadrature<2>(3), {2, 1, 0}), 1.0 / 60.0, 1e-15);
  EXPECT_NEAR(make_quadrature<2>(0).weights.sum(), 0.5, 1e-15);
  EXPECT_NEAR(make_quadrature<3>(4).weights.sum(), 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, ExactUpToDegree) {
  for (int deg = 0; deg <= 12; ++deg) {
    const auto q1 = make_quadrature<1>(deg);
    const auto q2 = make_quadrature<2>(deg);
    const auto q3 = make_quadrature<3>(deg);
    EXPECT_GE(q2.degree, deg);
    for (int a = 0; a <= deg; ++a) {
      EXPECT_NEAR(quad_monomial(q1, {a, 0, 0}), monomial_integral<1>({a, 0, 0}), 1e-14);
      for (int b = 0; a + b <= deg; ++b) {
        EXPECT_NEAR(quad_monomial(q2, {a, b, 0}), monomial_integral<2>({a, b, 0}), 1e-14);
        for (int c = 0; a + b + c <= deg; ++c)
          EXPECT_NEAR(quad_monomial(q3, {a, b, c}), monomial_integral<3>({a, b, c}), 1e-14);
      }
    }
    for (int i = 0; i < q3.size(); ++i) EXPECT_TRUE(in_reference_simplex<3>(q3.points.col(i)));
  }
}

TEST(Quadrature, GaussLobattoEndpoints) {
  const Eigen::VectorXd x = gauss_lobatto(5);
  EXPECT_DOUBLE_EQ(x(0), -1.0);
  EXPECT_DOUBLE_EQ(x(4), 1.0);
  EXPECT_NEAR(x(2), 0.0, 1e-15);
  EXPECT_NEAR(x(1), -std::sqrt(3.0 / 7.0), 1e-14);
}

TEST(Basis, DimensionCounts) {
  EXPECT_EQ(poly_dim(2, 3), 10);
  EXPECT_EQ(poly_dim(3, 3), 20);
  EXPECT_EQ(poly_dim(1, 4), 5);
  for (int k = 0; k <= 6; ++k) {
    EXPECT_EQ(SimplexBasis<2>(k).size(), poly_dim(2, k));
    EXPECT_EQ(SimplexBasis<3>(k).size(), poly_dim(3, k));
    EXPECT_EQ(SimplexBasis<1>(k).size(), k + 1);
  }
}

TEST(Basis, KroneckerAtNodesAndPartitionOfUnity) {
  std::mt19937 rng(5);
  for (int k = 1; k <= 7; ++k) {
    const SimplexBasis<2> b2(k);
    EXPECT_LT((b2.eval(b2.nodes()) - Eigen::MatrixXd::Identity(b2.size(), b2.size())).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::MatrixXd v = b2.eval(random_ref_points<2>(20, rng));
    EXPECT_LT((v.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-11);
    const SimplexBasis<3> b3(k);
    const Eigen::MatrixXd v3 = b3.eval(random_ref_points<3>(20, rng));
    EXPECT_LT((v3.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
    // Gradients of the partition of unity vanish.
    for (const auto& g : b3.grad(random_ref_points<3>(10, rng))) EXPECT_LT(g.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Basis, GradientsMatchFiniteDifferences) {
  std::mt19937 rng(6);
  const double h = 1e-6;
  for (int k : {1, 3, 5}) {
    const SimplexBasis<3> b(k);
    RefPoints<3> x = random_ref_points<3>(5, rng) * 0.8;
    x.array() += 0.05;
    const auto g = b.grad(x);
    for (int d = 0; d < 3; ++d) {
      RefPoints<3> xp = x, xm = x;
      xp.row(d).array() += h;
      xm.row(d).array() -= h;
      const Eigen::MatrixXd fd = (b.eval(xp) - b.eval(xm)) / (2 * h);
      EXPECT_LT((fd - g[d]).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, g[d].cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Basis, ReproducesPolynomials) {
  std::mt19937 rng(7);
  const int k = 4;
  const SimplexBasis<2> b(k);
  auto f = [](double x, double y) { return 1.0 - 2 * x + x * x * y * y + 3 * std::pow(y, 4); };
  Eigen::VectorXd coef(b.size());
  for (int i = 0; i < b.size(); ++i) coef(i) = f(b.nodes()(0, i), b.nodes()(1, i));
  const RefPoints<2> x = random_ref_points<2>(30, rng);
  const Eigen::VectorXd v = b.eval(x) * coef;
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(v(i), f(x(0, i), x(1, i)), 1e-12);
}

TEST(Basis, ModalBasisIsOrthogonal) {
  const auto q2 = make_quadrature<2>(10);
  const Eigen::MatrixXd v2 = modal_values<2>(5, q2.points);
  const Eigen::MatrixXd g2 = v2.transpose() * q2.weights.asDiagonal() * v2;
  EXPECT_LT((g2 - 0.25 * Eigen::MatrixXd::Identity(g2.rows(), g2.cols())).cwiseAbs().maxCoeff(), 1e-12);
  const auto q3 = make_quadrature<3>(8);
  const Eigen::MatrixXd v3 = modal_values<3>(4, q3.points);
  const Eigen::MatrixXd g3 = v3.transpose() * q3.weights.asDiagonal() * v3;
  EXPECT_LT((g3 - 0.125 * Eigen::MatrixXd::Identity(g3.rows(), g3.cols())).cwiseAbs().maxCoeff(), 1e-12);
}
