#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "ehdg/errors.hpp"

namespace ehdg {

// Voigt length: 6 in 3D (xx, yy, zz, yz, xz, xy), 3 in 2D (xx, zz, xz).
template <int Dim>
inline constexpr int kVoigt = Dim == 2 ? 3 : 6;

using cplx = std::complex<double>;

template <int Dim, typename Scalar = double>
using Vec = Eigen::Matrix<Scalar, Dim, 1>;
template <int Dim, typename Scalar = double>
using Mat = Eigen::Matrix<Scalar, Dim, Dim>;
template <int Dim, typename Scalar = double>
using VoigtVec = Eigen::Matrix<Scalar, kVoigt<Dim>, 1>;
template <int Dim, typename Scalar = double>
using VoigtMat = Eigen::Matrix<Scalar, kVoigt<Dim>, kVoigt<Dim>>;
// A(xi) is Dim x kVoigt.
template <int Dim, typename Scalar = double>
using AMat = Eigen::Matrix<Scalar, Dim, kVoigt<Dim>>;

// Matrix index pairs in storage order.
template <int Dim>
constexpr std::array<std::array<int, 2>, kVoigt<Dim>> voigt_pairs() {
  if constexpr (Dim == 3)
    return {{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};
  else
    return {{{0, 0}, {1, 1}, {0, 1}}};
}

// One-based Voigt code for an axis pair. In 2D the axes are x and z.
template <int Dim = 3>
int sm_index(char a, char b) {
  auto axis = [](char c) -> int {
    if constexpr (Dim == 3) {
      switch (c) {
        case 'x': return 0;
        case 'y': return 1;
        case 'z': return 2;
      }
    } else {
      switch (c) {
        case 'x': return 0;
        case 'z': return 1;
      }
    }
    throw InputError(std::string("invalid axis label '") + c + "'");
  };
  int i = axis(a), j = axis(b);
  if (i > j) std::swap(i, j);
  constexpr auto pairs = voigt_pairs<Dim>();
  for (int I = 0; I < kVoigt<Dim>; ++I)
    if (pairs[I][0] == i && pairs[I][1] == j) return I + 1;
  throw InputError("unreachable axis pair");
}

template <int Dim>
VoigtMat<Dim> d_dagger() {
  VoigtMat<Dim> d = VoigtMat<Dim>::Identity();
  for (int I = Dim; I < kVoigt<Dim>; ++I) d(I, I) = 2.0;
  return d;
}

template <int Dim>
VoigtMat<Dim> d_dagger_inverse() {
  VoigtMat<Dim> d = VoigtMat<Dim>::Identity();
  for (int I = Dim; I < kVoigt<Dim>; ++I) d(I, I) = 0.5;
  return d;
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-12) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale) throw InputError("matrix is not symmetric");
}

template <typename Derived>
auto sym_to_voigt(const Eigen::MatrixBase<Derived>& m) {
  constexpr int Dim = Derived::RowsAtCompileTime;
  static_assert(Dim == 2 || Dim == 3);
  using Scalar = typename Derived::Scalar;
  require_symmetric(m);
  VoigtVec<Dim, Scalar> v;
  constexpr auto pairs = voigt_pairs<Dim>();
  for (int I = 0; I < kVoigt<Dim>; ++I) v(I) = m(pairs[I][0], pairs[I][1]);
  return v;
}

template <typename Derived>
auto voigt_to_sym(const Eigen::MatrixBase<Derived>& v) {
  constexpr int Dim = Derived::RowsAtCompileTime == 6 ? 3 : 2;
  static_assert(Derived::RowsAtCompileTime == kVoigt<Dim>);
  using Scalar = typename Derived::Scalar;
  Mat<Dim, Scalar> m;
  constexpr auto pairs = voigt_pairs<Dim>();
  for (int I = 0; I < kVoigt<Dim>; ++I) {
    m(pairs[I][0], pairs[I][1]) = v(I);
    m(pairs[I][1], pairs[I][0]) = v(I);
  }
  return m;
}

// a : b for Voigt vectors, a . D-dagger b (no conjugation).
template <typename DA, typename DB>
auto contract_voigt(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  constexpr int Dim = DA::RowsAtCompileTime == 6 ? 3 : 2;
  using Scalar = decltype(typename DA::Scalar() * typename DB::Scalar());
  Scalar s(0);
  for (int I = 0; I < kVoigt<Dim>; ++I) s += a(I) * b(I) * (I < Dim ? 1.0 : 2.0);
  return s;
}

template <typename DA, typename DB>
auto contract(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return contract_voigt(sym_to_voigt(a), sym_to_voigt(b));
}

// Voigt image of C chi: C-bar D-dagger chi.
template <int Dim, typename Derived>
auto apply_stiffness(const VoigtMat<Dim>& c, const Eigen::MatrixBase<Derived>& chi) {
  using Scalar = typename Derived::Scalar;
  VoigtVec<Dim, Scalar> out = c.template cast<Scalar>() * (d_dagger<Dim>().template cast<Scalar>() * chi);
  return out;
}

// D-dagger C-bar D-dagger chi.
template <int Dim, typename Derived>
auto apply_stiffness_dagger(const VoigtMat<Dim>& c, const Eigen::MatrixBase<Derived>& chi) {
  using Scalar = typename Derived::Scalar;
  VoigtVec<Dim, Scalar> out = d_dagger<Dim>().template cast<Scalar>() * apply_stiffness<Dim>(c, chi);
  return out;
}

// A(xi) = sum_I xi_I A_I.
template <typename Derived>
auto a_matrix(const Eigen::MatrixBase<Derived>& xi) {
  constexpr int Dim = Derived::RowsAtCompileTime;
  static_assert(Dim == 2 || Dim == 3);
  using Scalar = typename Derived::Scalar;
  AMat<Dim, Scalar> a = AMat<Dim, Scalar>::Zero();
  if constexpr (Dim == 3) {
    a(0, 0) = xi(0);
    a(0, 4) = 0.5 * xi(2);
    a(0, 5) = 0.5 * xi(1);
    a(1, 1) = xi(1);
    a(1, 3) = 0.5 * xi(2);
    a(1, 5) = 0.5 * xi(0);
    a(2, 2) = xi(2);
    a(2, 3) = 0.5 * xi(1);
    a(2, 4) = 0.5 * xi(0);
  } else {
    a(0, 0) = xi(0);
    a(0, 2) = 0.5 * xi(1);
    a(1, 1) = xi(1);
    a(1, 2) = 0.5 * xi(0);
  }
  return a;
}

// A-dagger(xi) = A(xi) D-dagger; A-dagger(nu) sigma-vec is the traction sigma nu.
template <typename Derived>
auto a_dagger(const Eigen::MatrixBase<Derived>& xi) {
  constexpr int Dim = Derived::RowsAtCompileTime;
  using Scalar = typename Derived::Scalar;
  AMat<Dim, Scalar> a = a_matrix(xi) * d_dagger<Dim>().template cast<Scalar>();
  return a;
}

// Elementary matrix A_d for axis d.
template <int Dim>
AMat<Dim> a_elementary(int d) {
  return a_matrix(Vec<Dim>::Unit(d).eval());
}

}  // namespace ehdg
