#include "ehdg/material.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace ehdg {

template <int Dim>
void require_spd(const StiffnessVoigt<Dim>& c) {
  const VoigtMat<Dim> dcd = d_dagger<Dim>() * c.m * d_dagger<Dim>();
  if ((dcd - dcd.transpose()).cwiseAbs().maxCoeff() > 1e-12 * dcd.cwiseAbs().maxCoeff())
    throw ParameterError("stiffness is not symmetric");
  Eigen::LLT<VoigtMat<Dim>> llt(dcd);
  if (llt.info() != Eigen::Success) throw ParameterError("stiffness is not positive definite");
  Eigen::SelfAdjointEigenSolver<VoigtMat<Dim>> es(dcd, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw ParameterError("stiffness is not positive definite");
}

template <int Dim>
void require_unit(const Vec<Dim>& nu) {
  if (std::abs(nu.norm() - 1.0) > 1e-12) throw InputError("direction is not a unit vector");
}

template <int Dim>
StiffnessVoigt<Dim> iso_stiffness(double lambda, double mu) {
  if (!(mu > 0.0)) throw ParameterError("shear modulus must be positive");
  const double bulk_like = Dim == 3 ? lambda + 2.0 * mu / 3.0 : lambda + mu;
  if (!(bulk_like > 0.0)) throw ParameterError("isotropic moduli are not positive definite");
  StiffnessVoigt<Dim> c;
  c.m.template topLeftCorner<Dim, Dim>().setConstant(lambda);
  for (int i = 0; i < Dim; ++i) c.m(i, i) = lambda + 2.0 * mu;
  for (int I = Dim; I < kVoigt<Dim>; ++I) c.m(I, I) = mu;
  return c;
}

template <int Dim>
StiffnessVoigt<Dim> iso_stiffness_from_speeds(double cp, double cs, double rho) {
  if (!(rho > 0.0) || !(cs > 0.0) || !(cp > cs)) throw ParameterError("invalid wavespeeds");
  const double mu = rho * cs * cs;
  return iso_stiffness<Dim>(rho * cp * cp - 2.0 * mu, mu);
}

template <int Dim>
ComplianceVoigt<Dim> iso_compliance(double lambda, double mu) {
  if constexpr (Dim == 3) {
    iso_stiffness<3>(lambda, mu);  // parameter validation
    const double e = (3.0 * lambda + 2.0 * mu) * mu / (lambda + mu);
    const double nu = lambda / (2.0 * (lambda + mu));
    ComplianceVoigt<3> s;
    s.m.topLeftCorner<3, 3>().setConstant(-nu / e);
    for (int i = 0; i < 3; ++i) s.m(i, i) = 1.0 / e;
    for (int I = 3; I < 6; ++I) s.m(I, I) = 1.0 / (4.0 * mu);
    return s;
  } else {
    return compliance_from_stiffness<2>(iso_stiffness<2>(lambda, mu));
  }
}

StiffnessVoigt<3> vti_stiffness(double c11, double c33, double c44, double c66, double c13) {
  StiffnessVoigt<3> c;
  c.m(0, 0) = c11;
  c.m(1, 1) = c11;
  c.m(2, 2) = c33;
  c.m(0, 1) = c.m(1, 0) = c11 - 2.0 * c66;
  c.m(0, 2) = c.m(2, 0) = c13;
  c.m(1, 2) = c.m(2, 1) = c13;
  c.m(3, 3) = c44;
  c.m(4, 4) = c44;
  c.m(5, 5) = c66;
  require_spd(c);
  return c;
}

StiffnessVoigt<3> thomsen_to_vti(double vp0, double vs0, double rho, double eps, double delta,
                                 double gamma) {
  if (!(rho > 0.0) || !(vs0 > 0.0) || !(vp0 > vs0))
    throw ParameterError("Thomsen conversion needs vp0 > vs0 > 0 and rho > 0");
  const double c33 = rho * vp0 * vp0;
  const double c44 = rho * vs0 * vs0;
  const double c11 = c33 * (1.0 + 2.0 * eps);
  const double c66 = c44 * (1.0 + 2.0 * gamma);
  const double radicand = 2.0 * c33 * (c33 - c44) * delta + (c33 - c44) * (c33 - c44);
  if (radicand < 0.0) throw ParameterError("Thomsen delta gives a negative C13 radicand");
  const double c13 = std::sqrt(radicand) - c44;
  return vti_stiffness(c11, c33, c44, c66, c13);
}

template <int Dim>
StiffnessVoigt<Dim> restrict_to_dim(const StiffnessVoigt<3>& c) {
  if constexpr (Dim == 3) {
    return c;
  } else {
    // (xx, zz, xz) are 3D slots 0, 2, 4.
    const int idx[3] = {0, 2, 4};
    StiffnessVoigt<2> out;
    for (int I = 0; I < 3; ++I)
      for (int J = 0; J < 3; ++J) out.m(I, J) = c.m(idx[I], idx[J]);
    return out;
  }
}

template <int Dim>
Mat<Dim> rotation_y(double theta) {
  const double co = std::cos(theta), si = std::sin(theta);
  Mat<Dim> r;
  if constexpr (Dim == 3)
    r << co, 0.0, si, 0.0, 1.0, 0.0, -si, 0.0, co;
  else
    r << co, si, -si, co;
  return r;
}

template <int Dim>
VoigtMat<Dim> bond_matrix(const Mat<Dim>& r) {
  VoigtMat<Dim> m;
  for (int J = 0; J < kVoigt<Dim>; ++J) {
    const Mat<Dim> e = voigt_to_sym(VoigtVec<Dim>::Unit(J).eval());
    m.col(J) = sym_to_voigt((r * e * r.transpose()).eval());
  }
  return m;
}

template <int Dim>
StiffnessVoigt<Dim> rotate_tti(const StiffnessVoigt<Dim>& c, double theta) {
  const VoigtMat<Dim> m = bond_matrix<Dim>(rotation_y<Dim>(theta));
  StiffnessVoigt<Dim> out;
  out.m = m * c.m * m.transpose();
  out.m = 0.5 * (out.m + out.m.transpose()).eval();
  return out;
}

template <int Dim>
ComplianceVoigt<Dim> compliance_from_stiffness(const StiffnessVoigt<Dim>& c) {
  const VoigtMat<Dim> dcd = d_dagger<Dim>() * c.m * d_dagger<Dim>();
  Eigen::LLT<VoigtMat<Dim>> llt(dcd);
  if (llt.info() != Eigen::Success) throw ParameterError("stiffness is not positive definite");
  ComplianceVoigt<Dim> s;
  s.m = llt.solve(VoigtMat<Dim>::Identity());
  s.m = 0.5 * (s.m + s.m.transpose()).eval();
  return s;
}

template <int Dim>
StiffnessVoigt<Dim> stiffness_from_compliance(const ComplianceVoigt<Dim>& s) {
  const VoigtMat<Dim> dsd = d_dagger<Dim>() * s.m * d_dagger<Dim>();
  Eigen::LLT<VoigtMat<Dim>> llt(dsd);
  if (llt.info() != Eigen::Success) throw ParameterError("compliance is not positive definite");
  StiffnessVoigt<Dim> c;
  c.m = llt.solve(VoigtMat<Dim>::Identity());
  c.m = 0.5 * (c.m + c.m.transpose()).eval();
  return c;
}

template <int Dim>
Mat<Dim> kc_matrix(const StiffnessVoigt<Dim>& c, const Vec<Dim>& nu) {
  require_unit<Dim>(nu);
  const AMat<Dim> ad = a_dagger(nu);
  Mat<Dim> g = ad * c.m * ad.transpose();
  return 0.5 * (g + g.transpose());
}

template <int Dim>
Wavespeeds<Dim> wavespeeds(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu) {
  if (!(rho > 0.0)) throw ParameterError("density must be positive");
  const Mat<Dim> g = kc_matrix<Dim>(c, nu);
  Eigen::SelfAdjointEigenSolver<Mat<Dim>> es(g);
  Wavespeeds<Dim> out;
  out.rho = rho;
  for (int a = 0; a < Dim; ++a) {
    const int src = Dim - 1 - a;
    out.c(a) = std::sqrt(std::max(es.eigenvalues()(src), 0.0) / rho);
    out.w.col(a) = es.eigenvectors().col(src);
  }
  return out;
}

#define EHDG_INSTANTIATE(D)                                                              \
  template void require_spd<D>(const StiffnessVoigt<D>&);                                \
  template void require_unit<D>(const Vec<D>&);                                          \
  template StiffnessVoigt<D> iso_stiffness<D>(double, double);                           \
  template StiffnessVoigt<D> iso_stiffness_from_speeds<D>(double, double, double);       \
  template ComplianceVoigt<D> iso_compliance<D>(double, double);                         \
  template StiffnessVoigt<D> restrict_to_dim<D>(const StiffnessVoigt<3>&);               \
  template Mat<D> rotation_y<D>(double);                                                 \
  template VoigtMat<D> bond_matrix<D>(const Mat<D>&);                                    \
  template StiffnessVoigt<D> rotate_tti<D>(const StiffnessVoigt<D>&, double);            \
  template ComplianceVoigt<D> compliance_from_stiffness<D>(const StiffnessVoigt<D>&);    \
  template StiffnessVoigt<D> stiffness_from_compliance<D>(const ComplianceVoigt<D>&);    \
  template Mat<D> kc_matrix<D>(const StiffnessVoigt<D>&, const Vec<D>&);                 \
  template Wavespeeds<D> wavespeeds<D>(const StiffnessVoigt<D>&, double, const Vec<D>&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
