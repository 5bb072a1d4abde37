#pragma once

#include "ehdg/voigt.hpp"

namespace ehdg {

// Voigt stiffness C-bar (c_IJ = c_{ij kl} with Voigt pairs); density is kept separately.
template <int Dim>
struct StiffnessVoigt {
  VoigtMat<Dim> m = VoigtMat<Dim>::Zero();
};

// Voigt compliance S-bar = (D C-bar D)^-1.
template <int Dim>
struct ComplianceVoigt {
  VoigtMat<Dim> m = VoigtMat<Dim>::Zero();
};

template <int Dim>
struct Medium {
  double rho = 1.0;
  StiffnessVoigt<Dim> c;
};

// Speeds sorted descending (qP, qS1, qS2); columns of w are the matching unit polarizations.
template <int Dim>
struct Wavespeeds {
  double rho = 1.0;
  Vec<Dim> c = Vec<Dim>::Zero();
  Mat<Dim> w = Mat<Dim>::Identity();
  double qp() const { return c(0); }
  double qs_min() const { return c(Dim - 1); }
};

template <int Dim>
StiffnessVoigt<Dim> iso_stiffness(double lambda, double mu);

// Lame parameters from P/S speeds: mu = rho cs^2, lambda = rho cp^2 - 2 mu.
template <int Dim>
StiffnessVoigt<Dim> iso_stiffness_from_speeds(double cp, double cs, double rho);

// Closed form in 3D; in 2D the plane-strain inverse.
template <int Dim>
ComplianceVoigt<Dim> iso_compliance(double lambda, double mu);

StiffnessVoigt<3> vti_stiffness(double c11, double c33, double c44, double c66, double c13);

StiffnessVoigt<3> thomsen_to_vti(double vp0, double vs0, double rho, double eps, double delta,
                                 double gamma);

// Plane-strain reduction to the (x, z) plane; identity for Dim == 3.
template <int Dim>
StiffnessVoigt<Dim> restrict_to_dim(const StiffnessVoigt<3>& c);

// Rotation about the y-axis: R = [[cos, 0, sin], [0, 1, 0], [-sin, 0, cos]].
template <int Dim>
Mat<Dim> rotation_y(double theta);

// Stress-Voigt transformation of R (sigma' = R sigma R^T in Voigt form).
template <int Dim>
VoigtMat<Dim> bond_matrix(const Mat<Dim>& r);

// C' = M C M^T with M the Bond matrix of rotation_y(theta).
template <int Dim>
StiffnessVoigt<Dim> rotate_tti(const StiffnessVoigt<Dim>& c, double theta);

template <int Dim>
ComplianceVoigt<Dim> compliance_from_stiffness(const StiffnessVoigt<Dim>& c);

template <int Dim>
StiffnessVoigt<Dim> stiffness_from_compliance(const ComplianceVoigt<Dim>& s);

// Gamma(nu) = A(nu) D C D A(nu)^T.
template <int Dim>
Mat<Dim> kc_matrix(const StiffnessVoigt<Dim>& c, const Vec<Dim>& nu);

template <int Dim>
Wavespeeds<Dim> wavespeeds(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu);

// Throws ParameterError unless D C D is symmetric positive definite.
template <int Dim>
void require_spd(const StiffnessVoigt<Dim>& c);

// Throws InputError unless |nu| = 1 within 1e-12.
template <int Dim>
void require_unit(const Vec<Dim>& nu);

}  // namespace ehdg
