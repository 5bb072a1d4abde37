#pragma once

#include <string>

#include "ehdg/material.hpp"

namespace ehdg {

enum class WaveKind { P, S, qP, sH };

WaveKind parse_wave_kind(const std::string& s);
std::string to_string(WaveKind k);

// u(x) = pol exp(i omega/c d.x) in a homogeneous medium; stress from the Voigt stiffness.
template <int Dim>
struct Planewave {
  WaveKind kind = WaveKind::P;
  Vec<Dim> d = Vec<Dim>::Unit(0);
  Vec<Dim> pol = Vec<Dim>::Unit(0);
  double omega = 1.0;
  double speed = 1.0;
  double rho = 1.0;
  StiffnessVoigt<Dim> c;

  cplx phase(const Vec<Dim>& x) const;
  Vec<Dim, cplx> u(const Vec<Dim>& x) const;
  VoigtVec<Dim, cplx> sigma(const Vec<Dim>& x) const;
  // -omega^2 rho u - div sigma, from the analytic derivatives.
  Vec<Dim, cplx> pde_residual(const Vec<Dim>& x) const;
};

// P: pol defaults to d and must be parallel to it. S: pol defaults to e_y in 3D (or any unit
// vector orthogonal to d) and to d rotated by +90 degrees in the (x, z) plane in 2D.
template <int Dim>
Planewave<Dim> planewave_iso(WaveKind kind, const Vec<Dim>& d, double omega, double lambda,
                             double mu, double rho, const Vec<Dim>* pol = nullptr);

// qP or sH wave for a transversely isotropic stiffness and d in the (x, z) plane. The qP
// polarization has components sqrt(rho c^2 - Gamma_zz) and sign(Gamma_xz) sqrt(rho c^2 - Gamma_xx),
// normalized to unit length with a nonnegative d-component. sH is rejected in 2D.
template <int Dim>
Planewave<Dim> planewave_vti(WaveKind kind, const Vec<Dim>& d, double omega,
                             const StiffnessVoigt<Dim>& c, double rho);

// Closed-form qP and sH speeds for d = (dx, 0, dz).
double vti_qp_speed(const StiffnessVoigt<3>& c, double rho, double dx, double dz);
double vti_sh_speed(const StiffnessVoigt<3>& c, double rho, double dx, double dz);

// Absorbing impedance: the Godunov matrix of the boundary material.
template <int Dim>
Mat<Dim> abc_impedance(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu);

// sqrt((lambda + 2 mu) rho) nu nu^T + sqrt(mu rho) (Id - nu nu^T).
template <int Dim>
Mat<Dim> abc_impedance_iso(double lambda, double mu, double rho, const Vec<Dim>& nu);

}  // namespace ehdg
