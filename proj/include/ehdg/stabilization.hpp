#pragma once

#include <string>

#include "ehdg/material.hpp"

namespace ehdg {

enum class StabFamily { IdentityReal, IdentityImag, KC, Godunov };
enum class StabSign { Plus, Minus };

std::string to_string(StabFamily f);
std::string to_string(StabSign s);
StabFamily parse_family(const std::string& s);
StabSign parse_sign(const std::string& s);

struct StabilizationSpec {
  StabFamily family = StabFamily::Godunov;
  StabSign sign = StabSign::Minus;
  // When set, tau is resolved per face point: 1 (Godunov), rho c_qS2 (IdentityImag), 1/c_qP (KC).
  bool tau_auto = false;
  cplx tau{1.0, 0.0};
  double omega = 1.0;
};

// Throws ConfigError for non-finite or zero tau, auto tau on IdentityReal, or a "+" sign on
// the KC and Godunov families.
void validate(const StabilizationSpec& spec);

// rho (cs Id + (cp - cs) nu nu^T).
template <int Dim>
Mat<Dim> godunov_iso(double rho, double cp, double cs, const Vec<Dim>& nu);

// Equivalent form rho/(cp+cs) (cp cs Id + Gamma_iso/rho).
template <int Dim>
Mat<Dim> godunov_iso_kc_form(double rho, double cp, double cs, const Vec<Dim>& nu);

// Closed form for three distinct speeds; falls back to the spectral form when two speeds
// differ by less than 1e-8 c_qP.
Mat<3> godunov_aniso(double rho, const Mat<3>& gamma, const Wavespeeds<3>& speeds);

// rho sum_a c_a w_a w_a^T.
template <int Dim>
Mat<Dim> godunov_spectral(const Wavespeeds<Dim>& speeds);

template <int Dim>
Mat<Dim> godunov_matrix(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu);

// Resolved scaling factor for the material at one face point.
template <int Dim>
cplx resolve_tau(const StabilizationSpec& spec, const Wavespeeds<Dim>& speeds);

template <int Dim>
Mat<Dim, cplx> stabilization_matrix(const StabilizationSpec& spec, double rho,
                                    const StiffnessVoigt<Dim>& c, const Vec<Dim>& nu);

}  // namespace ehdg
