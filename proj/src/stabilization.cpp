#include "ehdg/stabilization.hpp"

#include <cmath>

namespace ehdg {

std::string to_string(StabFamily f) {
  switch (f) {
    case StabFamily::IdentityReal: return "identity_real";
    case StabFamily::IdentityImag: return "identity_imag";
    case StabFamily::KC: return "kc";
    case StabFamily::Godunov: return "godunov";
  }
  return "unknown";
}

std::string to_string(StabSign s) { return s == StabSign::Plus ? "+" : "-"; }

StabFamily parse_family(const std::string& s) {
  if (s == "identity_real") return StabFamily::IdentityReal;
  if (s == "identity_imag") return StabFamily::IdentityImag;
  if (s == "kc") return StabFamily::KC;
  if (s == "godunov") return StabFamily::Godunov;
  throw ConfigError("unknown stabilization family '" + s + "'");
}

StabSign parse_sign(const std::string& s) {
  if (s == "+" || s == "plus") return StabSign::Plus;
  if (s == "-" || s == "minus") return StabSign::Minus;
  throw ConfigError("unknown stabilization sign '" + s + "'");
}

void validate(const StabilizationSpec& spec) {
  if (!spec.tau_auto) {
    if (!std::isfinite(spec.tau.real()) || !std::isfinite(spec.tau.imag()) ||
        std::abs(spec.tau) == 0.0)
      throw ConfigError("stabilization tau must be finite and nonzero");
  }
  if (spec.tau_auto && spec.family == StabFamily::IdentityReal)
    throw ConfigError("tau = auto is not defined for the identity_real family");
  if ((spec.family == StabFamily::KC || spec.family == StabFamily::Godunov) &&
      spec.sign == StabSign::Plus)
    throw ConfigError("family " + to_string(spec.family) + " only supports the '-' sign");
  if (!std::isfinite(spec.omega)) throw ConfigError("frequency must be finite");
}

template <int Dim>
Mat<Dim> godunov_iso(double rho, double cp, double cs, const Vec<Dim>& nu) {
  require_unit<Dim>(nu);
  return rho * (cs * Mat<Dim>::Identity() + (cp - cs) * nu * nu.transpose());
}

template <int Dim>
Mat<Dim> godunov_iso_kc_form(double rho, double cp, double cs, const Vec<Dim>& nu) {
  require_unit<Dim>(nu);
  const Mat<Dim> gamma_over_rho =
      cs * cs * Mat<Dim>::Identity() + (cp * cp - cs * cs) * nu * nu.transpose();
  return rho / (cp + cs) * (cp * cs * Mat<Dim>::Identity() + gamma_over_rho);
}

template <int Dim>
Mat<Dim> godunov_spectral(const Wavespeeds<Dim>& speeds) {
  Mat<Dim> m = Mat<Dim>::Zero();
  for (int a = 0; a < Dim; ++a) m += speeds.c(a) * speeds.w.col(a) * speeds.w.col(a).transpose();
  m *= speeds.rho;
  return 0.5 * (m + m.transpose());
}

Mat<3> godunov_aniso(double rho, const Mat<3>& gamma, const Wavespeeds<3>& speeds) {
  const double c1 = speeds.c(1), c2 = speeds.c(2), cp = speeds.c(0);
  const double gate = 1e-8 * cp;
  if (std::abs(cp - c1) < gate || std::abs(c1 - c2) < gate) return godunov_spectral<3>(speeds);
  const double sum = c1 + c2 + cp;
  const double p2 = c1 * c2 + c1 * cp + c2 * cp;
  const double g = c1 * c2 * cp / sum - p2;
  const Mat<3> inner = gamma / rho + p2 * Mat<3>::Identity();
  const Mat<3> m = rho * sum * (Mat<3>::Identity() + g * inner.inverse());
  return 0.5 * (m + m.transpose());
}

template <int Dim>
Mat<Dim> godunov_matrix(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu) {
  return godunov_spectral<Dim>(wavespeeds<Dim>(c, rho, nu));
}

template <int Dim>
cplx resolve_tau(const StabilizationSpec& spec, const Wavespeeds<Dim>& speeds) {
  if (!spec.tau_auto) return spec.tau;
  switch (spec.family) {
    case StabFamily::Godunov: return 1.0;
    case StabFamily::IdentityImag: return speeds.rho * speeds.qs_min();
    case StabFamily::KC: return 1.0 / speeds.qp();
    case StabFamily::IdentityReal: break;
  }
  throw ConfigError("tau = auto is not defined for the identity_real family");
}

template <int Dim>
Mat<Dim, cplx> stabilization_matrix(const StabilizationSpec& spec, double rho,
                                    const StiffnessVoigt<Dim>& c, const Vec<Dim>& nu) {
  const cplx i(0.0, 1.0);
  const double sgn = spec.sign == StabSign::Plus ? 1.0 : -1.0;
  const Mat<Dim, cplx> id = Mat<Dim, cplx>::Identity();
  switch (spec.family) {
    case StabFamily::IdentityReal: return sgn * spec.omega * spec.tau * id;
    case StabFamily::IdentityImag: {
      const cplx tau = spec.tau_auto ? resolve_tau<Dim>(spec, wavespeeds<Dim>(c, rho, nu)) : spec.tau;
      return sgn * i * spec.omega * tau * id;
    }
    case StabFamily::KC: {
      const cplx tau = spec.tau_auto ? resolve_tau<Dim>(spec, wavespeeds<Dim>(c, rho, nu)) : spec.tau;
      return -i * spec.omega * tau * kc_matrix<Dim>(c, nu).template cast<cplx>();
    }
    case StabFamily::Godunov: {
      const Wavespeeds<Dim> ws = wavespeeds<Dim>(c, rho, nu);
      const cplx tau = resolve_tau<Dim>(spec, ws);
      return -i * spec.omega * tau * godunov_spectral<Dim>(ws).template cast<cplx>();
    }
  }
  throw ConfigError("unsupported stabilization family");
}

#define EHDG_INSTANTIATE(D)                                                                 \
  template Mat<D> godunov_iso<D>(double, double, double, const Vec<D>&);                    \
  template Mat<D> godunov_iso_kc_form<D>(double, double, double, const Vec<D>&);            \
  template Mat<D> godunov_spectral<D>(const Wavespeeds<D>&);                                \
  template Mat<D> godunov_matrix<D>(const StiffnessVoigt<D>&, double, const Vec<D>&);       \
  template cplx resolve_tau<D>(const StabilizationSpec&, const Wavespeeds<D>&);             \
  template Mat<D, cplx> stabilization_matrix<D>(const StabilizationSpec&, double,           \
                                                const StiffnessVoigt<D>&, const Vec<D>&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
