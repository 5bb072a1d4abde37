#include "ehdg/analytic.hpp"

#include <cmath>

#include "ehdg/stabilization.hpp"

namespace ehdg {

WaveKind parse_wave_kind(const std::string& s) {
  if (s == "P") return WaveKind::P;
  if (s == "S") return WaveKind::S;
  if (s == "qP") return WaveKind::qP;
  if (s == "sH") return WaveKind::sH;
  throw ConfigError("unknown wave kind '" + s + "'");
}

std::string to_string(WaveKind k) {
  switch (k) {
    case WaveKind::P: return "P";
    case WaveKind::S: return "S";
    case WaveKind::qP: return "qP";
    case WaveKind::sH: return "sH";
  }
  return "?";
}

template <int Dim>
cplx Planewave<Dim>::phase(const Vec<Dim>& x) const {
  return std::exp(cplx(0.0, omega / speed * d.dot(x)));
}

template <int Dim>
Vec<Dim, cplx> Planewave<Dim>::u(const Vec<Dim>& x) const {
  return pol.template cast<cplx>() * phase(x);
}

template <int Dim>
VoigtVec<Dim, cplx> Planewave<Dim>::sigma(const Vec<Dim>& x) const {
  // grad u = i k pol d^T e, strain = sym(grad u).
  const Mat<Dim> g = 0.5 * (pol * d.transpose() + d * pol.transpose());
  const VoigtVec<Dim> eps = sym_to_voigt(g);
  const VoigtVec<Dim> s = apply_stiffness<Dim>(c.m, eps);
  return s.template cast<cplx>() * (cplx(0.0, omega / speed) * phase(x));
}

template <int Dim>
Vec<Dim, cplx> Planewave<Dim>::pde_residual(const Vec<Dim>& x) const {
  // div sigma = i k sigma d for a planewave.
  const VoigtVec<Dim, cplx> s = sigma(x);
  const Vec<Dim, cplx> div = cplx(0.0, omega / speed) * (a_dagger(d.template cast<cplx>().eval()) * s);
  return -omega * omega * rho * u(x) - div;
}

template <int Dim>
Planewave<Dim> planewave_iso(WaveKind kind, const Vec<Dim>& d, double omega, double lambda,
                             double mu, double rho, const Vec<Dim>* pol) {
  if (kind != WaveKind::P && kind != WaveKind::S) throw ConfigError("isotropic planewaves are P or S");
  if (std::abs(d.norm() - 1.0) > 1e-12) throw InputError("planewave direction must be a unit vector");
  Planewave<Dim> pw;
  pw.kind = kind;
  pw.d = d;
  pw.omega = omega;
  pw.rho = rho;
  pw.c = iso_stiffness<Dim>(lambda, mu);
  if (kind == WaveKind::P) {
    pw.speed = std::sqrt((lambda + 2.0 * mu) / rho);
    pw.pol = pol ? *pol : d;
    if ((pw.pol - pw.pol.dot(d) * d).norm() > 1e-12 * pw.pol.norm())
      throw InputError("P polarization must be parallel to the direction");
  } else {
    pw.speed = std::sqrt(mu / rho);
    if (pol) {
      pw.pol = *pol;
    } else if constexpr (Dim == 2) {
      pw.pol = Vec<Dim>(-d(1), d(0));
    } else {
      Vec<Dim> t = Vec<Dim>::Unit(1);
      if (std::abs(t.dot(d)) > 0.9) t = Vec<Dim>::Unit(0);
      pw.pol = (t - t.dot(d) * d).normalized();
    }
    if (std::abs(pw.pol.dot(d)) > 1e-12 * pw.pol.norm())
      throw InputError("S polarization must be orthogonal to the direction");
  }
  return pw;
}

double vti_qp_speed(const StiffnessVoigt<3>& c, double rho, double dx, double dz) {
  const double c11 = c.m(0, 0), c33 = c.m(2, 2), c55 = c.m(4, 4), c13 = c.m(0, 2);
  const double a = (c11 - c55) * dx * dx + (c55 - c33) * dz * dz;
  const double disc = a * a + 4.0 * (c13 + c55) * (c13 + c55) * dx * dx * dz * dz;
  return std::sqrt((c11 * dx * dx + c33 * dz * dz + c55 + std::sqrt(disc)) / (2.0 * rho));
}

double vti_sh_speed(const StiffnessVoigt<3>& c, double rho, double dx, double dz) {
  return std::sqrt((c.m(5, 5) * dx * dx + c.m(4, 4) * dz * dz) / rho);
}

template <int Dim>
Planewave<Dim> planewave_vti(WaveKind kind, const Vec<Dim>& d, double omega,
                             const StiffnessVoigt<Dim>& c, double rho) {
  if (std::abs(d.norm() - 1.0) > 1e-12) throw InputError("planewave direction must be a unit vector");
  // Axis indices of x and z and Voigt slots of xx, zz, xz, yz.
  constexpr int X = 0, Z = Dim - 1;
  constexpr int XX = 0, ZZ = Dim == 3 ? 2 : 1, XZ = Dim == 3 ? 4 : 2;
  if constexpr (Dim == 3)
    if (std::abs(d(1)) > 1e-12) throw InputError("VTI planewave direction must lie in the x-z plane");
  const double dx = d(X), dz = d(Z);
  Planewave<Dim> pw;
  pw.kind = kind;
  pw.d = d;
  pw.omega = omega;
  pw.rho = rho;
  pw.c = c;
  const double c11 = c.m(XX, XX), c33 = c.m(ZZ, ZZ), c55 = c.m(XZ, XZ), c13 = c.m(XX, ZZ);
  if (kind == WaveKind::qP) {
    const double a = (c11 - c55) * dx * dx + (c55 - c33) * dz * dz;
    const double disc = a * a + 4.0 * (c13 + c55) * (c13 + c55) * dx * dx * dz * dz;
    const double rc2 = 0.5 * (c11 * dx * dx + c33 * dz * dz + c55 + std::sqrt(disc));
    pw.speed = std::sqrt(rc2 / rho);
    const double rx = rc2 - (c55 * dx * dx + c33 * dz * dz);
    const double rz = rc2 - (c11 * dx * dx + c55 * dz * dz);
    if (rx < -1e-12 * rc2 || rz < -1e-12 * rc2) throw ParameterError("negative qP polarization radicand");
    const double g13 = (c13 + c55) * dx * dz;
    const double px = std::sqrt(std::max(rx, 0.0));
    const double pz = (g13 < 0.0 ? -1.0 : 1.0) * std::sqrt(std::max(rz, 0.0));
    pw.pol = Vec<Dim>::Zero();
    pw.pol(X) = px;
    pw.pol(Z) = pz;
    pw.pol.normalize();
    if (pw.pol.dot(d) < 0.0) pw.pol = -pw.pol;
  } else if (kind == WaveKind::sH) {
    if constexpr (Dim == 2) {
      throw ConfigError("sH planewaves are polarized out of plane and need 3D");
    } else {
      pw.speed = vti_sh_speed(c, rho, dx, dz);
      pw.pol = Vec<Dim>::Unit(1);
    }
  } else {
    throw ConfigError("VTI planewaves are qP or sH");
  }
  return pw;
}

template <int Dim>
Mat<Dim> abc_impedance(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu) {
  return godunov_matrix<Dim>(c, rho, nu);
}

template <int Dim>
Mat<Dim> abc_impedance_iso(double lambda, double mu, double rho, const Vec<Dim>& nu) {
  require_unit<Dim>(nu);
  const Mat<Dim> nn = nu * nu.transpose();
  return std::sqrt((lambda + 2.0 * mu) * rho) * nn + std::sqrt(mu * rho) * (Mat<Dim>::Identity() - nn);
}

#define EHDG_INSTANTIATE(D)                                                                      \
  template struct Planewave<D>;                                                                  \
  template Planewave<D> planewave_iso<D>(WaveKind, const Vec<D>&, double, double, double, double, \
                                         const Vec<D>*);                                         \
  template Planewave<D> planewave_vti<D>(WaveKind, const Vec<D>&, double, const StiffnessVoigt<D>&, \
                                         double);                                                \
  template Mat<D> abc_impedance<D>(const StiffnessVoigt<D>&, double, const Vec<D>&);             \
  template Mat<D> abc_impedance_iso<D>(double, double, double, const Vec<D>&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
