#include "ehdg/riemann_oracle.hpp"

#include <cmath>

#include <Eigen/QR>

namespace ehdg {

template <int Dim>
FluxMat<Dim> flux_operator(const StiffnessVoigt<Dim>& c, double rho, const Vec<Dim>& nu) {
  require_unit<Dim>(nu);
  constexpr int NV = kVoigt<Dim>;
  const AMat<Dim> a = a_matrix(nu);
  FluxMat<Dim> b = FluxMat<Dim>::Zero();
  b.template block<NV, Dim>(0, NV) = -a.transpose() / rho;
  b.template block<Dim, NV>(NV, 0) = -a * d_dagger<Dim>() * c.m * d_dagger<Dim>();
  return b;
}

template <int Dim>
Vec<Dim> state_velocity(const StateVec<Dim>& q, double rho) {
  return q.template tail<Dim>() / rho;
}

template <int Dim>
Vec<Dim> state_traction(const StateVec<Dim>& q, const StiffnessVoigt<Dim>& c, const Vec<Dim>& nu) {
  const VoigtVec<Dim> sigma = apply_stiffness<Dim>(c.m, q.template head<kVoigt<Dim>>());
  return a_dagger(nu) * sigma;
}

template <int Dim>
bool distinct_speeds(const Wavespeeds<Dim>& ws) {
  const double gate = 1e-8 * ws.qp();
  for (int a = 0; a + 1 < Dim; ++a)
    if (std::abs(ws.c(a) - ws.c(a + 1)) < gate) return false;
  return true;
}

template <int Dim>
RHStates<Dim> solve_rh(const StateVec<Dim>& q_minus, const StateVec<Dim>& q_plus,
                       const Medium<Dim>& minus, const Medium<Dim>& plus, const Vec<Dim>& nu) {
  constexpr int NS = kState<Dim>;
  constexpr int NV = kVoigt<Dim>;
  const Wavespeeds<Dim> wm = wavespeeds<Dim>(minus.c, minus.rho, nu);
  const Wavespeeds<Dim> wp = wavespeeds<Dim>(plus.c, plus.rho, nu);
  if (!distinct_speeds<Dim>(wm) || !distinct_speeds<Dim>(wp))
    throw OracleError("Riemann oracle needs distinct wavespeeds on both sides");

  // Nondimensionalize with the minus-side density and qP speed.
  const double rho_ref = minus.rho, c_ref = wm.qp();
  FluxMat<Dim> s = FluxMat<Dim>::Identity();
  s.template bottomRightCorner<Dim, Dim>() /= rho_ref * c_ref;
  const FluxMat<Dim> s_inv = s.inverse();
  const FluxMat<Dim> bm = s * flux_operator<Dim>(minus.c, minus.rho, nu) * s_inv / c_ref;
  const FluxMat<Dim> bp = s * flux_operator<Dim>(plus.c, plus.rho, nu) * s_inv / c_ref;
  const StateVec<Dim> qm = s * q_minus, qp = s * q_plus;

  // Unknowns: left[1..Dim], right[0..Dim-1].
  constexpr int n_unknown = 2 * Dim;
  constexpr int n_rel = 2 * Dim + 1;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n_rel * NS, n_unknown * NS);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_rel * NS);
  const FluxMat<Dim> id = FluxMat<Dim>::Identity();
  auto left_col = [](int a) { return (a - 1) * NS; };             // a in 1..Dim
  auto right_col = [](int a) { return (Dim + a) * NS; };          // a in 0..Dim-1
  std::array<FluxMat<Dim>, 2 * Dim> ops;
  for (int a = 0; a < Dim; ++a) {
    // (B- + c_a) (left[a+1] - left[a]) = 0
    const FluxMat<Dim> op = bm + (wm.c(a) / c_ref) * id;
    ops[a] = op;
    const int row = a * NS;
    sys.block(row, left_col(a + 1), NS, NS) += op;
    if (a == 0)
      rhs.segment(row, NS) += op * qm;
    else
      sys.block(row, left_col(a), NS, NS) -= op;
  }
  for (int a = 0; a < Dim; ++a) {
    // (B+ - c_{Dim-1-a}) (right[a+1] - right[a]) = 0
    const FluxMat<Dim> op = bp - (wp.c(Dim - 1 - a) / c_ref) * id;
    ops[Dim + a] = op;
    const int row = (Dim + a) * NS;
    if (a + 1 == Dim)
      rhs.segment(row, NS) -= op * qp;
    else
      sys.block(row, right_col(a + 1), NS, NS) += op;
    sys.block(row, right_col(a), NS, NS) -= op;
  }
  {
    // B- q*- = B+ q*+
    const int row = 2 * Dim * NS;
    sys.block(row, left_col(Dim), NS, NS) += bm;
    sys.block(row, right_col(0), NS, NS) -= bp;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys);
  qr.setThreshold(1e-12);
  if (qr.rank() < n_unknown * NS) throw OracleError("Rankine-Hugoniot system is singular");
  const Eigen::VectorXd x = qr.solve(rhs);

  RHStates<Dim> out;
  std::array<StateVec<Dim>, Dim + 1> l, r;
  l[0] = qm;
  for (int a = 1; a <= Dim; ++a) l[a] = x.segment(left_col(a), NS);
  for (int a = 0; a < Dim; ++a) r[a] = x.segment(right_col(a), NS);
  r[Dim] = qp;

  const double scale = std::max(qm.norm() + qp.norm(), 1e-300);
  double res = (bm * l[Dim] - bp * r[0]).norm();
  for (int a = 0; a < Dim; ++a) {
    res = std::max(res, (ops[a] * (l[a + 1] - l[a])).norm());
    res = std::max(res, (ops[Dim + a] * (r[a + 1] - r[a])).norm());
  }
  out.max_residual = res / scale;
  for (int a = 0; a <= Dim; ++a) {
    out.left[a] = s_inv * l[a];
    out.right[a] = s_inv * r[a];
  }
  out.left[0] = q_minus;
  out.right[Dim] = q_plus;
  if (out.max_residual > 1e-10) throw OracleError("Rankine-Hugoniot residual above tolerance");
  return out;
}

template <int Dim>
Mat<Dim> oracle_godunov_matrix(const Medium<Dim>& medium, const Vec<Dim>& nu) {
  Mat<Dim> dv, dt;
  const StateVec<Dim> q_minus = StateVec<Dim>::Zero();
  for (int j = 0; j < Dim; ++j) {
    StateVec<Dim> q_plus = StateVec<Dim>::Zero();
    q_plus(kVoigt<Dim> + j) = medium.rho;
    const RHStates<Dim> st = solve_rh<Dim>(q_minus, q_plus, medium, medium, nu);
    const StateVec<Dim>& star = st.left[Dim];
    dv.col(j) = state_velocity<Dim>(star, medium.rho) - state_velocity<Dim>(q_minus, medium.rho);
    dt.col(j) = state_traction<Dim>(star, medium.c, nu) - state_traction<Dim>(q_minus, medium.c, nu);
  }
  return dt * dv.inverse();
}

#define EHDG_INSTANTIATE(D)                                                                   \
  template FluxMat<D> flux_operator<D>(const StiffnessVoigt<D>&, double, const Vec<D>&);      \
  template Vec<D> state_velocity<D>(const StateVec<D>&, double);                              \
  template Vec<D> state_traction<D>(const StateVec<D>&, const StiffnessVoigt<D>&,             \
                                    const Vec<D>&);                                           \
  template bool distinct_speeds<D>(const Wavespeeds<D>&);                                     \
  template RHStates<D> solve_rh<D>(const StateVec<D>&, const StateVec<D>&, const Medium<D>&,  \
                                   const Medium<D>&, const Vec<D>&);                          \
  template Mat<D> oracle_godunov_matrix<D>(const Medium<D>&, const Vec<D>&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
