#include <cmath>

#include "ehdg/hdg.hpp"

namespace ehdg {

namespace {

// P^T diag(w) Q for real tables and complex weights.
MatrixXc weighted(const Eigen::MatrixXd& p, const VectorXc& w, const Eigen::MatrixXd& q) {
  const Eigen::MatrixXd re = p.transpose() * w.real().asDiagonal() * q;
  const Eigen::MatrixXd im = p.transpose() * w.imag().asDiagonal() * q;
  MatrixXc out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

// Real times complex, without promoting the real factor.
MatrixXc real_times(const Eigen::MatrixXd& a, const MatrixXc& x) {
  MatrixXc out(a.rows(), x.cols());
  out.real() = a * x.real();
  out.imag() = a * x.imag();
  return out;
}

template <int Dim>
bool barycentric_inside(const Mesh<Dim>& mesh, int e, const Vec<Dim>& x, double tol) {
  const Vec<Dim> xi = mesh.jacobian(e).inverse() * (x - mesh.vertex(mesh.element(e)[0]));
  return in_reference_simplex<Dim>(xi, tol);
}

}  // namespace

template <int Dim>
SourceMap<Dim> locate_sources(const Problem<Dim>& p) {
  SourceMap<Dim> map;
  map.point.resize(p.mesh->num_elements());
  for (const PointSource<Dim>& s : p.sources) {
    std::vector<int> owners;
    for (int e = 0; e < p.mesh->num_elements(); ++e)
      if (barycentric_inside(*p.mesh, e, s.position, 1e-10)) owners.push_back(e);
    if (owners.empty()) throw InputError("point source lies outside the mesh");
    // A source on a shared vertex or face is split equally among the owners.
    const Vec<Dim, cplx> amp = s.amplitude * s.polarization.template cast<cplx>() / double(owners.size());
    for (int e : owners) map.point[e].emplace_back(s.position, amp);
  }
  return map;
}

template <int Dim>
LocalBlocks assemble_local(const Problem<Dim>& p, const ReferenceElement<Dim>& ref,
                           const SourceMap<Dim>& src, int e) {
  constexpr int NV = kVoigt<Dim>;
  const Mesh<Dim>& mesh = *p.mesh;
  const MaterialField<Dim>& field = *p.material;
  const int m = ref.m(), nh = ref.n_hat(), nf = Dim + 1;
  const int nw = (Dim + NV) * m, nl = nf * Dim * nh;
  const double omega = p.omega();
  const cplx iw(0.0, omega);

  const Mat<Dim> jac = mesh.jacobian(e);
  const Mat<Dim> jinv = jac.inverse();
  const double det = std::abs(jac.determinant());
  const Vec<Dim> x0 = mesh.vertex(mesh.element(e)[0]);

  LocalBlocks b;
  b.a = MatrixXc::Zero(nw, nw);
  b.d = MatrixXc::Zero(nw, nl);
  b.b = MatrixXc::Zero(nl, nw);
  b.l = MatrixXc::Zero(nl, nl);
  b.s_vol = VectorXc::Zero(nw);
  b.s_trace = VectorXc::Zero(nl);
  b.n_u = Dim * m;

  // Volume terms.
  const int nq = ref.vq.size();
  const Eigen::VectorXd w = ref.vq.weights * det;
  Eigen::VectorXd rho_w(nq);
  std::vector<VoigtMat<Dim>> dsd(nq);
  const VoigtMat<Dim> dd = d_dagger<Dim>();
  for (int q = 0; q < nq; ++q) {
    const MaterialPoint<Dim> mp = field.eval_values(e, ref.vmat.row(q));
    require_spd_point(mp, e, (x0 + jac * ref.vq.points.col(q)).eval());
    rho_w(q) = w(q) * mp.rho;
    dsd[q] = dd * mp.s.m * dd;
  }
  const Eigen::MatrixXd mu = ref.vphi.transpose() * rho_w.asDiagonal() * ref.vphi;
  for (int i = 0; i < Dim; ++i) b.a.block(i * m, i * m, m, m).real() = -omega * omega * mu;

  Eigen::VectorXd ws(nq);
  for (int i = 0; i < NV; ++i)
    for (int j = i; j < NV; ++j) {
      for (int q = 0; q < nq; ++q) ws(q) = w(q) * dsd[q](i, j);
      const Eigen::MatrixXd ms = ref.vphi.transpose() * ws.asDiagonal() * ref.vphi;
      b.a.block((Dim + i) * m, (Dim + j) * m, m, m).real() = -ms;
      if (j != i) b.a.block((Dim + j) * m, (Dim + i) * m, m, m).real() = -ms.transpose();
    }

  // K_sigma[I, J] = sum_d (A-dagger_d)_{IJ} int phi d_d psi; K_u is its transpose.
  std::array<Eigen::MatrixXd, Dim> qd;
  for (int d = 0; d < Dim; ++d) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nq, m);
    for (int r = 0; r < Dim; ++r) g += jinv(r, d) * ref.vgrad[r];
    qd[d] = ref.vphi.transpose() * w.asDiagonal() * g;
  }
  for (int d = 0; d < Dim; ++d) {
    const AMat<Dim> ad = a_elementary<Dim>(d) * dd;
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < NV; ++j) {
        if (ad(i, j) == 0.0) continue;
        b.a.block(i * m, (Dim + j) * m, m, m).real() -= ad(i, j) * qd[d];
        b.a.block((Dim + j) * m, i * m, m, m).real() -= ad(i, j) * qd[d].transpose();
      }
  }

  if (p.body_force) {
    for (int q = 0; q < nq; ++q) {
      const Vec<Dim, cplx> f = p.body_force((x0 + jac * ref.vq.points.col(q)).eval());
      for (int i = 0; i < Dim; ++i)
        b.s_vol.segment(i * m, m) += (w(q) * f(i)) * ref.vphi.row(q).transpose().template cast<cplx>();
    }
  }
  for (const auto& [y, amp] : src.point[e]) {
    RefPoints<Dim> xi = jinv * (y - x0);
    const Eigen::RowVectorXd phi = ref.vol.eval(xi).row(0);
    for (int i = 0; i < Dim; ++i) b.s_vol.segment(i * m, m) += amp(i) * phi.transpose().template cast<cplx>();
  }

  // Face terms.
  const int nfq = ref.fq.size();
  const double face_scale = Dim == 3 ? 2.0 : 1.0;
  VectorXc wt(nfq);
  for (int l = 0; l < nf; ++l) {
    const int k = mesh.element_face(e, l);
    const auto& face = mesh.face(k);
    const BoundaryTag tag = face.tag;
    const bool dirichlet = tag == BoundaryTag::Dirichlet;
    const auto& table = ref.face(mesh.face_local_order(e, l));
    const Eigen::VectorXd fw = ref.fq.weights * (mesh.face_measure(k) * face_scale);
    const Vec<Dim> nu = mesh.normal(e, l);
    const AMat<Dim> adn = a_dagger(nu);

    std::vector<Mat<Dim, cplx>> tau(nfq), z(nfq);
    for (int q = 0; q < nfq; ++q) {
      const MaterialPoint<Dim> mp = field.eval_values(e, table.mat.row(q));
      const StiffnessVoigt<Dim> c = stiffness_from_compliance<Dim>(mp.s);
      tau[q] = stabilization_matrix<Dim>(p.stab, mp.rho, c, nu);
      if (tag == BoundaryTag::Robin) z[q] = godunov_matrix<Dim>(c, mp.rho, nu).template cast<cplx>();
    }

    const Eigen::MatrixXd& phi = table.phi;
    const Eigen::MatrixXd& xi = ref.fxi;
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) {
        for (int q = 0; q < nfq; ++q) wt(q) = fw(q) * tau[q](i, j);
        b.a.block(i * m, j * m, m, m) += weighted(phi, wt, phi);
        const MatrixXc dm = weighted(phi, wt, xi);
        b.d.block(i * m, (l * Dim + j) * nh, m, nh) = -dm;
        if (!dirichlet) b.b.block((l * Dim + i) * nh, j * m, nh, m) = -dm.transpose();
        if (tag == BoundaryTag::Robin)
          for (int q = 0; q < nfq; ++q) wt(q) -= iw * fw(q) * z[q](i, j);
        if (!dirichlet) b.l.block((l * Dim + i) * nh, (l * Dim + j) * nh, nh, nh) = weighted(xi, wt, xi);
      }
    if (dirichlet)
      for (int i = 0; i < Dim; ++i)
        b.l.block((l * Dim + i) * nh, (l * Dim + i) * nh, nh, nh).real() =
            xi.transpose() * fw.asDiagonal() * xi;

    const Eigen::MatrixXd ef = phi.transpose() * fw.asDiagonal() * xi;
    for (int jv = 0; jv < NV; ++jv)
      for (int i = 0; i < Dim; ++i) {
        if (adn(i, jv) == 0.0) continue;
        b.d.block((Dim + jv) * m, (l * Dim + i) * nh, m, nh).real() += adn(i, jv) * ef;
        if (!dirichlet) b.b.block((l * Dim + i) * nh, (Dim + jv) * m, nh, m).real() += adn(i, jv) * ef.transpose();
      }

    if (dirichlet && p.dirichlet) {
      for (int q = 0; q < nfq; ++q) {
        const Vec<Dim, cplx> g = p.dirichlet((x0 + jac * table.ref.col(q)).eval());
        for (int i = 0; i < Dim; ++i)
          b.s_trace.segment((l * Dim + i) * nh, nh) += (fw(q) * g(i)) * xi.row(q).transpose().template cast<cplx>();
      }
    }
  }
  return b;
}

LocalSolver::LocalSolver(const LocalBlocks& blocks, int e) {
  const MatrixXc& a = blocks.a;
  const int n = a.rows();
  nu_ = blocks.n_u;
  if (nu_ > 0 && nu_ < n) {
    const int ns = n - nu_;
    const bool real_coupling = a.bottomRows(ns).imag().cwiseAbs().maxCoeff() == 0.0 &&
                               a.topRightCorner(nu_, ns).imag().cwiseAbs().maxCoeff() == 0.0;
    if (real_coupling) {
      ss_.compute(-a.bottomRightCorner(ns, ns).real());
      if (ss_.info() != Eigen::Success)
        throw AssemblyError("stress block is not definite in element " + std::to_string(e));
      g_ = ss_.solve(Eigen::MatrixXd(a.bottomLeftCorner(ns, nu_).real()));
      a_us_ = a.topRightCorner(nu_, ns).real();
      lu_.compute(a.topLeftCorner(nu_, nu_) + real_times(a_us_, g_.template cast<cplx>()));
    } else {
      nu_ = 0;
    }
  } else {
    nu_ = 0;
  }
  if (nu_ == 0) lu_.compute(a);
  if (!(lu_.rcond() > 0.0) || !std::isfinite(lu_.rcond()))
    throw AssemblyError("singular local matrix in element " + std::to_string(e));
}

MatrixXc LocalSolver::solve(const MatrixXc& rhs) const {
  if (nu_ == 0) return lu_.solve(rhs);
  const int ns = rhs.rows() - nu_;
  MatrixXc y(ns, rhs.cols());
  y.real() = ss_.solve(Eigen::MatrixXd(rhs.bottomRows(ns).real()));
  y.imag() = ss_.solve(Eigen::MatrixXd(rhs.bottomRows(ns).imag()));
  MatrixXc x(rhs.rows(), rhs.cols());
  x.topRows(nu_) = lu_.solve(rhs.topRows(nu_) + real_times(a_us_, y));
  x.bottomRows(ns) = real_times(g_, x.topRows(nu_)) - y;
  return x;
}

Condensed condense(const LocalBlocks& blocks, int e) {
  const LocalSolver solver(blocks, e);
  MatrixXc rhs(blocks.a.rows(), blocks.d.cols() + 1);
  rhs << blocks.d, blocks.s_vol;
  const MatrixXc x = solver.solve(rhs);
  if (!x.allFinite()) throw AssemblyError("singular local matrix in element " + std::to_string(e));
  Condensed c;
  c.a_inv_d = x.leftCols(blocks.d.cols());
  c.a_inv_s = x.col(blocks.d.cols());
  c.k = blocks.l - blocks.b * c.a_inv_d;
  c.rhs = blocks.s_trace - blocks.b * c.a_inv_s;
  return c;
}

template <int Dim>
int global_trace_index(const Mesh<Dim>& mesh, int e, int l, int comp, int j, int n_hat) {
  return (mesh.element_face(e, l) * Dim + comp) * n_hat + j;
}

#define EHDG_INSTANTIATE(D)                                                                     \
  template SourceMap<D> locate_sources<D>(const Problem<D>&);                                   \
  template LocalBlocks assemble_local<D>(const Problem<D>&, const ReferenceElement<D>&,         \
                                         const SourceMap<D>&, int);                             \
  template int global_trace_index<D>(const Mesh<D>&, int, int, int, int, int);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
