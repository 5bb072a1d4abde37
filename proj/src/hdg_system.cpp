#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "ehdg/hdg.hpp"
#include "ehdg/parallel.hpp"

#ifdef EHDG_HAVE_UMFPACK
#include <umfpack.h>
#endif

namespace ehdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Faces sharing an element with each face, sorted.
template <int Dim>
std::vector<std::vector<int>> face_neighbours(const Mesh<Dim>& mesh) {
  std::vector<std::vector<int>> nb(mesh.num_faces());
  for (int k = 0; k < mesh.num_faces(); ++k) {
    for (const auto& side : mesh.face(k).side) {
      if (side.elem < 0) continue;
      for (int l = 0; l <= Dim; ++l) nb[k].push_back(mesh.element_face(side.elem, l));
    }
    std::sort(nb[k].begin(), nb[k].end());
    nb[k].erase(std::unique(nb[k].begin(), nb[k].end()), nb[k].end());
  }
  return nb;
}

#ifdef EHDG_HAVE_UMFPACK
class UmfpackLU {
 public:
  // 64-bit indices: the order-7 factors exceed the 32-bit interface's memory limit.
  explicit UmfpackLU(const SparseC& a)
      : outer_(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1),
        inner_(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros()),
        ax_(reinterpret_cast<const double*>(a.valuePtr())) {
    umfpack_zl_defaults(control_);
    const SuiteSparse_long n = a.rows();
    SuiteSparse_long status = umfpack_zl_symbolic(n, n, outer_.data(), inner_.data(), ax_, nullptr,
                                                  &symbolic_, control_, info_);
    if (status != UMFPACK_OK) fail("sparse LU symbolic analysis failed", status);
    status = umfpack_zl_numeric(outer_.data(), inner_.data(), ax_, nullptr, symbolic_, &numeric_,
                                control_, info_);
    if (status != UMFPACK_OK) fail("sparse LU factorization failed", status);
  }
  ~UmfpackLU() {
    if (numeric_) umfpack_zl_free_numeric(&numeric_);
    if (symbolic_) umfpack_zl_free_symbolic(&symbolic_);
  }
  UmfpackLU(const UmfpackLU&) = delete;
  UmfpackLU& operator=(const UmfpackLU&) = delete;

  VectorXc solve(const VectorXc& b) const {
    VectorXc x(b.size());
    double info[UMFPACK_INFO];
    const SuiteSparse_long status = umfpack_zl_solve(
        UMFPACK_A, outer_.data(), inner_.data(), ax_, nullptr, reinterpret_cast<double*>(x.data()),
        nullptr, reinterpret_cast<const double*>(b.data()), nullptr, numeric_, control_, info);
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
      fail("sparse LU solve failed", status);
    return x;
  }
  double rcond() const { return info_[UMFPACK_RCOND]; }
  static const char* name() { return "umfpack"; }

 private:
  [[noreturn]] void fail(const char* what, SuiteSparse_long status) const {
    std::ostringstream os;
    os << what << " (status " << status;
    if (status == UMFPACK_ERROR_out_of_memory) os << ", out of memory";
    if (status == UMFPACK_WARNING_singular_matrix) os << ", singular matrix";
    os << ", reciprocal condition estimate " << info_[UMFPACK_RCOND] << ")";
    throw SolverError(os.str());
  }

  std::vector<SuiteSparse_long> outer_, inner_;
  const double* ax_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  double control_[UMFPACK_CONTROL];
  double info_[UMFPACK_INFO];
};
using GlobalLU = UmfpackLU;
#else
class EigenLU {
 public:
  explicit EigenLU(const SparseC& a) {
    lu_.analyzePattern(a);
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu_.lastErrorMessage());
  }
  VectorXc solve(const VectorXc& b) const { return lu_.solve(b); }
  double rcond() const { return std::nan(""); }
  static const char* name() { return "eigen-sparselu"; }

 private:
  Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>> lu_;
};
using GlobalLU = EigenLU;
#endif

}  // namespace

template <int Dim>
GlobalSystem<Dim> assemble_global(const Problem<Dim>& p, const ReferenceElement<Dim>& ref,
                                  const SourceMap<Dim>& src, int threads) {
  const Mesh<Dim>& mesh = *p.mesh;
  const int nh = ref.n_hat(), bs = Dim * nh, nf = Dim + 1;
  const int n = mesh.num_faces() * bs;
  const auto nb = face_neighbours(mesh);

  // Fixed block pattern: column block k holds row blocks nb[k] in ascending order.
  GlobalSystem<Dim> sys;
  sys.k.resize(n, n);
  long long nnz = 0;
  for (const auto& v : nb) nnz += static_cast<long long>(v.size()) * bs * bs;
  if (nnz > std::numeric_limits<int>::max()) throw AssemblyError("global matrix too large");
  sys.k.resizeNonZeros(static_cast<Eigen::Index>(nnz));
  int* outer = sys.k.outerIndexPtr();
  int* inner = sys.k.innerIndexPtr();
  cplx* val = sys.k.valuePtr();
  std::vector<long long> block_start(mesh.num_faces() + 1, 0);
  for (int k = 0; k < mesh.num_faces(); ++k)
    block_start[k + 1] = block_start[k] + static_cast<long long>(nb[k].size()) * bs * bs;
  for (int k = 0; k < mesh.num_faces(); ++k) {
    const int rows = static_cast<int>(nb[k].size()) * bs;
    for (int c = 0; c < bs; ++c) {
      const long long start = block_start[k] + static_cast<long long>(c) * rows;
      outer[k * bs + c] = static_cast<int>(start);
      int pos = static_cast<int>(start);
      for (int k2 : nb[k])
        for (int r = 0; r < bs; ++r) inner[pos++] = k2 * bs + r;
    }
  }
  outer[n] = static_cast<int>(nnz);
  std::fill(val, val + nnz, cplx(0.0));
  sys.rhs = VectorXc::Zero(n);

  const int ne = mesh.num_elements();
  const int chunk = std::max(64, 16 * threads);
  std::vector<Condensed> local(std::min(chunk, ne));
  for (int begin = 0; begin < ne; begin += chunk) {
    const int end = std::min(ne, begin + chunk);
    parallel_for(end - begin, threads, [&](int b0, int b1) {
      for (int i = b0; i < b1; ++i) {
        const int e = begin + i;
        Condensed c = condense(assemble_local(p, ref, src, e), e);
        c.a_inv_d.resize(0, 0);
        c.a_inv_s.resize(0);
        local[i] = std::move(c);
      }
    });
    for (int e = begin; e < end; ++e) {
      const Condensed& c = local[e - begin];
      for (int l2 = 0; l2 < nf; ++l2) {
        const int k2 = mesh.element_face(e, l2);
        const int rows = static_cast<int>(nb[k2].size()) * bs;
        for (int l1 = 0; l1 < nf; ++l1) {
          const int k1 = mesh.element_face(e, l1);
          const int slot = static_cast<int>(std::lower_bound(nb[k2].begin(), nb[k2].end(), k1) - nb[k2].begin());
          for (int c2 = 0; c2 < bs; ++c2) {
            cplx* col = val + block_start[k2] + static_cast<long long>(c2) * rows + slot * bs;
            for (int r = 0; r < bs; ++r) col[r] += c.k(l1 * bs + r, l2 * bs + c2);
          }
        }
        sys.rhs.segment(k2 * bs, bs) += c.rhs.segment(l2 * bs, bs);
      }
    }
  }
  return sys;
}

VectorXc solve_trace(const SparseC& k, const VectorXc& rhs, const SolveOptions& opt,
                     SolveStats& stats) {
  stats.solver = GlobalLU::name();
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    stats.global_residual = 0.0;
    return VectorXc::Zero(rhs.size());
  }
  GlobalLU lu(k);
  VectorXc x = lu.solve(rhs);
  if (!x.allFinite()) throw SolverError("sparse LU produced non-finite values");
  VectorXc r = rhs - k * x;
  double rel = r.norm() / bnorm;
  int steps = 0;
  while (steps < opt.refinement_steps && rel > 1e-3 * opt.residual_tol) {
    const VectorXc dx = lu.solve(r);
    if (!dx.allFinite()) break;
    const VectorXc x_new = x + dx;
    const VectorXc r_new = rhs - k * x_new;
    const double rel_new = r_new.norm() / bnorm;
    ++steps;
    if (!(rel_new < rel)) break;
    x = x_new;
    r = r_new;
    rel = rel_new;
  }
  stats.refinement_steps = steps;
  stats.global_residual = rel;
  if (!(rel <= opt.residual_tol)) {
    std::ostringstream os;
    os << "global solve residual " << rel << " exceeds " << opt.residual_tol
       << " (reciprocal condition estimate " << lu.rcond() << ")";
    throw SolverError(os.str());
  }
  return x;
}

template <int Dim>
Solution<Dim> solve(const Problem<Dim>& p, const SolveOptions& opt) {
  if (!p.mesh || !p.material) throw ConfigError("problem needs a mesh and a material");
  if (p.material->num_cells() != p.mesh->num_elements())
    throw ConfigError("material field does not match the mesh");
  validate(p.stab);
  const int threads = resolve_threads(opt.threads);
  const Mesh<Dim>& mesh = *p.mesh;

  Solution<Dim> sol;
  sol.mesh = p.mesh;
  sol.order = p.order;
  sol.ref = make_basis<Dim>(p.order, p.material->order());
  const ReferenceElement<Dim>& ref = *sol.ref;
  const SourceMap<Dim> src = locate_sources(p);

  auto t0 = Clock::now();
  GlobalSystem<Dim> sys = assemble_global(p, ref, src, threads);
  sol.stats.seconds_assembly = seconds_since(t0);
  sol.stats.n_trace = static_cast<int>(sys.rhs.size());
  sol.stats.nnz = sys.k.nonZeros();

  t0 = Clock::now();
  sol.lambda = solve_trace(sys.k, sys.rhs, opt, sol.stats);
  sol.stats.seconds_solve = seconds_since(t0);
  sys = GlobalSystem<Dim>{};

  // Recovery recomputes the local blocks, which also yields the local residuals and the
  // one-sided numerical tractions on every face.
  t0 = Clock::now();
  const int ne = mesh.num_elements(), nh = ref.n_hat(), bs = Dim * nh, nf = Dim + 1;
  const int m = ref.m(), nfq = ref.fq.size();
  sol.w.assign(ne, VectorXc());
  std::vector<double> local_res(ne, 0.0);
  // Per (e, l): numerical traction at face points, (nfq x Dim).
  std::vector<MatrixXc> traction(opt.check_invariants ? ne * nf : 0);
  parallel_for(ne, threads, [&](int b0, int b1) {
    for (int e = b0; e < b1; ++e) {
      const LocalBlocks blk = assemble_local(p, ref, src, e);
      VectorXc lam(nf * bs);
      for (int l = 0; l < nf; ++l) lam.segment(l * bs, bs) = sol.lambda.segment(mesh.element_face(e, l) * bs, bs);
      const VectorXc rhs = blk.s_vol - blk.d * lam;
      const LocalSolver lu(blk, e);
      VectorXc w = lu.solve(rhs);
      VectorXc r = rhs - blk.a * w;
      // One refinement step keeps the recovery residual at working precision.
      w += lu.solve(r);
      r = rhs - blk.a * w;
      const double scale = rhs.norm();
      local_res[e] = scale > 0.0 ? r.norm() / scale : r.norm();
      if (opt.check_invariants) {
        for (int l = 0; l < nf; ++l) {
          const auto& table = ref.face(mesh.face_local_order(e, l));
          const Vec<Dim> nu = mesh.normal(e, l);
          const AMat<Dim> adn = a_dagger(nu);
          MatrixXc t(nfq, Dim);
          for (int q = 0; q < nfq; ++q) {
            Vec<Dim, cplx> u, lm;
            VoigtVec<Dim, cplx> s;
            for (int i = 0; i < Dim; ++i) {
              u(i) = (table.phi.row(q).template cast<cplx>() * w.segment(i * m, m))(0);
              lm(i) = (ref.fxi.row(q).template cast<cplx>() * lam.segment((l * Dim + i) * nh, nh))(0);
            }
            for (int j = 0; j < kVoigt<Dim>; ++j)
              s(j) = (table.phi.row(q).template cast<cplx>() * w.segment((Dim + j) * m, m))(0);
            const MaterialPoint<Dim> mp = p.material->eval_values(e, table.mat.row(q));
            const Mat<Dim, cplx> tau =
                stabilization_matrix<Dim>(p.stab, mp.rho, stiffness_from_compliance<Dim>(mp.s), nu);
            t.row(q) = (adn.template cast<cplx>() * s - tau * (u - lm)).transpose();
          }
          traction[e * nf + l] = std::move(t);
        }
      }
      sol.w[e] = std::move(w);
    }
  });
  sol.stats.max_local_residual = *std::max_element(local_res.begin(), local_res.end());

  if (opt.check_invariants) {
    double tmax = 0.0, jump = 0.0, jump_proj = 0.0;
    for (const auto& t : traction) tmax = std::max(tmax, t.rowwise().norm().maxCoeff());
    const Eigen::MatrixXd& xi = ref.fxi;
    const Eigen::MatrixXd mass = xi.transpose() * ref.fq.weights.asDiagonal() * xi;
    const Eigen::LLT<Eigen::MatrixXd> mass_llt(mass);
    for (int k = 0; k < mesh.num_faces(); ++k) {
      const auto& f = mesh.face(k);
      if (f.is_boundary()) continue;
      const MatrixXc j = traction[f.side[0].elem * nf + f.side[0].local] +
                         traction[f.side[1].elem * nf + f.side[1].local];
      jump = std::max(jump, j.rowwise().norm().maxCoeff());
      const MatrixXc moments = xi.transpose().template cast<cplx>() * ref.fq.weights.asDiagonal() * j;
      MatrixXc coef(moments.rows(), moments.cols());
      for (int c = 0; c < Dim; ++c) {
        coef.col(c).real() = mass_llt.solve(moments.col(c).real());
        coef.col(c).imag() = mass_llt.solve(moments.col(c).imag());
      }
      const MatrixXc proj = xi.template cast<cplx>() * coef;
      jump_proj = std::max(jump_proj, proj.rowwise().norm().maxCoeff());
    }
    sol.stats.traction_jump = tmax > 0.0 ? jump / tmax : jump;
    sol.stats.traction_jump_projected = tmax > 0.0 ? jump_proj / tmax : jump_proj;
  }
  sol.stats.seconds_recovery = seconds_since(t0);
  return sol;
}

template <int Dim>
Vec<Dim, cplx> Solution<Dim>::displacement(int e, const Vec<Dim>& x) const {
  const Vec<Dim> x0 = mesh->vertex(mesh->element(e)[0]);
  RefPoints<Dim> xi = mesh->jacobian(e).inverse() * (x - x0);
  const Eigen::RowVectorXd phi = ref->vol.eval(xi).row(0);
  const int m = ref->m();
  Vec<Dim, cplx> u;
  for (int i = 0; i < Dim; ++i) u(i) = (phi.template cast<cplx>() * w[e].segment(i * m, m))(0);
  return u;
}

template <int Dim>
VoigtVec<Dim, cplx> Solution<Dim>::stress(int e, const Vec<Dim>& x) const {
  const Vec<Dim> x0 = mesh->vertex(mesh->element(e)[0]);
  RefPoints<Dim> xi = mesh->jacobian(e).inverse() * (x - x0);
  const Eigen::RowVectorXd phi = ref->vol.eval(xi).row(0);
  const int m = ref->m();
  VoigtVec<Dim, cplx> s;
  for (int j = 0; j < kVoigt<Dim>; ++j) s(j) = (phi.template cast<cplx>() * w[e].segment((Dim + j) * m, m))(0);
  return s;
}

#define EHDG_INSTANTIATE(D)                                                                    \
  template GlobalSystem<D> assemble_global<D>(const Problem<D>&, const ReferenceElement<D>&,   \
                                              const SourceMap<D>&, int);                       \
  template Solution<D> solve<D>(const Problem<D>&, const SolveOptions&);                       \
  template struct Solution<D>;

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
