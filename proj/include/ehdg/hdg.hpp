#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "ehdg/basis.hpp"
#include "ehdg/material_field.hpp"
#include "ehdg/mesh.hpp"
#include "ehdg/quadrature.hpp"
#include "ehdg/stabilization.hpp"

namespace ehdg {

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using SparseC = Eigen::SparseMatrix<cplx>;

// Basis and quadrature tables shared by all elements of one order.
template <int Dim>
struct ReferenceElement {
  // Element basis evaluated on one local face, for a given vertex ordering of that face.
  struct FaceTable {
    Eigen::MatrixXd phi;  // (n_face_points x m)
    Eigen::MatrixXd mat;  // (n_face_points x material nodes)
    RefPoints<Dim> ref;   // face points in element reference coordinates
  };

  int order = 0;
  int material_order = 0;
  SimplexBasis<Dim> vol;
  SimplexBasis<Dim - 1> trace;
  SimplexQuadrature<Dim> vq;
  Eigen::MatrixXd vphi;                    // (nq x m)
  std::array<Eigen::MatrixXd, Dim> vgrad;  // reference derivatives, (nq x m)
  Eigen::MatrixXd vmat;                    // material basis at volume points
  SimplexQuadrature<Dim - 1> fq;
  Eigen::MatrixXd fxi;  // trace basis at face points, (nfq x n_hat)

  int m() const { return vol.size(); }
  int n_hat() const { return trace.size(); }
  static constexpr int n_faces = Dim + 1;

  // Local face vertex indices in ascending global order; the face is opposite the missing one.
  const FaceTable& face(const std::array<int, Dim>& local_order) const;

  std::vector<FaceTable> faces_;
  static int face_key(const std::array<int, Dim>& a);
};

// Throws ConfigError unless 1 <= order <= 10. Quadrature is exact to degree
// 2 order + material_order + 1 on volumes and faces.
template <int Dim>
std::shared_ptr<const ReferenceElement<Dim>> make_basis(int order, int material_order);

template <int Dim>
struct PointSource {
  Vec<Dim> position = Vec<Dim>::Zero();
  Vec<Dim> polarization = Vec<Dim>::Unit(Dim - 1);
  cplx amplitude{1.0, 0.0};
};

template <int Dim>
struct Problem {
  using Field = std::function<Vec<Dim, cplx>(const Vec<Dim>&)>;

  const Mesh<Dim>* mesh = nullptr;
  const MaterialField<Dim>* material = nullptr;
  StabilizationSpec stab;  // stab.omega is the angular frequency
  int order = 1;
  Field dirichlet;   // data on Dirichlet faces; zero when empty
  Field body_force;  // volume source; zero when empty
  std::vector<PointSource<Dim>> sources;

  double omega() const { return stab.omega; }
};

// Dense element blocks. Volume layout: U_I at I m, V_J at (Dim + J) m. Trace layout:
// (l Dim + I) n_hat + j for local face l.
struct LocalBlocks {
  MatrixXc a, d, b, l;
  VectorXc s_vol, s_trace;
  int n_u = 0;  // size of the displacement block; 0 treats A as a general matrix
};

// Factorization of a local matrix A. When n_u is set, the real negative definite stress
// block is eliminated by Cholesky and only the displacement Schur complement is factored
// in complex arithmetic. Throws AssemblyError naming the element when A is singular.
class LocalSolver {
 public:
  explicit LocalSolver(const LocalBlocks& blocks, int e = -1);
  MatrixXc solve(const MatrixXc& rhs) const;

 private:
  int nu_ = 0;
  Eigen::LLT<Eigen::MatrixXd> ss_;  // of -A_ss
  Eigen::MatrixXd g_;               // (-A_ss)^-1 A_su
  Eigen::MatrixXd a_us_;
  Eigen::PartialPivLU<MatrixXc> lu_;
};

// Element sources (body force and point-source shares), set up once per problem.
template <int Dim>
struct SourceMap {
  // Per element: list of (physical point, weight * amplitude * polarization).
  std::vector<std::vector<std::pair<Vec<Dim>, Vec<Dim, cplx>>>> point;
};

template <int Dim>
SourceMap<Dim> locate_sources(const Problem<Dim>& p);

template <int Dim>
LocalBlocks assemble_local(const Problem<Dim>& p, const ReferenceElement<Dim>& ref,
                           const SourceMap<Dim>& src, int e);

struct Condensed {
  MatrixXc k;        // L - B A^-1 D
  VectorXc rhs;      // s - B A^-1 S
  MatrixXc a_inv_d;  // A^-1 D
  VectorXc a_inv_s;  // A^-1 S
};

Condensed condense(const LocalBlocks& blocks, int e = -1);

// Global trace index of local trace slot (l, I, j) of element e.
template <int Dim>
int global_trace_index(const Mesh<Dim>& mesh, int e, int l, int comp, int j, int n_hat);

struct SolveOptions {
  int threads = 0;
  int refinement_steps = 3;
  double residual_tol = 1e-10;
  bool check_invariants = true;
};

struct SolveStats {
  int n_trace = 0;
  long long nnz = 0;
  double global_residual = 0.0;
  double max_local_residual = 0.0;
  // Max interior-face traction jump relative to the largest traction, pointwise and after
  // projection onto the trace space.
  double traction_jump = 0.0;
  double traction_jump_projected = 0.0;
  int refinement_steps = 0;
  double seconds_assembly = 0.0, seconds_solve = 0.0, seconds_recovery = 0.0;
  std::string solver;
};

template <int Dim>
struct Solution {
  const Mesh<Dim>* mesh = nullptr;
  std::shared_ptr<const ReferenceElement<Dim>> ref;
  int order = 0;
  VectorXc lambda;
  std::vector<VectorXc> w;  // per element (U, V)
  SolveStats stats;

  // u and the Voigt stress at a physical point of element e.
  Vec<Dim, cplx> displacement(int e, const Vec<Dim>& x) const;
  VoigtVec<Dim, cplx> stress(int e, const Vec<Dim>& x) const;
};

template <int Dim>
struct GlobalSystem {
  SparseC k;
  VectorXc rhs;
};

// Deterministic: element contributions are computed in parallel chunks and summed in
// element order into a fixed compressed-column pattern.
template <int Dim>
GlobalSystem<Dim> assemble_global(const Problem<Dim>& p, const ReferenceElement<Dim>& ref,
                                  const SourceMap<Dim>& src, int threads);

// Sparse LU with iterative refinement; throws SolverError if the factorization fails or the
// relative residual stays above tol.
VectorXc solve_trace(const SparseC& k, const VectorXc& rhs, const SolveOptions& opt,
                     SolveStats& stats);

template <int Dim>
Solution<Dim> solve(const Problem<Dim>& p, const SolveOptions& opt = {});

}  // namespace ehdg
