#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ehdg/analytic.hpp"
#include "ehdg/error.hpp"
#include "ehdg/hdg.hpp"

using namespace ehdg;

namespace {

constexpr double kLambda = 2.0, kMu = 1.0, kRho = 1.0;

template <int Dim>
MaterialField<Dim> iso_field(const Mesh<Dim>& mesh, double lambda = kLambda, double mu = kMu, double rho = kRho) {
  return MaterialField<Dim>::constant(mesh.num_elements(), rho, iso_compliance<Dim>(lambda, mu));
}

Mesh<2> reference_triangle(BoundaryTag tag = BoundaryTag::Dirichlet) {
  Mesh<2>::Points pts(2, 3);
  pts << 0, 1, 0, 0, 0, 1;
  return Mesh<2>(pts, {{0, 1, 2}}, {}, tag);
}

template <int Dim>
Problem<Dim> planewave_problem(const Mesh<Dim>& mesh, const MaterialField<Dim>& field, const Planewave<Dim>& pw,
                               int order) {
  Problem<Dim> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = order;
  p.stab.omega = pw.omega;
  p.dirichlet = [pw](const Vec<Dim>& x) { return pw.u(x); };
  return p;
}

template <int Dim>
ErrorReport planewave_error(const Solution<Dim>& sol, const Planewave<Dim>& pw, int n_grid) {
  GridSpec<Dim> g;
  g.n.fill(n_grid);
  const auto pts = error_grid(*sol.mesh, g);
  const PointLocator<Dim> loc(*sol.mesh);
  return relative_errors(eval_planewave(pw, pts), eval_solution(sol, loc, pts));
}

Planewave<2> p_wave_2d(double omega) {
  return planewave_iso<2>(WaveKind::P, Vec<2>(0.6, 0.8), omega, kLambda, kMu, kRho);
}

}  // namespace

TEST(LocalBlocks, LinearMassMatrix) {
  // The displacement block is -omega^2 M + omega F with IdentityReal(+) stabilization;
  // A(2) - 2 A(1) = -2 M isolates the mass matrix.
  const auto mesh = reference_triangle();
  const auto field = iso_field(mesh);
  const auto ref = make_basis<2>(1, 0);
  Problem<2> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = 1;
  p.stab.family = StabFamily::IdentityReal;
  p.stab.sign = StabSign::Plus;
  p.stab.tau = 0.7;
  const SourceMap<2> src = locate_sources(p);
  p.stab.omega = 1.0;
  const MatrixXc a1 = assemble_local(p, *ref, src, 0).a.topLeftCorner(3, 3);
  p.stab.omega = 2.0;
  const MatrixXc a2 = assemble_local(p, *ref, src, 0).a.topLeftCorner(3, 3);
  const Eigen::MatrixXd mass = (-(a2 - 2.0 * a1) / 2.0).real();
  Eigen::Matrix3d expect = Eigen::Matrix3d::Constant(1.0 / 24.0);
  expect.diagonal().setConstant(1.0 / 12.0);
  EXPECT_LT((mass - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LocalBlocks, CouplingBlocksAreTransposes) {
  const auto mesh = generate_box<3>(Vec<3>(0, 0, 0), Vec<3>(1, 2, 1), 1);
  const auto field = iso_field(mesh);
  const int k = 3;
  const auto ref = make_basis<3>(k, 0);
  Problem<3> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = k;
  p.stab.omega = 1.3;
  const auto src = locate_sources(p);
  const int m = ref->m();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const LocalBlocks b = assemble_local(p, *ref, src, e);
    const MatrixXc ku = b.a.block(0, 3 * m, 3 * m, 6 * m);
    const MatrixXc ks = b.a.block(3 * m, 0, 6 * m, 3 * m);
    EXPECT_LT((ku - ks.transpose()).norm(), 1e-14 * ku.norm());
    EXPECT_EQ(ku.imag().cwiseAbs().maxCoeff(), 0.0);
    // Constant stress against any displacement: K_u applied to a constant field gives the
    // integral of div sigma, which vanishes.
    Eigen::VectorXd ones = Eigen::VectorXd::Zero(6 * m);
    ones.segment(0, m).setOnes();
    EXPECT_LT((ku.real() * ones).norm(), 1e-12);
  }
}

TEST(LocalBlocks, ZeroCouplingCondensesToL) {
  LocalBlocks b;
  const int nw = 8, nl = 5;
  b.a = MatrixXc::Random(nw, nw) + 4.0 * MatrixXc::Identity(nw, nw);
  b.d = MatrixXc::Random(nw, nl);
  b.b = MatrixXc::Zero(nl, nw);
  b.l = MatrixXc::Random(nl, nl);
  b.s_vol = VectorXc::Random(nw);
  b.s_trace = VectorXc::Random(nl);
  const Condensed c = condense(b);
  EXPECT_EQ(c.k, b.l);
  EXPECT_EQ(c.rhs, b.s_trace);
  EXPECT_LT((b.a * c.a_inv_d - b.d).norm(), 1e-13);
  EXPECT_LT((b.a * c.a_inv_s - b.s_vol).norm(), 1e-13);
}

TEST(LocalBlocks, SchurSolverMatchesFullLU) {
  const auto mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), 2);
  const auto field = iso_field(mesh);
  const auto ref = make_basis<2>(4, 0);
  Problem<2> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = 4;
  p.stab.omega = 5.0;
  const auto src = locate_sources(p);
  LocalBlocks b = assemble_local(p, *ref, src, 3);
  const MatrixXc rhs = MatrixXc::Random(b.a.rows(), 3);
  const MatrixXc x_schur = LocalSolver(b).solve(rhs);
  b.n_u = 0;
  const MatrixXc x_full = LocalSolver(b).solve(rhs);
  EXPECT_LT((x_schur - x_full).norm(), 1e-10 * x_full.norm());
  EXPECT_LT((b.a * x_schur - rhs).norm(), 1e-10 * rhs.norm());
}

TEST(GlobalSystem, ComplexSymmetricWithoutDirichletFaces) {
  auto mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), 3);
  for (int k = 0; k < mesh.num_faces(); ++k)
    if (mesh.face(k).is_boundary()) mesh.set_tag(k, k % 2 ? BoundaryTag::Robin : BoundaryTag::Neumann);
  const auto field = iso_field(mesh);
  const auto ref = make_basis<2>(2, 0);
  Problem<2> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = 2;
  p.stab.omega = 2.0;
  p.sources.push_back({Vec<2>(0.4, 0.45), Vec<2>(0, 1), 1.0});
  const GlobalSystem<2> sys = assemble_global(p, *ref, locate_sources(p), 1);
  const SparseC kt = sys.k.transpose();
  EXPECT_LT(SparseC(sys.k - kt).norm(), 1e-12 * sys.k.norm());
}

TEST(Solve, DirichletTraceIsFaceInterpolant) {
  // A polynomial of the trace degree is reproduced exactly by the face projection.
  const auto mesh = reference_triangle();
  const auto field = iso_field(mesh);
  const int k = 3;
  Problem<2> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = k;
  p.stab.omega = 1.0;
  auto g = [](const Vec<2>& x) {
    return Vec<2, cplx>(cplx(1.0 + x(0) * x(0) * x(1), 0.5), cplx(std::pow(x(0) - x(1), 3), -x(1)));
  };
  p.dirichlet = g;
  const Solution<2> sol = solve(p, {1});
  const SimplexBasis<1> tb(k);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto& key = mesh.face(f).vertices;
    const Vec<2> a = mesh.vertex(key[0]), b = mesh.vertex(key[1]);
    for (int j = 0; j < tb.size(); ++j) {
      const Vec<2, cplx> expect = g(a + tb.nodes()(0, j) * (b - a));
      for (int i = 0; i < 2; ++i) EXPECT_LT(std::abs(sol.lambda((f * 2 + i) * tb.size() + j) - expect(i)), 1e-12);
    }
  }
}

TEST(Solve, TwoTrianglePlanewave) {
  const auto mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), 1);
  const auto field = iso_field(mesh);
  const auto pw = p_wave_2d(2 * std::numbers::pi * 0.5);
  const auto sol = solve(planewave_problem(mesh, field, pw, 4));
  const ErrorReport r = planewave_error(sol, pw, 40);
  EXPECT_LT(r.e_u[0], 1e-3);
  EXPECT_LT(r.e_u[1], 1e-3);
}

TEST(Solve, HConvergence) {
  const auto pw = p_wave_2d(2 * std::numbers::pi);
  for (int k = 1; k <= 3; ++k) {
    std::vector<double> eu, es;
    for (int n : {4, 8, 16}) {
      const auto mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), n);
      const auto field = iso_field(mesh);
      const auto sol = solve(planewave_problem(mesh, field, pw, k));
      const ErrorReport r = planewave_error(sol, pw, 40);
      eu.push_back(r.total_u);
      es.push_back(r.total_sigma);
    }
    for (int i = 1; i < 3; ++i) {
      EXPECT_GE(std::log2(eu[i - 1] / eu[i]), k + 0.7) << "k=" << k << " level " << i;
      EXPECT_GE(std::log2(es[i - 1] / es[i]), k + 0.7) << "k=" << k << " level " << i;
    }
  }
}

TEST(Solve, PConvergence3D) {
  const auto mesh = generate_box<3>(Vec<3>(0, 0, 0), Vec<3>(1, 1, 1), 1);
  const auto field = iso_field(mesh);
  const auto pw = planewave_iso<3>(WaveKind::S, Vec<3>(1, 1, 1).normalized(), 2.0, kLambda, kMu, kRho);
  double prev = 1.0;
  for (int k = 1; k <= 5; ++k) {
    const auto sol = solve(planewave_problem(mesh, field, pw, k));
    const double e = planewave_error(sol, pw, 10).total_u;
    EXPECT_LT(e, 0.5 * prev) << "k=" << k;
    prev = e;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Solve, InvariantsHold) {
  const auto mesh = generate_disk(1.0, 5, 0.8);
  const auto field = iso_field(mesh);
  Problem<2> p;
  p.mesh = &mesh;
  p.material = &field;
  p.order = 3;
  p.stab.omega = 3.0;
  p.sources.push_back({Vec<2>(0.1, -0.2), Vec<2>(1, 0), 1.0});
  const auto sol = solve(p, {1});
  EXPECT_LT(sol.stats.global_residual, 1e-10);
  EXPECT_LT(sol.stats.max_local_residual, 1e-10);
  EXPECT_LT(sol.stats.traction_jump_projected, 1e-8);
  EXPECT_GT(sol.stats.n_trace, 0);
}

TEST(Solve, ParallelMatchesSerialBitwise) {
  const auto mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), 6);
  const auto field = iso_field(mesh);
  const auto pw = p_wave_2d(4.0);
  const auto p = planewave_problem(mesh, field, pw, 3);
  const auto s1 = solve(p, {1});
  const auto s4 = solve(p, {4});
  ASSERT_EQ(s1.lambda.size(), s4.lambda.size());
  EXPECT_TRUE((s1.lambda.array() == s4.lambda.array()).all());
  for (int e = 0; e < mesh.num_elements(); ++e) EXPECT_TRUE((s1.w[e].array() == s4.w[e].array()).all());
}

TEST(Solve, FailuresAreReported) {
  const auto mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), 2);
  EXPECT_THROW(make_basis<2>(0, 0), ConfigError);
  EXPECT_THROW(make_basis<2>(11, 0), ConfigError);
  EXPECT_THROW(iso_compliance<2>(2.0, -1.0), ParameterError);
  // A negated compliance is rejected when the element is assembled.
  ComplianceVoigt<2> s = iso_compliance<2>(kLambda, kMu);
  s.m = -s.m;
  const auto bad = MaterialField<2>::constant(mesh.num_elements(), kRho, s);
  const auto pw = p_wave_2d(1.0);
  EXPECT_THROW(solve(planewave_problem(mesh, bad, pw, 2)), AssemblyError);
  const auto field = iso_field(mesh);
  auto p = planewave_problem(mesh, field, pw, 2);
  p.sources.push_back({Vec<2>(2.0, 0.5), Vec<2>(1, 0), 1.0});
  EXPECT_THROW(solve(p), InputError);
}
