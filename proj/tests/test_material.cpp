#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ehdg/material.hpp"
#include "ehdg/material_field.hpp"

using namespace ehdg;

namespace {

constexpr double kLambdaTI = 3.6107e-6, kMuTI = 3.0490e-9;

StiffnessVoigt<3> muscovite() {
  return thomsen_to_vti(std::sqrt(kLambdaTI + 2 * kMuTI), std::sqrt(kMuTI), 1.0, 1.12, -0.235, 2.28);
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

StiffnessVoigt<3> random_spd(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VoigtMat<3> a;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) a(i, j) = u(rng);
  StiffnessVoigt<3> c;
  c.m = d_dagger_inverse<3>() * (a * a.transpose() + 2.0 * VoigtMat<3>::Identity()) * d_dagger_inverse<3>();
  return c;
}

std::vector<Eigen::Vector3d> sphere_grid(int n) {
  // Fibonacci points.
  std::vector<Eigen::Vector3d> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n, r = std::sqrt(1.0 - z * z);
    out.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return out;
}

}  // namespace

TEST(IsoStiffness, PrintedParameters) {
  const auto c = iso_stiffness<3>(6.24e-6, 1e-8);
  EXPECT_LT(rel(c.m(0, 0), 6.26e-6), 1e-14);
  EXPECT_LT(rel(c.m(3, 3), 1e-8), 1e-14);
  EXPECT_EQ(iso_stiffness<3>(0.0, 1.0).m, (Eigen::Matrix<double, 6, 1>() << 2, 2, 2, 1, 1, 1).finished().asDiagonal().toDenseMatrix());
}

TEST(IsoStiffness, RejectsNonSpd) {
  EXPECT_THROW(iso_stiffness<3>(1.0, 0.0), ParameterError);
  EXPECT_THROW(iso_stiffness<3>(-1.0, 1.0), ParameterError);
  EXPECT_THROW(iso_stiffness<2>(-1.5, 1.0), ParameterError);
}

TEST(IsoCompliance, ClosedFormCases) {
  const auto s = iso_compliance<3>(0.0, 0.5);
  EXPECT_LT((s.m - (Eigen::Matrix<double, 6, 1>() << 1, 1, 1, 0.5, 0.5, 0.5).finished().asDiagonal().toDenseMatrix()).norm(), 1e-15);
  EXPECT_LT(rel(iso_compliance<3>(6.24e-6, 1e-8).m(3, 3), 2.5e7), 1e-12);
}

TEST(IsoCompliance, MatchesNumericalInverse) {
  for (int dim : {2, 3}) {
    for (auto [lambda, mu] : {std::pair{6.24e-6, 1e-8}, {2.0, 1.0}, {0.0, 3.0}}) {
      if (dim == 3) {
        const auto c = iso_stiffness<3>(lambda, mu);
        const VoigtMat<3> inv = (d_dagger<3>() * c.m * d_dagger<3>()).inverse();
        EXPECT_LT((iso_compliance<3>(lambda, mu).m - inv).norm(), 1e-12 * inv.norm());
        EXPECT_LT((compliance_from_stiffness<3>(c).m - inv).norm(), 1e-12 * inv.norm());
      } else {
        const auto c = iso_stiffness<2>(lambda, mu);
        const VoigtMat<2> inv = (d_dagger<2>() * c.m * d_dagger<2>()).inverse();
        EXPECT_LT((iso_compliance<2>(lambda, mu).m - inv).norm(), 1e-12 * inv.norm());
      }
    }
  }
}

TEST(Vti, IsotropicDegeneracy) {
  const double lambda = 2.0, mu = 0.7;
  const auto v = vti_stiffness(lambda + 2 * mu, lambda + 2 * mu, mu, mu, lambda);
  EXPECT_LT((v.m - iso_stiffness<3>(lambda, mu).m).norm(), 1e-15);
}

TEST(Vti, MuscoviteStiffnessValues) {
  const auto c = muscovite();
  // Printed to five significant digits.
  EXPECT_LT(rel(c.m(0, 0), 1.1719e-5), 5e-5);
  EXPECT_LT(rel(c.m(1, 1), 1.1719e-5), 5e-5);
  EXPECT_LT(rel(c.m(2, 2), 3.6168e-6), 5e-5);
  EXPECT_LT(rel(c.m(3, 3), 3.0490e-9), 5e-5);
  EXPECT_LT(rel(c.m(4, 4), 3.0490e-9), 5e-5);
  EXPECT_LT(rel(c.m(5, 5), 1.6953e-8), 5e-5);
  EXPECT_LT(rel(c.m(0, 1), 1.1685e-5), 5e-5);
  EXPECT_LT(rel(c.m(0, 2), 2.6268e-6), 5e-5);
  EXPECT_LT(rel(c.m(1, 2), 2.6268e-6), 5e-5);
  EXPECT_NO_THROW(require_spd<3>(c));
  const auto printed = vti_stiffness(1.1719e-5, 3.6168e-6, 3.0490e-9, 1.6953e-8, 2.6268e-6);
  EXPECT_LT(rel(printed.m(0, 1), 1.1685e-5), 5e-5);
}

TEST(Vti, NegativeRadicandRejected) {
  EXPECT_THROW(thomsen_to_vti(1.0, 0.5, 1.0, 0.1, -5.0, 0.0), ParameterError);
  EXPECT_THROW(vti_stiffness(1.0, 1.0, 1.0, 1.0, 5.0), ParameterError);
}

TEST(Compliance, ReconstructionResidual) {
  std::mt19937 rng(5);
  std::vector<StiffnessVoigt<3>> cs{muscovite(), iso_stiffness<3>(6.24e-6, 1e-8)};
  for (int t = 0; t < 20; ++t) cs.push_back(random_spd(rng));
  for (const auto& c : cs) {
    const auto s = compliance_from_stiffness<3>(c);
    const VoigtMat<3> dcd = d_dagger<3>() * c.m * d_dagger<3>();
    const VoigtMat<3> dsd = d_dagger<3>() * s.m * d_dagger<3>();
    EXPECT_LT((s.m * dcd - VoigtMat<3>::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((dsd * c.m - VoigtMat<3>::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((stiffness_from_compliance<3>(s).m - c.m).norm(), 1e-12 * c.m.norm());
  }
  StiffnessVoigt<3> diag;
  diag.m = (Eigen::Matrix<double, 6, 1>() << 2, 2, 2, 1, 1, 1).finished().asDiagonal();
  EXPECT_LT((compliance_from_stiffness<3>(diag).m.diagonal() - (Eigen::Matrix<double, 6, 1>() << .5, .5, .5, .25, .25, .25).finished()).norm(), 1e-15);
  StiffnessVoigt<3> bad;
  EXPECT_THROW(compliance_from_stiffness<3>(bad), ParameterError);
}

TEST(KelvinChristoffel, IsotropicAndVtiForms) {
  const double lambda = 2.0, mu = 0.7;
  const auto c = iso_stiffness<3>(lambda, mu);
  const auto v = muscovite();
  for (const auto& nu : sphere_grid(20)) {
    const Eigen::Matrix3d expect = mu * Eigen::Matrix3d::Identity() + (lambda + mu) * nu * nu.transpose();
    EXPECT_LT((kc_matrix<3>(c, nu) - expect).norm(), 1e-14);
    const double g11 = v.m(0, 0) * nu(0) * nu(0) + v.m(5, 5) * nu(1) * nu(1) + v.m(4, 4) * nu(2) * nu(2);
    EXPECT_LT(std::abs(kc_matrix<3>(v, nu)(0, 0) - g11), 1e-14 * v.m(0, 0));
  }
}

TEST(KelvinChristoffel, MatchesIndexContraction) {
  std::mt19937 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_spd(rng);
    const Eigen::Vector3d nu = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    auto code = [](int a, int b) {
      const auto pairs = voigt_pairs<3>();
      for (int I = 0; I < 6; ++I)
        if ((pairs[I][0] == a && pairs[I][1] == b) || (pairs[I][0] == b && pairs[I][1] == a)) return I;
      return -1;
    };
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) g(j, k) += nu(i) * c.m(code(i, j), code(k, l)) * nu(l);
    EXPECT_LT((kc_matrix<3>(c, nu) - g).norm(), 1e-13 * g.norm());
  }
}

TEST(KelvinChristoffel, RejectsNonUnitNormal) {
  EXPECT_THROW(kc_matrix<3>(muscovite(), Eigen::Vector3d(1.0, 1.0, 0.0)), InputError);
}

TEST(KelvinChristoffel, SpdOnSphereGrid) {
  std::mt19937 rng(7);
  const std::vector<StiffnessVoigt<3>> cs{iso_stiffness<3>(6.24e-6, 1e-8), muscovite(), random_spd(rng)};
  for (const auto& c : cs)
    for (const auto& nu : sphere_grid(100)) {
      const Eigen::Matrix3d g = kc_matrix<3>(c, nu);
      EXPECT_LT((g - g.transpose()).norm(), 1e-15 * g.norm());
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(g).eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Wavespeeds, IsotropicPrintedSpeeds) {
  const auto c = iso_stiffness_from_speeds<3>(2.5e-3, 1e-4, 1.0);
  const Eigen::Vector3d ref = wavespeeds<3>(c, 1.0, Eigen::Vector3d::UnitZ()).c;
  EXPECT_LT((ref - Eigen::Vector3d(2.5e-3, 1e-4, 1e-4)).norm(), 1e-15);
  for (const auto& nu : sphere_grid(100)) {
    const auto ws = wavespeeds<3>(c, 1.0, nu);
    for (int a = 0; a < 3; ++a) EXPECT_LE(std::abs(ws.c(a) - ref(a)), 1e-13 * ref(a));
    EXPECT_LT((ws.w.transpose() * ws.w - Eigen::Matrix3d::Identity()).norm(), 1e-13);
  }
}

TEST(Wavespeeds, EigenvaluesOfKcMatrix) {
  std::mt19937 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_spd(rng);
    const double rho = 1.0 + t;
    const Eigen::Vector3d nu = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    const auto ws = wavespeeds<3>(c, rho, nu);
    const Eigen::Matrix3d g = kc_matrix<3>(c, nu);
    EXPECT_GE(ws.c(0), ws.c(1));
    EXPECT_GE(ws.c(1), ws.c(2));
    for (int a = 0; a < 3; ++a)
      EXPECT_LT((g * ws.w.col(a) - rho * ws.c(a) * ws.c(a) * ws.w.col(a)).norm(), 1e-12 * g.norm());
  }
}

TEST(Wavespeeds, MuscoviteDiagonalDirection) {
  const auto c = muscovite();
  const Eigen::Vector3d d(1 / std::sqrt(2.0), 0.0, 1 / std::sqrt(2.0));
  const auto ws = wavespeeds<3>(c, 1.0, d);
  EXPECT_LT(rel(ws.qp(), 2.5e-3), 2e-3);
  // sH is polarized along y.
  int sh = 0;
  for (int a = 0; a < 3; ++a)
    if (std::abs(ws.w(1, a)) > 0.99) sh = a;
  EXPECT_LT(rel(ws.c(sh), 1e-4), 2e-3);
  EXPECT_LT(rel(ws.c(sh) * ws.c(sh), (c.m(5, 5) * 0.5 + c.m(4, 4) * 0.5)), 1e-12);
}

TEST(RotateTti, IdentityAndAxisSwap) {
  const auto c = muscovite();
  EXPECT_LT((rotate_tti<3>(c, 0.0).m - c.m).norm(), 1e-15 * c.m.norm());
  const auto r = rotate_tti<3>(c, std::numbers::pi / 2);
  EXPECT_LT(rel(r.m(0, 0), c.m(2, 2)), 1e-12);
  EXPECT_LT(rel(r.m(2, 2), c.m(0, 0)), 1e-12);
}

TEST(RotateTti, WavespeedsFollowTheRotation) {
  std::mt19937 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    const auto c = random_spd(rng);
    const double theta = ang(rng);
    const Eigen::Vector3d nu = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    const auto a = wavespeeds<3>(c, 1.0, nu);
    const auto b = wavespeeds<3>(rotate_tti<3>(c, theta), 1.0, rotation_y<3>(theta) * nu);
    EXPECT_LT((a.c - b.c).norm(), 1e-12 * a.c.norm());
    // Spectrum of C as a map on symmetric tensors: D^1/2 C-bar D^1/2 (Kelvin form).
    const auto ev = [](const StiffnessVoigt<3>& s) {
      const VoigtMat<3> h = d_dagger<3>().cwiseSqrt();
      return Eigen::SelfAdjointEigenSolver<VoigtMat<3>>(h * s.m * h).eigenvalues().eval();
    };
    EXPECT_LT((ev(c) - ev(rotate_tti<3>(c, theta))).norm(), 1e-12 * ev(c).norm());
  }
  // 2D restriction follows the same rule in the x-z plane.
  const auto c2 = restrict_to_dim<2>(muscovite());
  const Eigen::Vector2d nu2(0.6, 0.8);
  const auto a2 = wavespeeds<2>(c2, 1.0, nu2);
  const auto b2 = wavespeeds<2>(rotate_tti<2>(c2, 0.7), 1.0, rotation_y<2>(0.7) * nu2);
  EXPECT_LT((a2.c - b2.c).norm(), 1e-12 * a2.c.norm());
}

TEST(MaterialField, ConstantFieldEvaluatesToCellConstant) {
  const Mesh<2> mesh = generate_box<2>(Vec<2>(0, 0), Vec<2>(1, 1), 2);
  const auto s = iso_compliance<2>(2.0, 1.0);
  const auto f = MaterialField<2>::constant(mesh.num_elements(), 3.0, s);
  const auto p = eval_material<2>(f, 3, Vec<2>(0.2, 0.3));
  EXPECT_EQ(p.rho, 3.0);
  EXPECT_LT((p.s.m - s.m).norm(), 1e-15);
  EXPECT_THROW(eval_material<2>(f, 0, Vec<2>(0.8, 0.8)), InputError);
}

TEST(MaterialField, NodalValuesAndQuadraticReproduction) {
  const Mesh<2> mesh = generate_box<2>(Vec<2>(-1, -1), Vec<2>(1, 1), 3);
  const double a = 1.3;
  auto radial = [a](const Vec<2>& x) {
    MaterialPoint<2> p;
    p.rho = std::exp(-a * x.norm());
    p.s = iso_compliance<2>(1.0, 1.0);
    return p;
  };
  const auto f = MaterialField<2>::sample(mesh, 2, radial);
  const auto& nodes = f.basis().nodes();
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int n = 0; n < nodes.cols(); ++n) {
      const Vec<2> x = mesh.vertex(mesh.element(e)[0]) + mesh.jacobian(e) * nodes.col(n);
      EXPECT_NEAR(eval_material<2>(f, e, nodes.col(n)).rho, radial(x).rho, 1e-14);
    }

  auto quad = [](const Vec<2>& x) {
    MaterialPoint<2> p;
    p.rho = 2.0 + 0.5 * x(0) - 0.3 * x(0) * x(0) + 0.1 * x(0) * x(1);
    p.s = iso_compliance<2>(1.0, 1.0);
    p.s.m(0, 0) += x(1) * x(1);
    return p;
  };
  const auto g = MaterialField<2>::sample(mesh, 2, quad);
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    Vec<2> xi(u(rng), u(rng));
    if (xi.sum() > 1.0) xi = Vec<2>(1.0, 1.0) - xi;
    const int e = t % mesh.num_elements();
    const Vec<2> x = mesh.vertex(mesh.element(e)[0]) + mesh.jacobian(e) * xi;
    const auto p = eval_material<2>(g, e, xi);
    EXPECT_NEAR(p.rho, quad(x).rho, 1e-13);
    EXPECT_NEAR(p.s.m(0, 0), quad(x).s.m(0, 0), 1e-13);
  }
}

TEST(MaterialSpec, RadialProfileInterpolation) {
  MaterialSpec spec;
  spec.kind = MaterialKind::IsoRadial;
  spec.field_order = 2;
  for (int i = 0; i <= 20; ++i) {
    const double r = 0.1 * i;
    spec.profile.radius.push_back(r);
    spec.profile.vp.push_back(2.0 - 0.5 * r);
    spec.profile.vs.push_back(0.7 * (2.0 - 0.5 * r));
    spec.profile.rho.push_back(1.0 + r);
  }
  const auto sample = make_sampler<2>(spec);
  // Linear data is reproduced by the monotone cubic interpolant.
  const auto p = sample(Vec<2>(0.3, 0.4));
  EXPECT_NEAR(p.rho, 1.5, 1e-12);
  const auto c = stiffness_from_compliance<2>(p.s);
  const double cp = 2.0 - 0.25, mu = 1.5 * 0.49 * cp * cp;
  EXPECT_NEAR(c.m(2, 2), mu, 1e-12);
  spec.profile.radius[3] = spec.profile.radius[2];
  EXPECT_THROW(make_sampler<2>(spec), ConfigError);
}
