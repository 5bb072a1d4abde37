#include "ehdg/material_field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/Cholesky>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace ehdg {

template <int Dim>
MaterialField<Dim>::MaterialField(int n_cells, int order) : n_cells_(n_cells), basis_(order) {
  if (order < 0) throw ConfigError("material field order must be nonnegative");
  data_ = Eigen::MatrixXd::Zero(basis_.size(), kParams * n_cells);
}

template <int Dim>
MaterialField<Dim> MaterialField<Dim>::constant(int n_cells, double rho,
                                                const ComplianceVoigt<Dim>& s) {
  MaterialField<Dim> f(n_cells, 0);
  for (int e = 0; e < n_cells; ++e) f.set_node(e, 0, {rho, s});
  return f;
}

template <int Dim>
MaterialField<Dim> MaterialField<Dim>::sample(const Mesh<Dim>& mesh, int order, const Sampler& fn) {
  MaterialField<Dim> f(mesh.num_elements(), order);
  const RefPoints<Dim>& nodes = f.basis().nodes();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Mat<Dim> j = mesh.jacobian(e);
    const Vec<Dim> v0 = mesh.vertex(mesh.element(e)[0]);
    for (int n = 0; n < nodes.cols(); ++n) f.set_node(e, n, fn(v0 + j * nodes.col(n)));
  }
  return f;
}

template <int Dim>
void MaterialField<Dim>::set_node(int cell, int node, const MaterialPoint<Dim>& p) {
  const int base = kParams * cell;
  data_(node, base) = p.rho;
  int c = 1;
  for (int I = 0; I < kVoigt<Dim>; ++I)
    for (int J = I; J < kVoigt<Dim>; ++J) data_(node, base + c++) = p.s.m(I, J);
}

template <int Dim>
MaterialPoint<Dim> MaterialField<Dim>::node(int cell, int node) const {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Unit(basis_.size(), node);
  return eval_values(cell, v);
}

template <int Dim>
MaterialPoint<Dim> MaterialField<Dim>::eval_values(
    int cell, const Eigen::Ref<const Eigen::RowVectorXd>& values) const {
  const Eigen::Matrix<double, 1, kParams> p = values * data_.middleCols(kParams * cell, kParams);
  MaterialPoint<Dim> out;
  out.rho = p(0);
  int c = 1;
  for (int I = 0; I < kVoigt<Dim>; ++I)
    for (int J = I; J < kVoigt<Dim>; ++J) {
      out.s.m(I, J) = p(c);
      out.s.m(J, I) = p(c);
      ++c;
    }
  return out;
}

template <int Dim>
MaterialPoint<Dim> eval_material(const MaterialField<Dim>& field, int cell, const Vec<Dim>& ref) {
  if (!in_reference_simplex<Dim>(ref)) throw InputError("point outside the reference simplex");
  if (cell < 0 || cell >= field.num_cells()) throw InputError("cell index out of range");
  RefPoints<Dim> pt = ref;
  const Eigen::MatrixXd v = field.basis().eval(pt);
  return field.eval_values(cell, v.row(0));
}

template <int Dim>
void require_spd_point(const MaterialPoint<Dim>& p, int cell, const Vec<Dim>& x) {
  auto where = [&] {
    std::string s = "cell " + std::to_string(cell) + " at (";
    for (int d = 0; d < Dim; ++d) s += (d ? ", " : "") + std::to_string(x(d));
    return s + ")";
  };
  if (!(p.rho > 0.0)) throw AssemblyError("nonpositive density in " + where());
  const VoigtMat<Dim> dsd = d_dagger<Dim>() * p.s.m * d_dagger<Dim>();
  Eigen::LLT<VoigtMat<Dim>> llt(dsd);
  if (llt.info() != Eigen::Success) throw AssemblyError("compliance not SPD in " + where());
}

MaterialKind parse_material_kind(const std::string& s) {
  if (s == "iso") return MaterialKind::Iso;
  if (s == "vti") return MaterialKind::Vti;
  if (s == "tti") return MaterialKind::Tti;
  if (s == "iso_radial") return MaterialKind::IsoRadial;
  if (s == "tti_radial") return MaterialKind::TtiRadial;
  throw ConfigError("unknown material kind '" + s + "'");
}

std::string to_string(MaterialKind k) {
  switch (k) {
    case MaterialKind::Iso: return "iso";
    case MaterialKind::Vti: return "vti";
    case MaterialKind::Tti: return "tti";
    case MaterialKind::IsoRadial: return "iso_radial";
    case MaterialKind::TtiRadial: return "tti_radial";
  }
  return "unknown";
}

template <int Dim>
StiffnessVoigt<Dim> spec_stiffness(const MaterialSpec& spec, double vp, double vs, double rho) {
  switch (spec.kind) {
    case MaterialKind::Iso:
    case MaterialKind::IsoRadial:
      if (spec.kind == MaterialKind::Iso && spec.has_lame)
        return iso_stiffness<Dim>(spec.lambda, spec.mu);
      return iso_stiffness_from_speeds<Dim>(vp, vs, rho);
    case MaterialKind::Vti:
    case MaterialKind::Tti:
    case MaterialKind::TtiRadial: {
      StiffnessVoigt<3> c3 =
          (spec.kind == MaterialKind::Vti && spec.has_cij)
              ? vti_stiffness(spec.c11, spec.c33, spec.c44, spec.c66, spec.c13)
              : thomsen_to_vti(vp, vs, rho, spec.epsilon, spec.delta, spec.gamma);
      StiffnessVoigt<Dim> c = restrict_to_dim<Dim>(c3);
      if (spec.kind != MaterialKind::Vti)
        c = rotate_tti<Dim>(c, spec.theta_deg * std::numbers::pi / 180.0);
      return c;
    }
  }
  throw ConfigError("unsupported material kind");
}

template <int Dim>
Medium<Dim> homogeneous_medium(const MaterialSpec& spec) {
  return {spec.rho, spec_stiffness<Dim>(spec, spec.vp, spec.vs, spec.rho)};
}

namespace {

// Monotone cubic Hermite interpolation of a radial table, clamped to the table range.
class RadialSpline {
 public:
  RadialSpline(const std::vector<double>& r, const std::vector<double>& y) : r_(r), y_(y) {
    if (r.size() != y.size() || r.size() < 2)
      throw ConfigError("radial profile needs at least two matching entries");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) throw ConfigError("radial profile radii must increase");
    if (r.size() >= 4) {
      std::vector<double> rx = r, yy = y;
      spline_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
          std::move(rx), std::move(yy));
    }
  }
  double operator()(double r) const {
    r = std::clamp(r, r_.front(), r_.back());
    if (spline_) return (*spline_)(r);
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - r_.begin(), 1), r_.size() - 1);
    const double t = (r - r_[i - 1]) / (r_[i] - r_[i - 1]);
    return (1.0 - t) * y_[i - 1] + t * y_[i];
  }

 private:
  std::vector<double> r_, y_;
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> spline_;
};

}  // namespace

template <int Dim>
typename MaterialField<Dim>::Sampler make_sampler(const MaterialSpec& spec) {
  if (spec.kind == MaterialKind::IsoRadial || spec.kind == MaterialKind::TtiRadial) {
    auto vp = std::make_shared<RadialSpline>(spec.profile.radius, spec.profile.vp);
    auto vs = std::make_shared<RadialSpline>(spec.profile.radius, spec.profile.vs);
    auto rho = std::make_shared<RadialSpline>(spec.profile.radius, spec.profile.rho);
    return [spec, vp, vs, rho](const Vec<Dim>& x) {
      const double r = x.norm();
      const double d = (*rho)(r);
      const StiffnessVoigt<Dim> c = spec_stiffness<Dim>(spec, (*vp)(r), (*vs)(r), d);
      return MaterialPoint<Dim>{d, compliance_from_stiffness<Dim>(c)};
    };
  }
  const Medium<Dim> m = homogeneous_medium<Dim>(spec);
  const MaterialPoint<Dim> p{m.rho, compliance_from_stiffness<Dim>(m.c)};
  return [p](const Vec<Dim>&) { return p; };
}

template <int Dim>
MaterialField<Dim> build_material_field(const MaterialSpec& spec, const Mesh<Dim>& mesh) {
  if (spec.kind == MaterialKind::IsoRadial || spec.kind == MaterialKind::TtiRadial)
    return MaterialField<Dim>::sample(mesh, spec.field_order, make_sampler<Dim>(spec));
  const Medium<Dim> m = homogeneous_medium<Dim>(spec);
  return MaterialField<Dim>::constant(mesh.num_elements(), m.rho, compliance_from_stiffness<Dim>(m.c));
}

#define EHDG_INSTANTIATE(D)                                                                  \
  template class MaterialField<D>;                                                           \
  template MaterialPoint<D> eval_material<D>(const MaterialField<D>&, int, const Vec<D>&);  \
  template void require_spd_point<D>(const MaterialPoint<D>&, int, const Vec<D>&);          \
  template StiffnessVoigt<D> spec_stiffness<D>(const MaterialSpec&, double, double, double); \
  template Medium<D> homogeneous_medium<D>(const MaterialSpec&);                             \
  template MaterialField<D>::Sampler make_sampler<D>(const MaterialSpec&);                   \
  template MaterialField<D> build_material_field<D>(const MaterialSpec&, const Mesh<D>&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
