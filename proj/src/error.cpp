#include "ehdg/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace ehdg {

namespace {

template <int Dim>
bool inside(const Mat<Dim>& jinv, const Vec<Dim>& x0, const Vec<Dim>& x, double tol) {
  const Vec<Dim> xi = jinv * (x - x0);
  return in_reference_simplex<Dim>(xi, tol);
}

double point_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_segment3(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c) {
  const Eigen::Vector3d n = (b - a).cross(c - a).normalized();
  const Eigen::Vector3d q = p - n.dot(p - a) * n;
  // Barycentric test of the projection.
  Eigen::Matrix<double, 3, 2> m;
  m << b - a, c - a;
  const Eigen::Vector2d st = m.colPivHouseholderQr().solve(q - a);
  if (st.minCoeff() >= 0.0 && st.sum() <= 1.0) return (p - q).norm();
  return std::min({point_segment3(p, a, b), point_segment3(p, b, c), point_segment3(p, c, a)});
}

}  // namespace

template <int Dim>
PointLocator<Dim>::PointLocator(const Mesh<Dim>& mesh, int bins_per_axis) : mesh_(&mesh) {
  const int ne = mesh.num_elements();
  n_ = bins_per_axis > 0 ? bins_per_axis
                         : std::max(1, static_cast<int>(std::ceil(std::pow(ne / 2.0, 1.0 / Dim))));
  lo_ = mesh.bbox_min();
  const Vec<Dim> ext = mesh.bbox_max() - lo_;
  width_ = (ext / n_).cwiseMax(1e-300);
  int total = 1;
  for (int d = 0; d < Dim; ++d) total *= n_;
  bins_.assign(total, {});
  jinv_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    jinv_[e] = mesh.jacobian(e).inverse();
    Vec<Dim> a = mesh.vertex(mesh.element(e)[0]), b = a;
    for (int v : mesh.element(e)) {
      a = a.cwiseMin(mesh.vertex(v));
      b = b.cwiseMax(mesh.vertex(v));
    }
    std::array<int, Dim> i0, i1;
    for (int d = 0; d < Dim; ++d) {
      i0[d] = std::clamp(static_cast<int>(std::floor((a(d) - lo_(d)) / width_(d))) - 1, 0, n_ - 1);
      i1[d] = std::clamp(static_cast<int>(std::floor((b(d) - lo_(d)) / width_(d))) + 1, 0, n_ - 1);
    }
    if constexpr (Dim == 2) {
      for (int i = i0[0]; i <= i1[0]; ++i)
        for (int j = i0[1]; j <= i1[1]; ++j) bins_[i * n_ + j].push_back(e);
    } else {
      for (int i = i0[0]; i <= i1[0]; ++i)
        for (int j = i0[1]; j <= i1[1]; ++j)
          for (int k = i0[2]; k <= i1[2]; ++k) bins_[(i * n_ + j) * n_ + k].push_back(e);
    }
  }
}

template <int Dim>
int PointLocator<Dim>::bin_of(const Vec<Dim>& x) const {
  int idx = 0;
  for (int d = 0; d < Dim; ++d) {
    const int i = static_cast<int>(std::floor((x(d) - lo_(d)) / width_(d)));
    if (i < -1 || i > n_) return -1;
    idx = idx * n_ + std::clamp(i, 0, n_ - 1);
  }
  return idx;
}

template <int Dim>
int PointLocator<Dim>::locate(const Vec<Dim>& x, double tol) const {
  const int b = bin_of(x);
  if (b < 0) return -1;
  for (int e : bins_[b])  // bins hold ascending element ids
    if (inside<Dim>(jinv_[e], mesh_->vertex(mesh_->element(e)[0]), x, tol)) return e;
  return -1;
}

template <int Dim>
int locate_brute_force(const Mesh<Dim>& mesh, const Vec<Dim>& x, double tol) {
  for (int e = 0; e < mesh.num_elements(); ++e)
    if (inside<Dim>(mesh.jacobian(e).inverse(), mesh.vertex(mesh.element(e)[0]), x, tol)) return e;
  return -1;
}

template <int Dim>
double domain_diameter(const Mesh<Dim>& mesh) {
  std::vector<int> verts;
  for (const auto& f : mesh.faces())
    if (f.is_boundary()) verts.insert(verts.end(), f.vertices.begin(), f.vertices.end());
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  double d = 0.0;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j)
      d = std::max(d, (mesh.vertex(verts[i]) - mesh.vertex(verts[j])).norm());
  return d;
}

template <int Dim>
double distance_to_boundary(const Mesh<Dim>& mesh, const Vec<Dim>& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    if constexpr (Dim == 2)
      best = std::min(best, point_segment(x, mesh.vertex(f.vertices[0]), mesh.vertex(f.vertices[1])));
    else
      best = std::min(best, point_triangle(x, mesh.vertex(f.vertices[0]), mesh.vertex(f.vertices[1]),
                                           mesh.vertex(f.vertices[2])));
  }
  return best;
}

template <int Dim>
std::vector<Vec<Dim>> error_grid(const Mesh<Dim>& mesh, const GridSpec<Dim>& spec) {
  const Vec<Dim> lo = mesh.bbox_min(), hi = mesh.bbox_max();
  const double margin = spec.boundary_margin * domain_diameter(mesh);
  std::vector<double> source_radius;
  for (const auto& s : spec.sources) source_radius.push_back(spec.source_margin * distance_to_boundary(mesh, s));
  const PointLocator<Dim> locator(mesh);

  std::array<int, Dim> idx{};
  int total = 1;
  for (int d = 0; d < Dim; ++d) {
    if (spec.n[d] < 1) throw ConfigError("error grid needs at least one point per axis");
    total *= spec.n[d];
  }
  std::vector<Vec<Dim>> out;
  for (int t = 0; t < total; ++t) {
    int r = t;
    for (int d = Dim - 1; d >= 0; --d) {
      idx[d] = r % spec.n[d];
      r /= spec.n[d];
    }
    Vec<Dim> x;
    for (int d = 0; d < Dim; ++d)
      x(d) = spec.n[d] == 1 ? 0.5 * (lo(d) + hi(d)) : lo(d) + (hi(d) - lo(d)) * idx[d] / (spec.n[d] - 1);
    if (locator.locate(x) < 0) continue;
    if (margin > 0.0 && distance_to_boundary(mesh, x) < margin) continue;
    bool near_source = false;
    for (std::size_t s = 0; s < spec.sources.size(); ++s)
      if ((x - spec.sources[s]).norm() < source_radius[s]) near_source = true;
    if (near_source) continue;
    out.push_back(x);
  }
  return out;
}

template <int Dim>
Samples<Dim> eval_solution(const Solution<Dim>& sol, const PointLocator<Dim>& locator,
                           const std::vector<Vec<Dim>>& points) {
  Samples<Dim> s;
  std::vector<int> owner;
  for (const auto& x : points) {
    const int e = locator.locate(x);
    if (e < 0) {
      ++s.skipped;
      continue;
    }
    s.points.push_back(x);
    owner.push_back(e);
  }
  const int n = static_cast<int>(s.points.size());
  s.u.resize(n, Dim);
  s.sigma.resize(n, kVoigt<Dim>);
  for (int i = 0; i < n; ++i) {
    s.u.row(i) = sol.displacement(owner[i], s.points[i]).transpose();
    s.sigma.row(i) = sol.stress(owner[i], s.points[i]).transpose();
  }
  return s;
}

template <int Dim>
Samples<Dim> eval_planewave(const Planewave<Dim>& pw, const std::vector<Vec<Dim>>& points) {
  Samples<Dim> s;
  s.points = points;
  const int n = static_cast<int>(points.size());
  s.u.resize(n, Dim);
  s.sigma.resize(n, kVoigt<Dim>);
  for (int i = 0; i < n; ++i) {
    s.u.row(i) = pw.u(points[i]).transpose();
    s.sigma.row(i) = pw.sigma(points[i]).transpose();
  }
  return s;
}

double relative_error(const Eigen::VectorXcd& ref, const Eigen::VectorXcd& sim) {
  if (ref.size() != sim.size() || ref.size() == 0) throw InputError("sample sets do not match");
  const double norm = ref.norm();
  if (norm == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (ref - sim).cwiseAbs().sum() / (static_cast<double>(ref.size()) * norm);
}

template <int Dim>
ErrorReport relative_errors(const Samples<Dim>& ref, const Samples<Dim>& sim) {
  if (ref.u.rows() != sim.u.rows() || ref.u.rows() == 0) throw InputError("sample sets do not match");
  ErrorReport r;
  r.n_points = static_cast<int>(ref.u.rows());
  auto fill = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, std::vector<double>& e,
                 std::vector<bool>& excl, double& total) {
    int used = 0;
    total = 0.0;
    const double largest = a.colwise().norm().maxCoeff();
    for (int c = 0; c < a.cols(); ++c) {
      const double v = a.col(c).norm() <= kNegligibleComponent * largest
                           ? std::numeric_limits<double>::quiet_NaN()
                           : relative_error(a.col(c), b.col(c));
      e.push_back(v);
      excl.push_back(std::isnan(v));
      if (!std::isnan(v)) {
        total += v;
        ++used;
      }
    }
    total = used > 0 ? total / used : std::numeric_limits<double>::quiet_NaN();
  };
  fill(ref.u, sim.u, r.e_u, r.excluded_u, r.total_u);
  fill(ref.sigma, sim.sigma, r.e_sigma, r.excluded_sigma, r.total_sigma);
  return r;
}

template <int Dim>
Samples<Dim> sqrt_rho_scaling(const Samples<Dim>& s, const std::vector<double>& rho) {
  if (rho.size() != s.points.size()) throw InputError("density samples do not match");
  Samples<Dim> out = s;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0)) throw InputError("density must be positive");
    const double r = std::sqrt(rho[i]);
    out.u.row(i) *= r;
    out.sigma.row(i) /= r;
  }
  return out;
}

template <int Dim>
void write_samples_csv(const Samples<Dim>& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  const char* axes = Dim == 2 ? "xz" : "xyz";
  const auto pairs = voigt_pairs<Dim>();
  os << "x";
  if constexpr (Dim == 2) os << ",z"; else os << ",y,z";
  for (int i = 0; i < Dim; ++i) os << ",re_u" << axes[i] << ",im_u" << axes[i];
  for (int j = 0; j < kVoigt<Dim>; ++j) {
    const char a = axes[pairs[j][0]], b = axes[pairs[j][1]];
    os << ",re_s" << a << b << ",im_s" << a << b;
  }
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    for (int d = 0; d < Dim; ++d) os << (d ? "," : "") << s.points[k](d);
    for (int i = 0; i < Dim; ++i) os << "," << s.u(k, i).real() << "," << s.u(k, i).imag();
    for (int j = 0; j < kVoigt<Dim>; ++j) os << "," << s.sigma(k, j).real() << "," << s.sigma(k, j).imag();
    os << "\n";
  }
}

#define EHDG_INSTANTIATE(D)                                                                  \
  template class PointLocator<D>;                                                            \
  template int locate_brute_force<D>(const Mesh<D>&, const Vec<D>&, double);                 \
  template double domain_diameter<D>(const Mesh<D>&);                                        \
  template double distance_to_boundary<D>(const Mesh<D>&, const Vec<D>&);                    \
  template std::vector<Vec<D>> error_grid<D>(const Mesh<D>&, const GridSpec<D>&);            \
  template Samples<D> eval_solution<D>(const Solution<D>&, const PointLocator<D>&,           \
                                       const std::vector<Vec<D>>&);                          \
  template Samples<D> eval_planewave<D>(const Planewave<D>&, const std::vector<Vec<D>>&);    \
  template ErrorReport relative_errors<D>(const Samples<D>&, const Samples<D>&);             \
  template Samples<D> sqrt_rho_scaling<D>(const Samples<D>&, const std::vector<double>&);    \
  template void write_samples_csv<D>(const Samples<D>&, const std::string&);

EHDG_INSTANTIATE(2)
EHDG_INSTANTIATE(3)
#undef EHDG_INSTANTIATE

}  // namespace ehdg
