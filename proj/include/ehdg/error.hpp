#pragma once

#include <string>
#include <vector>

#include "ehdg/analytic.hpp"
#include "ehdg/hdg.hpp"

namespace ehdg {

// Uniform-bin spatial index over element bounding boxes. Returns the lowest-index element
// containing the point, or -1.
template <int Dim>
class PointLocator {
 public:
  explicit PointLocator(const Mesh<Dim>& mesh, int bins_per_axis = 0);
  int locate(const Vec<Dim>& x, double tol = 1e-10) const;

 private:
  int bin_of(const Vec<Dim>& x) const;
  const Mesh<Dim>* mesh_;
  Vec<Dim> lo_, width_;
  int n_ = 1;
  std::vector<std::vector<int>> bins_;
  std::vector<Mat<Dim>> jinv_;
};

template <int Dim>
int locate_brute_force(const Mesh<Dim>& mesh, const Vec<Dim>& x, double tol = 1e-10);

// Largest distance between two boundary vertices.
template <int Dim>
double domain_diameter(const Mesh<Dim>& mesh);

// Distance from x to the nearest boundary face.
template <int Dim>
double distance_to_boundary(const Mesh<Dim>& mesh, const Vec<Dim>& x);

template <int Dim>
struct GridSpec {
  std::array<int, Dim> n{};  // points per axis over the mesh bounding box
  double boundary_margin = 0.05;  // fraction of the domain diameter
  double source_margin = 0.10;    // fraction of the source-to-boundary distance
  std::vector<Vec<Dim>> sources;
};

// Cartesian points over the bounding box, minus the excluded margins and points outside the mesh.
template <int Dim>
std::vector<Vec<Dim>> error_grid(const Mesh<Dim>& mesh, const GridSpec<Dim>& spec);

template <int Dim>
struct Samples {
  std::vector<Vec<Dim>> points;
  Eigen::MatrixXcd u;      // (N x Dim)
  Eigen::MatrixXcd sigma;  // (N x kVoigt)
  int skipped = 0;
};

// Points outside every element are dropped and counted in `skipped`.
template <int Dim>
Samples<Dim> eval_solution(const Solution<Dim>& sol, const PointLocator<Dim>& locator,
                           const std::vector<Vec<Dim>>& points);

template <int Dim>
Samples<Dim> eval_planewave(const Planewave<Dim>& pw, const std::vector<Vec<Dim>>& points);

struct ErrorReport {
  std::vector<double> e_u, e_sigma;  // per component; NaN for excluded components
  std::vector<bool> excluded_u, excluded_sigma;
  double total_u = 0.0, total_sigma = 0.0;
  int n_points = 0;
};

// (1/N) sum_k |ref_k - sim_k| / sqrt(sum_k |ref_k|^2); NaN when the reference vanishes.
double relative_error(const Eigen::VectorXcd& ref, const Eigen::VectorXcd& sim);

// Components whose reference norm is below kNegligibleComponent times the largest component of
// the same field (u or sigma) are excluded; they vanish analytically and only carry round-off.
// Totals average the remaining components.
inline constexpr double kNegligibleComponent = 1e-10;
template <int Dim>
ErrorReport relative_errors(const Samples<Dim>& ref, const Samples<Dim>& sim);

// u <- sqrt(rho) u and sigma <- sigma / sqrt(rho), pointwise.
template <int Dim>
Samples<Dim> sqrt_rho_scaling(const Samples<Dim>& s, const std::vector<double>& rho);

// Columns x, y[, z], then re/im of every u and sigma component.
template <int Dim>
void write_samples_csv(const Samples<Dim>& s, const std::string& path);

}  // namespace ehdg
