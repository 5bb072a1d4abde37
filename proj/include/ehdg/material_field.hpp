#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ehdg/basis.hpp"
#include "ehdg/material.hpp"
#include "ehdg/mesh.hpp"

namespace ehdg {

template <int Dim>
struct MaterialPoint {
  double rho = 1.0;
  ComplianceVoigt<Dim> s;
};

// Per-cell nodal polynomials of order q for rho and the upper-triangular compliance entries.
template <int Dim>
class MaterialField {
 public:
  static constexpr int kParams = 1 + kVoigt<Dim> * (kVoigt<Dim> + 1) / 2;
  using Sampler = std::function<MaterialPoint<Dim>(const Vec<Dim>&)>;

  MaterialField() = default;
  MaterialField(int n_cells, int order);

  static MaterialField constant(int n_cells, double rho, const ComplianceVoigt<Dim>& s);
  // Nodal interpolation of `f` on every cell.
  static MaterialField sample(const Mesh<Dim>& mesh, int order, const Sampler& f);

  int order() const { return basis_.order(); }
  int num_cells() const { return n_cells_; }
  const SimplexBasis<Dim>& basis() const { return basis_; }

  void set_node(int cell, int node, const MaterialPoint<Dim>& p);
  MaterialPoint<Dim> node(int cell, int node) const;

  // `values` are the nodal basis values (1 x n_nodes) at the evaluation point.
  MaterialPoint<Dim> eval_values(int cell, const Eigen::Ref<const Eigen::RowVectorXd>& values) const;

 private:
  int n_cells_ = 0;
  SimplexBasis<Dim> basis_;
  // (n_nodes) x (kParams * n_cells)
  Eigen::MatrixXd data_;
};

// Evaluates at a point of the unit reference simplex; throws InputError outside it.
template <int Dim>
MaterialPoint<Dim> eval_material(const MaterialField<Dim>& field, int cell, const Vec<Dim>& ref);

// Throws AssemblyError naming the cell when D S D is not positive definite.
template <int Dim>
void require_spd_point(const MaterialPoint<Dim>& p, int cell, const Vec<Dim>& x);

enum class MaterialKind { Iso, Vti, Tti, IsoRadial, TtiRadial };

MaterialKind parse_material_kind(const std::string& s);
std::string to_string(MaterialKind k);

// Radial table; vp/vs are (cp, cs) for iso kinds and (vp0, vs0) for TI kinds.
struct RadialProfile {
  std::vector<double> radius;
  std::vector<double> vp;
  std::vector<double> vs;
  std::vector<double> rho;
};

struct MaterialSpec {
  MaterialKind kind = MaterialKind::Iso;
  double rho = 1.0;
  double vp = 0.0;
  double vs = 0.0;
  // Optional explicit moduli for iso (lambda, mu) and vti (Cij).
  bool has_lame = false;
  double lambda = 0.0, mu = 0.0;
  bool has_cij = false;
  double c11 = 0.0, c33 = 0.0, c44 = 0.0, c66 = 0.0, c13 = 0.0;
  double epsilon = 0.0, delta = 0.0, gamma = 0.0;
  double theta_deg = 0.0;
  int field_order = 2;
  RadialProfile profile;
};

// Stiffness and density of a homogeneous spec (the profile is ignored).
template <int Dim>
StiffnessVoigt<Dim> spec_stiffness(const MaterialSpec& spec, double vp, double vs, double rho);
template <int Dim>
Medium<Dim> homogeneous_medium(const MaterialSpec& spec);

// Point evaluation of a spec at a physical position (radial kinds use the spline profile).
template <int Dim>
typename MaterialField<Dim>::Sampler make_sampler(const MaterialSpec& spec);

template <int Dim>
MaterialField<Dim> build_material_field(const MaterialSpec& spec, const Mesh<Dim>& mesh);

}  // namespace ehdg
