#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ehdg/voigt.hpp"

namespace ehdg {

enum class BoundaryTag : std::uint8_t { Interior, Dirichlet, Neumann, Robin };

char tag_letter(BoundaryTag t);
BoundaryTag parse_tag(char c);

template <int Dim>
class Mesh {
 public:
  using Element = std::array<int, Dim + 1>;
  using FaceKey = std::array<int, Dim>;  // ascending global vertex ids
  using Points = Eigen::Matrix<double, Dim, Eigen::Dynamic>;

  struct FaceSide {
    int elem = -1;
    int local = -1;
  };
  struct Face {
    FaceKey vertices{};
    std::array<FaceSide, 2> side{};
    BoundaryTag tag = BoundaryTag::Interior;
    bool is_boundary() const { return side[1].elem < 0; }
  };

  Mesh() = default;
  // Negatively oriented elements are repaired by swapping two vertices. Boundary faces
  // missing from `tags` receive `default_tag`.
  Mesh(Points vertices, std::vector<Element> elements, const std::map<FaceKey, BoundaryTag>& tags,
       BoundaryTag default_tag = BoundaryTag::Dirichlet);

  int num_vertices() const { return static_cast<int>(vertices_.cols()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_repaired() const { return repaired_; }

  const Points& vertices() const { return vertices_; }
  Vec<Dim> vertex(int v) const { return vertices_.col(v); }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int e) const { return elements_[e]; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int k) const { return faces_[k]; }

  // Local face l is opposite local vertex l.
  int element_face(int e, int l) const { return element_faces_[e][l]; }
  // Local vertex indices of face (e,l) in ascending global id order.
  const std::array<int, Dim>& face_local_order(int e, int l) const { return face_order_[e][l]; }

  // Columns v_i - v_0.
  Mat<Dim> jacobian(int e) const;
  double volume(int e) const;
  Vec<Dim> centroid(int e) const;
  Vec<Dim> face_centroid(int k) const;
  double face_measure(int k) const;
  Vec<Dim> normal(int e, int l) const;

  void set_tag(int k, BoundaryTag t);
  Vec<Dim> bbox_min() const { return vertices_.rowwise().minCoeff(); }
  Vec<Dim> bbox_max() const { return vertices_.rowwise().maxCoeff(); }
  double diameter() const { return (bbox_max() - bbox_min()).norm(); }

  std::uint64_t checksum() const;

 private:
  void build_faces(const std::map<FaceKey, BoundaryTag>& tags, BoundaryTag default_tag);

  Points vertices_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
  std::vector<std::array<int, Dim + 1>> element_faces_;
  std::vector<std::array<std::array<int, Dim>, Dim + 1>> face_order_;
  int repaired_ = 0;
};

template <int Dim>
typename Mesh<Dim>::FaceKey make_face_key(std::array<int, Dim> v);

// Kuhn subdivision: 2 n^2 triangles or 6 n^3 tetrahedra; all boundary faces Dirichlet.
template <int Dim>
Mesh<Dim> generate_box(const Vec<Dim>& lo, const Vec<Dim>& hi, int n);

// Concentric layers graded geometrically toward the boundary (thickness ratio between
// consecutive layers), ring vertex counts matched to the local layer thickness.
// The centre is a vertex; the boundary is tagged Robin.
Mesh<2> generate_disk(double radius, int n_layers, double ratio = 0.7);

using AnyMesh = std::variant<Mesh<2>, Mesh<3>>;

// ASCII format: "dim nv ne ntagged", vertex lines, one-based element lines, "tag v1 v2 [v3]".
AnyMesh read_mesh(const std::string& path);
AnyMesh parse_mesh(const std::string& text);
template <int Dim>
void write_mesh(const Mesh<Dim>& mesh, const std::string& path);
template <int Dim>
std::string format_mesh(const Mesh<Dim>& mesh);

}  // namespace ehdg
