#include "ehdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>

namespace ehdg {

char tag_letter(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::Dirichlet: return 'D';
    case BoundaryTag::Neumann: return 'N';
    case BoundaryTag::Robin: return 'R';
    case BoundaryTag::Interior: break;
  }
  return 'I';
}

BoundaryTag parse_tag(char c) {
  switch (c) {
    case 'D': return BoundaryTag::Dirichlet;
    case 'N': return BoundaryTag::Neumann;
    case 'R': return BoundaryTag::Robin;
  }
  throw ValidationError(std::string("unknown boundary tag '") + c + "'");
}

template <int Dim>
typename Mesh<Dim>::FaceKey make_face_key(std::array<int, Dim> v) {
  std::sort(v.begin(), v.end());
  return v;
}

template <int Dim>
Mesh<Dim>::Mesh(Points vertices, std::vector<Element> elements,
                const std::map<FaceKey, BoundaryTag>& tags, BoundaryTag default_tag)
    : vertices_(std::move(vertices)), elements_(std::move(elements)) {
  std::set<Element> seen;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    Element& el = elements_[e];
    for (int v : el)
      if (v < 0 || v >= num_vertices())
        throw ValidationError("element " + std::to_string(e) + " references a missing vertex");
    Element sorted = el;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("element " + std::to_string(e) + " repeats a vertex");
    if (!seen.insert(sorted).second)
      throw ValidationError("duplicated element " + std::to_string(e));
    const double det = jacobian(static_cast<int>(e)).determinant();
    double scale = 1.0;
    for (int d = 1; d <= Dim; ++d) scale *= (vertex(el[d]) - vertex(el[0])).norm();
    if (std::abs(det) <= 1e-12 * scale)
      throw ValidationError("element " + std::to_string(e) + " is degenerate");
    if (det < 0.0) {
      std::swap(el[1], el[2]);
      ++repaired_;
    }
  }
  build_faces(tags, default_tag);
}

template <int Dim>
void Mesh<Dim>::build_faces(const std::map<FaceKey, BoundaryTag>& tags, BoundaryTag default_tag) {
  struct Incidence {
    FaceKey key;
    int elem;
    int local;
  };
  std::vector<Incidence> inc;
  inc.reserve(elements_.size() * (Dim + 1));
  face_order_.assign(elements_.size(), {});
  for (int e = 0; e < num_elements(); ++e) {
    const Element& el = elements_[e];
    for (int l = 0; l <= Dim; ++l) {
      std::array<int, Dim> locals{};
      int c = 0;
      for (int i = 0; i <= Dim; ++i)
        if (i != l) locals[c++] = i;
      std::sort(locals.begin(), locals.end(), [&](int a, int b) { return el[a] < el[b]; });
      face_order_[e][l] = locals;
      FaceKey key;
      for (int i = 0; i < Dim; ++i) key[i] = el[locals[i]];
      inc.push_back({key, e, l});
    }
  }
  std::sort(inc.begin(), inc.end(), [](const Incidence& a, const Incidence& b) {
    return std::tie(a.key, a.elem, a.local) < std::tie(b.key, b.elem, b.local);
  });
  faces_.clear();
  element_faces_.assign(elements_.size(), {});
  for (std::size_t i = 0; i < inc.size();) {
    std::size_t j = i;
    while (j < inc.size() && inc[j].key == inc[i].key) ++j;
    if (j - i > 2) throw ValidationError("face shared by more than two elements");
    Face f;
    f.vertices = inc[i].key;
    const int k = static_cast<int>(faces_.size());
    for (std::size_t s = i; s < j; ++s) {
      f.side[s - i] = {inc[s].elem, inc[s].local};
      element_faces_[inc[s].elem][inc[s].local] = k;
    }
    if (f.is_boundary()) {
      auto it = tags.find(f.vertices);
      f.tag = it != tags.end() ? it->second : default_tag;
    } else {
      f.tag = BoundaryTag::Interior;
    }
    faces_.push_back(f);
    i = j;
  }
  for (const auto& [key, tag] : tags) {
    auto it = std::lower_bound(faces_.begin(), faces_.end(), key,
                               [](const Face& f, const FaceKey& k) { return f.vertices < k; });
    if (it == faces_.end() || it->vertices != key || !it->is_boundary())
      throw ValidationError("tagged face is not a boundary face of the mesh");
  }
}

template <int Dim>
Mat<Dim> Mesh<Dim>::jacobian(int e) const {
  const Element& el = elements_[e];
  Mat<Dim> j;
  for (int d = 0; d < Dim; ++d) j.col(d) = vertices_.col(el[d + 1]) - vertices_.col(el[0]);
  return j;
}

template <int Dim>
double Mesh<Dim>::volume(int e) const {
  return std::abs(jacobian(e).determinant()) / (Dim == 2 ? 2.0 : 6.0);
}

template <int Dim>
Vec<Dim> Mesh<Dim>::centroid(int e) const {
  Vec<Dim> c = Vec<Dim>::Zero();
  for (int v : elements_[e]) c += vertices_.col(v);
  return c / (Dim + 1);
}

template <int Dim>
Vec<Dim> Mesh<Dim>::face_centroid(int k) const {
  Vec<Dim> c = Vec<Dim>::Zero();
  for (int v : faces_[k].vertices) c += vertices_.col(v);
  return c / Dim;
}

template <int Dim>
double Mesh<Dim>::face_measure(int k) const {
  const FaceKey& v = faces_[k].vertices;
  if constexpr (Dim == 2) {
    return (vertices_.col(v[1]) - vertices_.col(v[0])).norm();
  } else {
    const Eigen::Vector3d a = vertices_.col(v[1]) - vertices_.col(v[0]);
    const Eigen::Vector3d b = vertices_.col(v[2]) - vertices_.col(v[0]);
    return 0.5 * a.cross(b).norm();
  }
}

template <int Dim>
Vec<Dim> Mesh<Dim>::normal(int e, int l) const {
  // Outward normal of the face opposite vertex l is -grad(lambda_l).
  const Mat<Dim> jinv_t = jacobian(e).inverse().transpose();
  Vec<Dim> g;
  if (l == 0)
    g = jinv_t * (-Vec<Dim>::Ones());
  else
    g = jinv_t * Vec<Dim>::Unit(l - 1);
  return (-g).normalized();
}

template <int Dim>
void Mesh<Dim>::set_tag(int k, BoundaryTag t) {
  if (!faces_[k].is_boundary()) throw ValidationError("cannot tag an interior face");
  if (t == BoundaryTag::Interior) throw ValidationError("boundary face needs a boundary tag");
  faces_[k].tag = t;
}

template <int Dim>
std::uint64_t Mesh<Dim>::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  mix(vertices_.data(), sizeof(double) * vertices_.size());
  for (const Element& el : elements_) mix(el.data(), sizeof(int) * el.size());
  for (const Face& f : faces_) mix(&f.tag, sizeof(f.tag));
  return h;
}

template <int Dim>
Mesh<Dim> generate_box(const Vec<Dim>& lo, const Vec<Dim>& hi, int n) {
  if (n < 1) throw InputError("generate_box: n must be at least 1");
  const int np = n + 1;
  int nv = 1;
  for (int d = 0; d < Dim; ++d) nv *= np;
  typename Mesh<Dim>::Points pts(Dim, nv);
  auto vid = [np](const std::array<int, Dim>& ijk) {
    int id = 0;
    for (int d = Dim - 1; d >= 0; --d) id = id * np + ijk[d];
    return id;
  };
  std::array<int, Dim> ijk{};
  for (int v = 0; v < nv; ++v) {
    int rem = v;
    for (int d = 0; d < Dim; ++d) {
      ijk[d] = rem % np;
      rem /= np;
    }
    for (int d = 0; d < Dim; ++d) pts(d, v) = lo(d) + (hi(d) - lo(d)) * ijk[d] / double(n);
  }
  std::vector<typename Mesh<Dim>::Element> elements;
  std::array<int, Dim> perm;
  for (int d = 0; d < Dim; ++d) perm[d] = d;
  int ncell = 1;
  for (int d = 0; d < Dim; ++d) ncell *= n;
  for (int c = 0; c < ncell; ++c) {
    std::array<int, Dim> base{};
    int rem = c;
    for (int d = 0; d < Dim; ++d) {
      base[d] = rem % n;
      rem /= n;
    }
    std::array<int, Dim> p = perm;
    do {
      typename Mesh<Dim>::Element el;
      std::array<int, Dim> cur = base;
      el[0] = vid(cur);
      for (int d = 0; d < Dim; ++d) {
        ++cur[p[d]];
        el[d + 1] = vid(cur);
      }
      elements.push_back(el);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  return Mesh<Dim>(std::move(pts), std::move(elements), {}, BoundaryTag::Dirichlet);
}

Mesh<2> generate_disk(double radius, int n_layers, double ratio) {
  if (n_layers < 2) throw InputError("generate_disk: need at least 2 layers");
  if (!(ratio > 0.0) || !(radius > 0.0)) throw InputError("generate_disk: invalid parameters");
  const double pi = std::numbers::pi;
  std::vector<double> thick(n_layers);
  double total = 0.0;
  for (int k = 0; k < n_layers; ++k) {
    thick[k] = std::pow(ratio, k);
    total += thick[k];
  }
  std::vector<double> r(n_layers + 1, 0.0);
  for (int k = 0; k < n_layers; ++k) {
    thick[k] *= radius / total;
    r[k + 1] = r[k] + thick[k];
  }
  r[n_layers] = radius;
  std::vector<int> count(n_layers + 1, 1);
  for (int k = 1; k <= n_layers; ++k) {
    const int want = static_cast<int>(std::lround(2.0 * pi * r[k] / thick[k - 1]));
    count[k] = std::max({6, count[k - 1], want});
  }
  std::vector<int> offset(n_layers + 1, 0);
  int nv = 1;
  for (int k = 1; k <= n_layers; ++k) {
    offset[k] = nv;
    nv += count[k];
  }
  Mesh<2>::Points pts(2, nv);
  pts.col(0).setZero();
  auto angle = [&](int k, int j) { return 2.0 * pi * (j + 0.5 * (k % 2)) / count[k]; };
  for (int k = 1; k <= n_layers; ++k)
    for (int j = 0; j < count[k]; ++j) {
      const double a = angle(k, j);
      pts(0, offset[k] + j) = r[k] * std::cos(a);
      pts(1, offset[k] + j) = r[k] * std::sin(a);
    }
  std::vector<Mesh<2>::Element> elements;
  for (int j = 0; j < count[1]; ++j)
    elements.push_back({0, offset[1] + j, offset[1] + (j + 1) % count[1]});
  for (int k = 1; k < n_layers; ++k) {
    const int na = count[k], nb = count[k + 1];
    int ia = 0, ib = 0;
    while (ia < na || ib < nb) {
      const double next_a = angle(k, ia + 1);
      const double next_b = angle(k + 1, ib + 1);
      const int a0 = offset[k] + ia % na, a1 = offset[k] + (ia + 1) % na;
      const int b0 = offset[k + 1] + ib % nb, b1 = offset[k + 1] + (ib + 1) % nb;
      if (ia < na && (ib == nb || next_a <= next_b)) {
        elements.push_back({a0, b0, a1});
        ++ia;
      } else {
        elements.push_back({a0, b0, b1});
        ++ib;
      }
    }
  }
  return Mesh<2>(std::move(pts), std::move(elements), {}, BoundaryTag::Robin);
}

namespace {

template <int Dim>
Mesh<Dim> parse_body(std::istringstream& in, int nv, int ne, int nt, int& line) {
  std::string text;
  auto next_line = [&](const char* what) {
    while (std::getline(in, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") != std::string::npos) return;
    }
    throw ValidationError(std::string("unexpected end of file while reading ") + what);
  };
  auto fail = [&](const std::string& msg) {
    throw ValidationError("line " + std::to_string(line) + ": " + msg);
  };
  typename Mesh<Dim>::Points pts(Dim, nv);
  for (int v = 0; v < nv; ++v) {
    next_line("vertices");
    std::istringstream ls(text);
    for (int d = 0; d < Dim; ++d)
      if (!(ls >> pts(d, v))) fail("expected " + std::to_string(Dim) + " coordinates");
  }
  std::vector<typename Mesh<Dim>::Element> elements(ne);
  for (int e = 0; e < ne; ++e) {
    next_line("elements");
    std::istringstream ls(text);
    for (int i = 0; i <= Dim; ++i) {
      if (!(ls >> elements[e][i])) fail("expected " + std::to_string(Dim + 1) + " vertex ids");
      if (elements[e][i] < 1 || elements[e][i] > nv) fail("vertex id out of range");
      --elements[e][i];
    }
  }
  std::map<typename Mesh<Dim>::FaceKey, BoundaryTag> tags;
  for (int t = 0; t < nt; ++t) {
    next_line("tagged faces");
    std::istringstream ls(text);
    std::string tag;
    if (!(ls >> tag) || tag.size() != 1) fail("expected a boundary tag");
    BoundaryTag bt;
    try {
      bt = parse_tag(tag[0]);
    } catch (const ValidationError& e) {
      fail(e.what());
    }
    std::array<int, Dim> v{};
    for (int i = 0; i < Dim; ++i) {
      if (!(ls >> v[i])) fail("expected face vertex ids");
      if (v[i] < 1 || v[i] > nv) fail("vertex id out of range");
      --v[i];
    }
    tags[make_face_key<Dim>(v)] = bt;
  }
  return Mesh<Dim>(std::move(pts), std::move(elements), tags, BoundaryTag::Dirichlet);
}

}  // namespace

AnyMesh parse_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  int line = 0;
  while (std::getline(in, header)) {
    ++line;
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::istringstream hs(header);
  int dim = 0, nv = 0, ne = 0, nt = 0;
  if (!(hs >> dim >> nv >> ne >> nt) || nv < 0 || ne < 0 || nt < 0)
    throw ValidationError("line " + std::to_string(line) + ": malformed header");
  if (dim == 2) return parse_body<2>(in, nv, ne, nt, line);
  if (dim == 3) return parse_body<3>(in, nv, ne, nt, line);
  throw ValidationError("line " + std::to_string(line) + ": dimension must be 2 or 3");
}

AnyMesh read_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open mesh file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_mesh(ss.str());
}

template <int Dim>
std::string format_mesh(const Mesh<Dim>& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  int ntag = 0;
  for (const auto& f : mesh.faces()) ntag += f.is_boundary();
  out << Dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << ' ' << ntag << '\n';
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int d = 0; d < Dim; ++d) out << (d ? " " : "") << mesh.vertices()(d, v);
    out << '\n';
  }
  for (const auto& el : mesh.elements()) {
    for (int i = 0; i <= Dim; ++i) out << (i ? " " : "") << el[i] + 1;
    out << '\n';
  }
  for (const auto& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    out << tag_letter(f.tag);
    for (int v : f.vertices) out << ' ' << v + 1;
    out << '\n';
  }
  return out.str();
}

template <int Dim>
void write_mesh(const Mesh<Dim>& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write mesh file " + path);
  f << format_mesh(mesh);
}

template class Mesh<2>;
template class Mesh<3>;
template Mesh<2>::FaceKey make_face_key<2>(std::array<int, 2>);
template Mesh<3>::FaceKey make_face_key<3>(std::array<int, 3>);
template Mesh<2> generate_box<2>(const Vec<2>&, const Vec<2>&, int);
template Mesh<3> generate_box<3>(const Vec<3>&, const Vec<3>&, int);
template std::string format_mesh<2>(const Mesh<2>&);
template std::string format_mesh<3>(const Mesh<3>&);
template void write_mesh<2>(const Mesh<2>&, const std::string&);
template void write_mesh<3>(const Mesh<3>&, const std::string&);

}  // namespace ehdg
