#include <algorithm>
#include <map>
#include <mutex>

#include "ehdg/hdg.hpp"

namespace ehdg {

template <int Dim>
int ReferenceElement<Dim>::face_key(const std::array<int, Dim>& a) {
  int key = 0;
  for (int i = Dim - 1; i >= 0; --i) key = key * (Dim + 1) + a[i];
  return key;
}

template <int Dim>
const typename ReferenceElement<Dim>::FaceTable& ReferenceElement<Dim>::face(
    const std::array<int, Dim>& local_order) const {
  return faces_[face_key(local_order)];
}

template <int Dim>
std::shared_ptr<const ReferenceElement<Dim>> make_basis(int order, int material_order) {
  if (order < 1 || order > 10) throw ConfigError("polynomial order must be in 1..10");
  if (material_order < 0) throw ConfigError("material order must be nonnegative");

  // Tables are immutable; reuse them across solves of the same orders.
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const ReferenceElement<Dim>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find({order, material_order}); it != cache.end()) return it->second;

  auto r = std::make_shared<ReferenceElement<Dim>>();
  r->order = order;
  r->material_order = material_order;
  r->vol = SimplexBasis<Dim>(order);
  r->trace = SimplexBasis<Dim - 1>(order);
  const SimplexBasis<Dim> mat(material_order);
  const int degree = 2 * order + material_order + 1;

  r->vq = make_quadrature<Dim>(degree);
  r->vphi = r->vol.eval(r->vq.points);
  r->vgrad = r->vol.grad(r->vq.points);
  r->vmat = mat.eval(r->vq.points);

  r->fq = make_quadrature<Dim - 1>(degree);
  r->fxi = r->trace.eval(r->fq.points);

  RefPoints<Dim> corners = RefPoints<Dim>::Zero(Dim, Dim + 1);
  for (int d = 0; d < Dim; ++d) corners(d, d + 1) = 1.0;

  int n_keys = 1;
  for (int i = 0; i < Dim; ++i) n_keys *= Dim + 1;
  r->faces_.resize(n_keys);
  std::array<int, Dim + 1> perm;
  for (int i = 0; i <= Dim; ++i) perm[i] = i;
  // Every ordered choice of Dim distinct local vertices.
  do {
    std::array<int, Dim> a;
    std::copy_n(perm.begin(), Dim, a.begin());
    auto& t = r->faces_[ReferenceElement<Dim>::face_key(a)];
    if (t.phi.size() > 0) continue;
    t.ref.resize(Dim, r->fq.size());
    for (int q = 0; q < r->fq.size(); ++q) {
      Vec<Dim> x = corners.col(a[0]);
      for (int i = 0; i + 1 < Dim; ++i) x += r->fq.points(i, q) * (corners.col(a[i + 1]) - corners.col(a[0]));
      t.ref.col(q) = x;
    }
    t.phi = r->vol.eval(t.ref);
    t.mat = mat.eval(t.ref);
  } while (std::next_permutation(perm.begin(), perm.end()));

  cache[{order, material_order}] = r;
  return r;
}

template struct ReferenceElement<2>;
template struct ReferenceElement<3>;
template std::shared_ptr<const ReferenceElement<2>> make_basis<2>(int, int);
template std::shared_ptr<const ReferenceElement<3>> make_basis<3>(int, int);

}  // namespace ehdg
