#include "r4/ccd.hpp"

#include <algorithm>
#include <set>

#include "r4/linalg.hpp"
#include "r4/rangetree.hpp"

namespace r4 {

namespace {

Point4 lifted(const Vec3& v, const Vec3& u, const ExactScalar& t) {
  return {v[0] + t * u[0], v[1] + t * u[1], v[2] + t * u[2], t};
}

ExactScalar eval(const Hyperplane4& h, const Point4& p) {
  ExactScalar v = -h.offset;
  for (std::size_t i = 0; i < 4; ++i) v += h.coeffs[i] * p[i];
  return v;
}

Hyperplane4 negated(Hyperplane4 h) {
  for (auto& c : h.coeffs) c = -c;
  h.offset = -h.offset;
  return h;
}

/// Oriented so that `inside` is strictly negative.
Hyperplane4 outward(const Tetrahedron4& facet, const Point4& inside) {
  Hyperplane4 h = hyperplane_of(facet);
  if (eval(h, inside).sign() == Sign::Pos) h = negated(h);
  return h;
}

bool boxes_disjoint(const Prism4& a, const Prism4& b) {
  for (std::size_t r = 0; r < 4; ++r) {
    auto [alo, ahi] = std::minmax_element(a.vertices.begin(), a.vertices.end(),
                                          [r](const Point4& x, const Point4& y) { return x[r] < y[r]; });
    auto [blo, bhi] = std::minmax_element(b.vertices.begin(), b.vertices.end(),
                                          [r](const Point4& x, const Point4& y) { return x[r] < y[r]; });
    if ((*ahi)[r] < (*blo)[r] || (*bhi)[r] < (*alo)[r]) return true;
  }
  return false;
}

/// Some facet hyperplane of `a` has every vertex of `b` strictly outside.
bool facet_separates(const Prism4& a, const Prism4& b) {
  for (const auto& h : a.facetHyperplanes) {
    bool all = true;
    for (const auto& v : b.vertices) {
      if (eval(h, v).sign() != Sign::Pos) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::optional<Point4> edges_vs_facets(const Prism4& a, const Prism4& b) {
  for (const auto& e : a.edges) {
    for (std::size_t k = 0; k < b.facetTetrahedra.size(); ++k) {
      if (auto x = segment_tetra_direct(e, b.facetTetrahedra[k], b.tetraPlanes[k])) return x;
    }
  }
  return std::nullopt;
}

using PairSet = std::set<std::pair<std::size_t, std::size_t>>;

struct Solver {
  const std::vector<Prism4>& prisms;   // original coordinates
  const std::vector<Prism4>& sheared;  // generic copy fed to the structures
  const CcdOptions& options;
  PairSet found;

  void pairwise(std::size_t lo, std::size_t mid, std::size_t hi) {
    for (std::size_t i = lo; i < mid; ++i) {
      for (std::size_t j = mid; j < hi; ++j) {
        if (prism_witness(prisms[i], prisms[j])) found.insert({i, j});
      }
    }
  }

  /// Edges of `red` prisms against facet tetrahedra of `blue` prisms.
  void edge_facet(std::size_t rlo, std::size_t rhi, std::size_t blo, std::size_t bhi) {
    std::vector<Segment4> edges;
    std::vector<Tetrahedron4> tets;
    for (std::size_t i = rlo; i < rhi; ++i) edges.insert(edges.end(), sheared[i].edges.begin(), sheared[i].edges.end());
    for (std::size_t j = blo; j < bhi; ++j) {
      tets.insert(tets.end(), sheared[j].facetTetrahedra.begin(), sheared[j].facetTetrahedra.end());
    }
    const auto st = MultiLevelStructure::build_tetrahedra(tets, batched_budget(edges.size(), tets.size()));
    const auto r = st.query_all(edges, QueryMode::Report);
    for (const auto& p : r.report.pairs) {
      const std::size_t i = rlo + p.a / 16;
      const std::size_t j = blo + p.b / 14;
      found.insert({std::min(i, j), std::max(i, j)});
    }
  }

  void bichromatic(std::size_t lo, std::size_t mid, std::size_t hi) {
    if (hi - lo <= options.oracleThreshold) {
      pairwise(lo, mid, hi);
      return;
    }
    edge_facet(lo, mid, mid, hi);
    edge_facet(mid, hi, lo, mid);
    std::vector<Triangle4> red, blue;
    for (std::size_t i = lo; i < mid; ++i) {
      red.insert(red.end(), sheared[i].boundaryTriangles.begin(), sheared[i].boundaryTriangles.end());
    }
    for (std::size_t j = mid; j < hi; ++j) {
      blue.insert(blue.end(), sheared[j].boundaryTriangles.begin(), sheared[j].boundaryTriangles.end());
    }
    const auto tri = batched_tri_tri(red, blue, QueryMode::Report);
    for (const auto& p : tri.report.pairs) found.insert({lo + p.a / 20, mid + p.b / 20});
    // Nested prisms have no boundary contact; containment is checked per pair.
    for (std::size_t i = lo; i < mid; ++i) {
      for (std::size_t j = mid; j < hi; ++j) {
        if (found.count({i, j})) continue;
        if (prisms[j].contains(prisms[i].vertices[0]) || prisms[i].contains(prisms[j].vertices[0])) {
          found.insert({i, j});
        }
      }
    }
  }

  void solve(std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    if (hi - lo <= options.oracleThreshold) {
      for (std::size_t i = lo; i < hi; ++i) pairwise(i, i + 1, hi);
      return;
    }
    solve(lo, mid);
    solve(mid, hi);
    bichromatic(lo, mid, hi);
  }
};

IntersectionReport finish(const std::vector<Prism4>& prisms, const PairSet& pairs, QueryMode mode) {
  IntersectionReport r;
  r.count = pairs.size();
  r.detected = !pairs.empty();
  if (mode == QueryMode::Detect) {
    r.count = r.detected ? 1 : 0;
    return r;
  }
  if (mode == QueryMode::Count) return r;
  for (const auto& [i, j] : pairs) {
    auto w = prism_witness(prisms[i], prisms[j]);
    if (!w) throw std::logic_error("collision pair without a prism witness");
    r.pairs.push_back({i, j, std::move(*w)});
  }
  return r;
}

}  // namespace

void MovingTetrahedron::validate() const {
  if (!(t0 < t1)) throw GeometryError("moving tetrahedron: empty time window");
  Matrix m(3, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t r = 0; r < 3; ++r) m(r, k) = vertices[k + 1][r] - vertices[0][r];
  }
  if (determinant_sign(m) == Sign::Zero) throw GeometryError("moving tetrahedron: flat");
}

std::array<Vec3, 4> MovingTetrahedron::at(const ExactScalar& t) const {
  std::array<Vec3, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t r = 0; r < 3; ++r) out[k][r] = vertices[k][r] + t * velocity[r];
  }
  return out;
}

bool Prism4::contains(const Point4& x) const {
  for (const auto& h : facetHyperplanes) {
    if (eval(h, x).sign() == Sign::Pos) return false;
  }
  return true;
}

Prism4 assemble_prism(const std::array<Point4, 8>& v) {
  Prism4 p;
  p.vertices = v;
  auto tet = [&v](int a, int b, int c, int d) { return Tetrahedron4{v[a], v[b], v[c], v[d]}; };
  p.facetTetrahedra.push_back(tet(0, 1, 2, 3));
  p.facetTetrahedra.push_back(tet(4, 5, 6, 7));
  p.facetHyperplanes.push_back(outward(p.facetTetrahedra[0], v[4]));
  p.facetHyperplanes.push_back(outward(p.facetTetrahedra[1], v[0]));
  for (int f = 0; f < 4; ++f) {
    // Staircase split: every side quad uses the diagonal from its lowest index.
    const auto [a, b, c] = kTetraFaces[f];
    p.facetTetrahedra.push_back(tet(a, b, c, c + 4));
    p.facetTetrahedra.push_back(tet(a, b, b + 4, c + 4));
    p.facetTetrahedra.push_back(tet(a, a + 4, b + 4, c + 4));
    p.facetHyperplanes.push_back(outward(p.facetTetrahedra[p.facetTetrahedra.size() - 3], v[f]));
  }
  for (const auto& t : p.facetTetrahedra) p.tetraPlanes.push_back(hyperplane_of(t));
  for (int cap = 0; cap < 2; ++cap) {
    for (const auto& [a, b, c] : kTetraFaces) {
      p.boundaryTriangles.push_back({v[a + 4 * cap], v[b + 4 * cap], v[c + 4 * cap]});
    }
  }
  for (const auto& [u, w] : kTetraEdges) {
    p.boundaryTriangles.push_back({v[u], v[w], v[w + 4]});
    p.boundaryTriangles.push_back({v[u], v[w + 4], v[u + 4]});
  }
  for (int cap = 0; cap < 2; ++cap) {
    for (const auto& [u, w] : kTetraEdges) p.edges.push_back({v[u + 4 * cap], v[w + 4 * cap]});
  }
  for (int k = 0; k < 4; ++k) p.edges.push_back({v[k], v[k + 4]});
  return p;
}

Prism4 lift(const MovingTetrahedron& mt) {
  mt.validate();
  std::array<Point4, 8> v;
  for (std::size_t k = 0; k < 4; ++k) {
    v[k] = lifted(mt.vertices[k], mt.velocity, mt.t0);
    v[k + 4] = lifted(mt.vertices[k], mt.velocity, mt.t1);
  }
  return assemble_prism(v);
}

std::optional<Point4> prism_witness(const Prism4& a, const Prism4& b) {
  if (boxes_disjoint(a, b) || facet_separates(a, b) || facet_separates(b, a)) return std::nullopt;
  for (const auto& v : a.vertices) {
    if (b.contains(v)) return v;
  }
  for (const auto& v : b.vertices) {
    if (a.contains(v)) return v;
  }
  if (auto x = edges_vs_facets(a, b)) return x;
  if (auto x = edges_vs_facets(b, a)) return x;
  for (const auto& s : a.boundaryTriangles) {
    for (const auto& t : b.boundaryTriangles) {
      if (auto x = tri_tri_witness(s, t)) return x;
    }
  }
  return std::nullopt;
}

IntersectionReport ccd_oracle(const std::vector<MovingTetrahedron>& scene, QueryMode mode) {
  std::vector<Prism4> prisms;
  for (const auto& mt : scene) prisms.push_back(lift(mt));
  IntersectionReport r;
  for (std::size_t i = 0; i < prisms.size(); ++i) {
    for (std::size_t j = i + 1; j < prisms.size(); ++j) {
      auto w = prism_witness(prisms[i], prisms[j]);
      if (!w) continue;
      r.detected = true;
      ++r.count;
      if (mode == QueryMode::Detect) return r;
      if (mode == QueryMode::Report) r.pairs.push_back({i, j, std::move(*w)});
    }
  }
  return r;
}

IntersectionReport detect_collisions(const std::vector<MovingTetrahedron>& scene, QueryMode mode,
                                     const CcdOptions& options) {
  std::vector<Prism4> prisms, sheared;
  const ShearMap map = shear_map(options.shearSalt);
  for (const auto& mt : scene) {
    prisms.push_back(lift(mt));
    std::array<Point4, 8> v;
    for (std::size_t k = 0; k < 8; ++k) v[k] = map.apply(prisms.back().vertices[k]);
    sheared.push_back(assemble_prism(v));
  }
  Solver solver{prisms, sheared, options, {}};
  solver.solve(0, prisms.size());
  return finish(prisms, solver.found, mode);
}

bool tetrahedra3_intersect(const std::array<Vec3, 4>& a, const std::array<Vec3, 4>& b) {
  auto embed = [](const std::array<Vec3, 4>& t) {
    std::vector<Point4> out;
    for (const auto& v : t) out.emplace_back(v[0], v[1], v[2], 0);
    return out;
  };
  return convex_hulls_intersect(embed(a), embed(b)).has_value();
}

}  // namespace r4
