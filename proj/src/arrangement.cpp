#include "r4/arrangement.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "r4/linalg.hpp"
#include "r4/rangetree.hpp"

namespace r4 {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
ExactScalar dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
bool is_zero(const Vec3& v) { return v[0].is_zero() && v[1].is_zero() && v[2].is_zero(); }
ExactScalar abs_of(const ExactScalar& v) { return v.sign() == Sign::Neg ? -v : v; }

ArrangementVertex make_vertex(VertexKind kind, const std::vector<std::size_t>& ids, const std::vector<int>& feats,
                              const Point4& p) {
  std::vector<std::size_t> order(ids.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  ArrangementVertex v;
  v.kind = kind;
  v.point = p;
  for (std::size_t k : order) {
    v.tetra.push_back(ids[k]);
    v.feature.push_back(feats[k]);
  }
  return v;
}

/// 2-faces (owner, local face) containing a polygon vertex.
std::set<std::pair<std::size_t, int>> faces_of(const ArrangementVertex& v) {
  std::set<std::pair<std::size_t, int>> out;
  for (std::size_t k = 0; k < v.tetra.size(); ++k) {
    const int f = v.feature[k];
    if (f < 0) continue;
    if (v.kind == VertexKind::EdgeTetra) {
      const auto [p, q] = kTetraEdges[f];
      for (int face = 0; face < 4; ++face) {
        if (face != p && face != q) out.insert({v.tetra[k], face});
      }
    } else {
      out.insert({v.tetra[k], f});
    }
  }
  return out;
}

/// A polygon inside a 3-dimensional chart, with its supporting plane and the
/// 2-face carrying each boundary edge.
struct ChartPolygon {
  std::size_t other = 0;
  std::vector<Vec3> pts;
  std::vector<std::pair<std::size_t, int>> edgeFace;  // edge k joins pts[k], pts[k+1]
  Vec3 normal;
  ExactScalar offset;
  std::size_t dropAxis = 0;
  Sign orientation = Sign::Zero;
};

std::array<ExactScalar, 2> in_plane(const Vec3& p, std::size_t drop) {
  std::array<ExactScalar, 2> out;
  std::size_t k = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    if (r != drop) out[k++] = p[r];
  }
  return out;
}

Sign orient2(const std::array<ExactScalar, 2>& a, const std::array<ExactScalar, 2>& b,
             const std::array<ExactScalar, 2>& c) {
  return ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).sign();
}

enum class Where { Inside, Outside, Boundary };

/// Position of a point of the polygon's plane relative to the polygon. Edges
/// carried by `onFace` are skipped: a point of that 2-face lies on their
/// line, and strict inside-ness for the rest puts it inside that edge.
Where locate(const ChartPolygon& poly, const Vec3& x,
             std::pair<std::size_t, int> onFace = {static_cast<std::size_t>(-1), -1}) {
  const auto q = in_plane(x, poly.dropAxis);
  bool boundary = false;
  for (std::size_t k = 0; k < poly.pts.size(); ++k) {
    if (poly.edgeFace[k] == onFace) continue;
    const Sign s = orient2(in_plane(poly.pts[k], poly.dropAxis),
                           in_plane(poly.pts[(k + 1) % poly.pts.size()], poly.dropAxis), q);
    if (s == -poly.orientation) return Where::Outside;
    if (s == Sign::Zero) boundary = true;
  }
  return boundary ? Where::Boundary : Where::Inside;
}

ChartPolygon to_chart(const IntersectionPolygon& poly, std::size_t t0, const HyperplaneChart& chart) {
  ChartPolygon c;
  c.other = poly.i == t0 ? poly.j : poly.i;
  const std::size_t n = poly.orderedVertices.size();
  for (const auto& p : poly.orderedVertices) c.pts.push_back(chart.project(p));
  for (std::size_t k = 0; k < n; ++k) {
    const auto a = faces_of(poly.sources[k]);
    const auto b = faces_of(poly.sources[(k + 1) % n]);
    std::vector<std::pair<std::size_t, int>> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (common.size() != 1) throw DegeneratePosition("polygon edge not carried by a single 2-face");
    c.edgeFace.push_back(common[0]);
  }
  for (std::size_t k = 2; k < n && is_zero(c.normal); ++k) c.normal = cross(sub(c.pts[1], c.pts[0]), sub(c.pts[k], c.pts[0]));
  if (is_zero(c.normal)) throw DegeneratePosition("collinear intersection polygon");
  c.offset = dot(c.normal, c.pts[0]);
  for (std::size_t r = 1; r < 3; ++r) {
    if (abs_of(c.normal[r]) > abs_of(c.normal[c.dropAxis])) c.dropAxis = r;
  }
  for (std::size_t k = 2; k < n && c.orientation == Sign::Zero; ++k) {
    c.orientation = orient2(in_plane(c.pts[0], c.dropAxis), in_plane(c.pts[1], c.dropAxis),
                            in_plane(c.pts[k], c.dropAxis));
  }
  return c;
}

std::vector<Point4> embed(const std::vector<Vec3>& pts) {
  std::vector<Point4> out;
  for (const auto& p : pts) out.emplace_back(p[0], p[1], p[2], 0);
  return out;
}

}  // namespace

std::vector<Triangle4> IntersectionPolygon::triangles() const {
  std::vector<Triangle4> out;
  for (std::size_t k = 1; k + 1 < orderedVertices.size(); ++k) {
    out.push_back({orderedVertices[0], orderedVertices[k], orderedVertices[k + 1]});
  }
  return out;
}

Vec3 HyperplaneChart::project(const Point4& p) const {
  Vec3 out;
  std::size_t k = 0;
  for (std::size_t r = 0; r < 4; ++r) {
    if (r != drop) out[k++] = p[r];
  }
  return out;
}

Point4 HyperplaneChart::lift(const Vec3& x) const {
  Point4 p;
  ExactScalar rest = h.offset;
  std::size_t k = 0;
  for (std::size_t r = 0; r < 4; ++r) {
    if (r == drop) continue;
    p[r] = x[k];
    rest -= h.coeffs[r] * x[k];
    ++k;
  }
  p[drop] = rest / h.coeffs[drop];
  return p;
}

HyperplaneChart chart_of(const Tetrahedron4& t) {
  HyperplaneChart c;
  c.h = hyperplane_of(t);
  for (std::size_t r = 1; r < 4; ++r) {
    if (abs_of(c.h.coeffs[r]) > abs_of(c.h.coeffs[c.drop])) c.drop = r;
  }
  return c;
}

std::vector<PairWitness> pairwise(const std::vector<Tetrahedron4>& tetrahedra) {
  const std::size_t n = tetrahedra.size();
  if (n < 2) return {};
  std::map<std::pair<std::size_t, std::size_t>, PairWitness> found;

  std::vector<Segment4> edges;
  for (const auto& t : tetrahedra) {
    for (int e = 0; e < 6; ++e) {
      const auto p = edge_points(t, e);
      edges.push_back({p[0], p[1]});
    }
  }
  const auto tets = MultiLevelStructure::build_tetrahedra(tetrahedra, batched_budget(edges.size(), n));
  for (const auto& p : tets.query_all(edges, QueryMode::Report).report.pairs) {
    const std::size_t owner = p.a / 6;
    if (owner == p.b) continue;
    const auto key = std::minmax(owner, p.b);
    found.try_emplace(key, PairWitness{key.first, key.second, p.witness, VertexKind::EdgeTetra});
  }

  std::vector<Triangle4> faces;
  for (const auto& t : tetrahedra) {
    for (int f = 0; f < 4; ++f) {
      const auto p = face_points(t, f);
      faces.push_back({p[0], p[1], p[2]});
    }
  }
  const auto tris = MultiLevelStructure::build_triangles(faces, batched_budget(faces.size(), faces.size()));
  for (const auto& p : tris.query_all(faces, QueryMode::Report).report.pairs) {
    const std::size_t a = p.a / 4;
    const std::size_t b = p.b / 4;
    if (a == b) continue;
    const auto key = std::minmax(a, b);
    found.try_emplace(key, PairWitness{key.first, key.second, p.witness, VertexKind::FaceFace});
  }

  std::vector<PairWitness> out;
  for (auto& [key, w] : found) out.push_back(std::move(w));
  return out;
}

IntersectionPolygon intersection_polygon(const std::vector<Tetrahedron4>& tetrahedra, std::size_t i,
                                         std::size_t j) {
  const Tetrahedron4& a = tetrahedra[i];
  const Tetrahedron4& b = tetrahedra[j];
  std::vector<ArrangementVertex> src;
  auto add = [&](VertexKind kind, std::vector<std::size_t> ids, std::vector<int> feats,
                 const std::vector<std::vector<Point4>>& simplices) {
    if (auto p = simplex_meet(simplices)) src.push_back(make_vertex(kind, ids, feats, *p));
  };
  for (int e = 0; e < 6; ++e) {
    add(VertexKind::EdgeTetra, {i, j}, {e, -1}, {edge_points(a, e), tetra_points(b)});
    add(VertexKind::EdgeTetra, {j, i}, {e, -1}, {edge_points(b, e), tetra_points(a)});
  }
  for (int f = 0; f < 4; ++f) {
    for (int g = 0; g < 4; ++g) {
      add(VertexKind::FaceFace, {i, j}, {f, g}, {face_points(a, f), face_points(b, g)});
    }
  }
  if (src.empty()) throw EmptyIntersection();
  if (src.size() < 3) throw DegeneratePosition("intersection polygon with fewer than three vertices");
  for (std::size_t x = 0; x < src.size(); ++x) {
    for (std::size_t y = x + 1; y < src.size(); ++y) {
      if (src[x].point == src[y].point) throw DegeneratePosition("coincident polygon vertices");
    }
  }

  // Rational 2D chart of the common 2-plane: the two coordinates with the
  // largest 2x2 minor of two spanning directions.
  const Point4 d1 = src[1].point - src[0].point;
  ExactScalar best = 0;
  std::size_t ax = 0, ay = 1;
  for (std::size_t k = 2; k < src.size() && best.is_zero(); ++k) {
    const Point4 d2 = src[k].point - src[0].point;
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t s = r + 1; s < 4; ++s) {
        const ExactScalar m = abs_of(d1[r] * d2[s] - d1[s] * d2[r]);
        if (m > best) {
          best = m;
          ax = r;
          ay = s;
        }
      }
    }
  }
  if (best.is_zero()) throw DegeneratePosition("collinear intersection polygon");
  ExactScalar cx = 0, cy = 0;
  for (const auto& v : src) {
    cx += v.point[ax];
    cy += v.point[ay];
  }
  cx /= ExactScalar(static_cast<long>(src.size()));
  cy /= ExactScalar(static_cast<long>(src.size()));
  auto half = [&](const ArrangementVertex& v) {
    const ExactScalar y = v.point[ay] - cy;
    return y.sign() == Sign::Pos || (y.is_zero() && (v.point[ax] - cx).sign() == Sign::Pos) ? 0 : 1;
  };
  std::sort(src.begin(), src.end(), [&](const ArrangementVertex& u, const ArrangementVertex& v) {
    const int hu = half(u), hv = half(v);
    if (hu != hv) return hu < hv;
    const ExactScalar c = (u.point[ax] - cx) * (v.point[ay] - cy) - (u.point[ay] - cy) * (v.point[ax] - cx);
    return c.sign() == Sign::Pos;
  });

  IntersectionPolygon poly;
  poly.i = i;
  poly.j = j;
  for (const auto& v : src) poly.orderedVertices.push_back(v.point);
  poly.sources = std::move(src);
  return poly;
}

LocalResult per_tetra_reduction(const std::vector<Tetrahedron4>& tetrahedra, std::size_t t0,
                                const std::vector<IntersectionPolygon>& polygons) {
  LocalResult out;
  const HyperplaneChart chart = chart_of(tetrahedra[t0]);
  std::vector<ChartPolygon> polys;
  for (const auto& p : polygons) {
    if (p.i == t0 || p.j == t0) polys.push_back(to_chart(p, t0, chart));
  }
  const std::size_t m = polys.size();
  std::set<std::array<std::size_t, 3>> triples;
  std::vector<std::vector<char>> meets(m, std::vector<char>(m, 0));

  // Edges of polygon a crossing polygon b.
  auto crossings = [&](std::size_t ia, std::size_t ib) {
    const ChartPolygon& a = polys[ia];
    const ChartPolygon& b = polys[ib];
    bool any = false;
    for (std::size_t k = 0; k < a.pts.size(); ++k) {
      const Vec3& u = a.pts[k];
      const Vec3& v = a.pts[(k + 1) % a.pts.size()];
      const ExactScalar ou = dot(b.normal, u) - b.offset;
      const ExactScalar ov = dot(b.normal, v) - b.offset;
      if (ou.is_zero() && ov.is_zero()) throw DegeneratePosition("polygon edge inside another polygon's plane");
      if (ou.sign() == ov.sign()) continue;
      const ExactScalar t = ou / (ou - ov);
      const Vec3 x{u[0] + t * (v[0] - u[0]), u[1] + t * (v[1] - u[1]), u[2] + t * (v[2] - u[2])};
      const auto [owner, face] = a.edgeFace[k];
      const Where w = owner == t0 ? locate(b, x, a.edgeFace[k]) : locate(b, x);
      if (w == Where::Outside) continue;
      if (w == Where::Boundary || ou.is_zero() || ov.is_zero()) {
        throw DegeneratePosition("polygon boundaries meet");
      }
      any = true;
      const std::size_t third = owner == t0 ? b.other : (owner == a.other ? b.other : a.other);
      const std::size_t mid = owner == t0 ? a.other : t0;
      out.vertices.push_back(make_vertex(VertexKind::FaceTetraTetra, {owner, mid, third}, {face, -1, -1},
                                         chart.lift(x)));
    }
    return any;
  };

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      bool hit;
      if (is_zero(cross(polys[a].normal, polys[b].normal))) {
        if (convex_hulls_intersect(embed(polys[a].pts), embed(polys[b].pts))) {
          throw DegeneratePosition("parallel intersection polygons meet");
        }
        hit = false;
      } else {
        const bool ab = crossings(a, b);
        const bool ba = crossings(b, a);
        hit = ab || ba;
      }
      if (!hit) continue;
      meets[a][b] = meets[b][a] = 1;
      std::array<std::size_t, 3> tr{t0, polys[a].other, polys[b].other};
      std::sort(tr.begin(), tr.end());
      triples.insert(tr);
    }
  }

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (!meets[a][b]) continue;
      for (std::size_t c = b + 1; c < m; ++c) {
        if (!meets[a][c] || !meets[b][c]) continue;
        Matrix sys(3, 3);
        std::vector<ExactScalar> rhs(3);
        const ChartPolygon* ps[3] = {&polys[a], &polys[b], &polys[c]};
        for (std::size_t r = 0; r < 3; ++r) {
          for (std::size_t s = 0; s < 3; ++s) sys(r, s) = ps[r]->normal[s];
          rhs[r] = ps[r]->offset;
        }
        const LinearSolution sol = solve(sys, rhs);
        if (sol.kind != LinearSolution::Kind::Unique) {
          if (common_point({embed(ps[0]->pts), embed(ps[1]->pts), embed(ps[2]->pts)})) {
            throw DegeneratePosition("three intersection polygons share a line");
          }
          continue;
        }
        const Vec3 x{sol.x[0], sol.x[1], sol.x[2]};
        bool inside = true;
        for (const auto* p : ps) {
          const Where w = locate(*p, x);
          if (w == Where::Boundary) throw DegeneratePosition("four-tetrahedron point on a polygon boundary");
          inside = inside && w == Where::Inside;
        }
        if (!inside) continue;
        out.vertices.push_back(make_vertex(VertexKind::FourTetra, {t0, ps[0]->other, ps[1]->other, ps[2]->other},
                                           {-1, -1, -1, -1}, chart.lift(x)));
      }
    }
  }
  out.triples.assign(triples.begin(), triples.end());
  return out;
}

ArrangementResult build_arrangement(const std::vector<Tetrahedron4>& tetrahedra) {
  ArrangementResult res;
  res.witnesses = pairwise(tetrahedra);
  for (const auto& w : res.witnesses) {
    res.counts.pairs.push_back({w.i, w.j});
    res.polygons.push_back(intersection_polygon(tetrahedra, w.i, w.j));
  }

  std::map<std::tuple<VertexKind, std::vector<std::size_t>, std::vector<int>>, Point4> vertices;
  auto record = [&](const ArrangementVertex& v) {
    auto [it, fresh] = vertices.try_emplace({v.kind, v.tetra, v.feature}, v.point);
    if (!fresh && !(it->second == v.point)) throw std::logic_error("one arrangement vertex at two points");
  };
  for (const auto& p : res.polygons) {
    for (const auto& v : p.sources) record(v);
  }
  std::set<std::array<std::size_t, 3>> triples;
  for (std::size_t t0 = 0; t0 < tetrahedra.size(); ++t0) {
    const LocalResult local = per_tetra_reduction(tetrahedra, t0, res.polygons);
    triples.insert(local.triples.begin(), local.triples.end());
    for (const auto& v : local.vertices) record(v);
  }
  res.counts.triples.assign(triples.begin(), triples.end());
  for (const auto& [key, point] : vertices) {
    ArrangementVertex v;
    std::tie(v.kind, v.tetra, v.feature) = key;
    v.point = point;
    res.counts.vertices.push_back(std::move(v));
  }
  std::sort(res.counts.vertices.begin(), res.counts.vertices.end());
  for (const auto& v : res.counts.vertices) ++res.counts.byKind[static_cast<std::size_t>(v.kind)];
  res.counts.k2 = res.counts.pairs.size();
  res.counts.k3 = res.counts.triples.size();
  res.counts.k4 = res.counts.vertices.size();
  return res;
}

KCounts k_counts(const std::vector<Tetrahedron4>& tetrahedra) { return build_arrangement(tetrahedra).counts; }

bool operator==(const KCounts& a, const KCounts& b) {
  return a.k2 == b.k2 && a.k3 == b.k3 && a.k4 == b.k4 && a.byKind == b.byKind && a.pairs == b.pairs &&
         a.triples == b.triples && a.vertices == b.vertices;
}

}  // namespace r4
