#include "r4/oracle.hpp"

#include <algorithm>
#include <set>

#include "r4/linalg.hpp"

namespace r4 {

const std::array<std::array<int, 2>, 6> kTetraEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
const std::array<std::array<int, 3>, 4> kTetraFaces{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

const char* to_string(QueryMode m) {
  switch (m) {
    case QueryMode::Detect: return "detect";
    case QueryMode::Count: return "count";
    case QueryMode::Report: return "report";
  }
  return "?";
}

QueryMode parse_mode(const std::string& text) {
  if (text == "detect") return QueryMode::Detect;
  if (text == "count") return QueryMode::Count;
  if (text == "report") return QueryMode::Report;
  throw std::invalid_argument("unknown mode: " + text);
}

const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::EdgeTetra: return "EDGE_TETRA";
    case VertexKind::FaceFace: return "FACE_FACE";
    case VertexKind::FaceTetraTetra: return "FACE_TETRA_TETRA";
    case VertexKind::FourTetra: return "FOUR_TETRA";
  }
  return "?";
}

std::vector<Point4> edge_points(const Tetrahedron4& t, int e) {
  const auto v = t.vertices();
  return {v[kTetraEdges[e][0]], v[kTetraEdges[e][1]]};
}
std::vector<Point4> face_points(const Tetrahedron4& t, int f) {
  const auto v = t.vertices();
  return {v[kTetraFaces[f][0]], v[kTetraFaces[f][1]], v[kTetraFaces[f][2]]};
}
std::vector<Point4> tetra_points(const Tetrahedron4& t) {
  const auto v = t.vertices();
  return {v.begin(), v.end()};
}

std::optional<Point4> segment_tetra_witness(const Segment4& e, const TetraCache& t) {
  return segment_tetra_direct(e, t.t, t.h);
}

std::optional<Point4> line_flat_witness(const Segment4& line, const Triangle4& flat) {
  try {
    return line_2flat_meet(line, flat);
  } catch (const Contained&) {
    return line.a;
  }
}

namespace {

/// Generic O(n*m) loop; `hit(i, j)` returns the witness for pair (i, j).
template <typename Hit>
IntersectionReport brute(std::size_t n, std::size_t m, QueryMode mode, Hit hit) {
  IntersectionReport r;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      auto w = hit(i, j);
      if (!w) continue;
      r.detected = true;
      ++r.count;
      if (mode == QueryMode::Detect) return r;
      if (mode == QueryMode::Report) r.pairs.push_back({i, j, std::move(*w)});
    }
  }
  return r;
}

std::vector<TetraCache> cache_all(const std::vector<Tetrahedron4>& ts) {
  std::vector<TetraCache> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back({t, hyperplane_of(t)});
  return out;
}

ExactScalar eval(const Hyperplane4& h, const Point4& p) {
  ExactScalar v = -h.offset;
  for (std::size_t i = 0; i < 4; ++i) v += h.coeffs[i] * p[i];
  return v;
}

/// True when every vertex of `b` lies strictly on one side of a's hyperplane.
bool strictly_separated(const TetraCache& a, const Tetrahedron4& b) {
  Sign first = Sign::Zero;
  for (const auto& v : b.vertices()) {
    const Sign s = eval(a.h, v).sign();
    if (s == Sign::Zero) return false;
    if (first == Sign::Zero) first = s;
    if (s != first) return false;
  }
  return true;
}

bool boxes_disjoint(const Tetrahedron4& a, const Tetrahedron4& b) {
  const auto va = a.vertices();
  const auto vb = b.vertices();
  for (std::size_t i = 0; i < 4; ++i) {
    auto [alo, ahi] = std::minmax_element(va.begin(), va.end(),
                                          [i](const Point4& p, const Point4& q) { return p[i] < q[i]; });
    auto [blo, bhi] = std::minmax_element(vb.begin(), vb.end(),
                                          [i](const Point4& p, const Point4& q) { return p[i] < q[i]; });
    if ((*ahi)[i] < (*blo)[i] || (*bhi)[i] < (*alo)[i]) return true;
  }
  return false;
}

}  // namespace

IntersectionReport seg_tetra_query(const std::vector<Segment4>& segments,
                                   const std::vector<Tetrahedron4>& tetrahedra, QueryMode mode) {
  const auto cache = cache_all(tetrahedra);
  return brute(segments.size(), tetrahedra.size(), mode,
               [&](std::size_t i, std::size_t j) { return segment_tetra_witness(segments[i], cache[j]); });
}

IntersectionReport tetra_seg_query(const std::vector<Tetrahedron4>& tetrahedra,
                                   const std::vector<Segment4>& segments, QueryMode mode) {
  const auto cache = cache_all(tetrahedra);
  return brute(tetrahedra.size(), segments.size(), mode,
               [&](std::size_t i, std::size_t j) { return segment_tetra_witness(segments[j], cache[i]); });
}

IntersectionReport tri_tri_query(const std::vector<Triangle4>& red,
                                 const std::vector<Triangle4>& blue, QueryMode mode) {
  return brute(red.size(), blue.size(), mode,
               [&](std::size_t i, std::size_t j) { return tri_tri_witness(red[i], blue[j]); });
}

IntersectionReport line_2flat_query(const std::vector<Segment4>& lines,
                                    const std::vector<Triangle4>& flats, QueryMode mode) {
  return brute(lines.size(), flats.size(), mode,
               [&](std::size_t i, std::size_t j) { return line_flat_witness(lines[i], flats[j]); });
}

std::optional<RayHit> ray_shoot(const Point4& origin, const Point4& direction,
                                const std::vector<Tetrahedron4>& tetrahedra) {
  if (direction == Point4(0, 0, 0, 0)) throw std::invalid_argument("ray_shoot: zero direction");
  std::optional<RayHit> best;
  for (std::size_t idx = 0; idx < tetrahedra.size(); ++idx) {
    const Tetrahedron4& t = tetrahedra[idx];
    const Hyperplane4 h = hyperplane_of(t);
    const ExactScalar f0 = eval(h, origin);
    ExactScalar nd = 0;
    for (std::size_t i = 0; i < 4; ++i) nd += h.coeffs[i] * direction[i];
    std::optional<ExactScalar> hit;
    if (!nd.is_zero()) {
      const ExactScalar tt = -f0 / nd;
      if (tt.sign() != Sign::Neg && in_tetra_on_plane(origin + tt * direction, t)) hit = tt;
    } else if (f0.is_zero()) {
      // The ray runs inside the hyperplane: clip its parameter interval by
      // the four barycentric coordinates, each affine in t.
      const auto v = t.vertices();
      Matrix m(4, 3);
      std::vector<ExactScalar> ro(4), rd(4);
      for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t k = 0; k < 3; ++k) m(r, k) = v[k + 1][r] - v[0][r];
        ro[r] = origin[r] - v[0][r];
        rd[r] = direction[r];
      }
      const auto a = solve(m, ro).x;
      const auto b = solve(m, rd).x;
      std::array<ExactScalar, 4> alpha{ExactScalar(1) - a[0] - a[1] - a[2], a[0], a[1], a[2]};
      std::array<ExactScalar, 4> beta{-b[0] - b[1] - b[2], b[0], b[1], b[2]};
      ExactScalar lo = 0;
      std::optional<ExactScalar> hi;
      bool feasible = true;
      for (std::size_t k = 0; k < 4 && feasible; ++k) {
        const Sign sb = beta[k].sign();
        if (sb == Sign::Zero) {
          feasible = alpha[k].sign() != Sign::Neg;
        } else {
          const ExactScalar root = -alpha[k] / beta[k];
          if (sb == Sign::Pos) {
            lo = std::max(lo, root);
          } else if (!hi || root < *hi) {
            hi = root;
          }
        }
      }
      if (feasible && (!hi || lo <= *hi)) hit = lo;
    }
    if (hit && (!best || *hit < best->t)) best = RayHit{idx, *hit, origin + *hit * direction};
  }
  return best;
}

KCounts arrangement_k_counts(const std::vector<Tetrahedron4>& tetrahedra) {
  const std::size_t n = tetrahedra.size();
  const auto cache = cache_all(tetrahedra);
  std::vector<std::vector<Point4>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = tetra_points(tetrahedra[i]);

  KCounts out;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (boxes_disjoint(tetrahedra[i], tetrahedra[j])) continue;
      if (strictly_separated(cache[i], tetrahedra[j]) || strictly_separated(cache[j], tetrahedra[i])) continue;
      if (!common_point({pts[i], pts[j]})) continue;
      adj[i][j] = adj[j][i] = 1;
      out.pairs.push_back({i, j});
    }
  }
  std::set<std::array<std::size_t, 3>> triple_set;
  for (const auto& [i, j] : out.pairs) {
    for (std::size_t k = j + 1; k < n; ++k) {
      if (!adj[i][k] || !adj[j][k]) continue;
      if (!common_point({pts[i], pts[j], pts[k]})) continue;
      triple_set.insert({i, j, k});
    }
  }
  out.triples.assign(triple_set.begin(), triple_set.end());

  auto add = [&](VertexKind kind, std::vector<std::size_t> ids, std::vector<int> feats,
                 const std::vector<std::vector<Point4>>& simplices) {
    const auto p = simplex_meet(simplices);
    if (!p) return;
    // Canonical order: ascending tetrahedron index.
    std::vector<std::size_t> order(ids.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    ArrangementVertex v;
    v.kind = kind;
    v.point = *p;
    for (std::size_t k : order) {
      v.tetra.push_back(ids[k]);
      v.feature.push_back(feats[k]);
    }
    out.vertices.push_back(std::move(v));
  };

  for (const auto& [i, j] : out.pairs) {
    for (int e = 0; e < 6; ++e) {
      add(VertexKind::EdgeTetra, {i, j}, {e, -1}, {edge_points(tetrahedra[i], e), pts[j]});
      add(VertexKind::EdgeTetra, {j, i}, {e, -1}, {edge_points(tetrahedra[j], e), pts[i]});
    }
    for (int f = 0; f < 4; ++f) {
      for (int g = 0; g < 4; ++g) {
        add(VertexKind::FaceFace, {i, j}, {f, g},
            {face_points(tetrahedra[i], f), face_points(tetrahedra[j], g)});
      }
    }
  }
  for (const auto& tr : out.triples) {
    for (int role = 0; role < 3; ++role) {
      const std::size_t owner = tr[role];
      const std::size_t o1 = tr[(role + 1) % 3];
      const std::size_t o2 = tr[(role + 2) % 3];
      for (int f = 0; f < 4; ++f) {
        add(VertexKind::FaceTetraTetra, {owner, o1, o2}, {f, -1, -1},
            {face_points(tetrahedra[owner], f), pts[o1], pts[o2]});
      }
    }
  }
  for (const auto& [i, j, k] : out.triples) {
    for (std::size_t l = k + 1; l < n; ++l) {
      if (!triple_set.count({i, j, l}) || !triple_set.count({i, k, l}) || !triple_set.count({j, k, l})) continue;
      add(VertexKind::FourTetra, {i, j, k, l}, {-1, -1, -1, -1}, {pts[i], pts[j], pts[k], pts[l]});
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  for (const auto& v : out.vertices) ++out.byKind[static_cast<std::size_t>(v.kind)];
  out.k2 = out.pairs.size();
  out.k3 = out.triples.size();
  out.k4 = out.vertices.size();
  return out;
}

}  // namespace r4
