#include "r4/scene.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "r4/linalg.hpp"

namespace r4 {

using nlohmann::json;

namespace {

constexpr int kMaxRetries = 1000;

struct KindName {
  SceneKind kind;
  const char* name;
};
constexpr KindName kKinds[] = {{SceneKind::Segments, "SEGMENTS"},
                               {SceneKind::Triangles, "TRIANGLES"},
                               {SceneKind::Tetrahedra, "TETRAHEDRA"},
                               {SceneKind::MovingTetrahedra, "MOVING_TETRAHEDRA"},
                               {SceneKind::FlatsAndLines, "FLATS_AND_LINES"}};

Point4 to_point(const std::vector<ExactScalar>& c) { return {c[0], c[1], c[2], c[3]}; }
std::vector<ExactScalar> from_point(const Point4& p) { return {p[0], p[1], p[2], p[3]}; }
Vec3 to_vec3(const std::vector<ExactScalar>& c) { return {c[0], c[1], c[2]}; }
std::vector<ExactScalar> from_vec3(const Vec3& v) { return {v[0], v[1], v[2]}; }

void require(bool ok, const std::string& what) {
  if (!ok) throw SchemaError(what);
}

/// Tuple arities allowed for one object of the kind.
std::vector<std::vector<std::size_t>> shapes(SceneKind k) {
  switch (k) {
    case SceneKind::Segments: return {{4, 4}};
    case SceneKind::Triangles: return {{4, 4, 4}};
    case SceneKind::Tetrahedra: return {{4, 4, 4, 4}};
    case SceneKind::MovingTetrahedra: return {{3, 3, 3, 3, 3, 2}};
    case SceneKind::FlatsAndLines: return {{4, 4}, {4, 4, 4}};
  }
  return {};
}

bool matches(const std::vector<std::vector<ExactScalar>>& obj, const std::vector<std::size_t>& shape) {
  if (obj.size() != shape.size()) return false;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    if (obj[i].size() != shape[i]) return false;
  }
  return true;
}

void check_kind(const Scene& s, SceneKind k) {
  if (s.kind != k) throw SchemaError(std::string("scene kind is ") + to_string(s.kind) + ", expected " + to_string(k));
}

class Gen {
 public:
  Gen(std::uint64_t seed, int range) : rng_(seed), d_(-range, range), range_(range) {}

  ExactScalar coord() { return d_(rng_); }
  Point4 point() { return {coord(), coord(), coord(), coord()}; }
  Vec3 vec3(int r) {
    std::uniform_int_distribution<int> d(-r, r);
    return {d(rng_), d(rng_), d(rng_)};
  }
  int range() const { return range_; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  template <typename F>
  auto retry(F f) {
    for (int i = 0; i < kMaxRetries; ++i) {
      if (auto v = f()) return *v;
    }
    throw GenerationError("could not sample a non-degenerate object");
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<int> d_;
  int range_;
};

bool rank2(const Triangle4& t) {
  Matrix m(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    m(i, 0) = t.q[i] - t.p[i];
    m(i, 1) = t.r[i] - t.p[i];
  }
  return solve(m, std::vector<ExactScalar>(4, ExactScalar(0))).rank == 2;
}

}  // namespace

const char* to_string(SceneKind k) {
  for (const auto& e : kKinds) {
    if (e.kind == k) return e.name;
  }
  return "?";
}

SceneKind parse_scene_kind(const std::string& text) {
  for (const auto& e : kKinds) {
    if (text == e.name) return e.kind;
  }
  throw SchemaError("unknown scene kind: " + text);
}

std::vector<Segment4> Scene::segments() const {
  check_kind(*this, SceneKind::Segments);
  std::vector<Segment4> out;
  for (const auto& o : objects) out.push_back({to_point(o[0]), to_point(o[1])});
  return out;
}

std::vector<Triangle4> Scene::triangles() const {
  check_kind(*this, SceneKind::Triangles);
  std::vector<Triangle4> out;
  for (const auto& o : objects) out.push_back({to_point(o[0]), to_point(o[1]), to_point(o[2])});
  return out;
}

std::vector<Tetrahedron4> Scene::tetrahedra() const {
  check_kind(*this, SceneKind::Tetrahedra);
  std::vector<Tetrahedron4> out;
  for (const auto& o : objects) out.push_back({to_point(o[0]), to_point(o[1]), to_point(o[2]), to_point(o[3])});
  return out;
}

std::vector<MovingTetrahedron> Scene::moving() const {
  check_kind(*this, SceneKind::MovingTetrahedra);
  std::vector<MovingTetrahedron> out;
  for (const auto& o : objects) {
    MovingTetrahedron mt;
    for (std::size_t k = 0; k < 4; ++k) mt.vertices[k] = to_vec3(o[k]);
    mt.velocity = to_vec3(o[4]);
    mt.t0 = o[5][0];
    mt.t1 = o[5][1];
    out.push_back(mt);
  }
  return out;
}

std::vector<Segment4> Scene::lines() const {
  check_kind(*this, SceneKind::FlatsAndLines);
  std::vector<Segment4> out;
  for (const auto& o : objects) {
    if (o.size() == 2) out.push_back({to_point(o[0]), to_point(o[1])});
  }
  return out;
}

std::vector<Triangle4> Scene::flats() const {
  check_kind(*this, SceneKind::FlatsAndLines);
  std::vector<Triangle4> out;
  for (const auto& o : objects) {
    if (o.size() == 3) out.push_back({to_point(o[0]), to_point(o[1]), to_point(o[2])});
  }
  return out;
}

std::string scene_to_json(const Scene& s) {
  json j;
  j["version"] = s.version;
  j["kind"] = to_string(s.kind);
  json objs = json::array();
  for (const auto& o : s.objects) {
    json obj = json::array();
    for (const auto& tuple : o) {
      json t = json::array();
      for (const auto& c : tuple) t.push_back(c.str());
      obj.push_back(t);
    }
    objs.push_back(obj);
  }
  j["objects"] = objs;
  if (s.seed) j["seed"] = *s.seed;
  return j.dump(1) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  require(j.is_object(), "scene must be a JSON object");
  require(j.contains("version") && j["version"].is_number_integer(), "missing integer 'version'");
  require(j.contains("kind") && j["kind"].is_string(), "missing string 'kind'");
  require(j.contains("objects") && j["objects"].is_array(), "missing array 'objects'");
  Scene s;
  s.version = j["version"].get<int>();
  require(s.version == 1, "unsupported scene version");
  s.kind = parse_scene_kind(j["kind"].get<std::string>());
  if (j.contains("seed") && !j["seed"].is_null()) {
    require(j["seed"].is_number_unsigned() || j["seed"].is_number_integer(), "'seed' must be an integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  const auto allowed = shapes(s.kind);
  std::size_t index = 0;
  for (const auto& obj : j["objects"]) {
    require(obj.is_array(), "object " + std::to_string(index) + " is not an array");
    std::vector<std::vector<ExactScalar>> o;
    for (const auto& tuple : obj) {
      require(tuple.is_array(), "object " + std::to_string(index) + ": coordinate tuple is not an array");
      std::vector<ExactScalar> t;
      for (const auto& c : tuple) {
        require(c.is_string() || c.is_number_integer(),
                "object " + std::to_string(index) + ": coordinate must be a rational string or integer");
        try {
          t.push_back(c.is_string() ? ExactScalar::parse(c.get<std::string>()) : ExactScalar(c.get<long>()));
        } catch (const std::invalid_argument& e) {
          throw SchemaError("object " + std::to_string(index) + ": " + e.what());
        }
      }
      o.push_back(std::move(t));
    }
    bool ok = false;
    for (const auto& shape : allowed) ok = ok || matches(o, shape);
    require(ok, "object " + std::to_string(index) + " has the wrong arity for " + to_string(s.kind));
    s.objects.push_back(std::move(o));
    ++index;
  }
  return s;
}

Scene read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

void write_scene(const Scene& s, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << scene_to_json(s);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot write " + path);
}

Scene make_scene(const std::vector<Segment4>& v, std::optional<std::uint64_t> seed) {
  Scene s{1, SceneKind::Segments, {}, seed};
  for (const auto& e : v) s.objects.push_back({from_point(e.a), from_point(e.b)});
  return s;
}

Scene make_scene(const std::vector<Triangle4>& v, std::optional<std::uint64_t> seed) {
  Scene s{1, SceneKind::Triangles, {}, seed};
  for (const auto& t : v) s.objects.push_back({from_point(t.p), from_point(t.q), from_point(t.r)});
  return s;
}

Scene make_scene(const std::vector<Tetrahedron4>& v, std::optional<std::uint64_t> seed) {
  Scene s{1, SceneKind::Tetrahedra, {}, seed};
  for (const auto& t : v) {
    s.objects.push_back({from_point(t.v0), from_point(t.v1), from_point(t.v2), from_point(t.v3)});
  }
  return s;
}

Scene make_scene(const std::vector<MovingTetrahedron>& v, std::optional<std::uint64_t> seed) {
  Scene s{1, SceneKind::MovingTetrahedra, {}, seed};
  for (const auto& mt : v) {
    std::vector<std::vector<ExactScalar>> o;
    for (const auto& p : mt.vertices) o.push_back(from_vec3(p));
    o.push_back(from_vec3(mt.velocity));
    o.push_back({mt.t0, mt.t1});
    s.objects.push_back(std::move(o));
  }
  return s;
}

Scene make_flats_scene(const std::vector<Triangle4>& flats, const std::vector<Segment4>& lines,
                       std::optional<std::uint64_t> seed) {
  Scene s{1, SceneKind::FlatsAndLines, {}, seed};
  for (const auto& t : flats) s.objects.push_back({from_point(t.p), from_point(t.q), from_point(t.r)});
  for (const auto& e : lines) s.objects.push_back({from_point(e.a), from_point(e.b)});
  return s;
}

Scene generate_scene(SceneKind kind, std::size_t n, int range, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("scene size must be positive");
  if (range < 1) throw std::invalid_argument("coordinate range must be positive");
  Gen g(seed, range);
  auto segment = [&g]() -> std::optional<Segment4> {
    Segment4 e{g.point(), g.point()};
    if (e.a == e.b) return std::nullopt;
    return e;
  };
  auto triangle = [&g]() -> std::optional<Triangle4> {
    Triangle4 t{g.point(), g.point(), g.point()};
    if (!rank2(t)) return std::nullopt;
    return t;
  };
  switch (kind) {
    case SceneKind::Segments: {
      std::vector<Segment4> v;
      for (std::size_t i = 0; i < n; ++i) v.push_back(g.retry(segment));
      return make_scene(v, seed);
    }
    case SceneKind::Triangles: {
      std::vector<Triangle4> v;
      for (std::size_t i = 0; i < n; ++i) v.push_back(g.retry(triangle));
      return make_scene(v, seed);
    }
    case SceneKind::Tetrahedra: {
      std::vector<Tetrahedron4> v;
      for (std::size_t i = 0; i < n; ++i) {
        v.push_back(g.retry([&g]() -> std::optional<Tetrahedron4> {
          Tetrahedron4 t{g.point(), g.point(), g.point(), g.point()};
          try {
            hyperplane_of(t);
            return t;
          } catch (const DegenerateTetrahedron&) {
            return std::nullopt;
          }
        }));
      }
      return make_scene(v, seed);
    }
    case SceneKind::MovingTetrahedra: {
      // Small tetrahedra spread over the range, moving up to a quarter range
      // per unit time during [0, 1].
      const int size = std::max(1, range / 4);
      std::vector<MovingTetrahedron> v;
      for (std::size_t i = 0; i < n; ++i) {
        v.push_back(g.retry([&g, size]() -> std::optional<MovingTetrahedron> {
          MovingTetrahedron mt;
          const Vec3 base = g.vec3(g.range());
          for (auto& p : mt.vertices) {
            const Vec3 d = g.vec3(size);
            p = {base[0] + d[0], base[1] + d[1], base[2] + d[2]};
          }
          mt.velocity = g.vec3(size);
          try {
            mt.validate();
            return mt;
          } catch (const GeometryError&) {
            return std::nullopt;
          }
        }));
      }
      return make_scene(v, seed);
    }
    case SceneKind::FlatsAndLines: {
      std::vector<Triangle4> flats;
      std::vector<Segment4> lines;
      for (std::size_t i = 0; i < n; ++i) flats.push_back(g.retry(triangle));
      // A random line misses a random 2-flat in R^4; every other line is
      // anchored at a vertex of some flat so that the scene has hits.
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 2 == 0) {
          lines.push_back(g.retry(segment));
          continue;
        }
        const Point4 base = flats[g.index(n)].p;
        lines.push_back(g.retry([&g, &base]() -> std::optional<Segment4> {
          const Point4 d = g.point();
          if (d == Point4(0, 0, 0, 0)) return std::nullopt;
          return Segment4{base - d, base + d};
        }));
      }
      return make_flats_scene(flats, lines, seed);
    }
  }
  throw std::invalid_argument("unknown scene kind");
}

}  // namespace r4
