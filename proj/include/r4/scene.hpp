#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "r4/ccd.hpp"
#include "r4/kernel.hpp"

namespace r4 {

enum class SceneKind { Segments, Triangles, Tetrahedra, MovingTetrahedra, FlatsAndLines };
const char* to_string(SceneKind k);
SceneKind parse_scene_kind(const std::string& text);

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One object is a list of coordinate tuples. Arity per kind:
///   SEGMENTS 2 points, TRIANGLES 3, TETRAHEDRA 4 (all in R^4);
///   MOVING_TETRAHEDRA 4 vertices + velocity (R^3) + [t0, t1];
///   FLATS_AND_LINES 2 points (a line) or 3 points (a 2-flat).
struct Scene {
  int version = 1;
  SceneKind kind = SceneKind::Tetrahedra;
  std::vector<std::vector<std::vector<ExactScalar>>> objects;
  std::optional<std::uint64_t> seed;

  std::vector<Segment4> segments() const;
  std::vector<Triangle4> triangles() const;
  std::vector<Tetrahedron4> tetrahedra() const;
  std::vector<MovingTetrahedron> moving() const;
  std::vector<Segment4> lines() const;   // FLATS_AND_LINES only
  std::vector<Triangle4> flats() const;  // FLATS_AND_LINES only
};

std::string scene_to_json(const Scene& s);
/// Throws SchemaError on malformed input.
Scene scene_from_json(const std::string& text);
Scene read_scene(const std::string& path);
void write_scene(const Scene& s, const std::string& path);

Scene make_scene(const std::vector<Segment4>& v, std::optional<std::uint64_t> seed = {});
Scene make_scene(const std::vector<Triangle4>& v, std::optional<std::uint64_t> seed = {});
Scene make_scene(const std::vector<Tetrahedron4>& v, std::optional<std::uint64_t> seed = {});
Scene make_scene(const std::vector<MovingTetrahedron>& v, std::optional<std::uint64_t> seed = {});
Scene make_flats_scene(const std::vector<Triangle4>& flats, const std::vector<Segment4>& lines,
                       std::optional<std::uint64_t> seed = {});

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic random scene with integer coordinates in [-range, range].
/// Degenerate objects are resampled (bounded retries). FLATS_AND_LINES gets
/// n flats and n lines.
Scene generate_scene(SceneKind kind, std::size_t n, int range, std::uint64_t seed);

}  // namespace r4
