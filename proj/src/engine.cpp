#include "r4/engine.hpp"

#include <algorithm>

namespace r4 {

namespace {

const Scene& need(const Scene* s, const char* what) {
  if (s == nullptr) throw SchemaError(std::string("setup needs a query file of ") + what);
  return *s;
}

void expect(const Scene& s, SceneKind kind) {
  if (s.kind != kind) {
    throw SchemaError(std::string("expected a ") + to_string(kind) + " scene, got " + to_string(s.kind));
  }
}

constexpr std::uint64_t kQuerySalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::size_t SetupInput::stored_count() const {
  switch (setup) {
    case Setup::SegQueryTetraInput: return tetrahedra.size();
    case Setup::TetraQuerySegInput: return segments.size();
    case Setup::TriTri: return blue.size();
    case Setup::Line2Flat: return flats.size();
  }
  return 0;
}

std::size_t SetupInput::query_count() const {
  switch (setup) {
    case Setup::SegQueryTetraInput: return segments.size();
    case Setup::TetraQuerySegInput: return tetrahedra.size();
    case Setup::TriTri: return red.size();
    case Setup::Line2Flat: return lines.size();
  }
  return 0;
}

SetupInput setup_input(Setup setup, const Scene& stored, const Scene* queries) {
  SetupInput in;
  in.setup = setup;
  switch (setup) {
    case Setup::SegQueryTetraInput:
      expect(stored, SceneKind::Tetrahedra);
      expect(need(queries, "SEGMENTS"), SceneKind::Segments);
      in.tetrahedra = stored.tetrahedra();
      in.segments = queries->segments();
      break;
    case Setup::TetraQuerySegInput:
      expect(stored, SceneKind::Segments);
      expect(need(queries, "TETRAHEDRA"), SceneKind::Tetrahedra);
      in.segments = stored.segments();
      in.tetrahedra = queries->tetrahedra();
      break;
    case Setup::TriTri:
      expect(stored, SceneKind::Triangles);
      expect(need(queries, "TRIANGLES"), SceneKind::Triangles);
      in.blue = stored.triangles();
      in.red = queries->triangles();
      break;
    case Setup::Line2Flat:
      expect(stored, SceneKind::FlatsAndLines);
      in.flats = stored.flats();
      in.lines = stored.lines();
      if (queries != nullptr) {
        expect(*queries, SceneKind::FlatsAndLines);
        in.lines = queries->lines();
      }
      break;
  }
  return in;
}

IntersectionReport run_oracle(const SetupInput& in, QueryMode mode) {
  switch (in.setup) {
    case Setup::SegQueryTetraInput: return seg_tetra_query(in.segments, in.tetrahedra, mode);
    case Setup::TetraQuerySegInput: return tetra_seg_query(in.tetrahedra, in.segments, mode);
    case Setup::TriTri: return tri_tri_query(in.red, in.blue, mode);
    case Setup::Line2Flat: return line_2flat_query(in.lines, in.flats, mode);
  }
  return {};
}

std::vector<StructureRun> run_structure(const SetupInput& in, const std::vector<QueryMode>& modes,
                                        const ExactScalar& sigma, std::uint64_t seed) {
  const StorageBudget budget = StorageBudget::with_sigma(std::max<std::size_t>(in.stored_count(), 1), sigma);
  std::vector<StructureRun> out;
  auto answer = [&](const MultiLevelStructure& st, const auto& queries) {
    for (QueryMode mode : modes) {
      auto r = st.query_all(queries, mode);
      out.push_back({std::move(r.report), r.stats, budget, st.node_count()});
    }
  };
  switch (in.setup) {
    case Setup::SegQueryTetraInput:
      answer(MultiLevelStructure::build_tetrahedra(in.tetrahedra, budget, seed), in.segments);
      break;
    case Setup::TetraQuerySegInput:
      answer(MultiLevelStructure::build_segments(in.segments, budget, seed), in.tetrahedra);
      break;
    case Setup::TriTri:
      answer(MultiLevelStructure::build_triangles(in.blue, budget, seed), in.red);
      break;
    case Setup::Line2Flat:
      answer(MultiLevelStructure::build_flats(in.flats, budget, seed), in.lines);
      break;
  }
  return out;
}

StructureRun run_structure(const SetupInput& in, QueryMode mode, const ExactScalar& sigma, std::uint64_t seed) {
  return std::move(run_structure(in, std::vector<QueryMode>{mode}, sigma, seed).front());
}

SetupInput generate_setup(Setup setup, std::size_t n, std::size_t m, int range, std::uint64_t seed) {
  const std::uint64_t qseed = seed ^ kQuerySalt;
  switch (setup) {
    case Setup::SegQueryTetraInput: {
      const Scene a = generate_scene(SceneKind::Tetrahedra, n, range, seed);
      const Scene b = generate_scene(SceneKind::Segments, m, range, qseed);
      return setup_input(setup, a, &b);
    }
    case Setup::TetraQuerySegInput: {
      const Scene a = generate_scene(SceneKind::Segments, n, range, seed);
      const Scene b = generate_scene(SceneKind::Tetrahedra, m, range, qseed);
      return setup_input(setup, a, &b);
    }
    case Setup::TriTri: {
      const Scene a = generate_scene(SceneKind::Triangles, n, range, seed);
      const Scene b = generate_scene(SceneKind::Triangles, m, range, qseed);
      return setup_input(setup, a, &b);
    }
    case Setup::Line2Flat: {
      SetupInput in = setup_input(setup, generate_scene(SceneKind::FlatsAndLines, std::max(n, m), range, seed), nullptr);
      in.flats.resize(n);
      in.lines.resize(m);
      return in;
    }
  }
  return {};
}

}  // namespace r4
