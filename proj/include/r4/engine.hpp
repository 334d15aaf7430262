#pragma once

#include <vector>

#include "r4/rangetree.hpp"
#include "r4/scene.hpp"

namespace r4 {

/// Stored objects and query objects of one setup. Only the vectors the
/// setup uses are filled.
struct SetupInput {
  Setup setup = Setup::SegQueryTetraInput;
  std::vector<Tetrahedron4> tetrahedra;
  std::vector<Segment4> segments;
  std::vector<Triangle4> red;   // tri-tri queries
  std::vector<Triangle4> blue;  // tri-tri stored
  std::vector<Segment4> lines;
  std::vector<Triangle4> flats;

  std::size_t stored_count() const;
  std::size_t query_count() const;
};

/// Stored scene plus query scene; FLATS_AND_LINES carries both in `stored`
/// and `queries` may be null. Throws SchemaError when the kinds do not fit
/// the setup.
SetupInput setup_input(Setup setup, const Scene& stored, const Scene* queries);

IntersectionReport run_oracle(const SetupInput& in, QueryMode mode);

struct StructureRun {
  IntersectionReport report;
  QueryStats stats;
  StorageBudget budget;
  std::size_t buildNodes = 0;
};
/// Builds the multi-level structure with s = n^sigma and answers all queries.
StructureRun run_structure(const SetupInput& in, QueryMode mode, const ExactScalar& sigma, std::uint64_t seed = 0);
/// One build, one run per mode.
std::vector<StructureRun> run_structure(const SetupInput& in, const std::vector<QueryMode>& modes,
                                        const ExactScalar& sigma, std::uint64_t seed = 0);

/// Random instance of a setup with n stored and m query objects.
SetupInput generate_setup(Setup setup, std::size_t n, std::size_t m, int range, std::uint64_t seed);

}  // namespace r4
