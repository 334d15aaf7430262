#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "r4/kernel.hpp"
#include "r4/oracle.hpp"

namespace r4 {

class BudgetOutOfRange : public std::invalid_argument {
 public:
  BudgetOutOfRange() : std::invalid_argument("storage parameter outside [n, n^6]") {}
};

/// Smallest integer s with s^q >= n^p for sigma = p/q (so s = ceil(n^sigma)).
mpz_class storage_for_sigma(std::size_t n, const ExactScalar& sigma);
/// Smallest c >= 1 with c^5 * s >= n^6, i.e. ceil(n^{6/5} / s^{1/5}), clamped to [1, n].
std::size_t leaf_cutoff(std::size_t n, const mpz_class& s);

struct StorageBudget {
  std::size_t n = 0;
  mpz_class s = 0;
  std::size_t leafCutoff = 1;
  /// Throws BudgetOutOfRange unless n <= s <= n^6.
  static StorageBudget with_s(std::size_t n, const mpz_class& s);
  static StorageBudget with_sigma(std::size_t n, const ExactScalar& sigma);
};

enum class Setup { SegQueryTetraInput, TriTri, TetraQuerySegInput, Line2Flat };
const char* to_string(Setup s);
Setup parse_setup(const std::string& text);

struct QueryStats {
  std::uint64_t nodesVisited = 0;
  std::uint64_t canonicalSetsTouched = 0;
  std::uint64_t leafItemsScanned = 0;
  std::uint64_t exactPredicateCalls = 0;
  QueryStats& operator+=(const QueryStats& o);
  friend bool operator==(const QueryStats&, const QueryStats&) = default;
};

enum class BoxClass { Inside, Outside, Crossing };
const char* to_string(BoxClass c);

/// A range polynomial over blocks of variables, affine in each block: every
/// monomial takes at most one variable from each block. `coef` is the
/// coefficient tensor with one axis of length 1 + blocks[b] per block
/// (index 0 = constant, i = i-th variable of the block), block 0 outermost.
/// Linear forms, p_l-bilinear and q_pi-cubic orientation forms all fit.
struct RangePoly {
  std::vector<int> blocks;
  std::vector<mpz_class> coef;
  std::size_t dim() const;
  ExactScalar eval(const std::vector<ExactScalar>& x) const;
};

/// Conservative classification of an axis-parallel box against the range
/// {x : sign(p(x)) = wanted}; wanted = Zero denotes the zero set, which is
/// never reported INSIDE.
BoxClass classify_box(const RangePoly& p, const std::vector<ExactScalar>& lo,
                      const std::vector<ExactScalar>& hi, Sign wanted);

/// Orientation polynomial of a fixed line against a 2-plane given by its
/// anchor parameters (z00, w00, z01, w01, z11, w11).
RangePoly twoplane_range(const Pluecker10& line);
/// Orientation polynomial of a line given by (x0, y0, z0, x1, y1, z1) against
/// a fixed plane dual.
RangePoly line_range(const Pluecker10& plane);

/// Multi-level canonical-set structure: one level per sub-condition, each a
/// median-split box tree whose internal nodes carry the next level built on
/// their subtree's objects.
class MultiLevelStructure {
 public:
  struct Result {
    IntersectionReport report;
    QueryStats stats;
  };

  static MultiLevelStructure build_tetrahedra(std::vector<Tetrahedron4> tetrahedra,
                                              const StorageBudget& budget, std::uint64_t seed = 0);
  static MultiLevelStructure build_segments(std::vector<Segment4> segments,
                                            const StorageBudget& budget, std::uint64_t seed = 0);
  static MultiLevelStructure build_triangles(std::vector<Triangle4> triangles,
                                             const StorageBudget& budget, std::uint64_t seed = 0);
  static MultiLevelStructure build_flats(std::vector<Triangle4> flats, const StorageBudget& budget,
                                         std::uint64_t seed = 0);

  Setup setup() const { return setup_; }
  std::size_t size() const { return count_; }
  std::size_t level_count() const { return levels_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t residual_count() const { return residual_.size(); }
  const StorageBudget& budget() const { return budget_; }
  /// Largest number of items held by any leaf.
  std::size_t max_leaf_size() const;

  /// Segment queries (setup SegQueryTetraInput, or a line for Line2Flat).
  Result query(const Segment4& q, QueryMode mode, std::size_t queryIndex = 0) const;
  /// Tetrahedron queries (setup TetraQuerySegInput).
  Result query(const Tetrahedron4& q, QueryMode mode, std::size_t queryIndex = 0) const;
  /// Triangle queries (setup TriTri).
  Result query(const Triangle4& q, QueryMode mode, std::size_t queryIndex = 0) const;

  template <typename Q>
  Result query_all(const std::vector<Q>& queries, QueryMode mode) const {
    Result total;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      Result r = query(queries[i], mode, i);
      total.stats += r.stats;
      if (!r.report.detected) continue;
      total.report.detected = true;
      if (mode == QueryMode::Detect) {
        total.report.count = 1;
        return total;
      }
      total.report.count += r.report.count;
      for (auto& p : r.report.pairs) total.report.pairs.push_back(std::move(p));
    }
    return total;
  }

  struct Node {
    std::array<std::int64_t, 6> lo{};
    std::array<std::int64_t, 6> hi{};
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t next = -1;
    bool unbounded = false;
  };

 private:
  enum class LevelKind { Hyper5, Point4, TwoPlane, LineP };
  struct Level {
    LevelKind kind = LevelKind::Hyper5;
    std::vector<int> blocks;
    int dim = 0;
    int k = 0;  // grid scale 2^k
    std::vector<std::int64_t> lo, hi;
    std::vector<std::uint8_t> inf;
    std::vector<std::int8_t> sign;  // per-object orientation of the stored parametrization
  };
  struct Trees {
    std::int32_t root[2] = {-1, -1};  // objects with sign +1, -1
  };
  struct Ctx;

  void init_level(Level& lv, LevelKind kind) const;
  void set_point(Level& lv, std::size_t obj, const std::vector<ExactScalar>& values) const;
  void finish_build(std::uint64_t seed);
  std::int32_t build_level(const std::vector<std::uint32_t>& ids, std::size_t level);
  std::int32_t build_node(std::uint32_t begin, std::uint32_t end, std::size_t level, int depth);
  void visit_trees(std::int32_t id, std::size_t level, unsigned mask, Ctx& ctx) const;
  void visit_node(std::int32_t id, std::size_t level, int group, unsigned mask, Ctx& ctx) const;
  void emit_subtree(const Node& node, Ctx& ctx) const;
  void scan_leaf(const Node& node, unsigned mask, Ctx& ctx) const;
  Result run(Ctx& ctx, std::size_t queryIndex) const;

  Setup setup_ = Setup::SegQueryTetraInput;
  StorageBudget budget_;
  std::size_t count_ = 0;
  int start_dim_ = 0;
  std::vector<Level> levels_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> pool_;
  std::vector<Trees> trees_;
  std::int32_t top_ = -1;
  std::vector<std::uint32_t> residual_;

  std::vector<TetraCache> tcache_;
  std::vector<TetraPrep> tprep_;
  std::vector<Segment4> segs_;
  std::vector<SegmentPrep> sprep_;
  std::vector<Triangle4> tris_;
  std::vector<TrianglePrep> triprep_;
};

struct BatchedResult {
  IntersectionReport report;
  QueryStats stats;
  bool usedOracle = false;
  mpz_class s = 0;
};

/// ceil((m n)^{6/7}) before clamping to [n, n^6].
mpz_class batched_storage(std::size_t m, std::size_t n);
/// Budget for n stored objects queried by m others.
StorageBudget batched_budget(std::size_t m, std::size_t n);
/// Red triangles queried against a structure on the blue ones.
BatchedResult batched_tri_tri(const std::vector<Triangle4>& red, const std::vector<Triangle4>& blue,
                              QueryMode mode);

}  // namespace r4
