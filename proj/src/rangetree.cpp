#include "r4/rangetree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace r4 {

// ---------------------------------------------------------------------------
// Budget

mpz_class storage_for_sigma(std::size_t n, const ExactScalar& sigma) {
  if (sigma.sign() != Sign::Pos) throw BudgetOutOfRange();
  const mpz_class p = sigma.num();
  const mpz_class q = sigma.den();
  if (!p.fits_ulong_p() || !q.fits_ulong_p()) throw BudgetOutOfRange();
  mpz_class target;
  mpz_ui_pow_ui(target.get_mpz_t(), n, p.get_ui());
  mpz_class r;
  mpz_root(r.get_mpz_t(), target.get_mpz_t(), q.get_ui());
  mpz_class check;
  mpz_pow_ui(check.get_mpz_t(), r.get_mpz_t(), q.get_ui());
  if (check < target) ++r;
  return r;
}

std::size_t leaf_cutoff(std::size_t n, const mpz_class& s) {
  if (n <= 1) return 1;
  mpz_class n6;
  mpz_ui_pow_ui(n6.get_mpz_t(), n, 6);
  mpz_class t;
  mpz_cdiv_q(t.get_mpz_t(), n6.get_mpz_t(), s.get_mpz_t());
  mpz_class c;
  mpz_root(c.get_mpz_t(), t.get_mpz_t(), 5);
  mpz_class c5;
  mpz_pow_ui(c5.get_mpz_t(), c.get_mpz_t(), 5);
  if (c5 < t) ++c;
  if (c < 1) c = 1;
  if (c > n) return n;
  return c.get_ui();
}

StorageBudget StorageBudget::with_s(std::size_t n, const mpz_class& s) {
  mpz_class n6;
  mpz_ui_pow_ui(n6.get_mpz_t(), n, 6);
  if (s < mpz_class(static_cast<unsigned long>(n)) || s > n6) throw BudgetOutOfRange();
  return {n, s, leaf_cutoff(n, s)};
}

StorageBudget StorageBudget::with_sigma(std::size_t n, const ExactScalar& sigma) {
  if (sigma < ExactScalar(1) || sigma > ExactScalar(6)) throw BudgetOutOfRange();
  return with_s(n, storage_for_sigma(n, sigma));
}

const char* to_string(Setup s) {
  switch (s) {
    case Setup::SegQueryTetraInput: return "seg-tetra";
    case Setup::TriTri: return "tri-tri";
    case Setup::TetraQuerySegInput: return "tetra-seg";
    case Setup::Line2Flat: return "line-flat";
  }
  return "?";
}

Setup parse_setup(const std::string& text) {
  if (text == "seg-tetra" || text == "i") return Setup::SegQueryTetraInput;
  if (text == "tri-tri" || text == "ii") return Setup::TriTri;
  if (text == "tetra-seg" || text == "iii") return Setup::TetraQuerySegInput;
  if (text == "line-flat" || text == "flats") return Setup::Line2Flat;
  throw std::invalid_argument("unknown setup: " + text);
}

QueryStats& QueryStats::operator+=(const QueryStats& o) {
  nodesVisited += o.nodesVisited;
  canonicalSetsTouched += o.canonicalSetsTouched;
  leafItemsScanned += o.leafItemsScanned;
  exactPredicateCalls += o.exactPredicateCalls;
  return *this;
}

const char* to_string(BoxClass c) {
  switch (c) {
    case BoxClass::Inside: return "INSIDE";
    case BoxClass::Outside: return "OUTSIDE";
    case BoxClass::Crossing: return "CROSSING";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Range polynomials

namespace {

constexpr int kTargetBits = 20;
constexpr int kMaxScale = 40;
constexpr std::int64_t kGridLimit = std::int64_t{1} << 52;

std::size_t tensor_size(const std::vector<int>& blocks) {
  std::size_t s = 1;
  for (int d : blocks) s *= static_cast<std::size_t>(d + 1);
  return s;
}

/// Builds the coefficient tensor of a block-affine polynomial from an
/// evaluator on 0/1 points, by differencing along each block axis.
RangePoly tensor_from(const std::vector<int>& blocks,
                      const std::function<mpz_class(const std::vector<int>&)>& f) {
  RangePoly p;
  p.blocks = blocks;
  const std::size_t size = tensor_size(blocks);
  const int dim = static_cast<int>(p.dim());
  p.coef.resize(size);
  std::vector<int> x(dim);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::fill(x.begin(), x.end(), 0);
    std::size_t rest = idx;
    int offset = dim;
    for (int b = static_cast<int>(blocks.size()) - 1; b >= 0; --b) {
      const std::size_t radix = blocks[b] + 1;
      const std::size_t digit = rest % radix;
      rest /= radix;
      offset -= blocks[b];
      if (digit > 0) x[offset + digit - 1] = 1;
    }
    p.coef[idx] = f(x);
  }
  std::size_t stride = size;
  for (int d : blocks) {
    const std::size_t radix = d + 1;
    const std::size_t inner = stride / radix;
    for (std::size_t outer = 0; outer < size; outer += stride) {
      for (std::size_t digit = 1; digit < radix; ++digit) {
        for (std::size_t r = 0; r < inner; ++r) {
          p.coef[outer + digit * inner + r] -= p.coef[outer + r];
        }
      }
    }
    stride = inner;
  }
  return p;
}

RangePoly linear_range(const Homog5& form, bool has_constant, int vars) {
  RangePoly p;
  p.blocks = {vars};
  p.coef.assign(vars + 1, mpz_class(0));
  if (has_constant) {
    p.coef[0] = form.big[vars];
    for (int i = 0; i < vars; ++i) p.coef[1 + i] = form.big[i];
  } else {
    for (int i = 0; i < vars; ++i) p.coef[1 + i] = form.big[i];
  }
  return p;
}

/// Grid-scaled tensor: coefficient of a monomial with d variables times
/// 2^{k (blocks - d)}, so that evaluating on grid integers X = x 2^k gives
/// 2^{k blocks} p(x).
struct ScaledPoly {
  std::vector<int> blocks;
  std::vector<mpz_class> big;
  std::vector<Int128> small;
  bool fits = false;
};

ScaledPoly scale_poly(const RangePoly& p, int k) {
  ScaledPoly s;
  s.blocks = p.blocks;
  const std::size_t size = p.coef.size();
  s.big.resize(size);
  s.small.resize(size);
  s.fits = true;
  const int nb = static_cast<int>(p.blocks.size());
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rest = idx;
    int deg = 0;
    for (int b = nb - 1; b >= 0; --b) {
      const std::size_t radix = p.blocks[b] + 1;
      if (rest % radix != 0) ++deg;
      rest /= radix;
    }
    mpz_class v = p.coef[idx];
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(k * (nb - deg)));
    s.big[idx] = v;
    if (mpz_sizeinbase(v.get_mpz_t(), 2) > 100) {
      s.fits = false;
    } else if (s.fits) {
      // Assemble from two 64-bit halves of |v|.
      mpz_class a = abs(v);
      mpz_class hi = a >> 64;
      mpz_class lo = a - (hi << 64);
      unsigned __int128 u = (static_cast<unsigned __int128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
                            static_cast<unsigned __int128>(mpz_get_ui(lo.get_mpz_t()));
      Int128 w = static_cast<Int128>(u);
      s.small[idx] = sgn(v) < 0 ? -w : w;
    }
  }
  return s;
}

enum class Range { AllPos, AllNeg, Mixed };

struct RangeAcc {
  bool seen_le0 = false;  // some lower bound <= 0
  bool seen_ge0 = false;  // some upper bound >= 0
  bool mixed() const { return seen_le0 && seen_ge0; }
};

inline bool mul_ok(Int128 a, Int128 b, Int128& r) { return !__builtin_mul_overflow(a, b, &r); }
inline bool add_ok(Int128 a, Int128 b, Int128& r) { return !__builtin_add_overflow(a, b, &r); }
inline bool mul_ok(const mpz_class& a, const mpz_class& b, mpz_class& r) {
  r = a * b;
  return true;
}
inline bool add_ok(const mpz_class& a, const mpz_class& b, mpz_class& r) {
  r = a + b;
  return true;
}
inline int sign_num(Int128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }
inline int sign_num(const mpz_class& v) { return sgn(v); }

template <typename Num>
Num from_i64(std::int64_t v) {
  return Num(static_cast<long>(v));
}

/// Min/max signs of a block-affine tensor over a box. Non-last blocks are
/// fixed at their box corners; the last block is linear and handled by exact
/// interval bounds. Returns false on 128-bit overflow.
template <typename Num>
bool range_rec(const Num* t, const std::vector<int>& blocks, std::size_t b, const std::int64_t* lo,
               const std::int64_t* hi, RangeAcc& acc) {
  const int d = blocks[b];
  if (b + 1 == blocks.size()) {
    Num mn = t[0];
    Num mx = t[0];
    for (int i = 0; i < d; ++i) {
      Num a, c;
      if (!mul_ok(t[1 + i], from_i64<Num>(lo[i]), a)) return false;
      if (!mul_ok(t[1 + i], from_i64<Num>(hi[i]), c)) return false;
      const bool a_small = a < c;
      if (!add_ok(mn, a_small ? a : c, mn)) return false;
      if (!add_ok(mx, a_small ? c : a, mx)) return false;
    }
    if (sign_num(mn) <= 0) acc.seen_le0 = true;
    if (sign_num(mx) >= 0) acc.seen_ge0 = true;
    return true;
  }
  std::size_t rest = 1;
  for (std::size_t j = b + 1; j < blocks.size(); ++j) rest *= static_cast<std::size_t>(blocks[j] + 1);
  std::array<Num, 32> next;
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    for (std::size_t r = 0; r < rest; ++r) {
      Num v = t[r];
      for (int i = 0; i < d; ++i) {
        const std::int64_t x = (corner >> i) & 1u ? hi[i] : lo[i];
        Num prod;
        if (!mul_ok(t[(1 + i) * rest + r], from_i64<Num>(x), prod)) return false;
        if (!add_ok(v, prod, v)) return false;
      }
      next[r] = v;
    }
    if (!range_rec(next.data(), blocks, b + 1, lo + d, hi + d, acc)) return false;
    if (acc.mixed()) return true;
  }
  return true;
}

Range poly_range(const ScaledPoly& p, const std::int64_t* lo, const std::int64_t* hi) {
  RangeAcc acc;
  bool ok = false;
  if (p.fits) ok = range_rec<Int128>(p.small.data(), p.blocks, 0, lo, hi, acc);
  if (!ok) {
    acc = RangeAcc{};
    range_rec<mpz_class>(p.big.data(), p.blocks, 0, lo, hi, acc);
  }
  if (!acc.seen_le0) return Range::AllPos;
  if (!acc.seen_ge0) return Range::AllNeg;
  return Range::Mixed;
}

BoxClass class_of(Range r, Sign wanted) {
  if (wanted == Sign::Zero) return r == Range::Mixed ? BoxClass::Crossing : BoxClass::Outside;
  if (r == Range::Mixed) return BoxClass::Crossing;
  const bool pos = r == Range::AllPos;
  return (pos == (wanted == Sign::Pos)) ? BoxClass::Inside : BoxClass::Outside;
}

/// Grid conversion floor/ceil(v 2^k); false when beyond the grid limit.
bool to_grid(const ExactScalar& v, int k, std::int64_t& fl, std::int64_t& ce) {
  mpz_class num = v.num();
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(k));
  const mpz_class den = v.den();
  mpz_class f, c;
  mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  mpz_cdiv_q(c.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (abs(f) > kGridLimit || abs(c) > kGridLimit) return false;
  fl = f.get_si();
  ce = c.get_si();
  return true;
}

int scale_for(const std::vector<double>& magnitudes) {
  if (magnitudes.empty()) return kTargetBits;
  std::vector<double> m = magnitudes;
  auto mid = m.begin() + static_cast<std::ptrdiff_t>(m.size() / 2);
  std::nth_element(m.begin(), mid, m.end());
  const int bits = static_cast<int>(std::ceil(std::log2(std::max(*mid, 1e-300))));
  return std::clamp(kTargetBits - bits, 0, kMaxScale);
}

Sign ratio_sign(const Pluecker10& a, const Pluecker10& b) {
  for (std::size_t i = 0; i < 10; ++i) {
    if (sgn(a.big[i]) != 0) return sign_of(sgn(a.big[i]) * sgn(b.big[i]));
  }
  return Sign::Zero;
}

enum Verdict : int { kNo = 0, kYesA = 1, kYesB = 2, kDegenerate = 3 };

/// Exact evaluation of the segment/tetrahedron sub-conditions. Case A crosses
/// the hyperplane from its negative to its positive side.
int seg_tetra_verdict(const SegmentPrep& e, const TetraPrep& t) {
  const Sign sa = dot_sign(t.plane, e.a);
  const Sign sb = dot_sign(t.plane, e.b);
  if (sa == Sign::Zero || sb == Sign::Zero) return kDegenerate;
  if (sa == sb) return kNo;
  const Sign want = sb;
  bool zero = false;
  for (int k = 0; k < 4; ++k) {
    const Sign o = dot_sign(e.line, t.facet[k]) * t.eps[k];
    if (o == -want) return kNo;
    if (o == Sign::Zero) zero = true;
  }
  if (zero) return kDegenerate;
  return want == Sign::Pos ? kYesA : kYesB;
}

/// Six orientation signs of two triangles; case A is the all-positive one.
int tri_tri_verdict(const TrianglePrep& q, const TrianglePrep& o) {
  bool pos = false, neg = false, zero = false;
  auto take = [&](Sign s) {
    pos |= s == Sign::Pos;
    neg |= s == Sign::Neg;
    zero |= s == Sign::Zero;
  };
  for (const auto& e : q.edge) {
    take(dot_sign(e, o.plane));
    if (pos && neg) return kNo;
  }
  for (const auto& e : o.edge) {
    take(dot_sign(e, q.plane));
    if (pos && neg) return kNo;
  }
  if (zero) return kDegenerate;
  return pos ? kYesA : kYesB;
}

}  // namespace

std::size_t RangePoly::dim() const {
  std::size_t d = 0;
  for (int b : blocks) d += static_cast<std::size_t>(b);
  return d;
}

ExactScalar RangePoly::eval(const std::vector<ExactScalar>& x) const {
  ExactScalar total = 0;
  const int nb = static_cast<int>(blocks.size());
  for (std::size_t idx = 0; idx < coef.size(); ++idx) {
    if (sgn(coef[idx]) == 0) continue;
    ExactScalar term(coef[idx], mpz_class(1));
    std::size_t rest = idx;
    int offset = static_cast<int>(dim());
    for (int b = nb - 1; b >= 0; --b) {
      const std::size_t radix = blocks[b] + 1;
      const std::size_t digit = rest % radix;
      rest /= radix;
      offset -= blocks[b];
      if (digit > 0) term *= x[offset + digit - 1];
    }
    total += term;
  }
  return total;
}

BoxClass classify_box(const RangePoly& p, const std::vector<ExactScalar>& lo,
                      const std::vector<ExactScalar>& hi, Sign wanted) {
  std::vector<double> mags;
  for (const auto* side : {&lo, &hi}) {
    for (const auto& v : *side) {
      if (!v.is_zero()) mags.push_back(std::fabs(v.to_double()));
    }
  }
  double mx = 0;
  for (double m : mags) mx = std::max(mx, m);
  const int k = mags.empty() ? kTargetBits
                             : std::clamp(kTargetBits - static_cast<int>(std::ceil(std::log2(mx))), 0,
                                          kMaxScale);
  const std::size_t d = p.dim();
  std::vector<std::int64_t> glo(d), ghi(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::int64_t f, c;
    if (!to_grid(lo[i], k, f, c)) return BoxClass::Crossing;
    glo[i] = f;
    if (!to_grid(hi[i], k, f, c)) return BoxClass::Crossing;
    ghi[i] = c;
  }
  return class_of(poly_range(scale_poly(p, k), glo.data(), ghi.data()), wanted);
}

namespace {

RangePoly twoplane_tensor(const Pluecker10& line) {
  return tensor_from({2, 2, 2}, [&](const std::vector<int>& x) {
    Homog5 r0, r1, r2;
    r0.big = {0, 0, x[0], x[1], 1};
    r1.big = {0, 1, x[2], x[3], 1};
    r2.big = {1, 1, x[4], x[5], 1};
    const Pluecker10 d = plane_dual_raw(r0, r1, r2);
    mpz_class acc = 0;
    for (std::size_t i = 0; i < 10; ++i) acc += line.big[i] * d.big[i];
    return acc;
  });
}

RangePoly line_tensor(const Pluecker10& plane) {
  return tensor_from({3, 3}, [&](const std::vector<int>& x) {
    Homog5 r0, r1;
    r0.big = {x[0], x[1], x[2], 0, 1};
    r1.big = {x[3], x[4], x[5], 1, 1};
    const Pluecker10 l = line_pluecker_raw(r0, r1);
    mpz_class acc = 0;
    for (std::size_t i = 0; i < 10; ++i) acc += l.big[i] * plane.big[i];
    return acc;
  });
}

/// The tensors are linear in the fixed Pluecker vector, so they are
/// tabulated once on the unit vectors.
struct LinearTable {
  std::vector<int> blocks;
  std::vector<std::array<long, 10>> rows;
};

template <typename F>
LinearTable tabulate(F tensor) {
  LinearTable t;
  for (std::size_t i = 0; i < 10; ++i) {
    Pluecker10 unit;
    for (std::size_t j = 0; j < 10; ++j) unit.big[j] = i == j ? 1 : 0;
    const RangePoly p = tensor(unit);
    t.blocks = p.blocks;
    t.rows.resize(p.coef.size());
    for (std::size_t r = 0; r < p.coef.size(); ++r) t.rows[r][i] = p.coef[r].get_si();
  }
  return t;
}

RangePoly apply_table(const LinearTable& t, const Pluecker10& v) {
  RangePoly p;
  p.blocks = t.blocks;
  p.coef.assign(t.rows.size(), mpz_class(0));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t i = 0; i < 10; ++i) {
      if (t.rows[r][i] != 0) p.coef[r] += v.big[i] * t.rows[r][i];
    }
  }
  return p;
}

}  // namespace

RangePoly twoplane_range(const Pluecker10& line) {
  static const LinearTable table = tabulate(twoplane_tensor);
  return apply_table(table, line);
}

RangePoly line_range(const Pluecker10& plane) {
  static const LinearTable table = tabulate(line_tensor);
  return apply_table(table, plane);
}

// ---------------------------------------------------------------------------
// Build

void MultiLevelStructure::init_level(Level& lv, LevelKind kind) const {
  lv.kind = kind;
  switch (kind) {
    case LevelKind::Hyper5: lv.blocks = {5}; break;
    case LevelKind::Point4: lv.blocks = {4}; break;
    case LevelKind::TwoPlane: lv.blocks = {2, 2, 2}; break;
    case LevelKind::LineP: lv.blocks = {3, 3}; break;
  }
  lv.dim = 0;
  for (int b : lv.blocks) lv.dim += b;
  lv.lo.assign(count_ * lv.dim, 0);
  lv.hi.assign(count_ * lv.dim, 0);
  lv.inf.assign(count_, 0);
  lv.sign.assign(count_, 1);
}

namespace {

/// Rational parameter values gathered per level before the grid scale is known.
using LevelValues = std::vector<std::vector<ExactScalar>>;

}  // namespace

void MultiLevelStructure::set_point(Level& lv, std::size_t obj, const std::vector<ExactScalar>& values) const {
  for (int i = 0; i < lv.dim; ++i) {
    std::int64_t f = 0, c = 0;
    if (!to_grid(values[i], lv.k, f, c)) {
      lv.inf[obj] = 1;
      f = -kGridLimit;
      c = kGridLimit;
    }
    lv.lo[obj * lv.dim + i] = f;
    lv.hi[obj * lv.dim + i] = c;
  }
}

void MultiLevelStructure::finish_build(std::uint64_t seed) {
  start_dim_ = static_cast<int>(seed % 6);
  std::vector<std::uint32_t> ids;
  std::vector<char> is_res(count_, 0);
  for (std::uint32_t r : residual_) is_res[r] = 1;
  for (std::uint32_t i = 0; i < count_; ++i) {
    if (!is_res[i]) ids.push_back(i);
  }
  if (!ids.empty()) top_ = build_level(ids, 0);
}

std::int32_t MultiLevelStructure::build_level(const std::vector<std::uint32_t>& ids, std::size_t level) {
  Trees t;
  for (int g = 0; g < 2; ++g) {
    const std::int8_t want = g == 0 ? 1 : -1;
    const std::uint32_t base = static_cast<std::uint32_t>(pool_.size());
    for (std::uint32_t id : ids) {
      if (levels_[level].sign[id] == want) pool_.push_back(id);
    }
    const std::uint32_t end = static_cast<std::uint32_t>(pool_.size());
    if (end > base) t.root[g] = build_node(base, end, level, 0);
  }
  trees_.push_back(t);
  return static_cast<std::int32_t>(trees_.size() - 1);
}

std::int32_t MultiLevelStructure::build_node(std::uint32_t begin, std::uint32_t end, std::size_t level,
                                             int depth) {
  const Level& lv = levels_[level];
  Node node;
  node.begin = begin;
  node.end = end;
  const int d = lv.dim;
  for (int i = 0; i < d; ++i) {
    node.lo[i] = std::numeric_limits<std::int64_t>::max();
    node.hi[i] = std::numeric_limits<std::int64_t>::min();
  }
  for (std::uint32_t p = begin; p < end; ++p) {
    const std::uint32_t obj = pool_[p];
    if (lv.inf[obj]) node.unbounded = true;
    for (int i = 0; i < d; ++i) {
      node.lo[i] = std::min(node.lo[i], lv.lo[obj * d + i]);
      node.hi[i] = std::max(node.hi[i], lv.hi[obj * d + i]);
    }
  }
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= budget_.leafCutoff) return id;

  const int axis = (start_dim_ + depth) % d;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(pool_.begin() + begin, pool_.begin() + mid, pool_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const std::int64_t ka = lv.lo[a * d + axis];
                     const std::int64_t kb = lv.lo[b * d + axis];
                     return ka != kb ? ka < kb : a < b;
                   });
  const std::int32_t left = build_node(begin, mid, level, depth + 1);
  const std::int32_t right = build_node(mid, end, level, depth + 1);
  std::int32_t next = -1;
  if (level + 1 < levels_.size()) {
    const std::vector<std::uint32_t> ids(pool_.begin() + begin, pool_.begin() + end);
    next = build_level(ids, level + 1);
  }
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].next = next;
  return id;
}

namespace {

/// Fills every level's grid from gathered rational values.
template <typename Self, typename Level>
void grid_levels(const Self& self, std::vector<Level>& levels, const std::vector<LevelValues>& values,
                 const std::vector<char>& residual) {
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::vector<double> mags;
    for (std::size_t o = 0; o < values[l].size(); ++o) {
      if (residual[o]) continue;
      for (const auto& v : values[l][o]) {
        if (!v.is_zero()) mags.push_back(std::fabs(v.to_double()));
      }
    }
    levels[l].k = scale_for(mags);
    for (std::size_t o = 0; o < values[l].size(); ++o) {
      if (!residual[o]) self(levels[l], o, values[l][o]);
    }
  }
}

}  // namespace

MultiLevelStructure MultiLevelStructure::build_tetrahedra(std::vector<Tetrahedron4> tetrahedra,
                                                          const StorageBudget& budget, std::uint64_t seed) {
  MultiLevelStructure s;
  s.setup_ = Setup::SegQueryTetraInput;
  s.budget_ = budget;
  s.count_ = tetrahedra.size();
  s.levels_.resize(6);
  s.init_level(s.levels_[0], LevelKind::Hyper5);
  s.init_level(s.levels_[1], LevelKind::Hyper5);
  for (int k = 0; k < 4; ++k) s.init_level(s.levels_[2 + k], LevelKind::TwoPlane);
  std::vector<LevelValues> values(6, LevelValues(s.count_));
  std::vector<char> residual(s.count_, 0);
  for (std::size_t o = 0; o < s.count_; ++o) {
    const Tetrahedron4& t = tetrahedra[o];
    s.tcache_.push_back({t, hyperplane_of(t)});
    s.tprep_.push_back(prepare_tetra(t));
    const Hyperplane4& h = s.tcache_.back().h;
    values[0][o] = {h.coeffs[0], h.coeffs[1], h.coeffs[2], h.coeffs[3], -h.offset};
    values[1][o] = values[0][o];
    for (int k = 0; k < 4 && !residual[o]; ++k) {
      const Triangle4 f = t.facet(k);
      try {
        const TwoPlaneParam tp = twoplane_param(f.p, f.q, f.r);
        const auto a = tp.point6();
        values[2 + k][o].assign(a.begin(), a.end());
        const auto anchors = tp.lifted();
        const Pluecker10 ad = plane_dual(anchors[0], anchors[1], anchors[2]);
        s.levels_[2 + k].sign[o] =
            static_cast<std::int8_t>(static_cast<int>(ratio_sign(ad, s.tprep_.back().facet[k]) * s.tprep_.back().eps[k]));
      } catch (const DegenerateDirection&) {
        residual[o] = 1;
      }
    }
    if (residual[o]) s.residual_.push_back(static_cast<std::uint32_t>(o));
  }
  grid_levels([&s](Level& lv, std::size_t o, const std::vector<ExactScalar>& v) { s.set_point(lv, o, v); },
              s.levels_, values, residual);
  s.finish_build(seed);
  return s;
}

MultiLevelStructure MultiLevelStructure::build_segments(std::vector<Segment4> segments,
                                                        const StorageBudget& budget, std::uint64_t seed) {
  MultiLevelStructure s;
  s.setup_ = Setup::TetraQuerySegInput;
  s.budget_ = budget;
  s.count_ = segments.size();
  s.levels_.resize(6);
  s.init_level(s.levels_[0], LevelKind::Point4);
  s.init_level(s.levels_[1], LevelKind::Point4);
  for (int k = 0; k < 4; ++k) s.init_level(s.levels_[2 + k], LevelKind::LineP);
  std::vector<LevelValues> values(6, LevelValues(s.count_));
  std::vector<char> residual(s.count_, 0);
  s.segs_ = segments;
  for (std::size_t o = 0; o < s.count_; ++o) {
    Segment4 e = segments[o];
    if (e.b.w() < e.a.w()) std::swap(e.a, e.b);
    s.sprep_.push_back(prepare_segment(e));
    if (e.a.w() == e.b.w()) {
      residual[o] = 1;
      s.residual_.push_back(static_cast<std::uint32_t>(o));
      continue;
    }
    values[0][o].assign(e.a.c.begin(), e.a.c.end());
    values[1][o].assign(e.b.c.begin(), e.b.c.end());
    const auto p6 = line_param(e).point6();
    for (int k = 0; k < 4; ++k) values[2 + k][o].assign(p6.begin(), p6.end());
  }
  grid_levels([&s](Level& lv, std::size_t o, const std::vector<ExactScalar>& v) { s.set_point(lv, o, v); },
              s.levels_, values, residual);
  s.finish_build(seed);
  return s;
}

MultiLevelStructure MultiLevelStructure::build_triangles(std::vector<Triangle4> triangles,
                                                         const StorageBudget& budget, std::uint64_t seed) {
  MultiLevelStructure s;
  s.setup_ = Setup::TriTri;
  s.budget_ = budget;
  s.count_ = triangles.size();
  s.levels_.resize(6);
  for (int j = 0; j < 3; ++j) s.init_level(s.levels_[j], LevelKind::LineP);
  for (int j = 0; j < 3; ++j) s.init_level(s.levels_[3 + j], LevelKind::TwoPlane);
  std::vector<LevelValues> values(6, LevelValues(s.count_));
  std::vector<char> residual(s.count_, 0);
  s.tris_ = triangles;
  for (std::size_t o = 0; o < s.count_; ++o) {
    const Triangle4& t = triangles[o];
    s.triprep_.push_back(prepare_triangle(t));
    const std::array<std::pair<Point4, Point4>, 3> edges{{{t.p, t.q}, {t.q, t.r}, {t.r, t.p}}};
    for (int j = 0; j < 3 && !residual[o]; ++j) {
      const auto& [a, b] = edges[j];
      if (a.w() == b.w()) {
        residual[o] = 1;
        break;
      }
      const auto p6 = line_param({a, b}).point6();
      values[j][o].assign(p6.begin(), p6.end());
      s.levels_[j].sign[o] = b.w() > a.w() ? 1 : -1;
    }
    if (!residual[o]) {
      try {
        const TwoPlaneParam tp = twoplane_param(t.p, t.q, t.r);
        const auto a = tp.point6();
        const auto anchors = tp.lifted();
        const Sign rs = ratio_sign(plane_dual(anchors[0], anchors[1], anchors[2]), s.triprep_.back().plane);
        for (int j = 0; j < 3; ++j) {
          values[3 + j][o].assign(a.begin(), a.end());
          s.levels_[3 + j].sign[o] = static_cast<std::int8_t>(static_cast<int>(rs));
        }
      } catch (const DegenerateDirection&) {
        residual[o] = 1;
      }
    }
    if (residual[o]) s.residual_.push_back(static_cast<std::uint32_t>(o));
  }
  grid_levels([&s](Level& lv, std::size_t o, const std::vector<ExactScalar>& v) { s.set_point(lv, o, v); },
              s.levels_, values, residual);
  s.finish_build(seed);
  return s;
}

MultiLevelStructure MultiLevelStructure::build_flats(std::vector<Triangle4> flats, const StorageBudget& budget,
                                                     std::uint64_t seed) {
  MultiLevelStructure s;
  s.setup_ = Setup::Line2Flat;
  s.budget_ = budget;
  s.count_ = flats.size();
  s.levels_.resize(1);
  s.init_level(s.levels_[0], LevelKind::TwoPlane);
  std::vector<LevelValues> values(1, LevelValues(s.count_));
  std::vector<char> residual(s.count_, 0);
  s.tris_ = flats;
  for (std::size_t o = 0; o < s.count_; ++o) {
    const Triangle4& t = flats[o];
    try {
      const auto a = twoplane_param(t.p, t.q, t.r).point6();
      values[0][o].assign(a.begin(), a.end());
    } catch (const DegenerateDirection&) {
      residual[o] = 1;
      s.residual_.push_back(static_cast<std::uint32_t>(o));
    }
  }
  grid_levels([&s](Level& lv, std::size_t o, const std::vector<ExactScalar>& v) { s.set_point(lv, o, v); },
              s.levels_, values, residual);
  s.finish_build(seed);
  return s;
}

std::size_t MultiLevelStructure::max_leaf_size() const {
  std::size_t m = 0;
  for (const auto& n : nodes_) {
    if (n.left < 0) m = std::max<std::size_t>(m, n.end - n.begin);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Query

struct MultiLevelStructure::Ctx {
  QueryMode mode = QueryMode::Count;
  std::vector<ScaledPoly> poly;  // per level
  std::array<Sign, 6> want{};    // case A; case B negates; Zero = zero-set range
  std::function<int(std::uint32_t)> verdict;
  std::function<std::optional<Point4>(std::uint32_t)> witness;
  QueryStats stats;
  std::vector<std::uint32_t> accepted;
  std::size_t count = 0;
  std::vector<std::uint32_t> degenerate;
  std::vector<char> seen;
  bool done = false;

  void accept(std::uint32_t id) {
    ++count;
    if (mode == QueryMode::Report) accepted.push_back(id);
    if (mode == QueryMode::Detect) done = true;
  }
};

void MultiLevelStructure::visit_trees(std::int32_t id, std::size_t level, unsigned mask, Ctx& ctx) const {
  for (int g = 0; g < 2 && !ctx.done; ++g) {
    const std::int32_t root = trees_[id].root[g];
    if (root >= 0) visit_node(root, level, g, mask, ctx);
  }
}

void MultiLevelStructure::visit_node(std::int32_t id, std::size_t level, int group, unsigned mask,
                                     Ctx& ctx) const {
  if (ctx.done) return;
  const Node& node = nodes_[id];
  ++ctx.stats.nodesVisited;
  Range r = Range::Mixed;
  if (!node.unbounded) r = poly_range(ctx.poly[level], node.lo.data(), node.hi.data());
  if (group == 1 && r != Range::Mixed) r = r == Range::AllPos ? Range::AllNeg : Range::AllPos;
  unsigned inside = 0, crossing = 0;
  for (unsigned c = 0; c < 2; ++c) {
    if (!(mask & (1u << c))) continue;
    const Sign w = c == 0 ? ctx.want[level] : -ctx.want[level];
    switch (class_of(r, w)) {
      case BoxClass::Inside: inside |= 1u << c; break;
      case BoxClass::Crossing: crossing |= 1u << c; break;
      case BoxClass::Outside: break;
    }
  }
  const bool leaf = node.left < 0;
  if (leaf) {
    if (inside | crossing) {
      if (inside) ++ctx.stats.canonicalSetsTouched;
      scan_leaf(node, inside | crossing, ctx);
    }
    return;
  }
  if (inside) {
    ++ctx.stats.canonicalSetsTouched;
    if (level + 1 == levels_.size()) {
      emit_subtree(node, ctx);
    } else {
      visit_trees(node.next, level + 1, inside, ctx);
    }
  }
  if (crossing) {
    visit_node(node.left, level, group, crossing, ctx);
    visit_node(node.right, level, group, crossing, ctx);
  }
}

void MultiLevelStructure::emit_subtree(const Node& node, Ctx& ctx) const {
  if (node.end == node.begin) return;
  if (ctx.mode == QueryMode::Detect) {
    ctx.count = 1;
    ctx.done = true;
  } else if (ctx.mode == QueryMode::Count) {
    ctx.count += node.end - node.begin;
  } else {
    for (std::uint32_t p = node.begin; p < node.end; ++p) ctx.accept(pool_[p]);
  }
}

void MultiLevelStructure::scan_leaf(const Node& node, unsigned mask, Ctx& ctx) const {
  for (std::uint32_t p = node.begin; p < node.end && !ctx.done; ++p) {
    const std::uint32_t obj = pool_[p];
    ++ctx.stats.leafItemsScanned;
    ++ctx.stats.exactPredicateCalls;
    const int v = ctx.verdict(obj);
    if ((v == kYesA && (mask & 1u)) || (v == kYesB && (mask & 2u))) {
      ctx.accept(obj);
    } else if (v == kDegenerate && !ctx.seen[obj]) {
      ctx.seen[obj] = 1;
      ctx.degenerate.push_back(obj);
    }
  }
}

MultiLevelStructure::Result MultiLevelStructure::run(Ctx& ctx, std::size_t queryIndex) const {
  ctx.seen.assign(count_, 0);
  if (top_ >= 0) visit_trees(top_, 0, ctx.want[0] == Sign::Zero ? 1u : 3u, ctx);

  // Pairs the structure cannot decide by strict signs go to the direct solver.
  std::vector<std::uint32_t> extra = ctx.degenerate;
  extra.insert(extra.end(), residual_.begin(), residual_.end());
  std::sort(extra.begin(), extra.end());
  std::vector<std::pair<std::uint32_t, Point4>> found;
  for (std::uint32_t obj : extra) {
    if (ctx.done) break;
    ++ctx.stats.exactPredicateCalls;
    if (auto w = ctx.witness(obj)) {
      if (ctx.mode == QueryMode::Report) found.emplace_back(obj, std::move(*w));
      ctx.accept(obj);
    }
  }

  Result res;
  res.stats = ctx.stats;
  res.report.count = ctx.mode == QueryMode::Detect ? (ctx.count > 0 ? 1 : 0) : ctx.count;
  res.report.detected = ctx.count > 0;
  if (ctx.mode != QueryMode::Report) return res;

  std::vector<std::uint32_t> strict;
  for (std::uint32_t obj : ctx.accepted) {
    if (std::find_if(found.begin(), found.end(), [obj](const auto& f) { return f.first == obj; }) == found.end()) {
      strict.push_back(obj);
    }
  }
  for (std::uint32_t obj : strict) {
    ++res.stats.exactPredicateCalls;
    auto w = ctx.witness(obj);
    if (!w) throw std::logic_error("structure accepted a pair the direct solver rejects");
    found.emplace_back(obj, std::move(*w));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [obj, w] : found) res.report.pairs.push_back({queryIndex, obj, std::move(w)});
  return res;
}

MultiLevelStructure::Result MultiLevelStructure::query(const Segment4& q, QueryMode mode,
                                                       std::size_t queryIndex) const {
  Ctx ctx;
  ctx.mode = mode;
  if (setup_ == Setup::SegQueryTetraInput) {
    const SegmentPrep e = prepare_segment(q);
    for (std::size_t l = 0; l < 6; ++l) {
      RangePoly p = l < 2 ? linear_range(l == 0 ? e.a : e.b, false, 5) : twoplane_range(e.line);
      ctx.poly.push_back(scale_poly(p, levels_[l].k));
    }
    ctx.want = {Sign::Neg, Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos};
    ctx.verdict = [this, e](std::uint32_t o) { return seg_tetra_verdict(e, tprep_[o]); };
    ctx.witness = [this, &q](std::uint32_t o) { return segment_tetra_witness(q, tcache_[o]); };
  } else if (setup_ == Setup::Line2Flat) {
    const Pluecker10 l = line_pluecker(q.a, q.b);
    ctx.poly.push_back(scale_poly(twoplane_range(l), levels_[0].k));
    ctx.want = {Sign::Zero};
    ctx.witness = [this, &q](std::uint32_t o) { return line_flat_witness(q, tris_[o]); };
    ctx.verdict = [&ctx](std::uint32_t o) { return ctx.witness(o) ? kYesA : kNo; };
  } else {
    throw std::invalid_argument("segment query on a structure of another setup");
  }
  return run(ctx, queryIndex);
}

MultiLevelStructure::Result MultiLevelStructure::query(const Tetrahedron4& q, QueryMode mode,
                                                       std::size_t queryIndex) const {
  if (setup_ != Setup::TetraQuerySegInput) {
    throw std::invalid_argument("tetrahedron query on a structure of another setup");
  }
  Ctx ctx;
  ctx.mode = mode;
  const TetraPrep t = prepare_tetra(q);
  const Hyperplane4 h = hyperplane_of(q);
  for (std::size_t l = 0; l < 6; ++l) {
    RangePoly p;
    if (l < 2) {
      p = linear_range(t.plane, true, 4);
    } else {
      p = line_range(t.facet[l - 2]);
      if (t.eps[l - 2] == Sign::Neg) {
        for (auto& c : p.coef) c = -c;
      }
    }
    ctx.poly.push_back(scale_poly(p, levels_[l].k));
  }
  ctx.want = {Sign::Neg, Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos};
  ctx.verdict = [this, t](std::uint32_t o) { return seg_tetra_verdict(sprep_[o], t); };
  ctx.witness = [this, &q, &h](std::uint32_t o) { return segment_tetra_direct(segs_[o], q, h); };
  return run(ctx, queryIndex);
}

MultiLevelStructure::Result MultiLevelStructure::query(const Triangle4& q, QueryMode mode,
                                                       std::size_t queryIndex) const {
  if (setup_ != Setup::TriTri) throw std::invalid_argument("triangle query on a structure of another setup");
  Ctx ctx;
  ctx.mode = mode;
  const TrianglePrep t = prepare_triangle(q);
  const RangePoly edge_levels = line_range(t.plane);
  for (std::size_t l = 0; l < 6; ++l) {
    ctx.poly.push_back(scale_poly(l < 3 ? edge_levels : twoplane_range(t.edge[l - 3]), levels_[l].k));
  }
  ctx.want = {Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos, Sign::Pos};
  ctx.verdict = [this, t](std::uint32_t o) { return tri_tri_verdict(t, triprep_[o]); };
  ctx.witness = [this, &q](std::uint32_t o) { return tri_tri_witness(q, tris_[o]); };
  return run(ctx, queryIndex);
}

// ---------------------------------------------------------------------------
// Batched red-blue triangles

mpz_class batched_storage(std::size_t m, std::size_t n) {
  mpz_class mn = mpz_class(static_cast<unsigned long>(m)) * static_cast<unsigned long>(n);
  mpz_class target;
  mpz_pow_ui(target.get_mpz_t(), mn.get_mpz_t(), 6);
  mpz_class r;
  mpz_root(r.get_mpz_t(), target.get_mpz_t(), 7);
  mpz_class check;
  mpz_pow_ui(check.get_mpz_t(), r.get_mpz_t(), 7);
  if (check < target) ++r;
  return r;
}

StorageBudget batched_budget(std::size_t m, std::size_t n) {
  mpz_class s = batched_storage(m, n);
  mpz_class n6;
  mpz_ui_pow_ui(n6.get_mpz_t(), n, 6);
  if (s < n) s = static_cast<unsigned long>(n);
  if (s > n6) s = n6;
  return StorageBudget::with_s(n, s);
}

BatchedResult batched_tri_tri(const std::vector<Triangle4>& red, const std::vector<Triangle4>& blue,
                              QueryMode mode) {
  BatchedResult out;
  const std::size_t m = red.size();
  const std::size_t n = blue.size();
  if (m == 0 || n == 0) return out;
  mpz_class m6, n6;
  mpz_ui_pow_ui(m6.get_mpz_t(), m, 6);
  mpz_ui_pow_ui(n6.get_mpz_t(), n, 6);
  if (m6 < n || mpz_class(static_cast<unsigned long>(m)) > n6) {
    out.usedOracle = true;
    out.report = tri_tri_query(red, blue, mode);
    return out;
  }
  const StorageBudget budget = batched_budget(m, n);
  out.s = budget.s;
  const auto structure = MultiLevelStructure::build_triangles(blue, budget);
  auto r = structure.query_all(red, mode);
  out.report = std::move(r.report);
  out.stats = r.stats;
  return out;
}

}  // namespace r4
