#pragma once

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace r4 {

enum class Sign : int { Neg = -1, Zero = 0, Pos = 1 };

constexpr Sign operator-(Sign s) { return static_cast<Sign>(-static_cast<int>(s)); }
constexpr Sign operator*(Sign a, Sign b) {
  return static_cast<Sign>(static_cast<int>(a) * static_cast<int>(b));
}
constexpr Sign sign_of(int v) { return v > 0 ? Sign::Pos : (v < 0 ? Sign::Neg : Sign::Zero); }
const char* to_string(Sign s);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
class ExactScalar {
 public:
  ExactScalar() = default;
  ExactScalar(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  ExactScalar(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
  ExactScalar(const mpz_class& num, const mpz_class& den);
  explicit ExactScalar(mpq_class q);

  /// Accepts "p", "-p" or "p/q" with decimal integers; q must be nonzero.
  static ExactScalar parse(std::string_view text);
  /// Also accepts finite decimals such as "1.5" or "-0.25", exactly.
  static ExactScalar parse_decimal(std::string_view text);
  /// Canonical text form: "p" for integers, "p/q" otherwise.
  std::string str() const;

  const mpq_class& raw() const { return q_; }
  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }
  Sign sign() const { return sign_of(sgn(q_)); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  double to_double() const { return q_.get_d(); }

  ExactScalar& operator+=(const ExactScalar& o) { q_ += o.q_; return *this; }
  ExactScalar& operator-=(const ExactScalar& o) { q_ -= o.q_; return *this; }
  ExactScalar& operator*=(const ExactScalar& o) { q_ *= o.q_; return *this; }
  ExactScalar& operator/=(const ExactScalar& o);

  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
  friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
  ExactScalar operator-() const { return ExactScalar(mpq_class(-q_)); }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const ExactScalar& a, const ExactScalar& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_;
};

ExactScalar abs(const ExactScalar& v);

// ---------------------------------------------------------------------------
// Integer vectors with an __int128 fast path. Predicates in the hot loops are
// dot products of small integer vectors (Pluecker coordinates, hyperplane
// coefficients); values that fit in 62 bits are combined in 128-bit
// arithmetic with overflow checks, everything else falls back to GMP.

using Int128 = __int128;

template <std::size_t N>
struct IntVector {
  std::array<mpz_class, N> big{};
  std::array<std::int64_t, N> small{};
  bool fits = false;

  void refresh() {
    fits = true;
    for (std::size_t i = 0; i < N; ++i) {
      if (mpz_sizeinbase(big[i].get_mpz_t(), 2) > 62) {
        fits = false;
        return;
      }
      small[i] = big[i].get_si();
    }
  }
  /// Divides out the gcd of all entries; keeps the sign of every entry.
  void make_primitive() {
    mpz_class g = 0;
    for (const auto& v : big) g = gcd(g, v);
    if (g > 1) {
      for (auto& v : big) v /= g;
    }
    refresh();
  }
  bool is_zero() const {
    for (const auto& v : big) {
      if (sgn(v) != 0) return false;
    }
    return true;
  }
};

template <std::size_t N>
Sign dot_sign(const IntVector<N>& a, const IntVector<N>& b) {
  if (a.fits && b.fits) {
    Int128 acc = 0;
    bool overflow = false;
    for (std::size_t i = 0; i < N && !overflow; ++i) {
      const Int128 prod = static_cast<Int128>(a.small[i]) * b.small[i];
      overflow = __builtin_add_overflow(acc, prod, &acc);
    }
    if (!overflow) return acc > 0 ? Sign::Pos : (acc < 0 ? Sign::Neg : Sign::Zero);
  }
  mpz_class acc = 0;
  for (std::size_t i = 0; i < N; ++i) acc += a.big[i] * b.big[i];
  return sign_of(sgn(acc));
}

/// Least common multiple of the denominators of `values` (>= 1).
mpz_class common_denominator(std::span<const ExactScalar> values);

}  // namespace r4
