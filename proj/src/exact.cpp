#include "r4/exact.hpp"

#include <algorithm>
#include <cctype>

namespace r4 {

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Neg: return "NEG";
    case Sign::Zero: return "ZERO";
    case Sign::Pos: return "POS";
  }
  return "?";
}

ExactScalar::ExactScalar(const mpz_class& num, const mpz_class& den) {
  if (sgn(den) == 0) throw std::domain_error("ExactScalar: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

ExactScalar::ExactScalar(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

ExactScalar& ExactScalar::operator/=(const ExactScalar& o) {
  if (o.is_zero()) throw std::domain_error("ExactScalar: division by zero");
  q_ /= o.q_;
  return *this;
}

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

mpz_class parse_integer(std::string_view s) {
  if (s[0] == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace

ExactScalar ExactScalar::parse(std::string_view text) {
  const auto slash = text.find('/');
  const std::string_view num = text.substr(0, slash);
  if (!is_integer_text(num)) throw ParseError("not a rational: '" + std::string(text) + "'");
  if (slash == std::string_view::npos) return ExactScalar(parse_integer(num), mpz_class(1));
  const std::string_view den = text.substr(slash + 1);
  if (!is_integer_text(den)) throw ParseError("not a rational: '" + std::string(text) + "'");
  const mpz_class d = parse_integer(den);
  if (sgn(d) == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  return ExactScalar(parse_integer(num), d);
}

ExactScalar ExactScalar::parse_decimal(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) return parse(text);
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = text.substr(dot + 1);
  const bool neg = !whole.empty() && whole[0] == '-';
  const std::string_view digits = neg || (!whole.empty() && whole[0] == '+') ? whole.substr(1) : whole;
  auto all_digits = [](std::string_view v) {
    return std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if ((digits.empty() && frac.empty()) || !all_digits(digits) || !all_digits(frac)) {
    throw ParseError("not a decimal: '" + std::string(text) + "'");
  }
  mpz_class scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  const mpz_class num(std::string(digits.empty() ? "0" : digits) + std::string(frac), 10);
  return ExactScalar(neg ? mpz_class(-num) : num, scale);
}

std::string ExactScalar::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

ExactScalar abs(const ExactScalar& v) { return v.sign() == Sign::Neg ? -v : v; }

mpz_class common_denominator(std::span<const ExactScalar> values) {
  mpz_class l = 1;
  for (const auto& v : values) {
    if (!v.is_integer()) l = lcm(l, v.raw().get_den());
  }
  return l;
}

}  // namespace r4
