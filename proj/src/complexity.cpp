#include "r4/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace r4 {

namespace {

long double lg(long double x) { return std::log2(x); }

// log2 of a sum of terms given by their log2 values.
long double log2_sum(const std::vector<long double>& terms) {
  const long double m = *std::max_element(terms.begin(), terms.end());
  long double acc = 0;
  for (long double t : terms) acc += std::exp2(t - m);
  return m + std::log2(acc);
}

struct Model {
  long double D, r0, c0, delta;
  explicit Model(const CostModel& m)
      : D(m.D.to_double()), r0(m.r0.to_double()), c0(m.c0.to_double()), delta(m.delta.to_double()) {
    m.validate();
  }
};

void check_sigma(double sigma) {
  if (!(sigma >= 1 && sigma <= 6)) throw std::out_of_range("sigma outside [1, 6]");
}

RecurrenceFit fit_over(int log2Min, int log2Max, const std::function<Unfolding(long double)>& storage,
                       const std::function<Unfolding(long double)>& query) {
  if (log2Min >= log2Max) throw std::invalid_argument("empty fit range");
  std::vector<long double> x, s, sr, q, qr;
  for (int k = log2Min; k <= log2Max; ++k) {
    const long double n = std::exp2(static_cast<long double>(k));
    const Unfolding a = storage(n);
    const Unfolding b = query(n);
    x.push_back(k);
    s.push_back(lg(a.normalized));
    sr.push_back(lg(a.raw));
    q.push_back(lg(b.normalized));
    qr.push_back(lg(b.raw));
  }
  return {fit_exponent(x, s), fit_exponent(x, q), fit_exponent(x, sr), fit_exponent(x, qr)};
}

}  // namespace

void CostModel::validate() const {
  if (!(D > ExactScalar(1))) throw std::invalid_argument("cost model: D must exceed 1");
  if (r0 < ExactScalar(4) * D) throw std::invalid_argument("cost model: r0 must be at least 4 D");
  if (c0.sign() != Sign::Pos) throw std::invalid_argument("cost model: c0 must be positive");
  if (delta.sign() != Sign::Pos || !(delta < ExactScalar(1, 6))) {
    throw std::invalid_argument("cost model: delta must lie in (0, 1/6)");
  }
}

ExponentFit fit_exponent(const std::vector<long double>& log2x, const std::vector<long double>& log2y) {
  const std::size_t k = log2x.size();
  if (k < 2 || log2y.size() != k) throw std::invalid_argument("fit needs at least two samples");
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += log2x[i];
    my += log2y[i];
  }
  mx /= k;
  my /= k;
  long double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (log2x[i] - mx) * (log2y[i] - my);
    sxx += (log2x[i] - mx) * (log2x[i] - mx);
  }
  const long double b = sxy / sxx;
  long double res = 0;
  for (std::size_t i = 0; i < k; ++i) res = std::max(res, std::fabs(my + b * (log2x[i] - mx) - log2y[i]));
  return {static_cast<double>(b), static_cast<double>(res)};
}

ExactScalar q_tradeoff_exponent(const ExactScalar& sigma) {
  if (sigma < ExactScalar(1) || sigma > ExactScalar(6)) throw std::out_of_range("sigma outside [1, 6]");
  if (sigma <= ExactScalar(2)) return ExactScalar(7, 6) - sigma / ExactScalar(3);
  return ExactScalar(3, 4) - sigma / ExactScalar(8);
}

double q_tradeoff_exponent(double sigma) {
  check_sigma(sigma);
  return sigma <= 2 ? 7.0 / 6 - sigma / 3 : 0.75 - sigma / 8;
}

BatchedExponent batched_cost_exponent(const ExactScalar& mu) {
  if (mu.sign() == Sign::Neg) throw std::out_of_range("mu must be non-negative");
  BatchedExponent b;
  b.first = std::max(ExactScalar(3, 4) * mu + ExactScalar(7, 8), ExactScalar(1));
  b.second = std::max(ExactScalar(8, 9) * mu + ExactScalar(2, 3), mu);
  b.firstDominates = b.first >= b.second;
  b.exponent = b.firstDominates ? b.first : b.second;
  return b;
}

ExactScalar batched_breakpoint() {
  // 3 mu/4 + 7/8 = 8 mu/9 + 2/3
  return (ExactScalar(7, 8) - ExactScalar(2, 3)) / (ExactScalar(8, 9) - ExactScalar(3, 4));
}

double leaf_size(double n, double s) {
  if (!(n >= 1 && s >= n && std::log(s) <= 6 * std::log(n) + 1e-9)) throw std::out_of_range("need n <= s <= n^6");
  return std::exp(1.2 * std::log(n) - 0.2 * std::log(s));
}

double stop_r_omega(double n, double s, double delta) {
  if (!(n >= 1 && s >= n && std::log(s) <= 6 * std::log(n) + 1e-9)) throw std::out_of_range("need n <= s <= n^6");
  if (!(delta >= 0 && delta < 1.0 / 6)) throw std::out_of_range("delta outside [0, 1/6)");
  return std::exp((1.2 / (1 + 1.2 * delta)) * (std::log(s) - std::log(n)));
}

Unfolding wide_storage(long double n, long double s, const CostModel& model) {
  const Model m(model);
  const long double cut = std::max(std::pow(n, 1.5L) / std::sqrt(s), 1.0L);
  Unfolding u;
  long double N = n, sw = s, nodes = 1, mult = 1;
  for (int j = 0;; ++j) {
    LevelCost lc{j, nodes, 0, 0};
    const bool leaf = N < cut;
    lc.total = nodes * (leaf ? N : std::pow(m.r0, 6) * sw);
    lc.normalized = lc.total / mult;
    u.raw += lc.total;
    u.normalized = std::max(u.normalized, lc.normalized);
    u.levels.push_back(lc);
    if (leaf) break;
    N /= m.r0;
    sw /= m.r0 * m.r0 * m.r0;
    nodes *= m.c0 * m.r0 * m.r0 * m.r0;
    mult *= m.c0;
  }
  return u;
}

Unfolding wide_query(long double n, long double s, const CostModel& model) {
  const Model m(model);
  const long double cut = std::max(std::pow(n, 1.5L) / std::sqrt(s), 1.0L);
  Unfolding u;
  long double N = n, sw = s, nodes = 1;
  for (int j = 0;; ++j) {
    LevelCost lc{j, nodes, 0, 0};
    const bool leaf = N < cut;
    const long double per = leaf ? N : 1 + N / std::pow(sw, 0.25L);
    lc.total = nodes * per;
    lc.normalized = per;  // nodes == 2^j
    u.raw += lc.total;
    u.normalized = std::max(u.normalized, lc.normalized);
    u.levels.push_back(lc);
    if (leaf) break;
    N /= m.r0;
    sw /= m.r0 * m.r0 * m.r0;
    nodes *= 2;
  }
  return u;
}

Unfolding main_storage(long double n, const CostModel& model, bool withS1) {
  const Model m(model);
  const long double D4 = std::pow(m.D, 4);
  Unfolding u;
  long double N = n, nodes = 1, mult = 1;
  for (int j = 0;; ++j) {
    LevelCost lc{j, nodes, 0, 0};
    const bool leaf = N < m.D * m.D;
    long double raw = N, norm = N;
    if (!leaf) {
      const long double w = N / m.D;
      const Unfolding s0 = wide_storage(w, w * w, model);
      const long double s1 = withS1 ? N * N : 0;
      raw = D4 * s0.raw + s1;
      norm = D4 * s0.normalized + s1;
    }
    lc.total = nodes * raw;
    lc.normalized = nodes * norm / mult;
    u.raw += lc.total;
    u.normalized = std::max(u.normalized, lc.normalized);
    u.levels.push_back(lc);
    if (leaf) break;
    N /= m.D * m.D;
    nodes *= m.c0 * D4;
    mult *= m.c0;
  }
  return u;
}

Unfolding main_query(long double n, const CostModel& model) {
  const Model m(model);
  // Q(N) = max{D Q0(N/D) + c D Q(N/D^2), Q1(N)}, unfolded bottom-up for the
  // raw value; the normalized value keeps the largest D^j-weighted level.
  std::vector<long double> sizes;
  for (long double N = n; N >= m.D * m.D; N /= m.D * m.D) sizes.push_back(N);
  long double below = sizes.empty() ? n : sizes.back() / (m.D * m.D);
  Unfolding u;
  long double raw = below;
  for (auto it = sizes.rbegin(); it != sizes.rend(); ++it) {
    const long double w = *it / m.D;
    raw = std::max(m.D * wide_query(w, w * w, model).raw + m.c0 * m.D * raw, std::sqrt(*it));
  }
  u.raw = raw;
  long double nodes = 1, cross = 1;
  for (std::size_t j = 0; j <= sizes.size(); ++j) {
    LevelCost lc{static_cast<int>(j), nodes, 0, 0};
    long double per = below, norm = below;
    if (j < sizes.size()) {
      const long double w = sizes[j] / m.D;
      const Unfolding q0 = wide_query(w, w * w, model);
      per = std::max(m.D * q0.raw, std::sqrt(sizes[j]));
      norm = std::max(m.D * q0.normalized, std::sqrt(sizes[j]));
    }
    lc.total = nodes * per;
    lc.normalized = cross * norm;
    u.normalized = std::max(u.normalized, lc.normalized);
    u.levels.push_back(lc);
    nodes *= m.c0 * m.D;
    cross *= m.D;
  }
  return u;
}

RecurrenceFit unfold_wide(const ExactScalar& sigma, int log2Min, int log2Max, const CostModel& model) {
  check_sigma(sigma.to_double());
  const long double sg = sigma.to_double();
  return fit_over(
      log2Min, log2Max, [&](long double n) { return wide_storage(n, std::pow(n, sg), model); },
      [&](long double n) { return wide_query(n, std::pow(n, sg), model); });
}

RecurrenceFit unfold_main(const CostModel& model, int log2Min, int log2Max, bool withS1) {
  return fit_over(
      log2Min, log2Max, [&](long double n) { return main_storage(n, model, withS1); },
      [&](long double n) { return main_query(n, model); });
}

PrematureFit unfold_premature(double sigma, const CostModel& model) {
  check_sigma(sigma);
  const Model m(model);
  const long double lD = lg(m.D);
  auto fit = [&](auto log2_target) {
    std::vector<long double> x, y;
    for (int e = 16; e <= 256; e += 8) {
      const long double L = e;  // log2 n
      const long double S = sigma * L;
      const long double k = std::max(0.0L, std::round(log2_target(L, S) / lD));
      const long double Dk = k * lD;
      x.push_back(L);
      y.push_back(log2_sum({Dk, 1.25L * L + Dk / 6 - 5 * S / 12, L - S / 4, L - S / 6 - Dk / 3}));
    }
    return fit_exponent(x, y);
  };
  PrematureFit out;
  out.balanceSecondLast = fit([](long double L, long double S) { return (S - L) / 2; });
  out.balanceFirstLast = fit([](long double L, long double S) { return 0.75L * L - S / 8; });
  out.secondLastChosen = out.balanceSecondLast.exponent <= out.balanceFirstLast.exponent;
  out.exponent = std::min(out.balanceSecondLast.exponent, out.balanceFirstLast.exponent);
  return out;
}

std::vector<TradeoffSample> tradeoff_curve(double step, const CostModel& model) {
  if (!(step > 0)) throw std::invalid_argument("step must be positive");
  std::vector<TradeoffSample> out;
  const int count = static_cast<int>(std::floor(5 / step + 1e-9));
  for (int i = 0; i <= count; ++i) {
    const double sigma = std::min(6.0, 1 + i * step);
    const PrematureFit p = unfold_premature(sigma, model);
    out.push_back({sigma, q_tradeoff_exponent(sigma), p.exponent, p.secondLastChosen});
  }
  return out;
}

double premature_breakpoint(double step, const CostModel& model) {
  const auto curve = tradeoff_curve(step, model);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i - 1].secondLastChosen && !curve[i].secondLastChosen) return (curve[i - 1].sigma + curve[i].sigma) / 2;
  }
  return 6;
}

}  // namespace r4
