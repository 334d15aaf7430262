#pragma once

#include <stdexcept>
#include <vector>

#include "r4/exact.hpp"

namespace r4 {

/// Constants of the recurrences. Requires D > 1, r0 >= 4 D, c0 > 0 and
/// 0 < delta < 1/6.
struct CostModel {
  ExactScalar D = 8;
  ExactScalar r0 = 64;
  ExactScalar c0 = 4;
  ExactScalar delta = ExactScalar(1, 100);
  void validate() const;  // throws std::invalid_argument
};

struct ExponentFit {
  double exponent = 0;
  double residual = 0;  // max deviation of log2(cost) from the fitted line
};

/// Least squares slope of log2(y) against log2(x).
ExponentFit fit_exponent(const std::vector<long double>& log2x, const std::vector<long double>& log2y);

/// Query exponent for storage s = n^sigma, sigma in [1, 6]. Throws
/// std::out_of_range otherwise.
ExactScalar q_tradeoff_exponent(const ExactScalar& sigma);
double q_tradeoff_exponent(double sigma);

struct BatchedExponent {
  ExactScalar first;     // max(3 mu / 4 + 7/8, 1)
  ExactScalar second;    // max(8 mu / 9 + 2/3, mu)
  ExactScalar exponent;  // the larger of the two
  bool firstDominates = true;
};
/// Cost exponent for m = n^mu queries against n objects.
BatchedExponent batched_cost_exponent(const ExactScalar& mu);
/// The mu at which the two bounds cross, solved exactly.
ExactScalar batched_breakpoint();

/// n^{6/5} / s^{1/5}, the subproblem size at a leaf.
double leaf_size(double n, double s);
/// (s/n)^{(6/5)/(1 + 6 delta/5)}.
double stop_r_omega(double n, double s, double delta);

struct LevelCost {
  int level = 0;
  long double nodes = 0;       // subproblems at this level
  long double total = 0;       // summed cost at this level
  long double normalized = 0;  // total divided by the accumulated level constant
};

/// One unfolded recurrence. `raw` is the literal sum over all levels;
/// `normalized` takes the largest level after dividing out the per-level
/// constant multiplicity (c0^j, 2^j, c^j), which the O* bounds absorb.
struct Unfolding {
  long double raw = 0;
  long double normalized = 0;
  std::vector<LevelCost> levels;
};

/// Storage and query recurrences of the structure on N wide tetrahedra with
/// storage parameter s, recursing while N >= n^{3/2}/s^{1/2} (root values).
Unfolding wide_storage(long double n, long double s, const CostModel& model = {});
Unfolding wide_query(long double n, long double s, const CostModel& model = {});

/// Main recurrences with the S1 = n^2 and Q1 = n^{1/2} plug-ins.
Unfolding main_storage(long double n, const CostModel& model = {}, bool withS1 = true);
Unfolding main_query(long double n, const CostModel& model = {});

struct RecurrenceFit {
  ExponentFit storage;
  ExponentFit query;
  ExponentFit storageRaw;
  ExponentFit queryRaw;
};

/// Fits over n = 2^log2Min .. 2^log2Max with s = n^sigma.
RecurrenceFit unfold_wide(const ExactScalar& sigma = 2, int log2Min = 10, int log2Max = 24,
                          const CostModel& model = {});
RecurrenceFit unfold_main(const CostModel& model = {}, int log2Min = 10, int log2Max = 64, bool withS1 = true);

struct PrematureFit {
  ExponentFit balanceSecondLast;  // D^k = sqrt(s/n)
  ExponentFit balanceFirstLast;   // D^k = n^{3/4} / s^{1/8}
  double exponent = 0;            // the smaller of the two
  bool secondLastChosen = true;
};
/// Four-term query cost D^k + n^{5/4} D^{k/6}/s^{5/12} + n/s^{1/4} +
/// n/(s^{1/6} D^{k/3}) with integer k, fitted over n = 2^16 .. 2^256.
PrematureFit unfold_premature(double sigma, const CostModel& model = {});

struct TradeoffSample {
  double sigma = 0;
  double exponent = 0;
  double premature = 0;
  bool secondLastChosen = true;
};
/// Samples sigma = 1, 1 + step, ..., 6.
std::vector<TradeoffSample> tradeoff_curve(double step = 0.1, const CostModel& model = {});
/// Midpoint of the grid interval where the minimizing balance switches.
double premature_breakpoint(double step = 0.1, const CostModel& model = {});

}  // namespace r4
