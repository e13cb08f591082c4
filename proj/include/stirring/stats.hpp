#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stirring {

inline constexpr double kZ95 = 1.959963984540054;

struct MeanCi {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double stddev = 0.0;
  int count = 0;
};

// Normal-approximation 95% interval for the mean of xs.
inline MeanCi mean_ci95(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_ci95: empty sample");
  MeanCi out;
  out.count = static_cast<int>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / out.count;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.stddev = out.count > 1 ? std::sqrt(ss / (out.count - 1)) : 0.0;
  const double half = kZ95 * out.stddev / std::sqrt(static_cast<double>(out.count));
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

struct BinomialCi {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int successes = 0;
  int trials = 0;
};

// Normal-approximation 95% interval for a binomial proportion, clamped to
// [0,1]. Replica counts in the experiments are large enough for this.
inline BinomialCi binomial_ci95(int successes, int trials) {
  if (trials < 1) throw std::invalid_argument("binomial_ci95: trials must be >= 1");
  BinomialCi out;
  out.successes = successes;
  out.trials = trials;
  out.p_hat = static_cast<double>(successes) / trials;
  const double half = kZ95 * std::sqrt(out.p_hat * (1.0 - out.p_hat) / trials);
  out.lo = std::max(0.0, out.p_hat - half);
  out.hi = std::min(1.0, out.p_hat + half);
  return out;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace stirring
