#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ghost {

// One-pass (Welford) accumulator for mean and variance.
class RunningStats {
 public:
  void add(double value);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  // Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  double stddev() const;
  // Standard error of the mean; 0 for fewer than two samples.
  double sem() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Least-squares monotone fit (pool-adjacent-violators). Weights default to 1.
std::vector<double> isotonic_increasing(std::span<const double> values,
                                        std::span<const double> weights = {});
std::vector<double> isotonic_decreasing(std::span<const double> values,
                                        std::span<const double> weights = {});

// Ranks starting at 1, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

// Spearman rank correlation (Pearson correlation of average ranks).
double spearman(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double slope;
  double intercept;
  double slope_stderr;
  double r_squared;
};

// Ordinary least squares y = slope * x + intercept; needs >= 2 points.
LinearFit ordinary_least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace ghost
