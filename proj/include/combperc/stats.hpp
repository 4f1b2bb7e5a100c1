#pragma once

// Small Monte Carlo helpers: running mean/variance and the two-sample
// Kolmogorov-Smirnov test.

#include <cstddef>
#include <vector>

namespace combperc {

// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 for fewer than two samples
  double standard_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Standard error of an empirical frequency k/n.
double proportion_standard_error(double p_hat, std::size_t n);

struct KsResult {
  double statistic = 0.0;  // sup |F_a - F_b|
  double critical = 0.0;   // 95% asymptotic critical value
  bool reject = false;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace combperc
