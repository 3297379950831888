#pragma once

// Test-side reference computations. None of these call into the library's
// analytics; they recompute expectations from first principles.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Standard normal CDF by adaptive Simpson on the density; slow but independent of erfc.
inline double Phi(double x) {
  if (x < -12.0) return 0.0;
  if (x > 12.0) return 1.0;
  const double lo = -12.0;
  const int n = 20000;
  const double h = (x - lo) / n;
  double sum = phi(lo) + phi(x);
  for (int i = 1; i < n; ++i) sum += phi(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    pmf[static_cast<std::size_t>(k)] = std::exp(log_c + k * std::log(p) + (n - k) * std::log1p(-p));
  }
  return pmf;
}

// Exact acceptance probability in a neutral environment with a principle-B
// group: the group supports with probability 1/2 independently of the
// egoists, whose number of "for" votes is Binomial(n_e, 1/2).
inline double neutral_acceptance_b(int n_e, int n_g, double alpha) {
  const int n = n_e + n_g;
  const std::vector<double> pmf = binomial_pmf(n_e, 0.5);
  double p = 0.0;
  for (int k = 0; k <= n_e; ++k) {
    const double against = static_cast<double>(k) / n;
    const double supports = static_cast<double>(k + n_g) / n;
    p += pmf[static_cast<std::size_t>(k)] * 0.5 * ((against > alpha ? 1.0 : 0.0) + (supports > alpha ? 1.0 : 0.0));
  }
  return p;
}

// Group-internal threshold written in the "1/2 plus or minus delta" form.
inline double internal_threshold_delta_form(double alpha, double beta) {
  if (alpha < beta) {
    const double delta = beta - alpha;
    return 0.5 - delta / (2.0 * beta);
  }
  if (alpha > 1.0 - beta) {
    const double delta = alpha - (1.0 - beta);
    return 0.5 + delta / (2.0 * beta);
  }
  return 0.5;
}

// Brute-force ballot count: each egoist casts 1, 0 or 1/2, the group casts
// all its votes together; ruined slots are NaN and skipped.
struct BallotCount {
  double xi = 0.0;
  double xi_e = 0.0;
};

inline BallotCount count_ballots(const std::vector<double>& d, int n_e, bool group_supports) {
  double votes = 0.0;
  double egoist_votes = 0.0;
  int egoists = 0;
  int active = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::isnan(d[i])) continue;
    ++active;
    if (static_cast<int>(i) < n_e) {
      ++egoists;
      const double ballot = d[i] > 0 ? 1.0 : (d[i] < 0 ? 0.0 : 0.5);
      egoist_votes += ballot;
      votes += ballot;
    } else if (group_supports) {
      votes += 1.0;
    }
  }
  return {votes / active, egoists ? egoist_votes / egoists : 0.0};
}

// One-step Monte Carlo of a zone-3 principle-B society: the group decides
// alone and supports iff the mean increment of its n_g members is positive.
struct Zone3Sample {
  double accept = 0.0, accept_se = 0.0;
  double conditional = 0.0, conditional_se = 0.0;  // E[D | D > 0], D = group mean increment
  double group = 0.0, group_se = 0.0;              // E[D 1{D > 0}]
  double egoist = 0.0, egoist_se = 0.0;            // E[d_e 1{D > 0}]
  double difference = 0.0, difference_se = 0.0;    // E[(D - d_e) 1{D > 0}]
};

class Welford {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double se() const { return n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline Zone3Sample zone3_monte_carlo(double mu, double sigma, int n_g, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(mu, sigma);
  Welford accept, conditional, group, egoist, difference;
  for (std::size_t k = 0; k < samples; ++k) {
    double total = 0.0;
    for (int j = 0; j < n_g; ++j) total += normal(rng);
    const double mean = total / n_g;
    const double own = normal(rng);
    const bool yes = mean > 0.0;
    accept.add(yes ? 1.0 : 0.0);
    if (yes) conditional.add(mean);
    group.add(yes ? mean : 0.0);
    egoist.add(yes ? own : 0.0);
    difference.add(yes ? mean - own : 0.0);
  }
  return {accept.mean(),     accept.se(),     conditional.mean(), conditional.se(), group.mean(),
          group.se(),        egoist.mean(),   egoist.se(),        difference.mean(), difference.se()};
}

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

inline Estimate mean_se(const std::vector<double>& xs) {
  Welford w;
  for (double x : xs) {
    if (!std::isnan(x)) w.add(x);
  }
  return {w.mean(), w.se()};
}

}  // namespace oracle
