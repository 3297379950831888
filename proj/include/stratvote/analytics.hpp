#pragma once

// Closed-form predictions: vote probabilities, concentration zones, the zone
// partition of the threshold axis, neutral-environment expected increments and
// the principle-B zone-3 formulas for a biased environment.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "stratvote/model.hpp"

namespace stratvote {

// Standard normal density and distribution function, plus the N(mu, sigma^2) versions.
double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
double normal_pdf(double x, double mu, double sigma) noexcept;
double normal_cdf(double x, double mu, double sigma) noexcept;

struct ApprovalProbability {
  double p = 0.5;  // P{d > 0}
  double q = 0.5;  // P{d < 0}
};

ApprovalProbability approval_probability(double mu, double sigma);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double sd() const noexcept;
};

/// Mean and variance of the share of a category of `n_category` voting "for"
/// when each votes "for" with probability p.
Moments vote_fraction_moments(double p, int n_category);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// [mean - 3 sd, mean + 3 sd].
Interval concentration_zone(double mean, double sd);

enum class Zone : std::uint8_t { One, Two, Three, FourA, FourB, FiveA, FiveB, Merged };

std::string_view zone_name(Zone zone);

struct ZonePartition {
  double beta = 0.0;
  int n_e = 0;
  double p = 0.5;
  // beta-w, beta+w, 1-beta-w, 1-beta+w in the neutral case (w = 3 beta / sqrt(n_e)),
  // clamped to [0, 1]. For p != 0.5 the centres move to 2 beta p and 1 - 2 beta (1 - p).
  std::array<double, 4> boundaries{};
  bool zone3_exists = false;
};

/// Partition of the threshold axis by the concentration zones of the overall
/// support fraction. `p` is the per-voter approval probability.
ZonePartition zone_partition(double beta, int n_e, double p = 0.5);

/// Total over alpha in [0, 1].
Zone classify_zone(double alpha, const ZonePartition& partition);

/// Largest 2 beta for which egoists alone cannot carry a proposal at
/// alpha = 1 - beta: sqrt(n_e) / (sqrt(n_e) + 1.5).
double egoists_insufficient_condition(int n_e);

/// Mean absolute deviation of N(mu, sigma^2): sigma sqrt(2 / pi).
double mean_positive_increment(double sigma);

enum class NeutralRegime : std::uint8_t { Zone1, Zone2, Zone3, AlphaEqualsBeta, AlphaEqualsOneMinusBeta };

std::string_view regime_name(NeutralRegime regime);

/// Links of the binomial -> normal estimate of the egoist increment at
/// alpha = 1 - beta, in order.
struct NeutralDerivation {
  double mean_positive_increment = 0.0;       // sigma sqrt(2/pi)
  double binomial_rms = 0.0;                  // 0.5 sqrt(n_e)
  double binomial_mean_deviation = 0.0;       // sqrt(0.5 n_e / pi)
  double for_minus_against_deviation = 0.0;   // sqrt(2 n_e / pi)
  double category_total_if_accepted = 0.0;    // (2 sigma / pi) sqrt(n_e)
  double per_member_if_accepted = 0.0;        // 2 sigma / (pi sqrt(n_e))
  double per_member_per_step = 0.0;           // sigma / (2 pi sqrt(n_e))
};

NeutralDerivation neutral_derivation(int n_e, double sigma);

struct CategoryPrediction {
  double expected_increment = 0.0;  // over the whole s-step series
  std::optional<double> rms;
};

struct NeutralPrediction {
  NeutralRegime regime = NeutralRegime::Zone3;
  GroupPrinciple principle = GroupPrinciple::B;
  double acceptance_probability = 0.0;
  CategoryPrediction egoist;
  CategoryPrediction group;
  bool approximation = true;
};

/// Expected s-step increments per category in a neutral environment.
/// Principle A' has no closed form here and raises UnsupportedRegime.
NeutralPrediction neutral_expected_increments(NeutralRegime regime, GroupPrinciple principle, int n_e,
                                              int n_g, double sigma, int s);

/// Principle-B predictions for a threshold inside zone 3 when mu may be nonzero.
struct Zone3EnvironmentPrediction {
  double sigma_prime = 0.0;  // sigma / sqrt(n_g)
  double mu_prime = 0.0;     // mu / sigma'
  double accept_prob = 0.0;  // F(mu')
  std::optional<double> group_step_mean_conditional;  // mu + sigma' f(mu') / F(mu')
  double group_step_mean = 0.0;                       // sigma' f(mu') + mu F(mu')
  double group_s_step = 0.0;
  double egoist_s_step = 0.0;  // s mu F(mu')
  double difference = 0.0;     // s sigma' f(mu')
};

Zone3EnvironmentPrediction zone3_env_predictions(double mu, double sigma, int n_g, int s);

struct PredictionReport {
  PopulationProfile population;
  double mu = 0.0;
  double sigma = 1.0;
  int steps = 0;
  GroupPrinciple principle = GroupPrinciple::B;
  std::optional<double> alpha;
  ApprovalProbability approval;
  Moments xi_e;
  Moments xi_g;
  Interval xi_e_zone;
  Interval xi_unsupported_zone;  // overall support when the group votes against
  Interval xi_supported_zone;    // overall support when the group votes for
  ZonePartition partition;
  std::optional<Zone> alpha_zone;
  double egoists_insufficient_two_beta = 0.0;
  std::vector<NeutralPrediction> neutral;  // mu == 0 only; one entry per regime and principle A/B
  std::optional<Zone3EnvironmentPrediction> zone3_environment;  // principle B
};

/// Collects every applicable closed form. Throws UnsupportedRegime when nothing
/// beyond the partition applies (principle A' or a nonzero mu with principle A).
PredictionReport build_prediction_report(const PopulationProfile& population, double mu, double sigma,
                                         std::optional<double> alpha, GroupPrinciple principle, int steps);

}  // namespace stratvote
