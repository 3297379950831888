#include "stratvote/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stratvote/errors.hpp"

namespace stratvote {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be positive");
}

}  // namespace

double normal_pdf(double x) noexcept { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// erfc keeps full relative accuracy in the lower tail, where 1 - erf would cancel.
double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double mu, double sigma) noexcept {
  return normal_pdf((x - mu) / sigma) / sigma;
}

double normal_cdf(double x, double mu, double sigma) noexcept { return normal_cdf((x - mu) / sigma); }

ApprovalProbability approval_probability(double mu, double sigma) {
  require_sigma(sigma);
  return {normal_cdf(mu / sigma), normal_cdf(-mu / sigma)};
}

double Moments::sd() const noexcept { return std::sqrt(variance); }

Moments vote_fraction_moments(double p, int n_category) {
  if (n_category < 1) throw InvalidInput("vote_fraction_moments: category must be non-empty");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("vote_fraction_moments: p outside [0, 1]");
  return {p, p * (1.0 - p) / n_category};
}

Interval concentration_zone(double mean, double sd) {
  if (!(sd >= 0.0)) throw InvalidInput("concentration_zone: negative sd");
  return {mean - 3.0 * sd, mean + 3.0 * sd};
}

std::string_view zone_name(Zone zone) {
  switch (zone) {
    case Zone::One: return "1";
    case Zone::Two: return "2";
    case Zone::Three: return "3";
    case Zone::FourA: return "4a";
    case Zone::FourB: return "4b";
    case Zone::FiveA: return "5a";
    case Zone::FiveB: return "5b";
    case Zone::Merged: return "merged";
  }
  return "?";
}

ZonePartition zone_partition(double beta, int n_e, double p) {
  if (n_e < 1) throw InvalidInput("zone_partition: n_e must be at least 1");
  if (!(beta > 0.0 && beta <= 0.5)) throw InvalidInput("zone_partition: beta must lie in (0, 0.5]");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("zone_partition: p outside [0, 1]");

  const Moments xi_e = vote_fraction_moments(p, n_e);
  const Interval egoists = concentration_zone(xi_e.mean, xi_e.sd());
  const double two_beta = 2.0 * beta;
  const double b1 = two_beta * egoists.lo;
  const double b2 = two_beta * egoists.hi;
  const double b3 = 1.0 - two_beta + two_beta * egoists.lo;
  const double b4 = 1.0 - two_beta + two_beta * egoists.hi;

  ZonePartition out;
  out.beta = beta;
  out.n_e = n_e;
  out.p = p;
  out.boundaries = {clamp01(b1), clamp01(b2), clamp01(b3), clamp01(b4)};
  out.zone3_exists = b2 < b3;
  return out;
}

Zone classify_zone(double alpha, const ZonePartition& partition) {
  const auto [b1, b2, b3, b4] = partition.boundaries;
  const double two_beta = 2.0 * partition.beta;
  const double low_centre = two_beta * partition.p;
  const double high_centre = 1.0 - two_beta + two_beta * partition.p;

  if (alpha < b1) return Zone::One;
  if (alpha > b4) return Zone::Two;
  const bool in_five = alpha >= b1 && alpha <= b2;
  const bool in_four = alpha >= b3 && alpha <= b4;
  if (in_five && in_four) return Zone::Merged;
  if (in_five) return alpha < low_centre ? Zone::FiveA : Zone::FiveB;
  if (in_four) return alpha <= high_centre ? Zone::FourA : Zone::FourB;
  return partition.zone3_exists ? Zone::Three : Zone::Merged;
}

double egoists_insufficient_condition(int n_e) {
  if (n_e < 1) throw InvalidInput("egoists_insufficient_condition: n_e must be at least 1");
  const double root = std::sqrt(static_cast<double>(n_e));
  return root / (root + 1.5);
}

double mean_positive_increment(double sigma) {
  require_sigma(sigma);
  return sigma * std::sqrt(2.0 / kPi);
}

std::string_view regime_name(NeutralRegime regime) {
  switch (regime) {
    case NeutralRegime::Zone1: return "zone1";
    case NeutralRegime::Zone2: return "zone2";
    case NeutralRegime::Zone3: return "zone3";
    case NeutralRegime::AlphaEqualsBeta: return "alpha_eq_beta";
    case NeutralRegime::AlphaEqualsOneMinusBeta: return "alpha_eq_one_minus_beta";
  }
  return "?";
}

NeutralDerivation neutral_derivation(int n_e, double sigma) {
  if (n_e < 1) throw InvalidInput("neutral_derivation: n_e must be at least 1");
  const double n = static_cast<double>(n_e);
  NeutralDerivation d;
  d.mean_positive_increment = mean_positive_increment(sigma);
  d.binomial_rms = 0.5 * std::sqrt(n);
  // Binomial treated as normal: mean |deviation| = rms * sqrt(2/pi).
  d.binomial_mean_deviation = d.binomial_rms * std::sqrt(2.0 / kPi);
  // #for - #against = 2 (#for - n/2).
  d.for_minus_against_deviation = 2.0 * d.binomial_mean_deviation;
  d.category_total_if_accepted = d.for_minus_against_deviation * d.mean_positive_increment;
  d.per_member_if_accepted = d.category_total_if_accepted / n;
  // Accepted in a quarter of the steps.
  d.per_member_per_step = 0.25 * d.per_member_if_accepted;
  return d;
}

NeutralPrediction neutral_expected_increments(NeutralRegime regime, GroupPrinciple principle, int n_e,
                                              int n_g, double sigma, int s) {
  if (principle == GroupPrinciple::APrime) {
    throw UnsupportedRegime("no neutral-environment closed form for principle A'");
  }
  if (n_e < 1 || n_g < 1) throw InvalidInput("neutral_expected_increments: both categories must be non-empty");
  if (s < 1) throw InvalidInput("neutral_expected_increments: s must be at least 1");
  require_sigma(sigma);

  const double ne = n_e;
  const double ng = n_g;
  const double steps = s;
  NeutralPrediction out;
  out.regime = regime;
  out.principle = principle;
  switch (regime) {
    case NeutralRegime::Zone1:
      out.acceptance_probability = 1.0;
      out.egoist = {0.0, std::sqrt(steps / ne) * sigma};
      out.group = {0.0, std::sqrt(steps / ng) * sigma};
      break;
    case NeutralRegime::Zone2:
      out.acceptance_probability = 0.0;
      out.egoist = {0.0, 0.0};
      out.group = {0.0, 0.0};
      break;
    case NeutralRegime::Zone3:
      out.acceptance_probability = 0.5;
      out.egoist = {0.0, std::sqrt(steps / (2.0 * ne)) * sigma};
      out.group.expected_increment = principle == GroupPrinciple::A
                                         ? sigma * steps / (kPi * std::sqrt(ng))
                                         : sigma * steps / std::sqrt(2.0 * kPi * ng);
      break;
    case NeutralRegime::AlphaEqualsBeta:
    case NeutralRegime::AlphaEqualsOneMinusBeta:
      out.acceptance_probability = regime == NeutralRegime::AlphaEqualsBeta ? 0.75 : 0.25;
      out.egoist.expected_increment = sigma * steps / (2.0 * kPi * std::sqrt(ne));
      out.group.expected_increment = principle == GroupPrinciple::A
                                         ? sigma * steps / (2.0 * kPi * std::sqrt(ng))
                                         : sigma * steps / std::sqrt(8.0 * kPi * ng);
      break;
  }
  return out;
}

Zone3EnvironmentPrediction zone3_env_predictions(double mu, double sigma, int n_g, int s) {
  require_sigma(sigma);
  if (n_g < 1) throw InvalidInput("zone3_env_predictions: n_g must be at least 1");
  if (s < 1) throw InvalidInput("zone3_env_predictions: s must be at least 1");

  Zone3EnvironmentPrediction out;
  out.sigma_prime = sigma / std::sqrt(static_cast<double>(n_g));
  out.mu_prime = mu / out.sigma_prime;
  const double density = normal_pdf(out.mu_prime);
  out.accept_prob = normal_cdf(out.mu_prime);
  if (out.accept_prob > 0.0) {
    out.group_step_mean_conditional = mu + out.sigma_prime * density / out.accept_prob;
  }
  out.group_step_mean = out.sigma_prime * density + mu * out.accept_prob;
  out.group_s_step = s * out.group_step_mean;
  out.egoist_s_step = s * mu * out.accept_prob;
  out.difference = s * out.sigma_prime * density;
  return out;
}

PredictionReport build_prediction_report(const PopulationProfile& population, double mu, double sigma,
                                         std::optional<double> alpha, GroupPrinciple principle,
                                         int steps) {
  require_sigma(sigma);
  if (population.n_e < 1 || population.n_g < 1) {
    throw UnsupportedRegime("predictions need at least one egoist and one group member");
  }
  if (principle == GroupPrinciple::APrime) {
    throw UnsupportedRegime("no closed-form predictions for principle A'");
  }
  if (mu != 0.0 && principle == GroupPrinciple::A) {
    throw UnsupportedRegime("biased-environment formulas are stated for principle B only");
  }
  if (steps < 1) throw InvalidInput("steps must be at least 1");

  PredictionReport r;
  r.population = population;
  r.mu = mu;
  r.sigma = sigma;
  r.steps = steps;
  r.principle = principle;
  r.alpha = alpha;
  r.approval = approval_probability(mu, sigma);
  r.xi_e = vote_fraction_moments(r.approval.p, population.n_e);
  r.xi_g = vote_fraction_moments(r.approval.p, population.n_g);
  r.xi_e_zone = concentration_zone(r.xi_e.mean, r.xi_e.sd());
  const double two_beta = 2.0 * population.beta();
  r.xi_unsupported_zone = {two_beta * r.xi_e_zone.lo, two_beta * r.xi_e_zone.hi};
  r.xi_supported_zone = {1.0 - two_beta + two_beta * r.xi_e_zone.lo,
                         1.0 - two_beta + two_beta * r.xi_e_zone.hi};
  r.partition = zone_partition(population.beta(), population.n_e, r.approval.p);
  if (alpha) r.alpha_zone = classify_zone(*alpha, r.partition);
  r.egoists_insufficient_two_beta = egoists_insufficient_condition(population.n_e);

  if (mu == 0.0) {
    for (NeutralRegime regime : {NeutralRegime::Zone1, NeutralRegime::Zone2, NeutralRegime::Zone3,
                                 NeutralRegime::AlphaEqualsBeta, NeutralRegime::AlphaEqualsOneMinusBeta}) {
      for (GroupPrinciple p : {GroupPrinciple::A, GroupPrinciple::B}) {
        r.neutral.push_back(neutral_expected_increments(regime, p, population.n_e, population.n_g, sigma, steps));
      }
    }
  }
  if (principle == GroupPrinciple::B) {
    r.zone3_environment = zone3_env_predictions(mu, sigma, population.n_g, steps);
  }
  return r;
}

}  // namespace stratvote
