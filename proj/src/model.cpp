#include "stratvote/model.hpp"

#include <cmath>
#include <string>

#include "stratvote/errors.hpp"

namespace stratvote {

PopulationProfile PopulationProfile::from_counts(int n, int n_e, int n_g) {
  if (n_e < 0) throw ValidationError("n_e", "must be non-negative");
  if (n_g < 0) throw ValidationError("n_g", "must be non-negative");
  if (n <= 0) throw ValidationError("n", "must be positive");
  if (n_e + n_g != n) {
    throw ValidationError("n", "n_e + n_g = " + std::to_string(n_e + n_g) +
                                   " does not equal n = " + std::to_string(n));
  }
  return PopulationProfile{n_e, n_g};
}

PopulationProfile PopulationProfile::from_share(int n, double two_beta) {
  if (n <= 0) throw ValidationError("n", "must be positive");
  if (!(two_beta >= 0.0 && two_beta <= 1.0)) {
    throw ValidationError("two_beta", "must lie in [0, 1]");
  }
  const int n_e = static_cast<int>(std::lround(two_beta * n));
  return PopulationProfile{n_e, n - n_e};
}

SocietyState SocietyState::uniform(const PopulationProfile& population, double initial_capital) {
  if (!std::isfinite(initial_capital)) {
    throw ValidationError("initial_capital", "must be finite");
  }
  SocietyState state;
  const auto n = static_cast<std::size_t>(population.n());
  state.capitals.assign(n, initial_capital);
  state.roles.assign(n, Role::GroupMember);
  for (int i = 0; i < population.n_e; ++i) state.roles[static_cast<std::size_t>(i)] = Role::Egoist;
  return state;
}

PopulationProfile SocietyState::active_profile() const noexcept {
  PopulationProfile p;
  for (Role r : roles) {
    if (r == Role::Egoist) ++p.n_e;
    else if (r == Role::GroupMember) ++p.n_g;
  }
  return p;
}

std::string_view to_string(GroupPrinciple principle) {
  switch (principle) {
    case GroupPrinciple::A: return "A";
    case GroupPrinciple::B: return "B";
    case GroupPrinciple::APrime: return "A'";
  }
  return "?";
}

GroupPrinciple parse_principle(std::string_view text) {
  if (text == "A" || text == "a") return GroupPrinciple::A;
  if (text == "B" || text == "b") return GroupPrinciple::B;
  if (text == "A'" || text == "a'" || text == "APrime" || text == "aprime" || text == "A_prime") {
    return GroupPrinciple::APrime;
  }
  throw ValidationError("principle", "expected A, B or A', got '" + std::string(text) + "'");
}

double egoist_ballot(double increment) {
  if (!std::isfinite(increment)) throw InvalidInput("egoist_ballot: non-finite increment");
  if (increment > 0.0) return 1.0;
  if (increment < 0.0) return 0.0;
  return 0.5;
}

namespace {

void check_lengths(const Proposal& proposal, const SocietyState& state) {
  if (proposal.size() != state.size() || state.roles.size() != state.capitals.size()) {
    throw StructuralError("proposal length " + std::to_string(proposal.size()) +
                          " does not match society size " + std::to_string(state.size()));
  }
}

}  // namespace

EgoistSupport egoist_support_fraction(const Proposal& proposal, const SocietyState& state) {
  check_lengths(proposal, state);
  double votes = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.roles[i] != Role::Egoist) continue;
    votes += egoist_ballot(proposal.increments[i]);
    ++count;
  }
  if (count == 0) return {0.0, true};
  return {votes / static_cast<double>(count), false};
}

GroupStance group_stance(const Proposal& proposal, const SocietyState& state,
                         GroupPrinciple principle, double alpha, double beta) {
  check_lengths(proposal, state);
  std::vector<double> member_increments;
  double gains = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.roles[i] != Role::GroupMember) continue;
    const double d = proposal.increments[i];
    gains += egoist_ballot(d);  // same half-weight rule as for egoists
    member_increments.push_back(d);
  }
  if (member_increments.empty()) return {false, 0.0, true};

  GroupStance stance;
  stance.xi_g = gains / static_cast<double>(member_increments.size());
  switch (principle) {
    case GroupPrinciple::A:
      stance.supports = stance.xi_g > 0.5;
      break;
    case GroupPrinciple::B:
      stance.supports = compensated_sum(member_increments) > 0.0;
      break;
    case GroupPrinciple::APrime: {
      // With no egoists left the threshold is the beta -> 0 limit, 1/2.
      const double threshold = beta > 0.0 ? internal_threshold(alpha, beta) : 0.5;
      stance.supports = stance.xi_g > threshold;
      break;
    }
  }
  return stance;
}

double internal_threshold(double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidInput("internal_threshold: alpha outside [0, 1]");
  if (!(beta > 0.0 && beta <= 0.5)) {
    throw InvalidInput("internal_threshold: beta must lie in (0, 0.5]");
  }
  if (alpha < beta) return alpha / (2.0 * beta);
  if (alpha > 1.0 - beta) return 1.0 - (1.0 - alpha) / (2.0 * beta);
  return 0.5;
}

double support_fraction(double xi_e, bool group_supports, double beta) {
  if (!(xi_e >= 0.0 && xi_e <= 1.0)) throw InvalidInput("support_fraction: xi_e outside [0, 1]");
  if (!(beta >= 0.0 && beta <= 0.5)) throw InvalidInput("support_fraction: beta outside [0, 0.5]");
  const double egoist_part = 2.0 * beta * xi_e;
  return group_supports ? egoist_part + (1.0 - 2.0 * beta) : egoist_part;
}

bool decide(double xi, double alpha) noexcept { return xi > alpha; }

VoteOutcome vote(const Proposal& proposal, const SocietyState& state, GroupPrinciple principle,
                 double alpha) {
  const PopulationProfile active = state.active_profile();
  const double beta = active.beta();
  const EgoistSupport egoists = egoist_support_fraction(proposal, state);
  const GroupStance group = group_stance(proposal, state, principle, alpha, beta);

  VoteOutcome out;
  out.xi_e = egoists.xi_e;
  out.no_egoists = egoists.no_egoists;
  out.xi_g = group.xi_g;
  out.no_group = group.no_group;
  out.group_supports = group.supports;
  out.xi = active.n() == 0 ? 0.0 : support_fraction(out.xi_e, out.group_supports, beta);
  out.accepted = decide(out.xi, alpha);
  return out;
}

SocietyState apply_proposal(const SocietyState& state, const Proposal& proposal, bool accepted) {
  check_lengths(proposal, state);
  SocietyState next = state;
  if (accepted) {
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next.is_active(i)) next.capitals[i] += proposal.increments[i];
    }
  }
  ++next.step_index;
  return next;
}

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double correction = 0.0;
  for (double x : values) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) correction += (sum - t) + x;
    else correction += (x - t) + sum;
    sum = t;
  }
  return sum + correction;
}

}  // namespace stratvote
