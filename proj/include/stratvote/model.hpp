#pragma once

// Society state and the voting mechanics: individual ballots, the group's
// decision rule, the overall support fraction and threshold acceptance.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace stratvote {

/// Composition of the society. Egoists occupy participant indices
/// [0, n_e), group members [n_e, n).
struct PopulationProfile {
  int n_e = 0;
  int n_g = 0;

  int n() const noexcept { return n_e + n_g; }
  /// Half the egoist share, n_e / 2n. Zero for an empty society.
  double beta() const noexcept {
    return n() == 0 ? 0.0 : static_cast<double>(n_e) / (2.0 * n());
  }

  /// Checks n = n_e + n_g and non-negative counts.
  static PopulationProfile from_counts(int n, int n_e, int n_g);
  /// n_e = round(two_beta * n), n_g = n - n_e.
  static PopulationProfile from_share(int n, double two_beta);

  friend bool operator==(const PopulationProfile&, const PopulationProfile&) = default;
};

enum class Role : std::uint8_t { Egoist, GroupMember, Ruined };

struct SocietyState {
  std::vector<double> capitals;
  std::vector<Role> roles;
  std::size_t step_index = 0;

  static SocietyState uniform(const PopulationProfile& population, double initial_capital);

  std::size_t size() const noexcept { return capitals.size(); }
  bool is_active(std::size_t i) const noexcept { return roles[i] != Role::Ruined; }
  /// Counts of currently active egoists and group members.
  PopulationProfile active_profile() const noexcept;
};

/// Per-participant capital increments offered by the environment.
struct Proposal {
  /// Marker stored in the slots of ruined participants. Never read as a value.
  static constexpr double kInactive = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> increments;

  std::size_t size() const noexcept { return increments.size(); }
};

enum class GroupPrinciple : std::uint8_t {
  A,       // majority of members gain
  B,       // members' total increment is positive
  APrime,  // share of gaining members exceeds the internal threshold
};

std::string_view to_string(GroupPrinciple principle);
GroupPrinciple parse_principle(std::string_view text);

struct VoteOutcome {
  double xi_e = 0.0;
  double xi_g = 0.0;
  bool group_supports = false;
  double xi = 0.0;
  bool accepted = false;
  bool no_egoists = false;
  bool no_group = false;
};

/// 1 for a gain, 0 for a loss, 0.5 (abstention) for an exact zero.
double egoist_ballot(double increment);

struct EgoistSupport {
  double xi_e = 0.0;
  bool no_egoists = false;
};

EgoistSupport egoist_support_fraction(const Proposal& proposal, const SocietyState& state);

struct GroupStance {
  bool supports = false;
  double xi_g = 0.0;
  bool no_group = false;
};

/// `beta` is the active-population beta; it only matters for APrime.
GroupStance group_stance(const Proposal& proposal, const SocietyState& state,
                         GroupPrinciple principle, double alpha, double beta);

/// Group-internal threshold for principle A' that reproduces the share of
/// egoist votes needed to carry a proposal. Requires beta in (0, 0.5].
double internal_threshold(double alpha, double beta);

/// Overall share of "for" votes given the egoists' share and the group's stance.
double support_fraction(double xi_e, bool group_supports, double beta);

/// Strict threshold: a tie xi == alpha is a rejection.
bool decide(double xi, double alpha) noexcept;

/// Full ballot for one proposal over the active participants of `state`.
VoteOutcome vote(const Proposal& proposal, const SocietyState& state,
                 GroupPrinciple principle, double alpha);

/// Returns the successor state; step_index always advances.
SocietyState apply_proposal(const SocietyState& state, const Proposal& proposal, bool accepted);

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values) noexcept;

}  // namespace stratvote
