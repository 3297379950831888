#include <doctest.h>

#include <cmath>
#include <vector>

#include "stratvote/errors.hpp"
#include "stratvote/model.hpp"

using namespace stratvote;

namespace {

SocietyState society(int n_e, int n_g) { return SocietyState::uniform(PopulationProfile{n_e, n_g}, 10.0); }

Proposal proposal(std::vector<double> d) { return Proposal{std::move(d)}; }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("population profile") {
  const PopulationProfile p = PopulationProfile::from_counts(200, 100, 100);
  CHECK(p.beta() == doctest::Approx(0.25));
  CHECK(PopulationProfile::from_share(450, 0.92).n_e == 414);
  CHECK(PopulationProfile::from_share(200, 0.08).n_e == 16);
  CHECK_THROWS_AS(PopulationProfile::from_counts(10, 4, 5), ValidationError);
  try {
    PopulationProfile::from_counts(10, 4, 5);
  } catch (const ValidationError& e) {
    CHECK(e.field() == "n");
  }
  CHECK(PopulationProfile{}.beta() == 0.0);
}

TEST_CASE("egoist ballots, including abstention on a zero increment") {
  CHECK(egoist_ballot(0.3) == 1.0);
  CHECK(egoist_ballot(-0.3) == 0.0);
  CHECK(egoist_ballot(0.0) == 0.5);
  CHECK_THROWS_AS(egoist_ballot(std::nan("")), InvalidInput);
}

TEST_CASE("support fraction") {
  // 2 egoists of 4, 1 for and 1 against; group supports.
  CHECK(support_fraction(0.5, true, 0.25) == doctest::Approx(0.75));
  CHECK(support_fraction(0.5, false, 0.25) == doctest::Approx(0.25));
  CHECK(support_fraction(1.0, false, 0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(support_fraction(1.5, true, 0.25), InvalidInput);
}

TEST_CASE("threshold is strict") {
  CHECK_FALSE(decide(0.5, 0.5));
  CHECK(decide(0.5000001, 0.5));
  CHECK(decide(0.0, -0.0) == false);
}

TEST_CASE("principles A and B disagree when a few members gain a lot") {
  // Group of 3: one large gain, two small losses.
  const SocietyState s = society(0, 3);
  const Proposal p = proposal({9.0, -1.0, -1.0});
  CHECK_FALSE(group_stance(p, s, GroupPrinciple::A, 0.5, 0.0).supports);
  CHECK(group_stance(p, s, GroupPrinciple::B, 0.5, 0.0).supports);
  CHECK(group_stance(p, s, GroupPrinciple::A, 0.5, 0.0).xi_g == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("principle A needs a strict majority of gainers") {
  const SocietyState s = society(0, 4);
  CHECK_FALSE(group_stance(proposal({1, 1, -1, -1}), s, GroupPrinciple::A, 0.5, 0.0).supports);
  CHECK(group_stance(proposal({1, 1, 1, -1}), s, GroupPrinciple::A, 0.5, 0.0).supports);
  // A zero counts as half a gainer: 2.5 of 4 > 0.5.
  CHECK(group_stance(proposal({1, 1, 0, -1}), s, GroupPrinciple::A, 0.5, 0.0).supports);
}

TEST_CASE("principle B on an exactly zero total rejects") {
  const SocietyState s = society(0, 2);
  CHECK_FALSE(group_stance(proposal({1.0, -1.0}), s, GroupPrinciple::B, 0.5, 0.0).supports);
}

TEST_CASE("compensated sum resists cancellation") {
  const std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
}

TEST_CASE("internal threshold branches") {
  CHECK(internal_threshold(0.1, 0.25) == doctest::Approx(0.2));
  CHECK(internal_threshold(0.9, 0.25) == doctest::Approx(0.8));
  CHECK(internal_threshold(0.5, 0.25) == doctest::Approx(0.5));
  CHECK(internal_threshold(0.25, 0.25) == doctest::Approx(0.5));
  CHECK(internal_threshold(0.75, 0.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(internal_threshold(0.5, 0.0), InvalidInput);
  CHECK_THROWS_AS(internal_threshold(1.5, 0.25), InvalidInput);
}

TEST_CASE("principle A' with no active egoists falls back to a simple majority") {
  const SocietyState s = society(0, 4);
  CHECK(group_stance(proposal({1, 1, 1, -1}), s, GroupPrinciple::APrime, 0.1, 0.0).supports);
  CHECK_FALSE(group_stance(proposal({1, -1, -1, -1}), s, GroupPrinciple::APrime, 0.1, 0.0).supports);
}

TEST_CASE("vote over a mixed society") {
  // 2 egoists, 2 members. Egoists split, group total positive.
  const SocietyState s = society(2, 2);
  const VoteOutcome v = vote(proposal({1.0, -1.0, 3.0, -1.0}), s, GroupPrinciple::B, 0.5);
  CHECK(v.xi_e == doctest::Approx(0.5));
  CHECK(v.group_supports);
  CHECK(v.xi == doctest::Approx(0.75));
  CHECK(v.accepted);
  CHECK_FALSE(v.no_egoists);
  CHECK_FALSE(v.no_group);
}

TEST_CASE("ruined participants neither vote nor count towards beta") {
  SocietyState s = society(2, 2);
  s.roles[0] = Role::Ruined;
  const VoteOutcome v = vote(proposal({Proposal::kInactive, 1.0, -1.0, -1.0}), s, GroupPrinciple::B, 0.5);
  // One active egoist votes for; the group of two is against. xi = 1/3.
  CHECK(v.xi == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(v.accepted);
}

TEST_CASE("degenerate societies") {
  const VoteOutcome only_group = vote(proposal({1.0, 1.0}), society(0, 2), GroupPrinciple::B, 0.5);
  CHECK(only_group.no_egoists);
  CHECK(only_group.accepted);
  const VoteOutcome only_egoists = vote(proposal({1.0, -1.0}), society(2, 0), GroupPrinciple::B, 0.5);
  CHECK(only_egoists.no_group);
  CHECK_FALSE(only_egoists.accepted);
}

TEST_CASE("apply proposal") {
  SocietyState s = society(1, 2);
  s.roles[2] = Role::Ruined;
  const Proposal p = proposal({2.0, -3.0, Proposal::kInactive});
  const SocietyState accepted = apply_proposal(s, p, true);
  CHECK(accepted.capitals == std::vector<double>{12.0, 7.0, 10.0});
  CHECK(accepted.step_index == 1);
  const SocietyState rejected = apply_proposal(s, p, false);
  CHECK(rejected.capitals == s.capitals);
  CHECK(rejected.step_index == 1);
  CHECK_THROWS_AS(apply_proposal(s, proposal({1.0}), true), StructuralError);
}

TEST_CASE("principle names round-trip") {
  for (GroupPrinciple p : {GroupPrinciple::A, GroupPrinciple::B, GroupPrinciple::APrime}) {
    CHECK(parse_principle(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_principle("C"), InvalidInput);
}

}  // TEST_SUITE
