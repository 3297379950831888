#include <doctest.h>

#include "support/properties.hpp"

namespace {

constexpr std::size_t kCases = 20000;

void require_clean(const props::Result& r) {
  INFO(r.name << ": " << r.failures << " of " << r.cases << " failed; first: " << r.first_failure);
  CHECK(r.cases >= kCases);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("support fraction matches a direct ballot count") {
  require_clean(props::support_fraction_consistency(kCases, 101));
}

TEST_CASE("internal threshold branches agree") { require_clean(props::internal_threshold_branches(kCases, 102)); }

TEST_CASE("decide is monotone and strict") { require_clean(props::decide_monotonicity(kCases, 103)); }

TEST_CASE("decisions are invariant under positive rescaling") {
  require_clean(props::rescaling_invariance(kCases, 104));
}

TEST_CASE("principle B is monotone in the group total when beta = 0") {
  require_clean(props::group_total_monotonicity(kCases, 105));
}

}  // TEST_SUITE
