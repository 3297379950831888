#pragma once

// Proposal generation: i.i.d. normal increments and the adversarial
// dispossession chain.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "stratvote/model.hpp"

namespace stratvote {

struct EnvironmentParams {
  double mu = 0.0;
  double sigma = 1.0;

  void validate() const;
};

/// Seed derivation used for every trajectory:
///   h0 = splitmix64(master)
///   h1 = splitmix64(h0 ^ (alpha_index * 0x9E3779B97F4A7C15))
///   seed = splitmix64(h1 ^ (replication * 0xC2B2AE3D27D4EB4F))
/// A trajectory seed feeds std::mt19937_64 directly.
inline constexpr std::string_view kSeedRule =
    "splitmix64-chain-v1: seed = sm(sm(sm(master) ^ alpha_index*0x9E3779B97F4A7C15) ^ "
    "replication*0xC2B2AE3D27D4EB4F); engine = mt19937_64(seed)";

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t alpha_index,
                          std::uint64_t replication) noexcept;

/// Single-owner generator of proposals. Each active participant receives
/// mu + sigma * z with z a fresh standard normal draw; ruined slots get
/// Proposal::kInactive and consume no draws.
class ProposalStream {
 public:
  ProposalStream(EnvironmentParams params, std::uint64_t seed);

  Proposal next(const SocietyState& state);

  const EnvironmentParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  EnvironmentParams params_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> standard_{0.0, 1.0};
};

inline Proposal sample_proposal(ProposalStream& stream, const SocietyState& state) {
  return stream.next(state);
}

/// Chain of n proposals that strips each victim in turn of its whole current
/// capital, gives (1 - organizer_cut) of it in equal shares to the other n-1
/// participants and removes the rest. Capitals are tracked as if every
/// earlier proposal had been accepted.
std::vector<Proposal> dispossession_sequence(const SocietyState& state,
                                             std::span<const std::size_t> victim_order,
                                             double organizer_cut);

}  // namespace stratvote
