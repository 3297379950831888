#include "stratvote/environment.hpp"

#include <cmath>
#include <string>

#include "stratvote/errors.hpp"

namespace stratvote {

void EnvironmentParams::validate() const {
  if (!std::isfinite(mu)) throw ValidationError("mu", "must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma", "must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t alpha_index,
                          std::uint64_t replication) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (alpha_index * 0x9E3779B97F4A7C15ULL));
  return splitmix64(h ^ (replication * 0xC2B2AE3D27D4EB4FULL));
}

ProposalStream::ProposalStream(EnvironmentParams params, std::uint64_t seed)
    : params_(params), seed_(seed), engine_(seed) {
  params_.validate();
}

Proposal ProposalStream::next(const SocietyState& state) {
  Proposal proposal;
  proposal.increments.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.is_active(i)) {
      proposal.increments[i] = Proposal::kInactive;
      continue;
    }
    proposal.increments[i] = params_.mu + params_.sigma * standard_(engine_);
  }
  ++counter_;
  return proposal;
}

std::vector<Proposal> dispossession_sequence(const SocietyState& state,
                                             std::span<const std::size_t> victim_order,
                                             double organizer_cut) {
  const std::size_t n = state.size();
  if (n < 3) throw InvalidInput("dispossession_sequence: need at least 3 participants");
  if (!(organizer_cut >= 0.0 && organizer_cut < 1.0)) {
    throw InvalidInput("dispossession_sequence: organizer_cut must lie in [0, 1)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!state.is_active(i)) throw InvalidInput("dispossession_sequence: ruined participant");
    if (!(state.capitals[i] > 0.0)) {
      throw InvalidInput("dispossession_sequence: capital of participant " + std::to_string(i) +
                         " is not positive");
    }
  }
  if (victim_order.size() != n) {
    throw InvalidInput("dispossession_sequence: victim order must list every participant");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t v : victim_order) {
    if (v >= n || seen[v]) throw InvalidInput("dispossession_sequence: victim order is not a permutation");
    seen[v] = true;
  }

  std::vector<double> capitals = state.capitals;
  std::vector<Proposal> chain;
  chain.reserve(n);
  const double others = static_cast<double>(n - 1);
  for (std::size_t victim : victim_order) {
    const double holding = capitals[victim];
    const double share = (1.0 - organizer_cut) * holding / others;
    Proposal p;
    p.increments.assign(n, share);
    p.increments[victim] = -holding;
    for (std::size_t i = 0; i < n; ++i) capitals[i] += p.increments[i];
    chain.push_back(std::move(p));
  }
  return chain;
}

}  // namespace stratvote
