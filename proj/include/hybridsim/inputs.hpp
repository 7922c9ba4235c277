#pragma once

#include "hybridsim/model.hpp"
#include "hybridsim/rng.hpp"

namespace hybridsim {

// Input bits are derived from the run seed on a stream separate from the
// strategy's, so any run is reproducible from (config, strategy, seed) alone.
inline constexpr std::uint64_t kInputStream = 0x5eed1b175a17ULL;

inline std::vector<std::vector<Slot>> seeded_inputs(const Config& cfg,
                                                    std::uint64_t seed,
                                                    bool unanimous) {
  Rng rng(seed ^ kInputStream);
  if (unanimous) {
    std::vector<Slot> bits(static_cast<std::size_t>(cfg.k));
    for (Slot& b : bits) b = static_cast<Slot>(rng.bit());
    return std::vector<std::vector<Slot>>(static_cast<std::size_t>(cfg.n), bits);
  }
  std::vector<std::vector<Slot>> inputs(static_cast<std::size_t>(cfg.n));
  for (auto& v : inputs) {
    v.resize(static_cast<std::size_t>(cfg.k));
    for (Slot& b : v) b = static_cast<Slot>(rng.bit());
  }
  return inputs;
}

}  // namespace hybridsim
