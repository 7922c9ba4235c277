#pragma once

#include <memory>
#include <string>

#include "hybridsim/model.hpp"
#include "hybridsim/protocol.hpp"
#include "hybridsim/rng.hpp"

namespace hybridsim {

// Everything a strategy may look at before acting: the adversary is
// omniscient and adaptive, so it sees all about-to-be-sent payloads and all
// internal states each round.
struct RoundSnapshot {
  int round;
  RoundRole role;
  int phase;
  const std::vector<Payload>& outgoing;  // by sender, id - 1
  const std::vector<ProcState>& states;
  const Config& cfg;
};

// Returns the violated clause, or nullopt when the action is legal under cfg.
inline std::optional<std::string> legality_violation(const AdversaryAction& a,
                                                     const Config& cfg) {
  if (static_cast<int>(a.mobile_set.size()) > cfg.m)
    return "mobile-set-size: |mobile| exceeds m";
  for (ProcessorId p : a.mobile_set)
    if (p < 1 || p > cfg.n) return "mobile-set-range: id outside [1..n]";

  auto corruptible = [&](ProcessorId s) {
    return cfg.is_fixed(s) || a.mobile_set.count(s) > 0;
  };
  for (const Edge& e : a.drops) {
    if (e.sender == e.receiver) return "drop-self-edge: sender equals receiver";
    if (e.sender < 1 || e.sender > cfg.n || e.receiver < 1 || e.receiver > cfg.n)
      return "drop-range: id outside [1..n]";
    if (!corruptible(e.sender))
      return "drop-sender-not-corruptible: sender outside fixed+mobile";
  }

  if (!a.tampers.empty() && cfg.kind != ModelKind::ByzantineHybrid)
    return "tamper-in-omission-model: tampers require the Byzantine model";
  for (const auto& [e, payload] : a.tampers) {
    if (e.sender == e.receiver) return "tamper-self-edge: sender equals receiver";
    if (e.sender < 1 || e.sender > cfg.n || e.receiver < 1 || e.receiver > cfg.n)
      return "tamper-range: id outside [1..n]";
    if (!cfg.is_fixed(e.sender))
      return "tamper-sender-not-fixed: only fixed-set senders may be tampered";
    if (static_cast<int>(payload.slots.size()) != cfg.k)
      return "tamper-payload-shape: slot count differs from k";
    for (Slot s : payload.slots)
      if (s != kAbsent && s != 0 && s != 1)
        return "tamper-payload-shape: slot value outside {absent,0,1}";
    if (a.drops.count(e) > 0)
      return "drop-and-tamper-overlap: edge appears in both";
  }

  if (cfg.kind == ModelKind::ConstrainedMobile) {
    for (const Edge& e : a.drops) {
      if (a.mobile_set.count(e.sender) && a.mobile_set.count(e.receiver) &&
          a.drops.count(Edge{e.receiver, e.sender}))
        return "pair-rule: both directions dropped between two mobile members";
    }
  }
  return std::nullopt;
}

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual AdversaryAction next_action(const RoundSnapshot& snap) = 0;
};

namespace detail {

inline void drop_all_outgoing(AdversaryAction& a, ProcessorId sender, int n) {
  for (ProcessorId r = 1; r <= n; ++r)
    if (r != sender) a.drops.insert(Edge{sender, r});
}

// In the constrained model at most one direction may be dropped between two
// mobile members; keep the edge from the lower-indexed sender.
inline void enforce_pair_rule(AdversaryAction& a, const Config& cfg) {
  if (cfg.kind != ModelKind::ConstrainedMobile) return;
  for (auto it = a.drops.begin(); it != a.drops.end();) {
    const Edge& e = *it;
    if (e.sender > e.receiver && a.mobile_set.count(e.sender) &&
        a.mobile_set.count(e.receiver) &&
        a.drops.count(Edge{e.receiver, e.sender}))
      it = a.drops.erase(it);
    else
      ++it;
  }
}

// The m lowest-indexed processors outside the fixed set (fewer if n - f < m).
inline std::vector<ProcessorId> lowest_non_fixed(const Config& cfg, int count) {
  std::vector<ProcessorId> out;
  for (ProcessorId p = 1; p <= cfg.n && static_cast<int>(out.size()) < count; ++p)
    if (!cfg.is_fixed(p)) out.push_back(p);
  return out;
}

inline std::vector<ProcessorId> phase_coordinators(const Config& cfg, int phase) {
  std::vector<ProcessorId> out;
  for (int j = 1; j <= cfg.k; ++j) out.push_back(coordinator(phase, j, cfg.n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

class NullStrategy final : public Strategy {
 public:
  std::string name() const override { return "null"; }
  AdversaryAction next_action(const RoundSnapshot& snap) override {
    AdversaryAction a;
    a.round = snap.round;
    return a;
  }
};

class RandomStrategy final : public Strategy {
 public:
  RandomStrategy(std::uint64_t seed, double drop_prob, std::string label)
      : rng_(seed), drop_prob_(drop_prob), label_(std::move(label)) {}

  std::string name() const override { return label_; }

  AdversaryAction next_action(const RoundSnapshot& snap) override {
    const Config& cfg = snap.cfg;
    AdversaryAction a;
    a.round = snap.round;

    // Uniform size-m subset via partial Fisher-Yates.
    std::vector<ProcessorId> ids(static_cast<std::size_t>(cfg.n));
    std::iota(ids.begin(), ids.end(), 1);
    for (int i = 0; i < cfg.m && i < cfg.n; ++i) {
      std::size_t j = static_cast<std::size_t>(i) +
                      rng_.below(static_cast<std::uint64_t>(cfg.n - i));
      std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
      a.mobile_set.insert(ids[static_cast<std::size_t>(i)]);
    }

    std::vector<ProcessorId> senders(cfg.fixed_set);
    for (ProcessorId p : a.mobile_set) senders.push_back(p);
    std::sort(senders.begin(), senders.end());
    senders.erase(std::unique(senders.begin(), senders.end()), senders.end());

    for (ProcessorId s : senders) {
      for (ProcessorId r = 1; r <= cfg.n; ++r) {
        if (r == s) continue;
        if (rng_.chance(drop_prob_)) a.drops.insert(Edge{s, r});
      }
    }

    if (cfg.kind == ModelKind::ByzantineHybrid) {
      for (ProcessorId s : cfg.fixed_set) {
        for (ProcessorId r = 1; r <= cfg.n; ++r) {
          if (r == s || a.drops.count(Edge{s, r})) continue;
          if (!rng_.chance(drop_prob_)) continue;
          Payload forged;
          forged.role = snap.role;
          forged.slots.reserve(static_cast<std::size_t>(cfg.k));
          for (int j = 0; j < cfg.k; ++j) {
            switch (rng_.below(3)) {
              case 0: forged.slots.push_back(kAbsent); break;
              case 1: forged.slots.push_back(0); break;
              default: forged.slots.push_back(1); break;
            }
          }
          a.tampers.emplace(Edge{s, r}, std::move(forged));
        }
      }
    }

    enforce_pair_rule(a, cfg);
    return a;
  }

 private:
  Rng rng_;
  double drop_prob_;
  std::string label_;
};

// Silences a cyclic window of `width` processors, sliding one position per
// round; the schedule repeats every n rounds. Legality of the emitted
// actions presumes a mobile budget of at least `width` (run under a
// calibration config (n, 0, width) when width exceeds the model's m).
class RotatingStrategy final : public Strategy {
 public:
  explicit RotatingStrategy(int width, std::string label)
      : width_(width), label_(std::move(label)) {}

  std::string name() const override { return label_; }

  AdversaryAction next_action(const RoundSnapshot& snap) override {
    const int n = snap.cfg.n;
    AdversaryAction a;
    a.round = snap.round;
    for (int off = 0; off < width_; ++off)
      a.mobile_set.insert(wrap_id(snap.round + off, n));
    for (ProcessorId p : a.mobile_set) drop_all_outgoing(a, p, n);
    return a;
  }

 private:
  int width_;
  std::string label_;
};

// The strongest structured attack on the rotating-coordinator protocol:
// silence every fixed-set coordinator plus up to m others in coordinator
// rounds, and the fixed set plus the m lowest non-fixed processors in
// commit-adopt rounds.
class CoordinatorKillerStrategy final : public Strategy {
 public:
  std::string name() const override { return "coordinator_killer"; }

  AdversaryAction next_action(const RoundSnapshot& snap) override {
    const Config& cfg = snap.cfg;
    AdversaryAction a;
    a.round = snap.round;
    if (snap.role == RoundRole::Coord) {
      int picked = 0;
      for (ProcessorId c : phase_coordinators(cfg, snap.phase)) {
        if (cfg.is_fixed(c)) {
          drop_all_outgoing(a, c, cfg.n);
        } else if (picked < cfg.m) {
          a.mobile_set.insert(c);
          drop_all_outgoing(a, c, cfg.n);
          ++picked;
        }
      }
    } else {
      for (ProcessorId s : cfg.fixed_set) drop_all_outgoing(a, s, cfg.n);
      for (ProcessorId p : lowest_non_fixed(cfg, cfg.m)) {
        a.mobile_set.insert(p);
        drop_all_outgoing(a, p, cfg.n);
      }
    }
    enforce_pair_rule(a, cfg);
    return a;
  }
};

// Byzantine-model attack: every fixed-set sender equivocates, pushing bit 0
// at even-indexed receivers and bit 1 at odd ones for every index, round-2
// proposals and coordinator values included. The mobile budget is spent the
// same way coordinator_killer spends it.
class EquivocatorStrategy final : public Strategy {
 public:
  explicit EquivocatorStrategy(std::uint64_t) {}

  std::string name() const override { return "equivocator"; }

  AdversaryAction next_action(const RoundSnapshot& snap) override {
    const Config& cfg = snap.cfg;
    AdversaryAction a = killer_.next_action(snap);
    // Fixed senders are tampered, not dropped; keep only mobile drops.
    for (auto it = a.drops.begin(); it != a.drops.end();)
      it = cfg.is_fixed(it->sender) ? a.drops.erase(it) : std::next(it);
    for (ProcessorId s : cfg.fixed_set) {
      for (ProcessorId r = 1; r <= cfg.n; ++r) {
        if (r == s || a.drops.count(Edge{s, r})) continue;
        Payload forged;
        forged.role = snap.role;
        forged.slots.assign(static_cast<std::size_t>(cfg.k),
                            r % 2 == 0 ? Slot{0} : Slot{1});
        a.tampers.emplace(Edge{s, r}, std::move(forged));
      }
    }
    return a;
  }

 private:
  CoordinatorKillerStrategy killer_;
};

}  // namespace detail

inline std::unique_ptr<Strategy> null_strategy() {
  return std::make_unique<detail::NullStrategy>();
}

inline std::unique_ptr<Strategy> random_strategy(std::uint64_t seed,
                                                 double drop_prob) {
  std::string label = "random:" + std::to_string(drop_prob);
  return std::make_unique<detail::RandomStrategy>(seed, drop_prob, std::move(label));
}

inline std::unique_ptr<Strategy> rotating_strategy(int width) {
  if (width < 1) throw std::invalid_argument("rotating_strategy: width must be >= 1");
  return std::make_unique<detail::RotatingStrategy>(
      width, "rotating:" + std::to_string(width));
}

inline std::unique_ptr<Strategy> coordinator_killer_strategy() {
  return std::make_unique<detail::CoordinatorKillerStrategy>();
}

inline std::unique_ptr<Strategy> equivocator_strategy(std::uint64_t seed) {
  return std::make_unique<detail::EquivocatorStrategy>(seed);
}

// Parses a strategy spec: null | random:<p> | rotating:<width> |
// coordinator_killer | equivocator. The spec string becomes the strategy's
// name verbatim, so traces stay stable however the parameter was written.
inline std::unique_ptr<Strategy> make_strategy(const std::string& spec,
                                               std::uint64_t seed) {
  const std::size_t colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "null") return null_strategy();
  if (head == "coordinator_killer") return coordinator_killer_strategy();
  if (head == "equivocator") return equivocator_strategy(seed);
  if (head == "random") {
    const double p = arg.empty() ? 0.5 : std::stod(arg);
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("random strategy: drop probability outside [0,1]");
    return std::make_unique<detail::RandomStrategy>(seed, p,
                                                    arg.empty() ? "random" : spec);
  }
  if (head == "rotating") {
    if (arg.empty())
      throw std::invalid_argument("rotating strategy: missing width");
    const int width = std::stoi(arg);
    if (width < 1)
      throw std::invalid_argument("rotating strategy: width must be >= 1");
    return std::make_unique<detail::RotatingStrategy>(width, spec);
  }
  throw std::invalid_argument("unknown strategy: " + spec);
}

}  // namespace hybridsim
