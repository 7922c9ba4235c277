#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridsim {

// Processors are p_1..p_n; ids are 1-based and dense for the lifetime of a
// run. All "mod n" arithmetic maps residue 0 back to index n.
using ProcessorId = int;

// A slot is one consensus index's worth of a message: a bit, or nothing.
// kAbsent doubles as "do not send" inside a bundled payload and as the
// undecided output value in an OutputVector.
using Slot = std::int8_t;
inline constexpr Slot kAbsent = -1;
inline constexpr Slot kBot = -1;

enum class ModelKind {
  OmissionHybrid,    // f fixed omission + m mobile omission senders
  ByzantineHybrid,   // f fixed tampering + m mobile omission senders
  ConstrainedMobile, // m mobile only, pair-constrained drops (f = 0)
};

enum class RoundRole { CaRound1, CaRound2, Coord };

inline ProcessorId wrap_id(int x, int n) {
  int r = (x - 1) % n;
  if (r < 0) r += n;
  return r + 1;
}

inline RoundRole role_for_round(int round) {
  switch ((round - 1) % 3) {
    case 0: return RoundRole::CaRound1;
    case 1: return RoundRole::CaRound2;
    default: return RoundRole::Coord;
  }
}

inline int phase_for_round(int round) { return (round - 1) / 3 + 1; }

// Phases needed for vector length k under f fixed and m mobile faults:
// floor(f*k / (k-m)) + 2. For k = m+1 this is f*(m+1) + 2.
inline int phase_count(int f, int m, int k) {
  if (f < 0 || m < 0 || k <= m)
    throw std::invalid_argument("phase_count: requires k > m >= 0 and f >= 0");
  return (f * k) / (k - m) + 2;
}

struct Config {
  ModelKind kind = ModelKind::OmissionHybrid;
  int n = 0;  // processor count
  int f = 0;  // fixed-fault budget
  int m = 0;  // mobile-fault budget per round
  int k = 1;  // vector length (number of consensus indices)
  std::vector<ProcessorId> fixed_set;  // sorted, |fixed_set| = f
  int phases = 0;

  // When true, the Byzantine finalize step updates the value on any nonzero
  // majority instead of requiring a quarter of n. Off by default; exists as
  // an experiment knob for the binary-value variant.
  bool byz_adopt_any = false;

  bool is_fixed(ProcessorId p) const {
    return std::binary_search(fixed_set.begin(), fixed_set.end(), p);
  }

  int rounds() const { return phases * 3; }

  friend bool operator==(const Config&, const Config&) = default;
};

// Standard config: fixed set defaults to {1..f}, phases to the formula.
inline Config make_config(ModelKind kind, int n, int f, int m, int k,
                          int phases = 0,
                          std::vector<ProcessorId> fixed = {}) {
  Config cfg;
  cfg.kind = kind;
  cfg.n = n;
  cfg.f = f;
  cfg.m = m;
  cfg.k = k;
  if (fixed.empty() && f > 0) {
    fixed.resize(static_cast<std::size_t>(f));
    std::iota(fixed.begin(), fixed.end(), 1);
  }
  std::sort(fixed.begin(), fixed.end());
  cfg.fixed_set = std::move(fixed);
  cfg.phases = phases > 0 ? phases : (k > m ? phase_count(f, m, k) : 0);
  return cfg;
}

struct Violation {
  std::string field;
  std::string reason;
};

struct ConfigCheck {
  bool ok = true;
  std::vector<Violation> violations;
  // Above the solvability bound: n > floor(f*k/(k-m)), majority headroom
  // m+f < n/2, and for the Byzantine model f < n/4. Informational only;
  // insufficient configs still run (boundary experiments need them).
  bool sufficient = false;

  void fail(std::string field, std::string reason) {
    ok = false;
    violations.push_back({std::move(field), std::move(reason)});
  }
};

inline ConfigCheck validate_config(const Config& cfg) {
  ConfigCheck out;
  if (cfg.n < 1) out.fail("n", "must be >= 1");
  if (cfg.f < 0) out.fail("f", "must be >= 0");
  if (cfg.m < 0) out.fail("m", "must be >= 0");
  if (cfg.k < 1) out.fail("k", "must be >= 1");
  if (cfg.k <= cfg.m) out.fail("k", "must exceed m (phase formula undefined)");
  if (cfg.k > cfg.n) out.fail("k", "must not exceed n (coordinator assignment)");
  if (cfg.phases < 1) out.fail("phases", "must be >= 1");
  if (static_cast<int>(cfg.fixed_set.size()) != cfg.f)
    out.fail("fixed_set", "size must equal f");
  if (!std::is_sorted(cfg.fixed_set.begin(), cfg.fixed_set.end()))
    out.fail("fixed_set", "must be sorted");
  if (std::adjacent_find(cfg.fixed_set.begin(), cfg.fixed_set.end()) !=
      cfg.fixed_set.end())
    out.fail("fixed_set", "must not contain duplicates");
  for (ProcessorId p : cfg.fixed_set) {
    if (p < 1 || p > cfg.n) {
      out.fail("fixed_set", "ids must lie in [1..n]");
      break;
    }
  }
  if (cfg.kind == ModelKind::ConstrainedMobile && cfg.f != 0)
    out.fail("f", "constrained-mobile model has no fixed set");

  if (out.ok) {
    bool s = cfg.n > (cfg.f * cfg.k) / (cfg.k - cfg.m);
    s = s && 2 * (cfg.m + cfg.f) < cfg.n;
    if (cfg.kind == ModelKind::ByzantineHybrid) s = s && 4 * cfg.f < cfg.n;
    out.sufficient = s;
  }
  return out;
}

// One round's worth of message content from a single sender, bundled across
// all k indices. kAbsent in a slot means nothing was sent for that index.
struct Payload {
  RoundRole role = RoundRole::CaRound1;
  std::vector<Slot> slots;

  bool all_absent() const {
    return std::all_of(slots.begin(), slots.end(),
                       [](Slot s) { return s == kAbsent; });
  }

  friend bool operator==(const Payload&, const Payload&) = default;
};

inline Payload absent_payload(RoundRole role, int k) {
  Payload p;
  p.role = role;
  p.slots.assign(static_cast<std::size_t>(k), kAbsent);
  return p;
}

struct Edge {
  ProcessorId sender = 0;
  ProcessorId receiver = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// One round's legal corruption. Drops kill whole payloads per directed edge;
// tampers (Byzantine model only, fixed senders only) replace them and may
// differ per receiver.
struct AdversaryAction {
  int round = 0;
  std::set<ProcessorId> mobile_set;
  std::set<Edge> drops;
  std::map<Edge, Payload> tampers;

  bool empty() const {
    return mobile_set.empty() && drops.empty() && tampers.empty();
  }

  friend bool operator==(const AdversaryAction&, const AdversaryAction&) = default;
};

// What each receiver saw: delivered[receiver-1][sender-1], nullopt = nothing
// arrived (dropped, or the sender sent nothing -- indistinguishable).
struct RoundDelivery {
  std::vector<std::vector<std::optional<Payload>>> delivered;

  const std::optional<Payload>& at(ProcessorId receiver, ProcessorId sender) const {
    return delivered[static_cast<std::size_t>(receiver - 1)]
                    [static_cast<std::size_t>(sender - 1)];
  }

  friend bool operator==(const RoundDelivery&, const RoundDelivery&) = default;
};

enum class Grade : std::uint8_t { Commit, Adopt };

struct CAState {
  Slot v = 0;
  Grade e = Grade::Adopt;
  friend bool operator==(const CAState&, const CAState&) = default;
};

// Full per-processor protocol state. round2_proposal is the scratch carried
// between the two commit-adopt rounds of the current phase.
struct ProcState {
  ProcessorId id = 0;
  int phase = 1;
  RoundRole role = RoundRole::CaRound1;
  std::vector<Slot> value;             // v(j), current value per index
  std::vector<CAState> ca;             // latest completed <v_hat(j), e_hat(j)>
  std::vector<Slot> round2_proposal;   // kAbsent = do not send for that index

  friend bool operator==(const ProcState&, const ProcState&) = default;
};

struct OutputVector {
  std::vector<Slot> o;  // 0, 1, or kBot per index
  friend bool operator==(const OutputVector&, const OutputVector&) = default;
};

struct RoundRecord {
  int round = 0;
  int phase = 0;
  RoundRole role = RoundRole::CaRound1;
  std::vector<Payload> sends;  // by sender, before the adversary acts
  AdversaryAction action;
  RoundDelivery delivery;
  std::vector<ProcState> states;  // post-round
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

// Complete deterministic record of a run. Fully determined by
// (config, strategy name, seed, inputs); replayable bit-exactly.
struct RunTrace {
  Config config;
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<std::vector<Slot>> inputs;  // per processor, length k
  std::vector<RoundRecord> rounds;
  std::vector<OutputVector> outputs;
  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

}  // namespace hybridsim
