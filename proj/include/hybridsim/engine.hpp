#pragma once

#include <stdexcept>

#include "hybridsim/adversary.hpp"
#include "hybridsim/model.hpp"
#include "hybridsim/protocol.hpp"

namespace hybridsim {

// An illegal adversary action: a strategy bug, not a protocol failure.
struct AdversaryBug : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A broken engine/protocol invariant.
struct EngineBug : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Applies one round's adversary action to the collected sends. Self-edges
// always deliver verbatim; tampered edges deliver the forged payload;
// dropped edges and all-absent payloads arrive as nothing.
inline RoundDelivery apply_action(const std::vector<Payload>& sends,
                                  const AdversaryAction& action, int n) {
  RoundDelivery out;
  out.delivered.resize(static_cast<std::size_t>(n));
  for (ProcessorId q = 1; q <= n; ++q) {
    auto& row = out.delivered[static_cast<std::size_t>(q - 1)];
    row.resize(static_cast<std::size_t>(n));
    for (ProcessorId s = 1; s <= n; ++s) {
      const Payload& sent = sends[static_cast<std::size_t>(s - 1)];
      auto& cell = row[static_cast<std::size_t>(s - 1)];
      if (s == q) {
        cell = sent;
        continue;
      }
      const Edge edge{s, q};
      if (auto it = action.tampers.find(edge); it != action.tampers.end()) {
        cell = it->second;
      } else if (action.drops.count(edge) || sent.all_absent()) {
        cell = std::nullopt;
      } else {
        cell = sent;
      }
    }
  }
  return out;
}

// Executes phases*3 synchronous rounds and records everything. Each round:
// collect sends, ask the strategy for an action, check it is legal, deliver,
// then advance every processor. When legality_cfg is given, actions are
// validated against it instead of cfg (calibration mode for schedules whose
// width exceeds the model's mobile budget).
inline RunTrace run(const Config& cfg, Strategy& strategy,
                    const std::vector<std::vector<Slot>>& inputs,
                    std::uint64_t seed = 0,
                    const Config* legality_cfg = nullptr) {
  const ConfigCheck check = validate_config(cfg);
  if (!check.ok)
    throw std::invalid_argument("run: invalid config: " +
                                check.violations.front().field + ": " +
                                check.violations.front().reason);
  if (static_cast<int>(inputs.size()) != cfg.n)
    throw std::invalid_argument("run: need one input vector per processor");
  for (const auto& v : inputs) {
    if (static_cast<int>(v.size()) != cfg.k)
      throw std::invalid_argument("run: input vectors must have length k");
    for (Slot s : v)
      if (s != 0 && s != 1)
        throw std::invalid_argument("run: inputs must be bits");
  }

  RunTrace trace;
  trace.config = cfg;
  trace.strategy = strategy.name();
  trace.seed = seed;
  trace.inputs = inputs;

  std::vector<ProcState> states;
  states.reserve(static_cast<std::size_t>(cfg.n));
  for (ProcessorId p = 1; p <= cfg.n; ++p)
    states.push_back(vsc_init(p, inputs[static_cast<std::size_t>(p - 1)]));

  for (int round = 1; round <= cfg.rounds(); ++round) {
    const RoundRole role = role_for_round(round);
    const int phase = phase_for_round(round);

    std::vector<Payload> sends;
    sends.reserve(states.size());
    for (const ProcState& st : states) {
      if (st.role != role || st.phase != phase)
        throw EngineBug("processor out of step with the round schedule");
      sends.push_back(vsc_payload(st, cfg));
    }

    const RoundSnapshot snap{round, role, phase, sends, states, cfg};
    AdversaryAction action = strategy.next_action(snap);
    if (action.round != round)
      throw AdversaryBug("strategy returned an action for the wrong round");
    if (auto why = legality_violation(action, legality_cfg ? *legality_cfg : cfg))
      throw AdversaryBug("illegal action in round " + std::to_string(round) +
                         ": " + *why);

    RoundDelivery delivery = apply_action(sends, action, cfg.n);
    for (ProcessorId p = 1; p <= cfg.n; ++p) {
      auto& st = states[static_cast<std::size_t>(p - 1)];
      st = vsc_step(st, delivery.delivered[static_cast<std::size_t>(p - 1)], cfg);
    }

    RoundRecord rec;
    rec.round = round;
    rec.phase = phase;
    rec.role = role;
    rec.sends = std::move(sends);
    rec.action = std::move(action);
    rec.delivery = std::move(delivery);
    rec.states = states;
    trace.rounds.push_back(std::move(rec));
  }

  trace.outputs.reserve(states.size());
  for (const ProcState& st : states) trace.outputs.push_back(vsc_output(st, cfg));
  return trace;
}

// Runs one standalone commit-adopt instance (a single index) under two
// explicit actions, one per round. This is the path the exhaustive
// enumerator drives.
inline std::vector<CAState> run_ca_only(const Config& cfg,
                                        const std::vector<Slot>& inputs,
                                        const AdversaryAction& round1,
                                        const AdversaryAction& round2) {
  if (static_cast<int>(inputs.size()) != cfg.n)
    throw std::invalid_argument("run_ca_only: need one input bit per processor");
  for (const AdversaryAction* a : {&round1, &round2}) {
    if (auto why = legality_violation(*a, cfg))
      throw AdversaryBug("run_ca_only: illegal action: " + *why);
  }

  const std::size_t n = static_cast<std::size_t>(cfg.n);
  std::vector<Payload> sends(n);
  for (std::size_t p = 0; p < n; ++p) {
    sends[p].role = RoundRole::CaRound1;
    sends[p].slots.assign(1, ca_round1_slot(inputs[p]));
  }
  const RoundDelivery d1 = apply_action(sends, round1, cfg.n);

  std::vector<Payload> proposals(n);
  for (std::size_t p = 0; p < n; ++p) {
    proposals[p].role = RoundRole::CaRound2;
    proposals[p].slots.assign(
        1, ca_round2_slot(tally_index(d1.delivered[p], 0), cfg));
  }
  const RoundDelivery d2 = apply_action(proposals, round2, cfg.n);

  std::vector<CAState> out(n);
  for (std::size_t p = 0; p < n; ++p)
    out[p] = ca_finalize(tally_index(d2.delivered[p], 0), cfg, inputs[p]);
  return out;
}

}  // namespace hybridsim
