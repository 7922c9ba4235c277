#pragma once

#include <stdexcept>

#include "hybridsim/model.hpp"

namespace hybridsim {

// Bit counts observed at one processor for one index in one round, its own
// contribution included. Ties on the majority break toward bit 0; a tie can
// never pass the commit threshold, so the choice only affects adopted values.
struct TallyView {
  int zeros = 0;
  int ones = 0;

  void add(Slot s) {
    if (s == 0) ++zeros;
    else if (s == 1) ++ones;
  }

  int total() const { return zeros + ones; }
  Slot majority_bit() const { return ones > zeros ? Slot{1} : Slot{0}; }
  int majority_count() const { return ones > zeros ? ones : zeros; }
  int minority_count() const { return ones > zeros ? zeros : ones; }
};

// Builds the tally for one index from a delivered row. Absent slots and
// missing payloads contribute nothing.
inline TallyView tally_index(const std::vector<std::optional<Payload>>& row,
                             std::size_t index) {
  TallyView t;
  for (const auto& payload : row) {
    if (payload && index < payload->slots.size()) t.add(payload->slots[index]);
  }
  return t;
}

// --- Commit-adopt, per index ---

// Round 1 in both fault models: just broadcast the current bit.
inline Slot ca_round1_slot(Slot v) { return v; }

// Omission-model round 2: propose the bit iff every bit received (own
// included) was that bit.
inline Slot ca_omission_round2_slot(const TallyView& t) {
  if (t.total() > 0 && t.minority_count() == 0) return t.majority_bit();
  return kAbsent;
}

// Byzantine-model round 2: propose the majority bit iff the minority could
// all be forgeries (#min <= f) and the majority is more than half of n.
inline Slot ca_byz_round2_slot(const TallyView& t, int n, int f) {
  if (t.minority_count() <= f && 2 * t.majority_count() > n)
    return t.majority_bit();
  return kAbsent;
}

inline Slot ca_round2_slot(const TallyView& t, const Config& cfg) {
  return cfg.kind == ModelKind::ByzantineHybrid
             ? ca_byz_round2_slot(t, cfg.n, cfg.f)
             : ca_omission_round2_slot(t);
}

// Scores the round-2 proposals. Commit needs a strict majority of n in both
// models; the value-update floor differs (any proposal for omission, a
// quarter of n for Byzantine unless the binary relaxation is switched on).
inline CAState ca_finalize(const TallyView& proposals, const Config& cfg,
                           Slot original_v) {
  CAState out;
  out.e = 2 * proposals.majority_count() > cfg.n ? Grade::Commit : Grade::Adopt;
  bool take_majority;
  if (cfg.kind == ModelKind::ByzantineHybrid && !cfg.byz_adopt_any)
    take_majority = 4 * proposals.majority_count() >= cfg.n;
  else
    take_majority = proposals.majority_count() > 0;
  out.v = take_majority ? proposals.majority_bit() : original_v;
  return out;
}

// Coordinator for index j (1-based) in phase i: p_l with l = (i+j-1) mod n,
// residue 0 mapping to p_n.
inline ProcessorId coordinator(int phase, int index, int n) {
  return wrap_id(phase + index - 1, n);
}

// --- The per-processor state machine (three rounds per phase) ---

inline ProcState vsc_init(ProcessorId id, const std::vector<Slot>& input) {
  ProcState st;
  st.id = id;
  st.phase = 1;
  st.role = RoundRole::CaRound1;
  st.value = input;
  st.ca.assign(input.size(), CAState{});
  for (std::size_t j = 0; j < input.size(); ++j) st.ca[j].v = input[j];
  st.round2_proposal.assign(input.size(), kAbsent);
  return st;
}

inline bool vsc_done(const ProcState& st, const Config& cfg) {
  return st.phase > cfg.phases;
}

// What this processor sends in its current round.
inline Payload vsc_payload(const ProcState& st, const Config& cfg) {
  if (vsc_done(st, cfg))
    throw std::logic_error("vsc_payload: protocol already finished");
  Payload p;
  p.role = st.role;
  const std::size_t k = st.value.size();
  p.slots.assign(k, kAbsent);
  switch (st.role) {
    case RoundRole::CaRound1:
      for (std::size_t j = 0; j < k; ++j) p.slots[j] = ca_round1_slot(st.value[j]);
      break;
    case RoundRole::CaRound2:
      p.slots = st.round2_proposal;
      break;
    case RoundRole::Coord:
      for (std::size_t j = 0; j < k; ++j) {
        if (coordinator(st.phase, static_cast<int>(j) + 1, cfg.n) == st.id)
          p.slots[j] = st.ca[j].v;
      }
      break;
  }
  return p;
}

// Consumes the delivered row for the round the processor is in and advances
// one round. Pure: the caller keeps the old state if it wants history.
inline ProcState vsc_step(const ProcState& st,
                          const std::vector<std::optional<Payload>>& row,
                          const Config& cfg) {
  if (vsc_done(st, cfg))
    throw std::logic_error("vsc_step: protocol already finished");
  ProcState next = st;
  const std::size_t k = st.value.size();
  switch (st.role) {
    case RoundRole::CaRound1:
      for (std::size_t j = 0; j < k; ++j)
        next.round2_proposal[j] = ca_round2_slot(tally_index(row, j), cfg);
      next.role = RoundRole::CaRound2;
      break;
    case RoundRole::CaRound2:
      for (std::size_t j = 0; j < k; ++j)
        next.ca[j] = ca_finalize(tally_index(row, j), cfg, st.value[j]);
      next.role = RoundRole::Coord;
      break;
    case RoundRole::Coord:
      for (std::size_t j = 0; j < k; ++j) {
        if (st.ca[j].e == Grade::Commit) {
          next.value[j] = st.ca[j].v;  // coordinator ignored
        } else {
          const ProcessorId c =
              coordinator(st.phase, static_cast<int>(j) + 1, cfg.n);
          const auto& from_coord = row[static_cast<std::size_t>(c - 1)];
          if (from_coord && j < from_coord->slots.size() &&
              from_coord->slots[j] != kAbsent)
            next.value[j] = from_coord->slots[j];
          // else: nothing received, keep the current value
        }
      }
      next.round2_proposal.assign(k, kAbsent);
      next.role = RoundRole::CaRound1;
      next.phase = st.phase + 1;
      break;
  }
  return next;
}

// Final outputs: the value where the last commit-adopt committed, bot
// elsewhere.
inline OutputVector vsc_output(const ProcState& st, const Config& cfg) {
  if (!vsc_done(st, cfg))
    throw std::logic_error("vsc_output: called before all phases completed");
  OutputVector out;
  out.o.reserve(st.value.size());
  for (std::size_t j = 0; j < st.value.size(); ++j)
    out.o.push_back(st.ca[j].e == Grade::Commit ? st.value[j] : kBot);
  return out;
}

}  // namespace hybridsim
