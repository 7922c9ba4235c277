#pragma once

#include <bit>
#include <cstdint>
#include <sstream>

#include "hybridsim/engine.hpp"
#include "hybridsim/model.hpp"

namespace hybridsim {

struct PropertyResult {
  std::string property;
  bool pass = true;
  int index = 0;      // consensus index (1-based), 0 when not applicable
  ProcessorId p = 0;  // witnessing processors, 0 when not applicable
  ProcessorId q = 0;
  std::string detail;
};

struct Verdict {
  std::vector<PropertyResult> results;

  bool all_pass() const {
    return std::all_of(results.begin(), results.end(),
                       [](const PropertyResult& r) { return r.pass; });
  }

  const PropertyResult* failure() const {
    for (const PropertyResult& r : results)
      if (!r.pass) return &r;
    return nullptr;
  }
};

// --- k-vector-set consensus checker ---
//
// vset1: a unanimously proposed index must be decided with that value by all.
// vset2: decided values at an index never conflict and come from some input.
// vset3: at least one index is decided (non-bot) by every processor, equally.
// Processors are infallible in this model, so all n are checked.
inline Verdict check_vset(const std::vector<std::vector<Slot>>& inputs,
                          const std::vector<OutputVector>& outputs, int k) {
  const std::size_t n = inputs.size();
  if (outputs.size() != n)
    throw std::invalid_argument("check_vset: inputs/outputs size mismatch");
  for (const auto& v : inputs)
    if (static_cast<int>(v.size()) != k)
      throw std::invalid_argument("check_vset: input vector length != k");
  for (const auto& ov : outputs)
    if (static_cast<int>(ov.o.size()) != k)
      throw std::invalid_argument("check_vset: output vector length != k");

  Verdict verdict;
  PropertyResult vset1{"vset1", true, 0, 0, 0, ""};
  PropertyResult vset2{"vset2", true, 0, 0, 0, ""};
  PropertyResult vset3{"vset3", true, 0, 0, 0, ""};

  for (int j = 0; j < k && vset1.pass; ++j) {
    const Slot b = inputs[0][static_cast<std::size_t>(j)];
    bool unanimous = true;
    for (std::size_t p = 1; p < n; ++p)
      unanimous = unanimous && inputs[p][static_cast<std::size_t>(j)] == b;
    if (!unanimous) continue;
    for (std::size_t p = 0; p < n; ++p) {
      if (outputs[p].o[static_cast<std::size_t>(j)] != b) {
        vset1 = {"vset1", false, j + 1, static_cast<ProcessorId>(p + 1), 0,
                 "unanimous input not returned"};
        break;
      }
    }
  }

  for (int j = 0; j < k && vset2.pass; ++j) {
    for (std::size_t p = 0; p < n && vset2.pass; ++p) {
      const Slot vp = outputs[p].o[static_cast<std::size_t>(j)];
      if (vp == kBot) continue;
      bool from_input = false;
      for (std::size_t r = 0; r < n; ++r)
        from_input = from_input || inputs[r][static_cast<std::size_t>(j)] == vp;
      if (!from_input) {
        vset2 = {"vset2", false, j + 1, static_cast<ProcessorId>(p + 1), 0,
                 "decided value is nobody's input"};
        break;
      }
      for (std::size_t q = p + 1; q < n; ++q) {
        const Slot vq = outputs[q].o[static_cast<std::size_t>(j)];
        if (vq != kBot && vq != vp) {
          vset2 = {"vset2", false, j + 1, static_cast<ProcessorId>(p + 1),
                   static_cast<ProcessorId>(q + 1), "conflicting decisions"};
          break;
        }
      }
    }
  }

  bool some_index_decided_by_all = false;
  for (int j = 0; j < k && !some_index_decided_by_all; ++j) {
    const Slot first = outputs[0].o[static_cast<std::size_t>(j)];
    if (first == kBot) continue;
    bool all = true;
    for (std::size_t p = 1; p < n; ++p) {
      const Slot v = outputs[p].o[static_cast<std::size_t>(j)];
      all = all && v != kBot && v == first;
    }
    some_index_decided_by_all = all;
  }
  if (!some_index_decided_by_all)
    vset3 = {"vset3", false, 0, 0, 0, "no index decided by every processor"};

  verdict.results = {vset1, vset2, vset3};
  return verdict;
}

// --- commit-adopt checker ---
//
// CA1: unanimous invocation value forces everyone to commit it.
// CA2: any commit forces value agreement (grades may differ).
inline Verdict check_ca(const std::vector<Slot>& inputs,
                        const std::vector<CAState>& results, int n) {
  if (static_cast<int>(inputs.size()) != n ||
      static_cast<int>(results.size()) != n)
    throw std::invalid_argument("check_ca: size mismatch");

  Verdict verdict;
  PropertyResult ca1{"CA1", true, 0, 0, 0, ""};
  PropertyResult ca2{"CA2", true, 0, 0, 0, ""};

  bool unanimous = true;
  for (int p = 1; p < n; ++p) unanimous = unanimous && inputs[0] == inputs[p];
  if (unanimous && n > 0) {
    for (int p = 0; p < n; ++p) {
      if (results[p].v != inputs[0] || results[p].e != Grade::Commit) {
        ca1 = {"CA1", false, 0, p + 1, 0, "unanimous value not committed"};
        break;
      }
    }
  }

  for (int p = 0; p < n && ca2.pass; ++p) {
    if (results[p].e != Grade::Commit) continue;
    for (int q = 0; q < n; ++q) {
      if (results[q].v != results[p].v) {
        ca2 = {"CA2", false, 0, p + 1, q + 1, "commit without value agreement"};
        break;
      }
    }
  }

  verdict.results = {ca1, ca2};
  return verdict;
}

namespace detail {

inline std::string describe_action(const AdversaryAction& a) {
  std::ostringstream out;
  out << "mobile={";
  for (ProcessorId p : a.mobile_set) out << ' ' << p;
  out << " } drops={";
  for (const Edge& e : a.drops) out << ' ' << e.sender << '>' << e.receiver;
  out << " } tampers={";
  for (const auto& [e, payload] : a.tampers)
    out << ' ' << e.sender << '>' << e.receiver << '='
        << (payload.slots.empty() || payload.slots[0] == kAbsent
                ? '-'
                : char('0' + payload.slots[0]));
  out << " }";
  return out.str();
}

// Enumerates every distinct legal single-round corruption for a one-index
// instance: all size-m mobile sets, every drop subset of edges leaving
// fixed+mobile senders, and in the Byzantine model every per-edge forgery in
// {0,1} from fixed senders. Actions producing identical deliveries are
// emitted once.
inline std::vector<AdversaryAction> enumerate_ca_actions(const Config& cfg) {
  const int n = cfg.n;
  std::vector<std::vector<ProcessorId>> mobile_sets;
  std::vector<ProcessorId> pick;
  const int msize = std::min(cfg.m, n);
  auto choose = [&](auto&& self, ProcessorId from) -> void {
    if (static_cast<int>(pick.size()) == msize) {
      mobile_sets.push_back(pick);
      return;
    }
    for (ProcessorId p = from; p <= n; ++p) {
      pick.push_back(p);
      self(self, p + 1);
      pick.pop_back();
    }
  };
  choose(choose, 1);

  std::vector<AdversaryAction> out;
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  const bool byz = cfg.kind == ModelKind::ByzantineHybrid;

  for (const auto& mobile : mobile_sets) {
    std::vector<Edge> edges;
    std::vector<bool> tamperable;
    std::vector<ProcessorId> senders(cfg.fixed_set);
    senders.insert(senders.end(), mobile.begin(), mobile.end());
    std::sort(senders.begin(), senders.end());
    senders.erase(std::unique(senders.begin(), senders.end()), senders.end());
    for (ProcessorId s : senders)
      for (ProcessorId r = 1; r <= n; ++r)
        if (r != s) {
          edges.push_back(Edge{s, r});
          tamperable.push_back(byz && cfg.is_fixed(s));
        }

    // Per-edge choice: 0 deliver, 1 drop, 2 forge bit 0, 3 forge bit 1.
    std::vector<int> choice(edges.size(), 0);
    for (;;) {
      std::uint64_t drop_key = 0, tamper_key = 0;
      AdversaryAction a;
      a.round = 1;
      a.mobile_set.insert(mobile.begin(), mobile.end());
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::uint64_t bit =
            static_cast<std::uint64_t>((edges[i].sender - 1) * n +
                                       (edges[i].receiver - 1));
        if (choice[i] == 1) {
          drop_key |= 1ULL << bit;
          a.drops.insert(edges[i]);
        } else if (choice[i] >= 2) {
          tamper_key |= static_cast<std::uint64_t>(choice[i] - 1) << (2 * bit);
          Payload forged;
          forged.role = RoundRole::CaRound1;
          forged.slots.assign(1, static_cast<Slot>(choice[i] - 2));
          a.tampers.emplace(edges[i], std::move(forged));
        }
      }
      if (!legality_violation(a, cfg) &&
          seen.emplace(drop_key, tamper_key).second)
        out.push_back(std::move(a));

      std::size_t i = 0;
      for (; i < edges.size(); ++i) {
        const int limit = tamperable[i] ? 3 : 1;
        if (choice[i] < limit) {
          ++choice[i];
          std::fill(choice.begin(), choice.begin() + static_cast<long>(i), 0);
          break;
        }
      }
      if (i == edges.size()) break;
    }
  }
  return out;
}

}  // namespace detail

// Brute-force oracle for the commit-adopt properties: every input vector
// against every pair of distinct legal round actions. Guarded to n <= 5;
// the state space explodes past that.
inline Verdict exhaustive_ca(ModelKind kind, int n, int f, int m) {
  if (n < 1 || n > 5)
    throw std::invalid_argument(
        "exhaustive_ca: REFUSED, instance guard is 1 <= n <= 5");
  if (f < 0 || f > n || m < 0)
    throw std::invalid_argument("exhaustive_ca: nonsensical f or m");
  if (kind == ModelKind::ConstrainedMobile && f != 0)
    throw std::invalid_argument("exhaustive_ca: constrained model has f = 0");

  Config cfg = make_config(kind, n, f, m, /*k=*/1, /*phases=*/1);
  const std::vector<AdversaryAction> actions = detail::enumerate_ca_actions(cfg);
  std::vector<AdversaryAction> actions2 = actions;
  for (AdversaryAction& a : actions2) {
    a.round = 2;
    for (auto& [edge, payload] : a.tampers) payload.role = RoundRole::CaRound2;
  }

  Verdict verdict;
  verdict.results = {PropertyResult{"CA1", true, 0, 0, 0, ""},
                     PropertyResult{"CA2", true, 0, 0, 0, ""}};
  std::uint64_t combos = 0;

  std::vector<Slot> inputs(static_cast<std::size_t>(n));
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    for (int p = 0; p < n; ++p)
      inputs[static_cast<std::size_t>(p)] = (mask >> p) & 1;
    for (const AdversaryAction& a1 : actions) {
      for (const AdversaryAction& a2 : actions2) {
        const std::vector<CAState> results = run_ca_only(cfg, inputs, a1, a2);
        ++combos;
        const Verdict one = check_ca(inputs, results, n);
        if (!one.all_pass()) {
          for (PropertyResult r : one.results) {
            if (r.pass) continue;
            r.detail += "; inputs=";
            for (Slot s : inputs) r.detail += char('0' + s);
            r.detail += "; round1 " + detail::describe_action(a1) +
                        "; round2 " + detail::describe_action(a2);
            for (PropertyResult& agg : verdict.results)
              if (agg.property == r.property && agg.pass) agg = r;
          }
          if (!verdict.all_pass() &&
              std::none_of(verdict.results.begin(), verdict.results.end(),
                           [](const PropertyResult& r) { return r.pass; }))
            return verdict;  // both properties already refuted
        }
      }
    }
  }
  for (PropertyResult& r : verdict.results)
    if (r.pass) r.detail = "checked " + std::to_string(combos) + " combinations";
  return verdict;
}

// --- lower-bound run attribution ---

// An idealized omission run: per round, the processors whose outgoing
// messages were all suppressed.
struct OmissionSchedule {
  int n = 0;
  std::vector<std::vector<ProcessorId>> rounds;
};

// The sliding-window schedule: round r silences the width-sized cyclic
// window starting at r (wrapping mod n), for chunks*n rounds.
inline OmissionSchedule rotating_schedule(int n, int width, int chunks) {
  if (n < 1 || width < 1 || width > n || chunks < 1)
    throw std::invalid_argument("rotating_schedule: need 1 <= width <= n, chunks >= 1");
  OmissionSchedule sched;
  sched.n = n;
  for (int r = 1; r <= chunks * n; ++r) {
    std::vector<ProcessorId> window;
    for (int off = 0; off < width; ++off) window.push_back(wrap_id(r + off, n));
    std::sort(window.begin(), window.end());
    sched.rounds.push_back(std::move(window));
  }
  return sched;
}

namespace detail {

inline std::vector<std::uint32_t> round_masks(const OmissionSchedule& sched) {
  std::vector<std::uint32_t> masks;
  masks.reserve(sched.rounds.size());
  for (const auto& round : sched.rounds) {
    std::uint32_t mask = 0;
    for (ProcessorId p : round) {
      if (p < 1 || p > sched.n)
        throw std::invalid_argument("schedule: id outside [1..n]");
      mask |= 1u << (p - 1);
    }
    masks.push_back(mask);
  }
  return masks;
}

// A fixed set explains the schedule when, per round, at most m omitters fall
// outside it (the fixed members omit freely, the rest must fit the mobile
// budget).
inline bool explains(const std::vector<std::uint32_t>& masks,
                     std::uint32_t fixed_mask, int m) {
  for (std::uint32_t round : masks)
    if (std::popcount(round & ~fixed_mask) > m) return false;
  return true;
}

}  // namespace detail

// Exact attribution oracle: searches all C(n,f) fixed sets in lexicographic
// order, returning the first that explains every round, or nullopt. Plain
// subset enumeration; n is capped to keep it tractable.
inline std::optional<std::vector<ProcessorId>> explain_hybrid_exact(
    const OmissionSchedule& sched, int f, int m) {
  if (sched.n < 1 || sched.n > 20)
    throw std::invalid_argument(
        "explain_hybrid_exact: REFUSED, instance guard is 1 <= n <= 20");
  if (f < 0 || f > sched.n || m < 0)
    throw std::invalid_argument("explain_hybrid_exact: nonsensical f or m");

  const auto masks = detail::round_masks(sched);
  std::vector<ProcessorId> pick;
  auto search = [&](auto&& self, ProcessorId from,
                    std::uint32_t mask) -> std::optional<std::vector<ProcessorId>> {
    if (static_cast<int>(pick.size()) == f)
      return detail::explains(masks, mask, m)
                 ? std::optional<std::vector<ProcessorId>>(pick)
                 : std::nullopt;
    for (ProcessorId p = from; p <= sched.n; ++p) {
      pick.push_back(p);
      if (auto found = self(self, p + 1, mask | (1u << (p - 1)))) return found;
      pick.pop_back();
    }
    return std::nullopt;
  };
  return search(search, 1, 0);
}

// Greedy attribution: take the f most frequent omitters (ties toward the
// lower index) and verify. Success implies the exact oracle succeeds; the
// converse need not hold.
inline std::optional<std::vector<ProcessorId>> explain_hybrid_greedy(
    const OmissionSchedule& sched, int f, int m) {
  if (f < 0 || f > sched.n || m < 0)
    throw std::invalid_argument("explain_hybrid_greedy: nonsensical f or m");
  std::vector<std::pair<int, ProcessorId>> ranked;  // (-count, id)
  std::vector<int> count(static_cast<std::size_t>(sched.n) + 1, 0);
  for (const auto& round : sched.rounds)
    for (ProcessorId p : round) ++count[static_cast<std::size_t>(p)];
  for (ProcessorId p = 1; p <= sched.n; ++p)
    ranked.emplace_back(-count[static_cast<std::size_t>(p)], p);
  std::sort(ranked.begin(), ranked.end());

  std::vector<ProcessorId> fixed;
  std::uint32_t mask = 0;
  for (int i = 0; i < f; ++i) {
    fixed.push_back(ranked[static_cast<std::size_t>(i)].second);
    mask |= 1u << (fixed.back() - 1);
  }
  std::sort(fixed.begin(), fixed.end());
  if (detail::explains(detail::round_masks(sched), mask, m)) return fixed;
  return std::nullopt;
}

struct BoundaryRow {
  int n = 0, f = 0, m = 0, width = 0, chunks = 0;
  bool explainable = false;
  std::optional<std::vector<ProcessorId>> witness;
};

// Sweeps n over [n_min..n_max], asking whether the rotating width-(m+1)
// schedule can be attributed to an (n, f, m) adversary. Pass width to probe
// other window sizes.
inline std::vector<BoundaryRow> boundary_sweep(int f, int m, int n_min,
                                               int n_max, int chunks,
                                               int width = 0) {
  const int w = width > 0 ? width : m + 1;
  std::vector<BoundaryRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    BoundaryRow row;
    row.n = n;
    row.f = f;
    row.m = m;
    row.width = w;
    row.chunks = chunks;
    row.witness = explain_hybrid_exact(rotating_schedule(n, w, chunks), f, m);
    row.explainable = row.witness.has_value();
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string boundary_csv(const std::vector<BoundaryRow>& rows) {
  std::ostringstream out;
  out << "n,f,m,width,chunks,explainable,witness_set\n";
  for (const BoundaryRow& row : rows) {
    out << row.n << ',' << row.f << ',' << row.m << ',' << row.width << ','
        << row.chunks << ',' << (row.explainable ? "true" : "false") << ',';
    if (row.witness) {
      for (std::size_t i = 0; i < row.witness->size(); ++i)
        out << (i ? " " : "") << (*row.witness)[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hybridsim
