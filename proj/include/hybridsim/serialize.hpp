#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "hybridsim/model.hpp"

// Trace wire format: line-delimited JSON. First line is a header record
// (config, strategy, seed, inputs), then one record per round, then a final
// outputs record. Object keys are emitted sorted, so serialization is
// byte-deterministic for equal traces.
namespace hybridsim {

using json = nlohmann::json;

inline char slot_char(Slot s) { return s == kAbsent ? '-' : (s ? '1' : '0'); }

inline Slot slot_from_char(char c) {
  switch (c) {
    case '-': return kAbsent;
    case '0': return 0;
    case '1': return 1;
    default: throw std::runtime_error(std::string("bad slot char: ") + c);
  }
}

inline std::string slots_to_string(const std::vector<Slot>& slots) {
  std::string out;
  out.reserve(slots.size());
  for (Slot s : slots) out.push_back(slot_char(s));
  return out;
}

inline std::vector<Slot> slots_from_string(const std::string& text) {
  std::vector<Slot> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(slot_from_char(c));
  return out;
}

inline std::string role_name(RoundRole r) {
  switch (r) {
    case RoundRole::CaRound1: return "ca1";
    case RoundRole::CaRound2: return "ca2";
    default: return "coord";
  }
}

inline RoundRole role_from_name(const std::string& s) {
  if (s == "ca1") return RoundRole::CaRound1;
  if (s == "ca2") return RoundRole::CaRound2;
  if (s == "coord") return RoundRole::Coord;
  throw std::runtime_error("bad role name: " + s);
}

inline std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::OmissionHybrid: return "omission";
    case ModelKind::ByzantineHybrid: return "byzantine";
    default: return "constrained";
  }
}

inline ModelKind kind_from_name(const std::string& s) {
  if (s == "omission") return ModelKind::OmissionHybrid;
  if (s == "byzantine") return ModelKind::ByzantineHybrid;
  if (s == "constrained") return ModelKind::ConstrainedMobile;
  throw std::runtime_error("bad model kind: " + s);
}

inline json config_to_json(const Config& cfg) {
  return json{{"kind", kind_name(cfg.kind)}, {"n", cfg.n},
              {"f", cfg.f},                  {"m", cfg.m},
              {"k", cfg.k},                  {"fixed", cfg.fixed_set},
              {"phases", cfg.phases},        {"byz_adopt_any", cfg.byz_adopt_any}};
}

inline Config config_from_json(const json& j) {
  Config cfg;
  cfg.kind = kind_from_name(j.at("kind").get<std::string>());
  cfg.n = j.at("n").get<int>();
  cfg.f = j.at("f").get<int>();
  cfg.m = j.at("m").get<int>();
  cfg.k = j.at("k").get<int>();
  cfg.fixed_set = j.at("fixed").get<std::vector<ProcessorId>>();
  cfg.phases = j.at("phases").get<int>();
  cfg.byz_adopt_any = j.at("byz_adopt_any").get<bool>();
  return cfg;
}

inline json payload_to_json(const Payload& p) {
  return json{{"role", role_name(p.role)}, {"slots", slots_to_string(p.slots)}};
}

inline Payload payload_from_json(const json& j) {
  Payload p;
  p.role = role_from_name(j.at("role").get<std::string>());
  p.slots = slots_from_string(j.at("slots").get<std::string>());
  return p;
}

inline json action_to_json(const AdversaryAction& a) {
  json drops = json::array();
  for (const Edge& e : a.drops) drops.push_back(json::array({e.sender, e.receiver}));
  json tampers = json::array();
  for (const auto& [edge, payload] : a.tampers)
    tampers.push_back(json{{"s", edge.sender},
                           {"r", edge.receiver},
                           {"payload", payload_to_json(payload)}});
  return json{{"round", a.round},
              {"mobile", std::vector<ProcessorId>(a.mobile_set.begin(), a.mobile_set.end())},
              {"drops", drops},
              {"tampers", tampers}};
}

inline AdversaryAction action_from_json(const json& j) {
  AdversaryAction a;
  a.round = j.at("round").get<int>();
  for (const auto& id : j.at("mobile")) a.mobile_set.insert(id.get<ProcessorId>());
  for (const auto& d : j.at("drops"))
    a.drops.insert(Edge{d.at(0).get<ProcessorId>(), d.at(1).get<ProcessorId>()});
  for (const auto& t : j.at("tampers"))
    a.tampers.emplace(Edge{t.at("s").get<ProcessorId>(), t.at("r").get<ProcessorId>()},
                      payload_from_json(t.at("payload")));
  return a;
}

inline json state_to_json(const ProcState& st) {
  std::string ca;
  for (const CAState& c : st.ca) {
    ca.push_back(slot_char(c.v));
    ca.push_back(c.e == Grade::Commit ? 'C' : 'A');
  }
  return json{{"id", st.id},
              {"phase", st.phase},
              {"role", role_name(st.role)},
              {"v", slots_to_string(st.value)},
              {"ca", ca},
              {"prop", slots_to_string(st.round2_proposal)}};
}

inline ProcState state_from_json(const json& j) {
  ProcState st;
  st.id = j.at("id").get<ProcessorId>();
  st.phase = j.at("phase").get<int>();
  st.role = role_from_name(j.at("role").get<std::string>());
  st.value = slots_from_string(j.at("v").get<std::string>());
  const std::string ca = j.at("ca").get<std::string>();
  for (std::size_t i = 0; i + 1 < ca.size(); i += 2)
    st.ca.push_back(CAState{slot_from_char(ca[i]),
                            ca[i + 1] == 'C' ? Grade::Commit : Grade::Adopt});
  st.round2_proposal = slots_from_string(j.at("prop").get<std::string>());
  return st;
}

inline json round_to_json(const RoundRecord& rec) {
  json sends = json::array();
  for (const Payload& p : rec.sends) sends.push_back(payload_to_json(p));
  json delivery = json::array();
  for (const auto& row : rec.delivery.delivered) {
    json jrow = json::array();
    for (const auto& cell : row)
      jrow.push_back(cell ? payload_to_json(*cell) : json(nullptr));
    delivery.push_back(std::move(jrow));
  }
  json states = json::array();
  for (const ProcState& st : rec.states) states.push_back(state_to_json(st));
  return json{{"type", "round"},   {"round", rec.round},
              {"phase", rec.phase}, {"role", role_name(rec.role)},
              {"sends", sends},     {"action", action_to_json(rec.action)},
              {"delivery", delivery}, {"states", states}};
}

inline RoundRecord round_from_json(const json& j) {
  RoundRecord rec;
  rec.round = j.at("round").get<int>();
  rec.phase = j.at("phase").get<int>();
  rec.role = role_from_name(j.at("role").get<std::string>());
  for (const auto& p : j.at("sends")) rec.sends.push_back(payload_from_json(p));
  rec.action = action_from_json(j.at("action"));
  for (const auto& jrow : j.at("delivery")) {
    std::vector<std::optional<Payload>> row;
    for (const auto& cell : jrow) {
      if (cell.is_null())
        row.push_back(std::nullopt);
      else
        row.push_back(payload_from_json(cell));
    }
    rec.delivery.delivered.push_back(std::move(row));
  }
  for (const auto& s : j.at("states")) rec.states.push_back(state_from_json(s));
  return rec;
}

inline std::string trace_to_jsonl(const RunTrace& trace) {
  std::ostringstream out;
  json inputs = json::array();
  for (const auto& v : trace.inputs) inputs.push_back(slots_to_string(v));
  out << json{{"type", "header"},
              {"config", config_to_json(trace.config)},
              {"strategy", trace.strategy},
              {"seed", trace.seed},
              {"inputs", inputs}}
             .dump()
      << '\n';
  for (const RoundRecord& rec : trace.rounds) out << round_to_json(rec).dump() << '\n';
  json outputs = json::array();
  for (const OutputVector& ov : trace.outputs) outputs.push_back(slots_to_string(ov.o));
  out << json{{"type", "outputs"}, {"outputs", outputs}}.dump() << '\n';
  return out.str();
}

inline RunTrace trace_from_jsonl(const std::string& text) {
  RunTrace trace;
  std::istringstream in(text);
  std::string line;
  bool saw_header = false, saw_outputs = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      trace.config = config_from_json(j.at("config"));
      trace.strategy = j.at("strategy").get<std::string>();
      trace.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& v : j.at("inputs"))
        trace.inputs.push_back(slots_from_string(v.get<std::string>()));
      saw_header = true;
    } else if (type == "round") {
      trace.rounds.push_back(round_from_json(j));
    } else if (type == "outputs") {
      for (const auto& o : j.at("outputs"))
        trace.outputs.push_back(OutputVector{slots_from_string(o.get<std::string>())});
      saw_outputs = true;
    } else {
      throw std::runtime_error("unknown trace record type: " + type);
    }
  }
  if (!saw_header || !saw_outputs)
    throw std::runtime_error("trace is missing header or outputs record");
  return trace;
}

// Output vectors as CSV, one row per processor; undecided entries are the
// literal string BOT.
inline std::string outputs_to_csv(const std::vector<OutputVector>& outputs) {
  std::ostringstream out;
  const std::size_t k = outputs.empty() ? 0 : outputs.front().o.size();
  out << "processor";
  for (std::size_t j = 1; j <= k; ++j) out << ",o" << j;
  out << '\n';
  for (std::size_t p = 0; p < outputs.size(); ++p) {
    out << (p + 1);
    for (Slot s : outputs[p].o) {
      if (s == kBot)
        out << ",BOT";
      else
        out << ',' << int(s);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hybridsim
