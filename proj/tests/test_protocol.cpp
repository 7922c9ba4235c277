#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hybridsim/model.hpp"
#include "hybridsim/protocol.hpp"

using namespace hybridsim;

namespace {

TallyView tally_of(int zeros, int ones) {
  TallyView t;
  t.zeros = zeros;
  t.ones = ones;
  return t;
}

std::vector<std::optional<Payload>> row_of(std::vector<std::optional<Payload>> row) {
  return row;
}

}  // namespace

TEST_CASE("tally majority ties break toward zero") {
  CHECK(tally_of(2, 2).majority_bit() == 0);
  CHECK(tally_of(1, 2).majority_bit() == 1);
  CHECK(tally_of(2, 2).majority_count() == 2);
  CHECK(tally_of(2, 2).minority_count() == 2);
  CHECK(tally_of(0, 3).minority_count() == 0);
}

TEST_CASE("round 1 sends the value unchanged") {
  CHECK(ca_round1_slot(0) == 0);
  CHECK(ca_round1_slot(1) == 1);
}

TEST_CASE("omission round 2 proposes only on a unanimous view") {
  CHECK(ca_omission_round2_slot(tally_of(0, 4)) == 1);
  CHECK(ca_omission_round2_slot(tally_of(1, 2)) == kAbsent);
  // Everything else dropped: the processor's own bit alone is unanimous.
  CHECK(ca_omission_round2_slot(tally_of(1, 0)) == 0);
}

TEST_CASE("byzantine round 2 thresholds") {
  // n=5, f=1: 4 vs 1 proposes, 3 vs 2 and 2 vs 0 do not.
  CHECK(ca_byz_round2_slot(tally_of(1, 4), 5, 1) == 1);
  CHECK(ca_byz_round2_slot(tally_of(2, 3), 5, 1) == kAbsent);
  CHECK(ca_byz_round2_slot(tally_of(0, 2), 5, 1) == kAbsent);
}

TEST_CASE("finalize thresholds, omission model") {
  const Config cfg = make_config(ModelKind::OmissionHybrid, 5, 1, 1, 2);
  SUBCASE("majority of n commits") {
    const CAState st = ca_finalize(tally_of(0, 3), cfg, 0);
    CHECK(st.e == Grade::Commit);
    CHECK(st.v == 1);
  }
  SUBCASE("any proposal updates the value without commit") {
    const CAState st = ca_finalize(tally_of(0, 2), cfg, 0);
    CHECK(st.e == Grade::Adopt);
    CHECK(st.v == 1);
  }
  SUBCASE("nothing received keeps the original") {
    const Config c4 = make_config(ModelKind::OmissionHybrid, 4, 1, 1, 2);
    const CAState st = ca_finalize(tally_of(0, 0), c4, 1);
    CHECK(st.e == Grade::Adopt);
    CHECK(st.v == 1);
  }
}

TEST_CASE("finalize thresholds, byzantine model") {
  Config cfg = make_config(ModelKind::ByzantineHybrid, 5, 1, 0, 2);
  SUBCASE("below quarter keeps the original value") {
    // 1 proposal < n/4 = 1.25
    const CAState st = ca_finalize(tally_of(0, 1), cfg, 0);
    CHECK(st.e == Grade::Adopt);
    CHECK(st.v == 0);
  }
  SUBCASE("quarter updates, majority commits") {
    CHECK(ca_finalize(tally_of(0, 2), cfg, 0).v == 1);  // 4*2 >= 5
    CHECK(ca_finalize(tally_of(0, 2), cfg, 0).e == Grade::Adopt);
    CHECK(ca_finalize(tally_of(0, 3), cfg, 0).e == Grade::Commit);
  }
  SUBCASE("binary relaxation knob lowers the floor to any proposal") {
    cfg.byz_adopt_any = true;
    const CAState st = ca_finalize(tally_of(0, 1), cfg, 0);
    CHECK(st.v == 1);
    CHECK(st.e == Grade::Adopt);
  }
}

TEST_CASE("coordinator assignment is the cyclic 1-based shift") {
  CHECK(coordinator(1, 1, 5) == 1);
  CHECK(coordinator(1, 2, 5) == 2);
  CHECK(coordinator(5, 1, 5) == 5);  // residue 0 maps to p_n
  CHECK(coordinator(5, 2, 5) == 1);
  CHECK(coordinator(6, 1, 5) == 1);
  // Distinct coordinators per phase as long as k <= n.
  for (int phase = 1; phase <= 12; ++phase)
    CHECK(coordinator(phase, 1, 5) != coordinator(phase, 2, 5));
}

TEST_CASE("vsc payloads by role") {
  const Config cfg = make_config(ModelKind::OmissionHybrid, 5, 1, 1, 2);
  ProcState st = vsc_init(1, {1, 0});

  Payload p1 = vsc_payload(st, cfg);
  CHECK(p1.role == RoundRole::CaRound1);
  CHECK(p1.slots == std::vector<Slot>{1, 0});

  st.role = RoundRole::CaRound2;
  st.round2_proposal = {kAbsent, 0};
  Payload p2 = vsc_payload(st, cfg);
  CHECK(p2.slots == std::vector<Slot>{kAbsent, 0});

  // Phase 1 coordinators are p1 (index 1) and p2 (index 2): p1 sends only
  // its first entry, p3 sends nothing.
  st.role = RoundRole::Coord;
  st.ca = {CAState{1, Grade::Commit}, CAState{0, Grade::Adopt}};
  Payload pc = vsc_payload(st, cfg);
  CHECK(pc.slots == std::vector<Slot>{1, kAbsent});

  ProcState st3 = vsc_init(3, {1, 1});
  st3.role = RoundRole::Coord;
  CHECK(vsc_payload(st3, cfg).all_absent());
}

TEST_CASE("coordinator-round update rules") {
  const Config cfg = make_config(ModelKind::OmissionHybrid, 5, 1, 1, 2);
  // p3's view of the coordinator round of phase 1: coordinators p1, p2.
  ProcState st = vsc_init(3, {1, 0});
  st.role = RoundRole::Coord;

  Payload coord1 = absent_payload(RoundRole::Coord, 2);
  coord1.slots[0] = 0;  // p1 coordinates index 1, sends 0
  Payload coord2 = absent_payload(RoundRole::Coord, 2);
  coord2.slots[1] = 1;  // p2 coordinates index 2, sends 1

  SUBCASE("commit ignores the coordinator") {
    st.ca = {CAState{1, Grade::Commit}, CAState{0, Grade::Adopt}};
    const ProcState next = vsc_step(
        st, row_of({coord1, coord2, std::nullopt, std::nullopt, std::nullopt}),
        cfg);
    CHECK(next.value[0] == 1);  // kept its committed 1, coordinator said 0
    CHECK(next.value[1] == 1);  // adopted the index-2 coordinator
    CHECK(next.phase == 2);
    CHECK(next.role == RoundRole::CaRound1);
  }
  SUBCASE("adopt with a silent coordinator keeps the value") {
    st.ca = {CAState{0, Grade::Adopt}, CAState{0, Grade::Adopt}};
    const ProcState next = vsc_step(
        st,
        row_of({std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                std::nullopt}),
        cfg);
    CHECK(next.value == std::vector<Slot>{1, 0});
  }
}

TEST_CASE("outputs follow the final grades") {
  const Config cfg = make_config(ModelKind::OmissionHybrid, 5, 1, 1, 2);
  ProcState st = vsc_init(2, {1, 0});
  st.ca = {CAState{1, Grade::Commit}, CAState{0, Grade::Adopt}};
  st.value = {1, 0};

  CHECK_THROWS_AS(vsc_output(st, cfg), std::logic_error);

  st.phase = cfg.phases + 1;
  const OutputVector out = vsc_output(st, cfg);
  CHECK(out.o == std::vector<Slot>{1, kBot});

  st.ca[1].e = Grade::Commit;
  CHECK(vsc_output(st, cfg).o == std::vector<Slot>{1, 0});
}
