#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "stamforge/simplifier.hpp"

using namespace stamforge;

namespace {

int count_on_exterior(const SimplifiedSystem& ss, const WorkingState& w, uint32_t source) {
  int n = 0;
  for (const auto& e : ss.blueprints[source].exterior) {
    const PlacedTile* p = w.at(e.cell);
    if (!p) continue;
    const TileType& t = w.tiles->at(p->type);
    for (size_t si = 0; si < t.slots.size(); ++si)
      if (t.slots[si].side == e.side && t.slots[si].glue.label.rfind("X", 0) == 0 &&
          p->states[si] == GlueState::On)
        ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("glue catalog") {
  SECTION("single east glue") {
    auto sys = fixtures::make_system(
        {fixtures::make_tile("A", {{Side::E, {"x", 1}, GlueState::On}})}, 1, "one");
    auto cat = build_catalog(sys);
    CHECK(cat.size() == 1);
    CHECK(cat.directional_size() == 1);
    CHECK(cat.index_of("x") == 1);
    CHECK(cat.on_side(Side::E, 1));
    CHECK_FALSE(cat.on_side(Side::W, 1));
  }
  SECTION("noSplit directional multiset") {
    auto cat = build_catalog(fixtures::nosplit());
    // f on E,W; q on N,S,E,W  ->  |G| = 2, |multiset| = 6.
    CHECK(cat.size() == 2);
    CHECK(cat.directional_size() == 6);
  }
  SECTION("deterministic lexicographic ordering") {
    auto cat = build_catalog(fixtures::echo());
    CHECK(cat.glues[1].label == "f");
    CHECK(cat.glues[2].label == "g");
    CHECK(cat.glues[3].label == "g2");
  }
  SECTION("empty tile set is rejected") {
    auto ts = std::make_shared<Tileset>();
    System sys;
    sys.tiles = ts;
    CHECK_THROWS_AS(build_catalog(sys), std::invalid_argument);
  }
}

TEST_CASE("base macrotile blueprint") {
  auto sys = fixtures::echo();
  auto cat = std::make_shared<GlueCatalog>(build_catalog(sys));
  // g on E and W, g2 on E and W, f on N.
  const int K = cat->directional_size();
  REQUIRE(K == 5);

  for (uint32_t ti = 0; ti < sys.tiles->size(); ++ti) {
    auto bpm = bp::build_macrotile(sys, ti, cat);
    CAPTURE(ti);

    SECTION("scale law: side length 10K^2+2 for tile " + std::to_string(ti)) {
      CHECK(bpm.m == 10 * K * K + 2);
      CHECK(int(bpm.placed_count()) == bpm.m * bpm.m);
    }
    SECTION("structure: frames, zones, interior for tile " + std::to_string(ti)) {
      int frames = 0, fanout = 0, fanin = 0;
      for (int y = 0; y < bpm.m; ++y)
        for (int x = 0; x < bpm.m; ++x) {
          if (!bpm.has({x, y})) continue;
          ZoneTag z = bpm.at({x, y}).zone;
          if (z == ZoneTag::Frame) ++frames;
          if (z == ZoneTag::FanOutZone) ++fanout;
          if (z == ZoneTag::FanInZone) ++fanin;
        }
      // One single-tile-wide frame ring per (side, glue) membership.
      int expect_frames = 0;
      for (int mi = 0; mi < K; ++mi) expect_frames += 4 * (bpm.m - 1 - 2 * (2 + mi));
      CHECK(frames == expect_frames);
      // Exactly K fan-out and K fan-in cells per (side, glue) membership.
      CHECK(fanout == K * K);
      CHECK(fanin == K * K);
    }
    SECTION("pre-circuit signal budget for tile " + std::to_string(ti)) {
      int worst = 0;
      for (const auto& cb : bpm.cells) worst = std::max(worst, int(cb.rules.size()));
      CHECK(worst <= 2);
    }
  }
}

TEST_CASE("boundary circuits stay within the 4-signal budget") {
  auto sys = fixtures::nosplit();
  auto cat = std::make_shared<GlueCatalog>(build_catalog(sys));
  for (uint32_t ti = 0; ti < sys.tiles->size(); ++ti) {
    auto bpm = bp::build_macrotile(sys, ti, cat);
    bp::print_boundary_circuits(bpm);
    int worst = 0;
    for (const auto& cb : bpm.cells) worst = std::max(worst, int(cb.rules.size()));
    CHECK(worst <= 4);
  }
}

TEST_CASE("tau=1 simplify: Table 1 bounds") {
  for (auto sys : {fixtures::duple1(), fixtures::echo(), fixtures::latch()}) {
    CAPTURE(sys.name);
    auto ss = simplify(sys);
    auto check = is_n_simplified(*ss.system.tiles, 2);
    CHECK(check.ok);
    CHECK(check.max_signals <= 2);
    CHECK(check.max_fan_in <= 2);
    // At most one of the two witness classes may be present.
    CHECK(!(check.has_fan_out && check.has_mutual_activation));
    CHECK_FALSE(check.has_fan_out);

    // Scale law: the reduction doubles the base side length.
    int K = build_catalog(sys).directional_size();
    CHECK(ss.scale == 2 * (10 * K * K + 2));

    // The output validates as a well-formed STAM+ set.
    CHECK(validate_tileset(*ss.system.tiles).empty());
  }
}

TEST_CASE("tau=1 simplify preserves the impossibility witness (noSplit)") {
  auto ss = simplify(fixtures::nosplit());
  auto rep = analyze(*ss.system.tiles);
  // Any simulation of a signaling system retains fan-out or mutual
  // activation; ours keeps mutual activation and eliminates fan-out.
  CHECK((!rep.fan_out.empty() || !rep.mutual_activation.empty()));
  CHECK(rep.fan_out.empty());
  CHECK(is_n_simplified(*ss.system.tiles, 2).ok);
}

TEST_CASE("macrotile growth: a complete tile assembles and drains") {
  auto sys = fixtures::echo();
  auto ss = simplify(sys);
  for (uint32_t ti = 0; ti < sys.tiles->size(); ++ti) {
    CAPTURE(sys.tiles->at(ti).name);
    WorkingState w = grow_macrotile(ss, ti);
    CHECK(w.pending.empty());
    // All grid cells placed.
    CHECK(w.cells.size() >= ss.blueprints[ti].placed_count());
    // Exterior on-set equals the source tile's initially-on slots.
    int want_on = 0;
    for (const auto& s : sys.tiles->at(ti).slots)
      if (s.initial_state == GlueState::On) ++want_on;
    CHECK(count_on_exterior(ss, w, ti) == want_on);
  }
}

TEST_CASE("signal-source conservation: rule paths are a bijection on rules") {
  auto sys = fixtures::nosplit();
  auto ss = simplify(sys);
  for (uint32_t ti = 0; ti < sys.tiles->size(); ++ti) {
    const auto& bpm = ss.blueprints[ti];
    REQUIRE(bpm.rule_paths.size() == sys.tiles->at(ti).rules.size());
    for (const auto& path : bpm.rule_paths) CHECK_FALSE(path.empty());
  }
}
