#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "stamforge/assembly.hpp"

using namespace stamforge;
using fixtures::make_tile;

namespace {

// Assembly builder for tests: all tiles in their initial states.
Assembly place(const TilesetPtr& ts, std::initializer_list<std::pair<Coord, const char*>> cells) {
  Assembly a;
  a.tiles = ts;
  for (auto& [c, name] : cells) {
    int i = ts->find(name);
    REQUIRE(i >= 0);
    a.cells.push_back({c, initial_placement(ts->at(uint32_t(i)), uint32_t(i))});
  }
  a.sort_cells();
  return a;
}

TilesetPtr grid_tileset(int strength) {
  // A single tile type bristling with always-on glues on all four sides,
  // so arbitrary polyominoes can be assembled for stability tests.
  auto ts = std::make_shared<Tileset>();
  TileType t;
  t.name = "G";
  for (Side s : {Side::N, Side::E, Side::S, Side::W})
    t.slots.push_back({s, {"b", strength}, GlueState::On});
  ts->add(std::move(t));
  return ts;
}

}  // namespace

TEST_CASE("glues_match compares label and strength") {
  CHECK(glues_match({"x", 1}, {"x", 1}));
  CHECK_FALSE(glues_match({"x", 1}, {"x", 2}));
  CHECK_FALSE(glues_match({"x", 1}, {"y", 1}));
}

TEST_CASE("binding graph of a single tile") {
  auto ts = grid_tileset(1);
  Assembly a = place(ts, {{{5, 7}, "G"}});
  auto g = binding_graph(a);
  CHECK(g.vertices.size() == 1);
  CHECK(g.edges.empty());
}

TEST_CASE("binding graph sums matched pairs on an abutting side") {
  // Two tiles whose abutting sides match on-glues (x,1) and (y,1): one edge
  // of weight 2, enumerated by hand: both pairs match, 1 + 1.
  auto ts = std::make_shared<Tileset>();
  ts->add(make_tile("L", {{Side::E, {"x", 1}, GlueState::On}, {Side::E, {"y", 1}, GlueState::On}}));
  ts->add(make_tile("R", {{Side::W, {"x", 1}, GlueState::On}, {Side::W, {"y", 1}, GlueState::On}}));
  Assembly a = place(ts, {{{0, 0}, "L"}, {{1, 0}, "R"}});
  auto g = binding_graph(a);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].weight == 2);
}

TEST_CASE("binding graph weight is symmetric between endpoints") {
  auto ts = grid_tileset(2);
  Assembly a = place(ts, {{{0, 0}, "G"}, {{1, 0}, "G"}, {{1, 1}, "G"}});
  for (size_t i = 0; i < a.size(); ++i) {
    for (Side s : {Side::N, Side::E, Side::S, Side::W}) {
      int j = a.find(a.cells[i].first + side_offset(s));
      if (j < 0) continue;
      CHECK(bond_strength(a, i, s) == bond_strength(a, size_t(j), opposite(s)));
    }
  }
}

TEST_CASE("tau stability basics") {
  auto ts = grid_tileset(1);
  SECTION("single tile is stable at every temperature") {
    Assembly a = place(ts, {{{0, 0}, "G"}});
    CHECK(is_tau_stable(a, 1));
    CHECK(is_tau_stable(a, 2));
    CHECK(is_tau_stable(a, 7));
  }
  SECTION("three-tile row of strength-1 bonds is unstable at tau=2") {
    Assembly a = place(ts, {{{0, 0}, "G"}, {{1, 0}, "G"}, {{2, 0}, "G"}});
    CHECK(is_tau_stable(a, 1));
    CHECK_FALSE(is_tau_stable(a, 2));
  }
  SECTION("2x2 ring of strength-1 bonds is stable at tau=2") {
    // Oracle: brute force over all 2^4 - 2 bipartitions gives min cut 2.
    Assembly a = place(ts, {{{0, 0}, "G"}, {{1, 0}, "G"}, {{0, 1}, "G"}, {{1, 1}, "G"}});
    auto g = binding_graph(a);
    REQUIRE(g.edges.size() == 4);
    CHECK(min_cut_bruteforce(4, g.edges) == 2);
    CHECK(is_tau_stable(a, 2));
    CHECK_FALSE(is_tau_stable(a, 3));
  }
  SECTION("disconnected placements are never stable") {
    Assembly a = place(ts, {{{0, 0}, "G"}, {{2, 0}, "G"}});
    CHECK_FALSE(is_tau_stable(a, 1));
  }
}

TEST_CASE("min-cut oracle equivalence on random polyominoes") {
  // is_tau_stable must agree with the exhaustive-bipartition brute force for
  // assemblies of <= 8 tiles at tau in {1,2,3}.
  std::mt19937_64 rng(20260810);
  auto ts = grid_tileset(1);
  auto ts2 = grid_tileset(2);
  for (int round = 0; round < 500; ++round) {
    const TilesetPtr& set = (round % 2 == 0) ? ts : ts2;
    // Random connected polyomino of 2..8 cells.
    size_t n = 2 + rng() % 7;
    std::vector<Coord> cells{{0, 0}};
    while (cells.size() < n) {
      Coord base = cells[rng() % cells.size()];
      Side s = Side(rng() % 4);
      Coord c = base + side_offset(s);
      if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
    }
    Assembly a;
    a.tiles = set;
    for (Coord c : cells) a.cells.push_back({c, initial_placement(set->at(0), 0)});
    a.sort_cells();
    auto g = binding_graph(a);
    long long brute = graph_connected(g.vertices.size(), g.edges)
                          ? min_cut_bruteforce(g.vertices.size(), g.edges)
                          : 0;
    for (int tau = 1; tau <= 3; ++tau) {
      CAPTURE(round, n, tau);
      CHECK(is_tau_stable(a, tau) == (brute >= tau));
    }
  }
}

TEST_CASE("brute-force and Stoer-Wagner min cut agree on the overlap range") {
  std::mt19937_64 rng(7);
  auto ts = grid_tileset(1);
  for (int round = 0; round < 60; ++round) {
    size_t n = 4 + rng() % 9;  // 4..12 tiles
    std::vector<Coord> cells{{0, 0}};
    while (cells.size() < n) {
      Coord base = cells[rng() % cells.size()];
      Coord c = base + side_offset(Side(rng() % 4));
      if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
    }
    Assembly a;
    a.tiles = ts;
    for (Coord c : cells) a.cells.push_back({c, initial_placement(ts->at(0), 0)});
    a.sort_cells();
    auto g = binding_graph(a);
    if (!graph_connected(g.vertices.size(), g.edges)) continue;
    CHECK(min_cut_bruteforce(n, g.edges) == min_cut_stoer_wagner(n, g.edges));
  }
}

TEST_CASE("canonicalize places the row-major least coordinate at the origin") {
  auto ts = grid_tileset(1);
  SECTION("single tile at (5,7) moves to the origin") {
    auto s = canonicalize(place(ts, {{{5, 7}, "G"}}));
    CHECK(s.assembly.cells.front().first == Coord{0, 0});
  }
  SECTION("translates of a duple have identical canonical forms") {
    auto s1 = canonicalize(place(ts, {{{0, 0}, "G"}, {{1, 0}, "G"}}));
    auto s2 = canonicalize(place(ts, {{{40, -3}, "G"}, {{41, -3}, "G"}}));
    CHECK(s1 == s2);
  }
  SECTION("L-tromino canonical form is offset independent") {
    auto ref = canonicalize(place(ts, {{{0, 0}, "G"}, {{0, 1}, "G"}, {{1, 0}, "G"}}));
    for (Coord u : {Coord{3, 4}, Coord{-7, 2}, Coord{100, -100}, Coord{-1, -1}}) {
      auto s = canonicalize(
          place(ts, {{Coord{0, 0} + u, "G"}, {Coord{0, 1} + u, "G"}, {Coord{1, 0} + u, "G"}}));
      CHECK(s == ref);
    }
  }
  SECTION("translation invariance over random offsets") {
    std::mt19937_64 rng(99);
    auto ref = canonicalize(place(ts, {{{0, 0}, "G"}, {{1, 0}, "G"}, {{1, 1}, "G"}}));
    for (int i = 0; i < 64; ++i) {
      int dx = int(rng() % 201) - 100, dy = int(rng() % 201) - 100;
      auto s = canonicalize(place(
          ts, {{{dx, dy}, "G"}, {{dx + 1, dy}, "G"}, {{dx + 1, dy + 1}, "G"}}));
      CHECK(s == ref);
    }
  }
  SECTION("idempotence") {
    auto s = canonicalize(place(ts, {{{9, 9}, "G"}, {{10, 9}, "G"}}));
    auto s2 = canonicalize(s.assembly, s.pending);
    CHECK(s == s2);
  }
}

TEST_CASE("validate_tileset diagnostics") {
  SECTION("well-formed echo gadget has an empty report") {
    auto sys = fixtures::echo();
    CHECK(validate_tileset(*sys.tiles).empty());
  }
  SECTION("dangling rule target") {
    auto ts = std::make_shared<Tileset>();
    ts->add(make_tile("T", {{Side::E, {"x", 1}, GlueState::On}},
                      {{Side::E, "x", Side::N, "nope"}}));
    auto diags = validate_tileset(*ts);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "dangling-target");
  }
  SECTION("deactivation is rejected as not STAM+") {
    auto ts = std::make_shared<Tileset>();
    ts->add(make_tile("T",
                      {{Side::E, {"x", 1}, GlueState::On}, {Side::N, {"y", 1}, GlueState::On}},
                      {{Side::E, "x", Side::N, "y", true}}));
    auto diags = validate_tileset(*ts);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "not-stam-plus");
  }
  SECTION("negative strength and duplicate (side,label) slots") {
    auto ts = std::make_shared<Tileset>();
    ts->add(make_tile("T", {{Side::E, {"x", -1}, GlueState::On},
                            {Side::E, {"x", -1}, GlueState::Latent}}));
    auto diags = validate_tileset(*ts);
    bool neg = false, dup = false;
    for (auto& d : diags) {
      neg |= d.code == "negative-strength";
      dup |= d.code == "duplicate-slot";
    }
    CHECK(neg);
    CHECK(dup);
  }
  SECTION("3D sides are rejected with a diagnostic") {
    auto ts = std::make_shared<Tileset>();
    ts->add(make_tile("T", {{Side::U, {"x", 1}, GlueState::On}}));
    auto diags = validate_tileset(*ts);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "3d-out-of-scope");
  }
}
