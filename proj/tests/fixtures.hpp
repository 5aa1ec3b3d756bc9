#pragma once

// Shared in-memory fixture systems for the unit and acceptance suites.
// The .stam files under fixtures/ mirror these definitions; test_io checks
// that the two stay in sync.

#include "stamforge/assembly.hpp"

namespace fixtures {

using namespace stamforge;

inline TileType make_tile(std::string name, std::vector<GlueSlot> slots,
                          std::vector<TransitionRule> rules = {}) {
  TileType t;
  t.name = std::move(name);
  t.slots = std::move(slots);
  t.rules = std::move(rules);
  return t;
}

inline System make_system(std::vector<TileType> types, int tau, std::string name) {
  auto ts = std::make_shared<Tileset>();
  for (auto& t : types) ts->add(std::move(t));
  System sys;
  sys.name = std::move(name);
  sys.tiles = ts;
  sys.tau = tau;
  return sys;
}

// Two tiles joined by a single strength-1 glue x.
inline System duple1() {
  return make_system(
      {make_tile("A", {{Side::E, {"x", 1}, GlueState::On}}),
       make_tile("B", {{Side::W, {"x", 1}, GlueState::On}})},
      1, "duple1");
}

// Same shape at temperature 2 with a strength-2 glue.
inline System duple2() {
  return make_system(
      {make_tile("A", {{Side::E, {"x", 2}, GlueState::On}}),
       make_tile("B", {{Side::W, {"x", 2}, GlueState::On}})},
      2, "duple2");
}

// Echo gadget: S stimulates A, whose west g binding activates its east g2;
// the g2 binding to B triggers f on B. No fan-out anywhere. The east glue
// carries its own label so the standalone system stays directed.
inline System echo() {
  return make_system(
      {make_tile("S", {{Side::E, {"g", 1}, GlueState::On}}),
       make_tile("A",
                 {{Side::W, {"g", 1}, GlueState::On}, {Side::E, {"g2", 1}, GlueState::Latent}},
                 {{Side::W, "g", Side::E, "g2"}}),
       make_tile("B", {{Side::W, {"g2", 1}, GlueState::On}, {Side::N, {"f", 1}, GlueState::Latent}},
                 {{Side::W, "g2", Side::N, "f"}})},
      1, "echo");
}

// Fan-out fixture: the west f of tile B fires two glues. Directed; the
// unique terminal assembly is the 2x2 square A(0,0) B(1,0) D(0,1) C(1,1)
// with all three signals delivered. B's second branch lands on its west
// side, which is permanently blocked by A, so it can never seed growth.
inline System nosplit() {
  return make_system(
      {make_tile("A", {{Side::E, {"f", 1}, GlueState::On}}),
       make_tile("B",
                 {{Side::W, {"f", 1}, GlueState::On},
                  {Side::N, {"q", 1}, GlueState::Latent},
                  {Side::W, {"q", 1}, GlueState::Latent}},
                 {{Side::W, "f", Side::N, "q"}, {Side::W, "f", Side::W, "q"}}),
       make_tile("C",
                 {{Side::S, {"q", 1}, GlueState::On}, {Side::W, {"q", 1}, GlueState::Latent}},
                 {{Side::S, "q", Side::W, "q"}}),
       make_tile("D", {{Side::E, {"q", 1}, GlueState::On}})},
      1, "nosplit");
}

// Pumping fixture: B repeats eastward forever once seeded by A.
inline System pumping() {
  return make_system(
      {make_tile("A", {{Side::E, {"f", 1}, GlueState::On}}),
       make_tile("B",
                 {{Side::W, {"f", 1}, GlueState::On}, {Side::E, {"f", 1}, GlueState::Latent}},
                 {{Side::W, "f", Side::E, "f"}})},
      1, "pumping");
}

// Latent-target fixture: binding a activates b.
inline System latch() {
  return make_system(
      {make_tile("A", {{Side::E, {"a", 1}, GlueState::On}}),
       make_tile("B", {{Side::W, {"a", 1}, GlueState::On}, {Side::N, {"b", 1}, GlueState::Latent}},
                 {{Side::W, "a", Side::N, "b"}})},
      1, "latch");
}

}  // namespace fixtures
