#pragma once

#include <deque>

#include "stamforge/engine.hpp"
#include "stamforge/reduce_tau1.hpp"
#include "stamforge/reduce_tau2.hpp"

namespace stamforge {

struct TileProvenance {
  uint32_t source = 0;   // source tile index
  ZoneTag zone = ZoneTag::InteriorFiller;
  Coord pos;             // grid cell, or home cell for floating tiles
  bool floating = false;
};

// The compiled system: one macrotile blueprint per source tile, the merged
// output tile set, and the bookkeeping the block representation function
// needs.
struct SimplifiedSystem {
  System source;
  System system;
  int scale = 1;
  std::vector<MacrotileBlueprint> blueprints;
  std::vector<TileProvenance> provenance;               // parallel to output tile set
  std::vector<std::map<Coord, uint32_t>> cell_type;     // per blueprint: grid cell -> type
  std::vector<std::vector<uint32_t>> floating_types;    // per blueprint
};

namespace detail {

inline std::string cell_tile_name(uint32_t source, const Coord& c) {
  return "u" + std::to_string(source) + "x" + std::to_string(c.x) + "y" + std::to_string(c.y);
}

inline void materialize(SimplifiedSystem& ss) {
  auto tiles = std::make_shared<Tileset>();
  ss.cell_type.resize(ss.blueprints.size());
  ss.floating_types.resize(ss.blueprints.size());
  size_t total = 0;
  for (const auto& bpm : ss.blueprints) total += bpm.placed_count() + bpm.floating.size();
  tiles->types.reserve(total);
  tiles->index.reserve(total);
  ss.provenance.reserve(total);
  for (size_t bi = 0; bi < ss.blueprints.size(); ++bi) {
    const MacrotileBlueprint& bpm = ss.blueprints[bi];
    for (int y = 0; y < bpm.m; ++y)
      for (int x = 0; x < bpm.m; ++x) {
        Coord c{x, y};
        if (!bpm.has(c)) continue;
        const CellBuild& cb = bpm.at(c);
        TileType t;
        t.name = cell_tile_name(bpm.source, c);
        t.slots = cb.slots;
        t.rules = cb.rules;
        uint32_t id = tiles->add(std::move(t));
        ss.cell_type[bi].emplace_hint(ss.cell_type[bi].end(), c, id);
        ss.provenance.push_back({bpm.source, cb.zone, c, false});
      }
    for (size_t fi = 0; fi < bpm.floating.size(); ++fi) {
      TileType t = bpm.floating[fi].type;
      t.name = "u" + std::to_string(bpm.source) + "f" + std::to_string(fi);
      uint32_t id = tiles->add(std::move(t));
      ss.floating_types[bi].push_back(id);
      ss.provenance.push_back({bpm.source, bpm.floating[fi].zone, bpm.floating[fi].home, true});
    }
  }
  ss.system.name = ss.source.name + "-simplified";
  ss.system.dim = 2;
  ss.system.tau = ss.source.tau;
  ss.system.tiles = tiles;
  // Cell payloads now live in the output tile set; drop the duplicates and
  // keep only the blueprint metadata (geometry, zones via provenance,
  // exterior map, rule paths).
  for (auto& bpm : ss.blueprints) {
    bpm.cells.clear();
    bpm.cells.shrink_to_fit();
  }
}

}  // namespace detail

// Attempts one floating attachment (or pre-bonded duple dock) of blueprint
// `source_tile` translated by `offset`. Returns false when the gating glues
// are not on yet.
inline bool try_attach_float(const SimplifiedSystem& ss, WorkingState& w, uint32_t source_tile,
                             size_t float_index, const Coord& offset) {
  const MacrotileBlueprint& bpm = ss.blueprints[source_tile];
  const FloatingTile& ft = bpm.floating[float_index];
  const Coord home = ft.home + offset;
  if (w.cells.count(home)) return false;
  if (ft.group < 0) {
    uint32_t ty = ss.floating_types[source_tile][float_index];
    if (w.attach_strength(home, ty) < w.tau) return false;
    w.apply_attach(home, ty);
    return true;
  }
  WorkingState duple;
  duple.tiles = w.tiles;
  duple.tau = w.tau;
  for (size_t fj = 0; fj < bpm.floating.size(); ++fj) {
    if (bpm.floating[fj].group != ft.group) continue;
    const Coord h = bpm.floating[fj].home + offset;
    if (w.cells.count(h)) return false;
    uint32_t ty = ss.floating_types[source_tile][fj];
    if (duple.cells.empty())
      duple.cells.emplace(h, initial_placement(duple.tiles->at(ty), ty));
    else
      duple.apply_attach(h, ty);
  }
  if (w.dock_strength(duple, {0, 0}) < w.tau) return false;
  w.apply_dock(duple, {0, 0});
  return true;
}

// Drains pending actions and attaches every floating tile whose gating
// glues have turned on, to fixpoint. `blocks` lists the macrotile blocks of
// the state as (block coordinate, source tile).
inline void settle(const SimplifiedSystem& ss, WorkingState& w,
                   const std::vector<std::pair<Coord, uint32_t>>& blocks) {
  bool progress = true;
  while (progress) {
    w.drain();
    progress = false;
    for (const auto& [bc, source] : blocks) {
      const Coord offset{bc.x * ss.scale, bc.y * ss.scale};
      for (size_t fi = 0; fi < ss.blueprints[source].floating.size(); ++fi)
        if (try_attach_float(ss, w, source, fi, offset)) progress = true;
    }
  }
}

// Grows one complete macrotile in place, starting from the given seed cell
// (default: the grid's least cell), draining all signals. Event-driven: a
// cell is retried whenever a neighbor attaches or an adjacent glue turns on.
// Every step goes through the certified engine, so a completed run is a
// valid assembly sequence of the output system.
inline WorkingState grow_macrotile(const SimplifiedSystem& ss, uint32_t source_tile) {
  const MacrotileBlueprint& bpm = ss.blueprints[source_tile];
  const auto& types = ss.cell_type[source_tile];

  WorkingState w;
  w.tiles = ss.system.tiles;
  w.tau = ss.system.tau;

  std::map<Coord, uint32_t> want = types;            // unplaced grid cells
  std::multimap<Coord, size_t> floats;               // home -> floating index
  for (size_t fi = 0; fi < bpm.floating.size(); ++fi)
    floats.emplace(bpm.floating[fi].home, fi);

  std::deque<Coord> queue;
  std::set<Coord> queued;
  auto enqueue = [&](const Coord& c) {
    if (queued.insert(c).second) queue.push_back(c);
  };

  // Seed with the blueprint's designated growth cell.
  {
    auto it = want.find(bpm.seed);
    if (it == want.end()) it = want.begin();
    w.cells.emplace(it->first, initial_placement(ss.system.tiles->at(it->second), it->second));
    for (Side s : {Side::N, Side::E, Side::S, Side::W}) enqueue(it->first + side_offset(s));
    want.erase(it);
  }

  auto drain_and_requeue = [&]() {
    while (!w.pending.empty()) {
      PendingAction act = w.pending.front();
      w.apply_execute(0);
      enqueue(act.loc + side_offset(act.side));
    }
  };

  // A duple group attaches as a pre-bonded unit; its seam is the sum over
  // both member cells.
  auto try_float = [&](size_t fi) -> bool {
    const FloatingTile& ft = bpm.floating[fi];
    if (w.cells.count(ft.home)) return false;
    if (ft.group < 0) {
      if (w.attach_strength(ft.home, ss.floating_types[source_tile][fi]) < w.tau) return false;
      w.apply_attach(ft.home, ss.floating_types[source_tile][fi]);
      for (Side s : {Side::N, Side::E, Side::S, Side::W}) enqueue(ft.home + side_offset(s));
      return true;
    }
    // Collect the group (pairs in practice).
    WorkingState duple;
    duple.tiles = w.tiles;
    duple.tau = w.tau;
    std::vector<Coord> homes;
    for (size_t fj = 0; fj < bpm.floating.size(); ++fj) {
      if (bpm.floating[fj].group != ft.group) continue;
      const Coord home = bpm.floating[fj].home;
      if (w.cells.count(home)) return false;
      uint32_t ty = ss.floating_types[source_tile][fj];
      if (duple.cells.empty())
        duple.cells.emplace(home, initial_placement(duple.tiles->at(ty), ty));
      else
        duple.apply_attach(home, ty);
      homes.push_back(home);
    }
    if (w.dock_strength(duple, {0, 0}) < w.tau) return false;
    w.apply_dock(duple, {0, 0});
    for (const Coord& home : homes)
      for (Side s : {Side::N, Side::E, Side::S, Side::W}) enqueue(home + side_offset(s));
    return true;
  };

  drain_and_requeue();
  while (!queue.empty()) {
    Coord c = queue.front();
    queue.pop_front();
    queued.erase(c);
    if (w.cells.count(c)) continue;
    bool attached = false;
    if (auto it = want.find(c); it != want.end()) {
      if (w.attach_strength(c, it->second) >= w.tau) {
        w.apply_attach(c, it->second);
        want.erase(it);
        attached = true;
        for (Side s : {Side::N, Side::E, Side::S, Side::W}) enqueue(c + side_offset(s));
      }
    } else {
      auto [flo, fhi] = floats.equal_range(c);
      for (auto it = flo; it != fhi && !attached; ++it) attached = try_float(it->second);
    }
    if (attached) drain_and_requeue();
  }
  return w;
}

// Expands a source supertile into its macrotile realization: every source
// tile becomes a complete drained macrotile, docked in a greedy stable order
// mirroring a source-side assembly sequence, with all cross-macrotile
// signals drained. Throws if the expansion cannot be carried out by valid
// steps (e.g. the source supertile is not drained or not reachable).
inline WorkingState expand_supertile(const SimplifiedSystem& ss, const ActiveSupertile& src) {
  if (!src.pending.empty())
    throw std::invalid_argument("expand_supertile: source supertile must be drained");
  const int m = ss.scale;

  // Greedy source-side order: start anywhere, then repeatedly dock a tile
  // whose seam against the partial source assembly meets tau.
  const Assembly& sa = src.assembly;
  std::vector<size_t> order;
  std::vector<bool> placed(sa.size(), false);
  WorkingState tsim;  // source-side replay, to know glue states at each dock
  tsim.tiles = ss.source.tiles;
  tsim.tau = ss.source.tau;
  order.push_back(0);
  placed[0] = true;
  tsim.cells.emplace(sa.cells[0].first,
                     initial_placement(sa.tiles->at(sa.cells[0].second.type),
                                       sa.cells[0].second.type));
  tsim.drain();
  while (order.size() < sa.size()) {
    bool progress = false;
    for (size_t i = 0; i < sa.size() && !progress; ++i) {
      if (placed[i]) continue;
      if (tsim.attach_strength(sa.cells[i].first, sa.cells[i].second.type) >= tsim.tau) {
        tsim.apply_attach(sa.cells[i].first, sa.cells[i].second.type);
        tsim.drain();
        order.push_back(i);
        placed[i] = true;
        progress = true;
      }
    }
    if (!progress)
      throw std::invalid_argument("expand_supertile: no stable assembly order for the source");
  }
  // The replayed end state must match the requested supertile.
  for (const auto& [c, p] : sa.cells) {
    auto it = tsim.cells.find(c);
    if (it == tsim.cells.end() || !(it->second == p))
      throw std::invalid_argument("expand_supertile: source supertile is not a drained producible");
  }

  // Mirror the order with macrotiles; after every dock, drain and attach
  // the signal-gated floating tiles until nothing more fires.
  WorkingState w;
  w.tiles = ss.system.tiles;
  w.tau = ss.system.tau;
  std::vector<std::pair<Coord, uint32_t>> blocks;
  for (size_t k = 0; k < order.size(); ++k) {
    const auto& [tc, tp] = sa.cells[order[k]];
    WorkingState block = grow_macrotile(ss, tp.type);
    Coord offset{tc.x * m, tc.y * m};
    if (k == 0) {
      for (auto& [c, p] : block.cells) w.cells.emplace(c + offset, std::move(p));
      w.steps += block.steps;
    } else {
      w.steps += block.steps;
      w.apply_dock(block, offset);
    }
    blocks.push_back({tc, tp.type});
    settle(ss, w, blocks);
  }
  return w;
}

// The tile-set compiler: dispatches on the temperature, builds one blueprint
// per source tile (tau = 1: base construction, boundary circuits, two-signal
// reduction at doubled scale; tau >= 2: one-signal cooperation construction),
// and assembles the output system. Non-default initial supertiles are
// expanded into combinations of the corresponding macrotiles.
inline SimplifiedSystem simplify(const System& sys) {
  auto diags = validate_tileset(*sys.tiles);
  if (!diags.empty())
    throw std::invalid_argument("simplify: input rejected: " + diags[0].message);

  SimplifiedSystem ss;
  ss.source = sys;
  auto cat = std::make_shared<GlueCatalog>(build_catalog(sys));
  for (uint32_t ti = 0; ti < sys.tiles->size(); ++ti) {
    if (sys.tau == 1) {
      MacrotileBlueprint base = bp::build_macrotile(sys, ti, cat);
      bp::print_boundary_circuits(base);
      ss.blueprints.push_back(bp::reduce_signals_tau1(base));
    } else {
      MacrotileBlueprint base = bp::build_macrotile(sys, ti, cat);
      ss.blueprints.push_back(bp::reduce_signals_tau_ge2(base, sys.tau));
    }
  }
  ss.scale = ss.blueprints.front().m;
  detail::materialize(ss);

  // Expand any explicit initial configuration.
  for (const auto& e : sys.initial) {
    if (e.supertile.size() == 1 && e.supertile.pending.empty()) {
      // Singleton entries map to the default singleton pool.
      continue;
    }
    InitialEntry out_entry;
    out_entry.count = e.count;
    out_entry.infinite = e.infinite;
    out_entry.supertile = expand_supertile(ss, e.supertile).freeze();
    ss.system.initial.push_back(std::move(out_entry));
  }
  return ss;
}

}  // namespace stamforge
