#pragma once

#include <unordered_map>

#include "stamforge/dynamics.hpp"

namespace stamforge {

// Mutable assembly state for building long certified step sequences without
// per-step copies. Implements exactly the step semantics of execute_pending
// and single-tile attachment; every apply_* throws if the step is not a
// valid successor, so a completed run certifies the whole sequence.
struct WorkingState {
  TilesetPtr tiles;
  int tau = 1;
  std::unordered_map<Coord, PlacedTile, CoordHash> cells;
  std::vector<PendingAction> pending;
  size_t steps = 0;

  static WorkingState from(const ActiveSupertile& s, int tau) {
    WorkingState w;
    w.tiles = s.assembly.tiles;
    w.tau = tau;
    for (const auto& [c, p] : s.assembly.cells) w.cells.emplace(c, p);
    w.pending = s.pending;
    return w;
  }

  ActiveSupertile freeze() const {
    Assembly a;
    a.tiles = tiles;
    a.cells.reserve(cells.size());
    for (const auto& [c, p] : cells) a.cells.push_back({c, p});
    a.sort_cells();
    return canonicalize(std::move(a), pending);
  }

  const PlacedTile* at(const Coord& c) const {
    auto it = cells.find(c);
    return it == cells.end() ? nullptr : &it->second;
  }

  // Strength of the prospective bond between a slot and the abutting cell.
  int pair_strength(const Coord& loc, const GlueSlot& slot, GlueState state) const {
    if (state != GlueState::On || !is_planar(slot.side) || slot.glue.strength <= 0) return 0;
    const PlacedTile* np = at(loc + side_offset(slot.side));
    if (!np) return 0;
    const TileType& nt = tiles->at(np->type);
    int sj = nt.find_slot(opposite(slot.side), slot.glue.label);
    if (sj < 0 || np->states[size_t(sj)] != GlueState::On) return 0;
    if (!glues_match(slot.glue, nt.slots[size_t(sj)].glue)) return 0;
    return slot.glue.strength;
  }

  // Total bond strength a singleton of `type` would form at `loc`.
  int attach_strength(const Coord& loc, uint32_t type) const {
    const TileType& t = tiles->at(type);
    int sum = 0;
    for (const auto& slot : t.slots) sum += pair_strength(loc, slot, slot.initial_state);
    return sum;
  }

  // Attaches a singleton (in its initial state); a valid two-handed
  // combination step because a single tile is stable and the seam meets tau.
  void apply_attach(const Coord& loc, uint32_t type) {
    if (cells.count(loc)) throw std::logic_error("apply_attach: cell occupied");
    const TileType& t = tiles->at(type);
    int seam = attach_strength(loc, type);
    if (seam < tau) throw std::logic_error("apply_attach: seam strength below tau");
    cells.emplace(loc, initial_placement(t, type));
    // Fire the rules of both tiles of every newly bound pair.
    for (size_t si = 0; si < t.slots.size(); ++si) {
      const GlueSlot& slot = t.slots[si];
      if (pair_strength(loc, slot, slot.initial_state) > 0) {
        detail::fire_rules(t, loc, slot.side, slot.glue.label, pending);
        const Coord nc = loc + side_offset(slot.side);
        detail::fire_rules(tiles->at(at(nc)->type), nc, opposite(slot.side), slot.glue.label,
                           pending);
      }
    }
    ++steps;
  }

  // Executes pending[idx] with the usual discard and auto-bind semantics.
  void apply_execute(size_t idx) {
    if (idx >= pending.size()) throw std::out_of_range("apply_execute: bad index");
    const PendingAction act = pending[idx];
    pending.erase(pending.begin() + long(idx));
    auto it = cells.find(act.loc);
    if (it == cells.end()) throw std::logic_error("apply_execute: empty location");
    const TileType& t = tiles->at(it->second.type);
    int si = t.find_slot(act.side, act.label);
    if (si < 0) throw std::logic_error("apply_execute: missing slot");
    if (it->second.states[size_t(si)] == GlueState::On) {
      ++steps;
      return;  // discarded
    }
    it->second.states[size_t(si)] = GlueState::On;
    if (pair_strength(act.loc, t.slots[size_t(si)], GlueState::On) > 0) {
      detail::fire_rules(t, act.loc, act.side, act.label, pending);
      const Coord nc = act.loc + side_offset(act.side);
      detail::fire_rules(tiles->at(at(nc)->type), nc, opposite(act.side), act.label, pending);
    }
    ++steps;
  }

  // Executes pending actions first-in-first-out until none remain.
  void drain() {
    while (!pending.empty()) apply_execute(0);
  }

  // Total seam strength another working state would form at the given
  // translation; 0 on overlap.
  int dock_strength(const WorkingState& other, const Coord& offset) const {
    int seam = 0;
    for (const auto& [c, p] : other.cells) {
      if (cells.count(c + offset)) return 0;
      const TileType& t = tiles->at(p.type);
      for (size_t si = 0; si < t.slots.size(); ++si)
        seam += pair_strength(c + offset, t.slots[si], p.states[si]);
    }
    return seam;
  }

  // Docks another working state (both drained or not) at the given
  // translation; a valid combination step when the seam reaches tau.
  void apply_dock(const WorkingState& other, const Coord& offset) {
    for (const auto& [c, p] : other.cells)
      if (cells.count(c + offset)) throw std::logic_error("apply_dock: overlap");
    // Seam bonds, described from the incoming side.
    struct Bond {
      Coord loc;
      Side side;
      std::string label;
    };
    std::vector<Bond> bonds;
    int seam = 0;
    for (const auto& [c, p] : other.cells) {
      const TileType& t = tiles->at(p.type);
      for (size_t si = 0; si < t.slots.size(); ++si) {
        const GlueSlot& slot = t.slots[si];
        if (p.states[size_t(si)] != GlueState::On || !is_planar(slot.side) ||
            slot.glue.strength <= 0)
          continue;
        const Coord nc = c + offset + side_offset(slot.side);
        const PlacedTile* np = at(nc);
        if (!np) continue;
        const TileType& nt = tiles->at(np->type);
        int sj = nt.find_slot(opposite(slot.side), slot.glue.label);
        if (sj < 0 || np->states[size_t(sj)] != GlueState::On) continue;
        if (!glues_match(slot.glue, nt.slots[size_t(sj)].glue)) continue;
        bonds.push_back({c + offset, slot.side, slot.glue.label});
        seam += slot.glue.strength;
      }
    }
    if (seam < tau) throw std::logic_error("apply_dock: seam strength below tau");
    for (const auto& [c, p] : other.cells) cells.emplace(c + offset, p);
    for (const auto& p : other.pending)
      pending.push_back({p.loc + offset, p.side, p.label});
    for (const auto& bnd : bonds) {
      detail::fire_rules(tiles->at(at(bnd.loc)->type), bnd.loc, bnd.side, bnd.label, pending);
      const Coord nc = bnd.loc + side_offset(bnd.side);
      detail::fire_rules(tiles->at(at(nc)->type), nc, opposite(bnd.side), bnd.label, pending);
    }
    ++steps;
  }
};

}  // namespace stamforge
