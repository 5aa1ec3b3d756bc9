#pragma once

#include <deque>
#include <random>

#include "stamforge/assembly.hpp"

namespace stamforge {

struct ExplorationBounds {
  size_t max_supertile_size = 8;
  size_t max_distinct_supertiles = 4096;
  size_t max_steps = 1u << 20;
};

// One two-handed attachment: the translation applied to the second supertile
// and the newly bound slot pairs it creates.
struct BoundPair {
  Coord first_loc;
  Side first_side = Side::N;
  std::string label;
  int strength = 0;
};

struct CombinationEvent {
  Coord offset;                    // applied to the second supertile
  std::vector<BoundPair> bonds;    // seam bonds, described from the first side
  ActiveSupertile result;
};

namespace detail {

// Fire every rule of `tile` whose source is (side, label); the resulting
// activations are appended to the pending multiset, never executed here.
inline void fire_rules(const TileType& tile, const Coord& loc, Side side,
                       const std::string& label, std::vector<PendingAction>& pending) {
  for (const auto& r : tile.rules) {
    if (r.deactivate) continue;
    if (r.src_side == side && r.src_label == label)
      pending.push_back({loc, r.tgt_side, r.tgt_label});
  }
}

}  // namespace detail

// All tau-stable supertiles obtainable by attaching s2 to s1, per the 2HAM
// combination sets extended with STAM signal firing: for each newly bound
// pair the transition rules of both participating tiles fire, appending
// their actions to the result's pending multiset. No pending action is
// executed inside this operation.
//
// Both inputs are required to be tau-stable (supertiles are stable by
// definition); under that premise the union is tau-stable exactly when the
// seam strength reaches tau: a cut either splits one part (weight >= tau by
// its stability) or runs along the seam.
inline std::vector<CombinationEvent> combinations_detailed(const ActiveSupertile& s1,
                                                           const ActiveSupertile& s2, int tau) {
  std::vector<CombinationEvent> out;
  const Assembly& a1 = s1.assembly;
  const Assembly& a2 = s2.assembly;
  if (a1.empty() || a2.empty()) return out;

  // Candidate translations: align every on/on matching slot pair.
  std::vector<Coord> candidates;
  for (size_t i = 0; i < a1.cells.size(); ++i) {
    const TileType& t1 = a1.type_of(i);
    const PlacedTile& p1 = a1.cells[i].second;
    for (size_t si = 0; si < t1.slots.size(); ++si) {
      const GlueSlot& g1 = t1.slots[si];
      if (p1.states[si] != GlueState::On || !is_planar(g1.side) || g1.glue.strength <= 0) continue;
      const Coord want = a1.cells[i].first + side_offset(g1.side);
      const Side os = opposite(g1.side);
      for (size_t j = 0; j < a2.cells.size(); ++j) {
        const TileType& t2 = a2.type_of(j);
        const PlacedTile& p2 = a2.cells[j].second;
        for (size_t sj = 0; sj < t2.slots.size(); ++sj) {
          const GlueSlot& g2 = t2.slots[sj];
          if (g2.side != os || p2.states[sj] != GlueState::On) continue;
          if (!glues_match(g1.glue, g2.glue)) continue;
          candidates.push_back(want - a2.cells[j].first);
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (const Coord& u : candidates) {
    // Disjointness.
    bool overlap = false;
    for (const auto& [c, p] : a2.cells) {
      if (a1.find(c + u) >= 0) {
        overlap = true;
        break;
      }
    }
    if (overlap) continue;

    // Seam bonds: matching on/on pairs across the interface.
    std::vector<BoundPair> bonds;
    int seam = 0;
    for (size_t i = 0; i < a1.cells.size(); ++i) {
      const TileType& t1 = a1.type_of(i);
      const PlacedTile& p1 = a1.cells[i].second;
      for (size_t si = 0; si < t1.slots.size(); ++si) {
        const GlueSlot& g1 = t1.slots[si];
        if (p1.states[si] != GlueState::On || !is_planar(g1.side) || g1.glue.strength <= 0)
          continue;
        const Coord nc = a1.cells[i].first + side_offset(g1.side) - u;
        int j = a2.find(nc);
        if (j < 0) continue;
        const TileType& t2 = a2.type_of(size_t(j));
        const PlacedTile& p2 = a2.cells[size_t(j)].second;
        int sj = t2.find_slot(opposite(g1.side), g1.glue.label);
        if (sj < 0) continue;
        if (p2.states[size_t(sj)] != GlueState::On) continue;
        if (!glues_match(g1.glue, t2.slots[size_t(sj)].glue)) continue;
        bonds.push_back({a1.cells[i].first, g1.side, g1.glue.label, g1.glue.strength});
        seam += g1.glue.strength;
      }
    }
    if (seam < tau) continue;

    // Union; fire rules of both tiles of every newly bound pair.
    Assembly un;
    un.tiles = a1.tiles;
    un.cells = a1.cells;
    un.cells.reserve(a1.size() + a2.size());
    for (const auto& [c, p] : a2.cells) un.cells.push_back({c + u, p});
    un.sort_cells();
    std::vector<PendingAction> pending = s1.pending;
    for (const auto& p : s2.pending) pending.push_back({p.loc + u, p.side, p.label});
    for (const auto& b : bonds) {
      const Coord other = b.first_loc + side_offset(b.first_side);
      detail::fire_rules(un.tiles->at(un.at(b.first_loc)->type), b.first_loc, b.first_side,
                         b.label, pending);
      detail::fire_rules(un.tiles->at(un.at(other)->type), other, opposite(b.first_side), b.label,
                         pending);
    }
    out.push_back({u, std::move(bonds), canonicalize(std::move(un), std::move(pending))});
  }
  return out;
}

inline std::vector<ActiveSupertile> combinations(const ActiveSupertile& s1,
                                                 const ActiveSupertile& s2, int tau) {
  std::vector<ActiveSupertile> out;
  for (auto& ev : combinations_detailed(s1, s2, tau)) out.push_back(std::move(ev.result));
  // Distinct canonical results only.
  std::sort(out.begin(), out.end(), [](const ActiveSupertile& a, const ActiveSupertile& b) {
    return dynamics_hash(a) < dynamics_hash(b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Executes one entry of the pending multiset. The action is removed; a latent
// target turns on, an already-on target discards the action as a no-op.
// After a latent->on flip the slot auto-binds with an adjacent matching on
// slot, firing the rules of both tiles in the same step.
inline ActiveSupertile execute_pending(const ActiveSupertile& s, size_t action_index) {
  if (action_index >= s.pending.size())
    throw std::out_of_range("execute_pending: invalid action index");
  const PendingAction act = s.pending[action_index];
  Assembly a = s.assembly;
  std::vector<PendingAction> pending = s.pending;
  pending.erase(pending.begin() + long(action_index));

  int ci = a.find(act.loc);
  if (ci < 0) throw std::logic_error("execute_pending: action names an empty location");
  PlacedTile& pt = a.cells[size_t(ci)].second;
  const TileType& t = a.tiles->at(pt.type);
  int si = t.find_slot(act.side, act.label);
  if (si < 0) throw std::logic_error("execute_pending: action names a missing slot");

  if (pt.states[size_t(si)] == GlueState::On)
    return canonicalize(std::move(a), std::move(pending));  // discarded

  pt.states[size_t(si)] = GlueState::On;

  // Auto-bind: all matching glues in the on state bind.
  const Coord nc = act.loc + side_offset(act.side);
  int nj = a.find(nc);
  if (nj >= 0 && t.slots[size_t(si)].glue.strength > 0) {
    const PlacedTile& np = a.cells[size_t(nj)].second;
    const TileType& nt = a.tiles->at(np.type);
    int sj = nt.find_slot(opposite(act.side), act.label);
    if (sj >= 0 && np.states[size_t(sj)] == GlueState::On &&
        glues_match(t.slots[size_t(si)].glue, nt.slots[size_t(sj)].glue)) {
      detail::fire_rules(t, act.loc, act.side, act.label, pending);
      detail::fire_rules(nt, nc, opposite(act.side), act.label, pending);
    }
  }
  return canonicalize(std::move(a), std::move(pending));
}

struct ProducibleSet {
  std::vector<ActiveSupertile> supertiles;  // discovery order
  std::vector<bool> terminal;
  bool truncated = false;
  // Terminal flags are only meaningful for the explored horizon when the
  // exploration was not truncated.
  bool terminal_flags_valid = false;
  size_t steps = 0;

  int find(const ActiveSupertile& s) const {
    for (size_t i = 0; i < supertiles.size(); ++i)
      if (supertiles[i] == s) return int(i);
    return -1;
  }
};

// Union of all pending executions and all combinations with pool members.
inline std::vector<ActiveSupertile> successors(const ActiveSupertile& s,
                                               const std::vector<ActiveSupertile>& pool,
                                               int tau) {
  std::vector<ActiveSupertile> out;
  for (size_t i = 0; i < s.pending.size(); ++i) out.push_back(execute_pending(s, i));
  for (const auto& p : pool)
    for (auto& c : combinations(s, p, tau)) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(), [](const ActiveSupertile& a, const ActiveSupertile& b) {
    return dynamics_hash(a) < dynamics_hash(b);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

struct StateIndex {
  std::unordered_map<uint64_t, std::vector<uint32_t>> by_hash;

  // Insert-if-absent; returns the index, or -1 if the state is new.
  int lookup(const std::vector<ActiveSupertile>& pool, const ActiveSupertile& s,
             uint64_t h) const {
    auto it = by_hash.find(h);
    if (it == by_hash.end()) return -1;
    for (uint32_t i : it->second)
      if (pool[i] == s) return int(i);
    return -1;
  }
  void insert(uint64_t h, uint32_t idx) { by_hash[h].push_back(idx); }
};

}  // namespace detail

struct ExploreOptions {
  uint64_t seed = 0;           // fixes frontier iteration order
  bool check_stability = true; // assert the no-break invariant on every state
};

// BFS fixpoint over successors from the initial state, deduplicating by
// dynamics equality. Deterministic for a fixed seed; the reached set itself
// is seed-independent.
inline ProducibleSet explore(const System& sys, const ExplorationBounds& bounds,
                             const ExploreOptions& opts = {}) {
  ProducibleSet ps;
  detail::StateIndex index;
  std::deque<uint32_t> frontier;
  std::mt19937_64 rng(opts.seed);

  auto add = [&](ActiveSupertile&& s) -> bool {
    if (s.size() > bounds.max_supertile_size) {
      ps.truncated = true;
      return false;
    }
    uint64_t h = dynamics_hash(s);
    if (index.lookup(ps.supertiles, s, h) >= 0) return false;
    if (ps.supertiles.size() >= bounds.max_distinct_supertiles) {
      ps.truncated = true;
      return false;
    }
    if (opts.check_stability && !is_tau_stable(s.assembly, sys.tau))
      throw std::logic_error("explore: reached a non-tau-stable supertile (no-break violation)");
    uint32_t idx = uint32_t(ps.supertiles.size());
    index.insert(h, idx);
    ps.supertiles.push_back(std::move(s));
    frontier.push_back(idx);
    return true;
  };

  for (const auto& e : sys.initial_state()) add(ActiveSupertile(e.supertile));

  while (!frontier.empty() && ps.steps < bounds.max_steps) {
    // The seed only permutes the expansion order within the frontier.
    size_t pick = 0;
    if (opts.seed != 0 && frontier.size() > 1)
      pick = size_t(rng() % frontier.size());
    uint32_t cur = frontier[pick];
    frontier.erase(frontier.begin() + long(pick));
    ++ps.steps;

    const ActiveSupertile s = ps.supertiles[cur];  // copy: pool grows below
    for (size_t i = 0; i < s.pending.size(); ++i) add(execute_pending(s, i));
    for (size_t pi = 0; pi < ps.supertiles.size(); ++pi) {
      const ActiveSupertile p = ps.supertiles[pi];
      for (auto& c : combinations(s, p, sys.tau)) add(std::move(c));
      if (ps.steps >= bounds.max_steps && pi + 1 < ps.supertiles.size()) {
        ps.truncated = true;
      }
    }
  }
  if (!frontier.empty()) ps.truncated = true;

  // Terminal marking against the explored pool.
  ps.terminal.assign(ps.supertiles.size(), false);
  for (size_t i = 0; i < ps.supertiles.size(); ++i) {
    if (!ps.supertiles[i].pending.empty()) continue;
    bool term = true;
    for (size_t j = 0; j < ps.supertiles.size() && term; ++j)
      if (!combinations(ps.supertiles[i], ps.supertiles[j], sys.tau).empty()) term = false;
    ps.terminal[i] = term;
  }
  ps.terminal_flags_valid = !ps.truncated;
  return ps;
}

// Certifies that each consecutive pair of supertiles is related by one
// successors step: a pending execution or a combination with an initial
// supertile or an earlier sequence element. Used by the equivalence checkers
// to certify -> and ->^1.
inline bool assembly_sequence_check(const std::vector<ActiveSupertile>& seq, const System& sys,
                                    int tau) {
  if (seq.empty()) return false;
  std::vector<ActiveSupertile> pool;
  for (const auto& e : sys.initial_state()) pool.push_back(e.supertile);
  for (size_t k = 0; k + 1 < seq.size(); ++k) {
    const ActiveSupertile& a = seq[k];
    const ActiveSupertile& b = seq[k + 1];
    bool ok = false;
    if (b.size() == a.size()) {
      for (size_t i = 0; i < a.pending.size() && !ok; ++i)
        if (execute_pending(a, i) == b) ok = true;
    } else if (b.size() > a.size()) {
      for (const auto& p : pool) {
        if (a.size() + p.size() != b.size()) continue;
        for (auto& c : combinations(a, p, tau))
          if (c == b) {
            ok = true;
            break;
          }
        if (ok) break;
      }
    }
    if (!ok) return false;
    pool.push_back(a);
  }
  return true;
}

}  // namespace stamforge
