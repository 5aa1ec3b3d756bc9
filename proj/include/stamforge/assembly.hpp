#pragma once

#include <algorithm>
#include <cassert>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "stamforge/core.hpp"

namespace stamforge {

struct PlacedTile {
  uint32_t type = 0;
  // Runtime state per slot, parallel to TileType::slots.
  std::vector<GlueState> states;

  friend bool operator==(const PlacedTile&, const PlacedTile&) = default;
};

inline PlacedTile initial_placement(const TileType& t, uint32_t type_id) {
  PlacedTile p;
  p.type = type_id;
  p.states.reserve(t.slots.size());
  for (const auto& s : t.slots) p.states.push_back(s.initial_state);
  return p;
}

// A placed-tile map. Cells are kept sorted in row-major coordinate order so
// that equality, hashing and canonical translation are cheap.
struct Assembly {
  TilesetPtr tiles;
  std::vector<std::pair<Coord, PlacedTile>> cells;

  bool empty() const { return cells.empty(); }
  size_t size() const { return cells.size(); }

  void sort_cells() {
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  int find(const Coord& c) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), c,
                               [](const auto& cell, const Coord& k) { return cell.first < k; });
    if (it == cells.end() || !(it->first == c)) return -1;
    return int(it - cells.begin());
  }

  const PlacedTile* at(const Coord& c) const {
    int i = find(c);
    return i < 0 ? nullptr : &cells[i].second;
  }

  const TileType& type_of(size_t cell_index) const {
    return tiles->at(cells[cell_index].second.type);
  }

  friend bool operator==(const Assembly& a, const Assembly& b) {
    return a.cells == b.cells;
  }
};

// Weight of the bond between the tile at cell index i and its neighbor on
// side s: sum of strengths over all matching slot pairs whose runtime states
// are both on. Returns 0 if the neighbor is absent.
inline int bond_strength(const Assembly& a, size_t i, Side s) {
  if (!is_planar(s)) return 0;
  const Coord nc = a.cells[i].first + side_offset(s);
  int j = a.find(nc);
  if (j < 0) return 0;
  const TileType& t1 = a.type_of(i);
  const TileType& t2 = a.type_of(j);
  const PlacedTile& p1 = a.cells[i].second;
  const PlacedTile& p2 = a.cells[size_t(j)].second;
  const Side os = opposite(s);
  int w = 0;
  for (size_t si = 0; si < t1.slots.size(); ++si) {
    const GlueSlot& g1 = t1.slots[si];
    if (g1.side != s || p1.states[si] != GlueState::On || g1.glue.strength <= 0) continue;
    for (size_t sj = 0; sj < t2.slots.size(); ++sj) {
      const GlueSlot& g2 = t2.slots[sj];
      if (g2.side != os || p2.states[sj] != GlueState::On) continue;
      if (glues_match(g1.glue, g2.glue)) w += g1.glue.strength;
    }
  }
  return w;
}

struct BindingEdge {
  uint32_t a = 0;
  uint32_t b = 0;  // cell indices, a < b
  int weight = 0;
};

struct BindingGraph {
  std::vector<Coord> vertices;      // one per occupied coordinate (cell order)
  std::vector<BindingEdge> edges;   // zero-weight edges omitted
};

inline BindingGraph binding_graph(const Assembly& a) {
  BindingGraph g;
  g.vertices.reserve(a.size());
  for (const auto& c : a.cells) g.vertices.push_back(c.first);
  for (size_t i = 0; i < a.cells.size(); ++i) {
    // Each edge visited once via its N/E endpoint.
    for (Side s : {Side::N, Side::E}) {
      int j = a.find(a.cells[i].first + side_offset(s));
      if (j < 0) continue;
      int w = bond_strength(a, i, s);
      if (w > 0) g.edges.push_back({uint32_t(std::min<size_t>(i, j)),
                                    uint32_t(std::max<size_t>(i, j)), w});
    }
  }
  return g;
}

inline bool graph_connected(size_t n, const std::vector<BindingEdge>& edges) {
  if (n == 0) return false;
  std::vector<int> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = int(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  size_t comps = n;
  for (const auto& e : edges) {
    int ra = find(int(e.a)), rb = find(int(e.b));
    if (ra != rb) {
      parent[ra] = rb;
      --comps;
    }
  }
  return comps == 1;
}

// Exhaustive global min cut over all 2^(n-1)-1 bipartitions. Exact but only
// usable for small graphs; doubles as the test oracle.
inline long long min_cut_bruteforce(size_t n, const std::vector<BindingEdge>& edges) {
  assert(n >= 2 && n <= 24);
  long long best = std::numeric_limits<long long>::max();
  const uint32_t limit = uint32_t(1) << (n - 1);
  for (uint32_t mask = 1; mask < limit; ++mask) {
    long long w = 0;
    for (const auto& e : edges) {
      bool sa = e.a == n - 1 ? false : ((mask >> e.a) & 1);
      bool sb = e.b == n - 1 ? false : ((mask >> e.b) & 1);
      if (sa != sb) w += e.weight;
    }
    best = std::min(best, w);
  }
  return best;
}

// Stoer-Wagner global min cut, O(n^3). Deterministic.
inline long long min_cut_stoer_wagner(size_t n, const std::vector<BindingEdge>& edges) {
  assert(n >= 2);
  std::vector<std::vector<long long>> w(n, std::vector<long long>(n, 0));
  for (const auto& e : edges) {
    w[e.a][e.b] += e.weight;
    w[e.b][e.a] += e.weight;
  }
  std::vector<int> vertices(n);
  for (size_t i = 0; i < n; ++i) vertices[i] = int(i);
  long long best = std::numeric_limits<long long>::max();
  while (vertices.size() > 1) {
    // Maximum adjacency ordering.
    std::vector<long long> conn(vertices.size(), 0);
    std::vector<char> added(vertices.size(), 0);
    int prev = -1, last = -1;
    for (size_t it = 0; it < vertices.size(); ++it) {
      int sel = -1;
      for (size_t i = 0; i < vertices.size(); ++i)
        if (!added[i] && (sel < 0 || conn[i] > conn[size_t(sel)])) sel = int(i);
      added[size_t(sel)] = 1;
      prev = last;
      last = sel;
      if (it + 1 == vertices.size()) {
        best = std::min(best, conn[size_t(sel)]);
        // Merge last into prev.
        int u = vertices[size_t(prev)], v = vertices[size_t(last)];
        for (size_t i = 0; i < n; ++i) {
          w[size_t(u)][i] += w[size_t(v)][i];
          w[i][size_t(u)] += w[i][size_t(v)];
        }
        vertices.erase(vertices.begin() + last);
      } else {
        for (size_t i = 0; i < vertices.size(); ++i)
          if (!added[i]) conn[i] += w[size_t(vertices[size_t(sel)])][size_t(vertices[i])];
      }
    }
  }
  return best;
}

// Exact global min cut of a binding graph. Brute force for small assemblies,
// Stoer-Wagner above; the two are tested to agree on the overlap range.
inline long long binding_min_cut(const BindingGraph& g) {
  size_t n = g.vertices.size();
  if (n < 2) return std::numeric_limits<long long>::max();
  if (!graph_connected(n, g.edges)) return 0;
  if (n <= 20) return min_cut_bruteforce(n, g.edges);
  return min_cut_stoer_wagner(n, g.edges);
}

// tau-stability: binding graph connected and every cut has weight >= tau.
// A single tile is stable at every temperature.
inline bool is_tau_stable(const Assembly& a, int tau) {
  if (a.empty()) return false;
  if (a.size() == 1) return true;
  BindingGraph g = binding_graph(a);
  if (!graph_connected(g.vertices.size(), g.edges)) return false;
  return binding_min_cut(g) >= tau;
}

struct PendingAction {
  Coord loc;
  Side side = Side::N;
  std::string label;

  friend bool operator==(const PendingAction&, const PendingAction&) = default;
  friend bool operator<(const PendingAction& a, const PendingAction& b) {
    if (!(a.loc == b.loc)) return a.loc < b.loc;
    if (a.side != b.side) return a.side < b.side;
    return a.label < b.label;
  }
};

// Canonical translation class of an assembly with its pending-action
// multiset. The canonical representative places the row-major least occupied
// coordinate at the origin. Pendings are kept sorted (multiset semantics;
// duplicates allowed).
struct ActiveSupertile {
  Assembly assembly;
  std::vector<PendingAction> pending;

  size_t size() const { return assembly.size(); }

  // Dynamics equality: placement + glue states + pending multiset.
  friend bool operator==(const ActiveSupertile& a, const ActiveSupertile& b) {
    return a.assembly == b.assembly && a.pending == b.pending;
  }
};

// Representation equality ignores the pending sets.
inline bool repr_equal(const ActiveSupertile& a, const ActiveSupertile& b) {
  return a.assembly == b.assembly;
}

inline ActiveSupertile canonicalize(Assembly a, std::vector<PendingAction> pending = {}) {
  assert(!a.empty());
  a.sort_cells();
  const Coord origin = a.cells.front().first;
  if (!(origin == Coord{0, 0})) {
    for (auto& c : a.cells) c.first = c.first - origin;
    for (auto& p : pending) p.loc = p.loc - origin;
  }
  std::sort(pending.begin(), pending.end());
  return ActiveSupertile{std::move(a), std::move(pending)};
}

inline uint64_t dynamics_hash(const ActiveSupertile& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [c, p] : s.assembly.cells) {
    hash_combine(h, uint64_t(uint32_t(c.x)) << 32 | uint32_t(c.y));
    hash_combine(h, p.type);
    uint64_t sh = 0;
    for (auto st : p.states) sh = sh * 3 + uint64_t(st);
    hash_combine(h, sh);
  }
  for (const auto& p : s.pending) {
    hash_combine(h, uint64_t(uint32_t(p.loc.x)) << 32 | uint32_t(p.loc.y));
    hash_combine(h, uint64_t(p.side));
    hash_combine(h, hash_string(p.label));
  }
  return h;
}

struct InitialEntry {
  ActiveSupertile supertile;
  uint64_t count = 0;
  bool infinite = true;
};

struct System {
  std::string name = "system";
  int dim = 2;
  TilesetPtr tiles;
  std::vector<InitialEntry> initial;  // empty means the default initial state
  int tau = 1;

  // Default initial state: an infinite count of each singleton tile.
  std::vector<InitialEntry> initial_state() const {
    if (!initial.empty()) return initial;
    std::vector<InitialEntry> out;
    out.reserve(tiles->size());
    for (uint32_t i = 0; i < tiles->size(); ++i) {
      Assembly a;
      a.tiles = tiles;
      a.cells.push_back({{0, 0}, initial_placement(tiles->at(i), i)});
      out.push_back({canonicalize(std::move(a)), 0, true});
    }
    return out;
  }
};

struct Diagnostic {
  std::string code;
  std::string message;
};

// Structural validation of an STAM+ tile set. Reports every violated
// invariant; never throws.
inline std::vector<Diagnostic> validate_tileset(const Tileset& ts) {
  std::vector<Diagnostic> out;
  for (const auto& t : ts.types) {
    std::set<std::pair<Side, std::string>> seen;
    for (const auto& s : t.slots) {
      if (s.glue.label.empty())
        out.push_back({"empty-label", "tile " + t.name + ": glue with empty label"});
      if (s.glue.strength < 0)
        out.push_back({"negative-strength",
                       "tile " + t.name + ": glue " + s.glue.label + " has negative strength"});
      if (!is_planar(s.side))
        out.push_back({"3d-out-of-scope", "tile " + t.name + ": side " + side_name(s.side) +
                                              " (3D construction out of scope)"});
      auto key = std::make_pair(s.side, s.glue.label);
      if (!seen.insert(key).second)
        out.push_back({"duplicate-slot", "tile " + t.name + ": duplicate slot (" +
                                             side_name(s.side) + "," + s.glue.label + ")"});
    }
    std::set<std::tuple<Side, std::string, Side, std::string>> rule_keys;
    for (const auto& r : t.rules) {
      if (!rule_keys.insert({r.src_side, r.src_label, r.tgt_side, r.tgt_label}).second)
        out.push_back({"duplicate-rule", "tile " + t.name + ": duplicate signal (" +
                                             side_name(r.src_side) + "," + r.src_label + ") -> (" +
                                             side_name(r.tgt_side) + "," + r.tgt_label + ")"});
      if (r.deactivate)
        out.push_back({"not-stam-plus", "tile " + t.name + ": rule from (" +
                                            side_name(r.src_side) + "," + r.src_label +
                                            ") deactivates a glue; not STAM+"});
      if (t.find_slot(r.src_side, r.src_label) < 0)
        out.push_back({"dangling-source", "tile " + t.name + ": rule source (" +
                                              side_name(r.src_side) + "," + r.src_label +
                                              ") names no slot"});
      if (t.find_slot(r.tgt_side, r.tgt_label) < 0)
        out.push_back({"dangling-target", "tile " + t.name + ": rule target (" +
                                              side_name(r.tgt_side) + "," + r.tgt_label +
                                              ") names no slot"});
    }
  }
  return out;
}

}  // namespace stamforge
