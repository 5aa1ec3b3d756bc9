#pragma once

#include <map>
#include <set>

#include "stamforge/core.hpp"

namespace stamforge {

// Witness for fan-out: a glue (tile, side, label) whose binding fires more
// than one signal.
struct FanOutWitness {
  std::string tile;
  Side side = Side::N;
  std::string label;
  int targets = 0;
};

// Witness for mutual activation: two tile types carrying the same glue label
// on opposite sides, both firing signals from it.
struct MutualActivationWitness {
  std::string tile1;
  Side side1 = Side::N;
  std::string tile2;
  Side side2 = Side::S;
  std::string label;
};

struct ComplexityReport {
  std::map<std::string, int> per_tile_signals;
  int max_signals = 0;
  int max_fan_out = 0;
  int max_fan_in = 0;
  std::vector<FanOutWitness> fan_out;
  std::vector<MutualActivationWitness> mutual_activation;
};

// Total number of signals sent by all glues of the tile.
inline int full_tile_signal_complexity(const TileType& t) {
  int n = 0;
  for (const auto& r : t.rules)
    if (!r.deactivate) ++n;
  return n;
}

inline int full_tile_signal_complexity(const Tileset& ts) {
  int m = 0;
  for (const auto& t : ts.types) m = std::max(m, full_tile_signal_complexity(t));
  return m;
}

// All (tile, side, label) with more than one signal target.
inline std::vector<FanOutWitness> detect_fan_out(const Tileset& ts) {
  std::vector<FanOutWitness> out;
  for (const auto& t : ts.types) {
    std::map<std::pair<Side, std::string>, int> counts;
    for (const auto& r : t.rules)
      if (!r.deactivate) counts[{r.src_side, r.src_label}]++;
    for (const auto& [key, n] : counts)
      if (n > 1) out.push_back({t.name, key.first, key.second, n});
  }
  return out;
}

// All pairs of (tile1, d1, a), (tile2, d2, a) with d1 = -d2 and both delta
// entries nonempty. Purely syntactic over the delta tables, including pairs
// with tile1 = tile2 (two copies of one type abutting).
inline std::vector<MutualActivationWitness> detect_mutual_activation(const Tileset& ts) {
  std::vector<MutualActivationWitness> out;
  // Fired (tile, side) sources grouped per glue label; only same-label
  // sources can pair up.
  struct Src {
    uint32_t tile;
    Side side;
  };
  std::unordered_map<std::string, std::vector<Src>> by_label;
  for (uint32_t i = 0; i < ts.types.size(); ++i) {
    std::set<std::pair<Side, std::string>> seen;
    for (const auto& r : ts.types[i].rules) {
      if (r.deactivate) continue;
      if (seen.insert({r.src_side, r.src_label}).second)
        by_label[r.src_label].push_back({i, r.src_side});
    }
  }
  std::vector<std::string> labels;
  labels.reserve(by_label.size());
  for (const auto& [label, srcs] : by_label) labels.push_back(label);
  std::sort(labels.begin(), labels.end());
  for (const auto& label : labels) {
    const auto& srcs = by_label[label];
    for (size_t i = 0; i < srcs.size(); ++i)
      for (size_t j = i; j < srcs.size(); ++j) {
        if (srcs[j].side != opposite(srcs[i].side)) continue;
        out.push_back({ts.types[srcs[i].tile].name, srcs[i].side, ts.types[srcs[j].tile].name,
                       srcs[j].side, label});
      }
  }
  return out;
}

// Maximum, over all target slots, of the number of rules across the tile's
// whole delta table that activate that slot.
inline int max_fan_in(const Tileset& ts) {
  int best = 0;
  for (const auto& t : ts.types) {
    std::map<std::pair<Side, std::string>, int> counts;
    for (const auto& r : t.rules)
      if (!r.deactivate) counts[{r.tgt_side, r.tgt_label}]++;
    for (const auto& [key, n] : counts) best = std::max(best, n);
  }
  return best;
}

inline ComplexityReport analyze(const Tileset& ts) {
  ComplexityReport rep;
  for (const auto& t : ts.types) {
    int n = full_tile_signal_complexity(t);
    rep.per_tile_signals[t.name] = n;
    rep.max_signals = std::max(rep.max_signals, n);
  }
  rep.fan_out = detect_fan_out(ts);
  for (const auto& w : rep.fan_out) rep.max_fan_out = std::max(rep.max_fan_out, w.targets);
  rep.mutual_activation = detect_mutual_activation(ts);
  rep.max_fan_in = max_fan_in(ts);
  return rep;
}

struct SimplifiedCheck {
  bool ok = false;
  int max_signals = 0;
  int max_fan_in = 0;
  bool has_fan_out = false;
  bool has_mutual_activation = false;
};

// n-simplified: full-tile signal complexity <= n, no fan-out or no mutual
// activation, fan-in <= 2.
inline SimplifiedCheck is_n_simplified(const Tileset& ts, int n) {
  SimplifiedCheck c;
  c.max_signals = full_tile_signal_complexity(ts);
  c.max_fan_in = max_fan_in(ts);
  c.has_fan_out = !detect_fan_out(ts).empty();
  c.has_mutual_activation = !detect_mutual_activation(ts).empty();
  c.ok = c.max_signals <= n && (!c.has_fan_out || !c.has_mutual_activation) && c.max_fan_in <= 2;
  return c;
}

}  // namespace stamforge
