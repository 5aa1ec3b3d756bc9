#pragma once

#include "stamforge/catalog.hpp"

namespace stamforge {

// Zone annotations carried per generated tile.
enum class ZoneTag : uint8_t {
  InteriorFiller,
  Frame,
  FanOutZone,
  FanInZone,
  Boundary,
  Circuit,
  Carrier,
  Gadget,
};

inline const char* zone_name(ZoneTag z) {
  switch (z) {
    case ZoneTag::InteriorFiller: return "interior";
    case ZoneTag::Frame: return "frame";
    case ZoneTag::FanOutZone: return "fan-out";
    case ZoneTag::FanInZone: return "fan-in";
    case ZoneTag::Boundary: return "boundary";
    case ZoneTag::Circuit: return "circuit";
    case ZoneTag::Carrier: return "carrier";
    case ZoneTag::Gadget: return "gadget";
  }
  return "?";
}

enum class BlueprintStage : uint8_t { Base, Circuits, ReducedTau1, ReducedTauGe2 };

struct CellBuild {
  std::vector<GlueSlot> slots;
  std::vector<TransitionRule> rules;
  ZoneTag zone = ZoneTag::InteriorFiller;

  bool has_slot(Side side, const std::string& label) const {
    for (const auto& s : slots)
      if (s.side == side && s.glue.label == label) return true;
    return false;
  }
};

// A floating generated tile type: part of the output tile set but not
// pre-assigned to a grid cell by mortar; it attaches at `home` once its
// gating glues turn on. Tiles sharing a group id pre-bond into a duple and
// attach as a unit.
struct FloatingTile {
  TileType type;
  Coord home;
  ZoneTag zone = ZoneTag::Gadget;
  int group = -1;
};

// One exterior glue presentation: the boundary realization of a source
// (side, glue) slot. `split` marks the two-carrier strength split of the
// tau >= 2 construction; `hole` marks a latent slot realized as a
// delivery-gated floating carrier.
struct ExteriorSlot {
  Side side = Side::N;
  int glue = 0;            // catalog index
  Coord cell;              // carrier cell (hi carrier when split)
  Coord lo_cell;           // second carrier when split
  bool split = false;
  bool hole = false;       // carrier is floating, placed on delivery
  GlueState initial = GlueState::Latent;
};

struct MacrotileBlueprint {
  int m = 0;
  int tau = 1;
  uint32_t source = 0;
  std::string source_name;
  BlueprintStage stage = BlueprintStage::Base;
  std::shared_ptr<const GlueCatalog> catalog;
  TilesetPtr source_tiles;

  // Dense m x m grid, row-major from the south-west corner. Cells that are
  // not part of the layout (tau >= 2 gadget pockets, latent-carrier holes)
  // are marked absent.
  std::vector<CellBuild> cells;
  std::vector<uint8_t> present;
  std::vector<FloatingTile> floating;
  Coord seed{0, 0};                      // growth starting cell
  std::vector<Coord> required_boundary;  // cells the representation demands
  std::vector<ExteriorSlot> exterior;
  // Frame path per source rule, in source-rule order: the cells the signal
  // traverses from its fan-out zone to the target's merge cell.
  std::vector<std::vector<Coord>> rule_paths;

  size_t idx(const Coord& c) const { return size_t(c.y) * size_t(m) + size_t(c.x); }
  bool in_range(const Coord& c) const { return c.x >= 0 && c.y >= 0 && c.x < m && c.y < m; }
  bool has(const Coord& c) const { return in_range(c) && present[idx(c)]; }
  CellBuild& at(const Coord& c) {
    present[idx(c)] = 1;
    return cells[idx(c)];
  }
  const CellBuild& at(const Coord& c) const { return cells[idx(c)]; }
  size_t placed_count() const {
    size_t n = 0;
    for (uint8_t p : present) n += p;
    return n;
  }

  const ExteriorSlot* exterior_of(Side side, int glue_idx) const {
    for (const auto& e : exterior)
      if (e.side == side && e.glue == glue_idx) return &e;
    return nullptr;
  }
};

namespace bp {

// ---------------------------------------------------------------------------
// Geometry helpers. Boundary positions along a side are parameterized by a
// clockwise coordinate u (0 at the side's clockwise start corner). N and S
// exterior regions share columns and E and W share rows, so glue regions of
// abutting macrotiles line up exactly.
// ---------------------------------------------------------------------------

inline Coord inward(Side s) { return side_offset(opposite(s)); }

struct Geometry {
  int m = 0;
  int K = 0;        // |directional multiset|
  int NG = 0;       // |G|
  int margin = 0;   // west/north inset of the glue line

  // Boundary cell of side `s` at clockwise coordinate u, at ring depth d.
  Coord at(Side s, int u, int d = 0) const {
    switch (s) {
      case Side::N: return {u, m - 1 - d};
      case Side::E: return {m - 1 - d, m - 1 - u};
      case Side::S: return {m - 1 - u, d};
      case Side::W: return {d, u};
      default: return {0, 0};
    }
  }

  // Clockwise coordinate of the exterior cell for glue index gi (1-based).
  // Positions are a function of the glue alone so that opposite sides align.
  int u_ext(Side s, int gi) const {
    int off = margin + (gi - 1) * (2 * K + 1) + K;
    return (s == Side::N || s == Side::E) ? off : m - 1 - off;
  }

  // Full clockwise enumeration of the ring at depth d, starting at its
  // top-left corner.
  std::vector<Coord> ring_cw(int d) const {
    std::vector<Coord> out;
    int lo = d, hi = m - 1 - d;
    for (int x = lo; x <= hi; ++x) out.push_back({x, hi});
    for (int y = hi - 1; y >= lo; --y) out.push_back({hi, y});
    for (int x = hi - 1; x >= lo; --x) out.push_back({x, lo});
    for (int y = lo + 1; y <= hi - 1; ++y) out.push_back({lo, y});
    return out;
  }
};

// Direction of travel between two adjacent cells.
inline Side step_side(const Coord& from, const Coord& to) {
  if (to.x == from.x + 1) return Side::E;
  if (to.x == from.x - 1) return Side::W;
  if (to.y == from.y + 1) return Side::N;
  return Side::S;
}

// ---------------------------------------------------------------------------
// Builder: accumulates slots and rules per cell, lays signal chains.
// ---------------------------------------------------------------------------

class Builder {
 public:
  Builder(MacrotileBlueprint& bp) : bp_(bp) {
    bp_.cells.resize(size_t(bp_.m) * size_t(bp_.m));
    bp_.present.resize(size_t(bp_.m) * size_t(bp_.m), 0);
  }

  CellBuild& cell(const Coord& c) { return bp_.at(c); }

  void tag(const Coord& c, ZoneTag z) { bp_.at(c).zone = z; }

  void add_slot(const Coord& c, Side side, const std::string& label, int strength,
                GlueState st) {
    CellBuild& cb = bp_.at(c);
    if (cb.has_slot(side, label)) return;
    cb.slots.push_back({side, Glue{label, strength}, st});
  }

  void add_rule(const Coord& c, Side ss, const std::string& sl, Side ts,
                const std::string& tl) {
    bp_.at(c).rules.push_back({ss, sl, ts, tl, false});
  }

  // Mortar bond: a unique always-on strength-tau glue on the shared face of
  // two adjacent placed cells.
  void mortar(const Coord& a, const Coord& b, const std::string& ns, int strength) {
    Side s = step_side(a, b);
    std::string label = ns + std::to_string(a.x) + "," + std::to_string(a.y) +
                        (s == Side::E || s == Side::W ? "h" : "v");
    add_slot(a, s, label, strength, GlueState::On);
    add_slot(b, opposite(s), label, strength, GlueState::On);
  }

  // Signal relay chain along `path`: hop glue k sits between path[k-1] and
  // path[k], latent on the upstream face and on on the downstream face, and
  // each interior cell relays its incoming hop to its outgoing one. The
  // first hop is either activated by a caller-supplied rule on path[0]
  // (start_src) or initially on (seed chains that fire on attachment).
  // Returns the hop labels (index k names the hop into path[k]).
  std::vector<std::string> lay_chain(const std::vector<Coord>& path, const std::string& prefix,
                                     int strength, bool first_hop_on,
                                     const std::optional<std::pair<Side, std::string>>& start_src) {
    std::vector<std::string> hops(path.size());
    for (size_t k = 1; k < path.size(); ++k) {
      const std::string label = prefix + ":" + std::to_string(k);
      hops[k] = label;
      Side dir = step_side(path[k - 1], path[k]);
      add_slot(path[k - 1], dir, label, strength,
               (k == 1 && first_hop_on) ? GlueState::On : GlueState::Latent);
      add_slot(path[k], opposite(dir), label, strength, GlueState::On);
      if (k >= 2) {
        Side prev_dir = step_side(path[k - 2], path[k - 1]);
        add_rule(path[k - 1], opposite(prev_dir), hops[k - 1], dir, label);
      }
    }
    if (start_src && path.size() >= 2) {
      Side dir = step_side(path[0], path[1]);
      add_rule(path[0], start_src->first, start_src->second, dir, hops[1]);
    }
    return hops;
  }

  // Echo tap at path[k] of a chain laid with `hops`: when the hop into
  // path[k+1] binds, path[k] additionally fires (tgt_side, tgt_label). The
  // chain must extend at least one cell past the tap; the firing pairs with
  // path[k+1]'s relay rule as mutual activation.
  void tap(const std::vector<Coord>& path, const std::vector<std::string>& hops, size_t k,
           Side tgt_side, const std::string& tgt_label) {
    Side dir = step_side(path[k], path[k + 1]);
    add_rule(path[k], dir, hops[k + 1], tgt_side, tgt_label);
  }

 private:
  MacrotileBlueprint& bp_;
};

}  // namespace bp
}  // namespace stamforge
