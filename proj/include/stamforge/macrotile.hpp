#pragma once

#include "stamforge/blueprint.hpp"

namespace stamforge {
namespace bp {

// Exterior glue labels are shared across macrotiles and encode the glue, the
// seam axis and the boundary position, so macrotiles can only bind centered
// on the block grid.
inline std::string exterior_label(Side side, int glue_idx, int off) {
  bool ns = side == Side::N || side == Side::S;
  return std::string("X") + (ns ? "n" : "e") + std::to_string(glue_idx) + "p" +
         std::to_string(off);
}

inline int off_of(const Geometry& g, Side side, int u) {
  return (side == Side::N || side == Side::E) ? u : g.m - 1 - u;
}

struct SourceGroup {
  Side side = Side::N;
  int glue = 0;                   // catalog index
  int member = 0;                 // directional multiset index
  std::vector<int> rule_indices;  // indices into the source tile's rule list
};

// Rules of the source tile grouped by their source slot, in directional
// multiset order.
inline std::vector<SourceGroup> source_groups(const TileType& t, const GlueCatalog& cat) {
  std::vector<SourceGroup> out;
  for (int mi = 0; mi < cat.directional_size(); ++mi) {
    auto [side, gi] = cat.members[size_t(mi)];
    SourceGroup g{side, gi, mi, {}};
    for (size_t ri = 0; ri < t.rules.size(); ++ri) {
      const auto& r = t.rules[ri];
      if (r.src_side == side && cat.index_of(r.src_label) == gi) g.rule_indices.push_back(int(ri));
    }
    if (!g.rule_indices.empty()) out.push_back(std::move(g));
  }
  return out;
}

struct RingWalk {
  std::vector<Coord> cells;  // clockwise enumeration
  std::map<Coord, int> pos;

  RingWalk(const Geometry& g, int depth) {
    cells = g.ring_cw(depth);
    for (size_t i = 0; i < cells.size(); ++i) pos[cells[i]] = int(i);
  }
  int cyclic_dist(int from, int to) const {
    int n = int(cells.size());
    return ((to - from) % n + n) % n;
  }
};

// Merge (fan-in) zone bookkeeping: where each incoming signal lands and
// which merge hop it must fire.
struct MergePlan {
  struct Landing {
    Coord fi_cell;
    Side arrival_face = Side::S;     // face the exit radial arrives on
    Side hop_face = Side::W;         // face of the merge hop the arrival fires
    std::string hop_label;
    std::vector<Coord> tail;         // merge cells from the landing to the target
  };
  std::map<int, Landing> by_fanin_index;
};

// ---------------------------------------------------------------------------
// Base construction: the 4-simplified macrotile of one source tile, before
// boundary circuits. Interior square of side K^2 with unique strength-tau
// mortar, one single-tile-wide frame ring per (side, glue) membership, a
// boundary line presenting the tile's glues at catalog positions with a
// fan-out zone counterclockwise and a fan-in (merge) zone clockwise of each
// exterior glue, and one broadcast chain per firing glue running through its
// fan-out zone, inward, and clockwise around its frame with an echo tap and
// merge delivery per signal.
// ---------------------------------------------------------------------------
inline MacrotileBlueprint build_macrotile(const System& src, uint32_t tile_idx,
                                          std::shared_ptr<const GlueCatalog> cat) {
  const TileType& t = src.tiles->at(tile_idx);
  for (const auto& slot : t.slots)
    if (!is_planar(slot.side))
      throw std::invalid_argument("build_macrotile: 3D construction out of scope");
  const int K = cat->directional_size();
  const int NG = cat->size();

  MacrotileBlueprint out;
  out.tau = src.tau;
  out.source = tile_idx;
  out.source_name = t.name;
  out.catalog = cat;
  out.source_tiles = src.tiles;
  out.stage = BlueprintStage::Base;
  out.m = 10 * K * K + 2;
  out.rule_paths.resize(t.rules.size());

  Geometry g{out.m, K, NG, (out.m - (2 * K + 1) * NG) / 2};
  Builder b(out);
  const std::string ns = std::to_string(tile_idx);
  const int m = out.m;

  // Grid cells and mortar.
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) b.cell({x, y});
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      if (x + 1 < m) b.mortar({x, y}, {x + 1, y}, "M" + ns + ":", src.tau);
      if (y + 1 < m) b.mortar({x, y}, {x, y + 1}, "M" + ns + ":", src.tau);
    }

  // Zone tags: boundary ring, frame rings, interior square, glue zones.
  for (const Coord& c : g.ring_cw(0)) b.tag(c, ZoneTag::Boundary);
  for (int mi = 0; mi < K; ++mi)
    for (const Coord& c : g.ring_cw(2 + mi)) b.tag(c, ZoneTag::Frame);
  {
    int lo = (m - K * K) / 2;
    for (int y = lo; y < lo + K * K; ++y)
      for (int x = lo; x < lo + K * K; ++x) b.tag({x, y}, ZoneTag::InteriorFiller);
  }
  for (const auto& [side, gi] : cat->members) {
    int u = g.u_ext(side, gi);
    for (int q = 1; q <= K; ++q) {
      b.tag(g.at(side, u - q), ZoneTag::FanOutZone);
      b.tag(g.at(side, u + q), ZoneTag::FanInZone);
    }
  }

  // Exterior slots for every planar slot of the source tile.
  for (const auto& slot : t.slots) {
    int gi = cat->index_of(slot.glue.label);
    int u = g.u_ext(slot.side, gi);
    Coord cell = g.at(slot.side, u);
    b.add_slot(cell, slot.side, exterior_label(slot.side, gi, off_of(g, slot.side, u)),
               slot.glue.strength, slot.initial_state);
    out.exterior.push_back({slot.side, gi, cell, cell, false, false, slot.initial_state});
  }

  auto groups = source_groups(t, *cat);

  // Merge chains, one per target slot with incoming signals. Laid first so
  // exit chains can reference their landing hops.
  std::map<std::pair<int, int>, MergePlan> merges;  // (side, glue) -> plan
  {
    std::map<std::pair<int, int>, std::vector<int>> fanin;  // target -> fanin indices
    for (const SourceGroup& grp : groups)
      for (int ri : grp.rule_indices) {
        const auto& r = t.rules[size_t(ri)];
        fanin[{int(r.tgt_side), cat->index_of(r.tgt_label)}].push_back(grp.member);
      }
    for (auto& [key, indices] : fanin) {
      Side side = Side(key.first);
      int gi = key.second;
      int u = g.u_ext(side, gi);
      // A delivery to an initially-on slot is discarded at runtime; its
      // merge chain dead-ends beside the exterior cell, which keeps that
      // cell within the 4-signal budget.
      bool target_initially_on = false;
      for (const auto& s : t.slots)
        if (s.side == side && cat->index_of(s.glue.label) == gi)
          target_initially_on = s.initial_state == GlueState::On;
      if (target_initially_on) continue;  // delivery would be discarded anyway
      int qmax = *std::max_element(indices.begin(), indices.end());
      std::vector<Coord> mpath;
      for (int q = qmax; q >= 0; --q) mpath.push_back(g.at(side, u + 1 + q));
      mpath.push_back(g.at(side, u));
      auto mhops = b.lay_chain(mpath, "G" + ns + ":" + std::to_string(cat->member_of(side, gi)),
                               1, false, std::nullopt);
      MergePlan plan;
      for (int fi_idx : indices) {
        size_t k = size_t(qmax - fi_idx);
        MergePlan::Landing landing;
        landing.fi_cell = mpath[k];
        landing.arrival_face = opposite(side);
        landing.hop_face = step_side(mpath[k], mpath[k + 1]);
        landing.hop_label = mhops[k + 1];
        landing.tail.assign(mpath.begin() + long(k), mpath.end());
        plan.by_fanin_index.emplace(fi_idx, std::move(landing));
      }
      merges.emplace(key, std::move(plan));
      // Delivery: the final merge hop turns the exterior slot on.
      b.add_rule(mpath.back(), step_side(mpath.back(), mpath[mpath.size() - 2]),
                 mhops[mpath.size() - 1], side,
                 exterior_label(side, gi, off_of(g, side, u)));
    }
  }

  // Broadcast trunks and exits.
  for (const SourceGroup& grp : groups) {
    const int u = g.u_ext(grp.side, grp.glue);
    const int depth = 2 + grp.member;
    RingWalk ring(g, depth);

    std::vector<Coord> trunk;
    trunk.push_back(g.at(grp.side, u));
    for (int q = 1; q <= K; ++q) trunk.push_back(g.at(grp.side, u - q));
    for (int d = 1; d <= depth; ++d) trunk.push_back(g.at(grp.side, u - K, d));
    const size_t radial_end = trunk.size() - 1;  // trunk index of the ring entry
    const int entry_p = ring.pos.at(trunk.back());

    struct Exit {
      int rule_index;
      int dist;
      Side tgt_side;
      int tgt_glue;
      Coord ring_cell;
    };
    std::vector<Exit> exits;
    for (int ri : grp.rule_indices) {
      const auto& r = t.rules[size_t(ri)];
      int hgi = cat->index_of(r.tgt_label);
      int fu = g.u_ext(r.tgt_side, hgi) + 1 + grp.member;
      Coord rc = g.at(r.tgt_side, fu, depth);
      exits.push_back({ri, ring.cyclic_dist(entry_p, ring.pos.at(rc)), r.tgt_side, hgi, rc});
    }
    std::sort(exits.begin(), exits.end(),
              [](const Exit& a, const Exit& b) { return a.dist < b.dist; });

    for (int dstep = 1; dstep <= exits.back().dist + 1; ++dstep)
      trunk.push_back(ring.cells[size_t((entry_p + dstep) % int(ring.cells.size()))]);

    auto hops =
        b.lay_chain(trunk, "T" + ns + ":" + std::to_string(grp.member), 1, false,
                    std::pair<Side, std::string>{
                        grp.side, exterior_label(grp.side, grp.glue, off_of(g, grp.side, u))});

    for (const Exit& e : exits) {
      std::vector<Coord> epath;
      epath.push_back(e.ring_cell);
      int fu = g.u_ext(e.tgt_side, e.tgt_glue) + 1 + grp.member;
      for (int d = depth - 1; d >= 0; --d) epath.push_back(g.at(e.tgt_side, fu, d));
      auto ehops = b.lay_chain(epath, "E" + ns + ":" + std::to_string(e.rule_index), 1, false,
                               std::nullopt);
      size_t k = radial_end + size_t(e.dist);
      b.tap(trunk, hops, k, step_side(epath[0], epath[1]), ehops[1]);

      // Arrival: the last exit hop fires the merge hop toward the target.
      // Deliveries to initially-on slots have no merge chain; the signal
      // dies at the fan-in cell, matching the runtime discard.
      auto& path = out.rule_paths[size_t(e.rule_index)];
      path.assign(trunk.begin(), trunk.begin() + long(k) + 1);
      path.insert(path.end(), epath.begin() + 1, epath.end());
      auto mit = merges.find({int(e.tgt_side), e.tgt_glue});
      if (mit != merges.end()) {
        const MergePlan::Landing& landing = mit->second.by_fanin_index.at(grp.member);
        b.add_rule(landing.fi_cell, landing.arrival_face, ehops.back(), landing.hop_face,
                   landing.hop_label);
        path.insert(path.end(), landing.tail.begin() + 1, landing.tail.end());
      }
    }
  }

  out.required_boundary = g.ring_cw(0);
  return out;
}

// ---------------------------------------------------------------------------
// Boundary circuits: a verifying circuit around the boundary ring that can
// only close once every boundary tile is present, and a presenter circuit,
// started by the verifying circuit's closing hop, that turns the initially-on
// exterior glues on via mutual activation as it sweeps clockwise. Adds at
// most 3 signals to any boundary tile.
// ---------------------------------------------------------------------------
inline void print_boundary_circuits(MacrotileBlueprint& out) {
  if (out.stage != BlueprintStage::Base)
    throw std::logic_error("print_boundary_circuits: blueprint already has circuits");
  const int K = out.catalog->directional_size();
  Geometry g{out.m, K, out.catalog->size(), (out.m - (2 * K + 1) * out.catalog->size()) / 2};
  Builder b(out);
  const std::string ns = std::to_string(out.source);
  const TileType& t = out.source_tiles->at(out.source);

  std::vector<Coord> ring = g.ring_cw(0);
  std::vector<Coord> loop = ring;
  loop.push_back(ring.front());  // wrap back into the start corner

  // Verifying circuit: first hop initially on, so it starts as soon as the
  // first two boundary tiles meet and can only close over a complete ring.
  auto vhops = b.lay_chain(loop, "V" + ns, 1, true, std::nullopt);
  // Closing the loop starts the presenter.
  auto phops = b.lay_chain(loop, "P" + ns, 1, false,
                           std::pair<Side, std::string>{
                               step_side(loop[loop.size() - 1], loop[loop.size() - 2]),
                               vhops.back()});

  // Presenter taps: each initially-on exterior slot is turned on by the
  // presenter hop leaving its boundary cell (mutual activation with the next
  // cell's relay).
  for (const auto& e : out.exterior) {
    const GlueSlot* src_slot = nullptr;
    for (const auto& s : t.slots)
      if (s.side == e.side && out.catalog->index_of(s.glue.label) == e.glue) src_slot = &s;
    if (!src_slot || src_slot->initial_state != GlueState::On) continue;
    int u = g.u_ext(e.side, e.glue);
    Coord cell = g.at(e.side, u);
    size_t k = 0;
    while (!(loop[k] == cell)) ++k;
    b.tap(loop, phops, k, e.side,
          exterior_label(e.side, e.glue, off_of(g, e.side, u)));
  }
  out.stage = BlueprintStage::Circuits;
}

}  // namespace bp
}  // namespace stamforge
