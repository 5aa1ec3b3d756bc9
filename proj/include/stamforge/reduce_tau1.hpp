#pragma once

#include "stamforge/macrotile.hpp"

namespace stamforge {
namespace bp {

// ---------------------------------------------------------------------------
// Temperature-1 signal reduction: every generated tile carries at most 2
// signals, with no fan-out (mutual activation remains). The scale doubles.
//
// Ring layout, outermost first:
//   lane 0  carrier ring: per exterior position, a carrier tile holding the
//            exterior glue plus a helper tile; mutual-activation helper pair
//            replaces the 4-signal boundary tile of the base construction.
//   lane 1  presenter circuit (plus per-column relays).
//   lane 2  verifying circuit, one ring inward of the presenter.
//   lane 3  fan-out and fan-in (merge) zones.
//   4..K+3  one frame ring per (side, glue) membership.
// Launches descend and deliveries ascend on the two columns of their
// exterior position, so no cell ever carries more than one circuit and one
// wire relay.
// ---------------------------------------------------------------------------
inline MacrotileBlueprint reduce_signals_tau1(const MacrotileBlueprint& base) {
  if (base.stage != BlueprintStage::Circuits)
    throw std::logic_error("reduce_signals_tau1: boundary circuits must be printed first");
  const auto cat = base.catalog;
  const TileType& t = base.source_tiles->at(base.source);
  const int K = cat->directional_size();
  const int NG = cat->size();

  MacrotileBlueprint out;
  out.tau = base.tau;
  out.source = base.source;
  out.source_name = t.name;
  out.catalog = cat;
  out.source_tiles = base.source_tiles;
  out.stage = BlueprintStage::ReducedTau1;
  out.m = 2 * base.m;
  out.rule_paths.resize(t.rules.size());

  const int m = out.m;
  Geometry g{m, K, NG, (m - 2 * (2 * K + 1) * NG) / 2};
  Builder b(out);
  const std::string ns = std::to_string(base.source);

  // Absolute boundary position (distance from west on N/S, from north on
  // E/W) of the carrier and helper columns of glue gi.
  auto carrier_off = [&](int gi) { return g.margin + (gi - 1) * 2 * (2 * K + 1) + 2 * K; };
  auto u_of = [&](Side s, int off) {
    return (s == Side::N || s == Side::E) ? off : m - 1 - off;
  };

  // Grid and mortar everywhere.
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) b.cell({x, y});
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      if (x + 1 < m) b.mortar({x, y}, {x + 1, y}, "M" + ns + ":", base.tau);
      if (y + 1 < m) b.mortar({x, y}, {x, y + 1}, "M" + ns + ":", base.tau);
    }

  // Zone tags.
  for (const Coord& c : g.ring_cw(0)) b.tag(c, ZoneTag::Carrier);
  for (const Coord& c : g.ring_cw(1)) b.tag(c, ZoneTag::Circuit);
  for (const Coord& c : g.ring_cw(2)) b.tag(c, ZoneTag::Circuit);
  for (const Coord& c : g.ring_cw(3)) b.tag(c, ZoneTag::Boundary);
  for (int mi = 0; mi < K; ++mi)
    for (const Coord& c : g.ring_cw(4 + mi)) b.tag(c, ZoneTag::Frame);
  {
    int lo = (m - 2 * K * K) / 2;
    for (int y = lo; y < lo + 2 * K * K; ++y)
      for (int x = lo; x < lo + 2 * K * K; ++x) b.tag({x, y}, ZoneTag::InteriorFiller);
  }
  for (const auto& [side, gi] : cat->members) {
    int u0 = u_of(side, carrier_off(gi));
    for (int q = 1; q <= K; ++q) {
      b.tag(g.at(side, u0 - q, 3), ZoneTag::FanOutZone);
      b.tag(g.at(side, u0 + 1 + q, 3), ZoneTag::FanInZone);
    }
  }

  // Circuits: verifying ring on lane 2, presenter ring on lane 1, seeded by
  // the verifying circuit's closing hop.
  std::vector<Coord> vloop = g.ring_cw(2);
  vloop.push_back(vloop.front());
  auto vhops = b.lay_chain(vloop, "V" + ns, 1, true, std::nullopt);
  // Presenter path starts at the lane-1 cell directly outward of the
  // verifying corner so the seed hop only spans one face.
  std::vector<Coord> ploop;
  {
    std::vector<Coord> ring1 = g.ring_cw(1);
    Coord start{2, m - 2};  // north of the lane-2 corner (2, m-3)
    size_t s = 0;
    while (!(ring1[s] == start)) ++s;
    for (size_t i = 0; i < ring1.size(); ++i) ploop.push_back(ring1[(s + i) % ring1.size()]);
    ploop.push_back(start);
  }
  auto phops = b.lay_chain(ploop, "P" + ns, 1, false, std::nullopt);
  {
    // Verify close -> presenter seed, crossing from lane 2 to lane 1.
    Coord vcorner = vloop.front();
    std::string seed = "PS" + ns;
    b.add_rule(vcorner, step_side(vloop[vloop.size() - 1], vloop[vloop.size() - 2]), vhops.back(),
               Side::N, seed);
    b.add_slot(vcorner, Side::N, seed, 1, GlueState::Latent);
    b.add_slot(ploop.front(), Side::S, seed, 1, GlueState::On);
    Side dir = step_side(ploop[0], ploop[1]);
    b.add_rule(ploop.front(), Side::S, seed, dir, phops[1]);
  }

  std::map<Coord, size_t> ppos;
  for (size_t i = 0; i + 1 < ploop.size(); ++i) ppos[ploop[i]] = i;

  auto groups = source_groups(t, *cat);
  std::set<std::pair<int, int>> targeted;  // (side, glue) of delivery targets
  for (const SourceGroup& grp : groups)
    for (int ri : grp.rule_indices) {
      const auto& r = t.rules[size_t(ri)];
      targeted.insert({int(r.tgt_side), cat->index_of(r.tgt_label)});
    }

  // Exterior positions: carrier + helper per source slot.
  for (const auto& slot : t.slots) {
    const Side side = slot.side;
    const int gi = cat->index_of(slot.glue.label);
    const int off = carrier_off(gi);
    const int u0 = u_of(side, off);
    const Coord carrier = g.at(side, u0);       // lane 0, exterior slot
    const Coord helper = g.at(side, u0 + 1);    // lane 0, clockwise neighbor
    const std::string xlabel = exterior_label(side, gi, off);
    const bool is_source =
        std::any_of(t.rules.begin(), t.rules.end(), [&](const TransitionRule& r) {
          return r.src_side == side && cat->index_of(r.src_label) == gi;
        });
    const bool is_target = targeted.count({int(side), gi}) > 0;

    b.tag(carrier, ZoneTag::Carrier);
    b.tag(helper, ZoneTag::Carrier);
    b.add_slot(carrier, side, xlabel, slot.glue.strength, slot.initial_state);
    out.exterior.push_back({side, gi, carrier, carrier, false, false, slot.initial_state});

    const Side toward_helper = step_side(carrier, helper);
    if (slot.initial_state == GlueState::On) {
      // Presenter tap -> helper -> carrier: two mutual-activation hops
      // replace the base construction's 4-signal boundary tile.
      Coord tapcell = g.at(side, u0 + 1, 1);  // lane 1 under the helper
      std::string ulabel = "U" + ns + ":" + std::to_string(cat->member_of(side, gi));
      size_t k = ppos.at(tapcell);
      b.tap(ploop, phops, k, side, ulabel);
      b.add_slot(tapcell, side, ulabel, 1, GlueState::Latent);
      b.add_slot(helper, opposite(side), ulabel, 1, GlueState::On);
      std::string alabel = "A" + ns + ":" + std::to_string(cat->member_of(side, gi));
      b.add_rule(helper, opposite(side), ulabel, opposite(toward_helper), alabel);
      b.add_slot(helper, opposite(toward_helper), alabel, 1, GlueState::Latent);
      b.add_slot(carrier, toward_helper, alabel, 1, GlueState::On);
      b.add_rule(carrier, toward_helper, alabel, side, xlabel);
    }
    if (is_source) {
      // Launch wire: descends under the carrier column when the slot starts
      // on, under the helper column when it is delivered later, keeping
      // every lane-1 cell at <= 2 signals.
      std::vector<Coord> path;
      path.push_back(carrier);
      int col = u0;
      if (slot.initial_state == GlueState::On) {
        for (int d = 1; d <= 3; ++d) path.push_back(g.at(side, u0, d));
      } else {
        path.push_back(helper);
        col = u0 + 1;
        for (int d = 1; d <= 3; ++d) path.push_back(g.at(side, u0 + 1, d));
      }
      // Continue counterclockwise along lane 3 through the fan-out zone,
      // then descend to the frame and run clockwise past the exits.
      const int depth = 4 + cat->member_of(side, gi);
      for (int u = col - 1; u >= u0 - K; --u) path.push_back(g.at(side, u, 3));
      for (int d = 4; d <= depth; ++d) path.push_back(g.at(side, u0 - K, d));
      RingWalk ring(g, depth);
      const size_t radial_end = path.size() - 1;
      const int entry_p = ring.pos.at(path.back());

      struct Exit {
        int rule_index;
        int dist;
        Side tgt_side;
        int tgt_glue;
        Coord ring_cell;
      };
      std::vector<Exit> exits;
      for (size_t ri = 0; ri < t.rules.size(); ++ri) {
        const auto& r = t.rules[ri];
        if (r.src_side != side || cat->index_of(r.src_label) != gi) continue;
        int hgi = cat->index_of(r.tgt_label);
        int mi = cat->member_of(side, gi);
        int fu = u_of(r.tgt_side, carrier_off(hgi)) + 2 + mi;
        Coord rc = g.at(r.tgt_side, fu, depth);
        exits.push_back({int(ri), ring.cyclic_dist(entry_p, ring.pos.at(rc)), r.tgt_side, hgi, rc});
      }
      std::sort(exits.begin(), exits.end(),
                [](const Exit& a, const Exit& b) { return a.dist < b.dist; });
      for (int dstep = 1; dstep <= exits.back().dist + 1; ++dstep)
        path.push_back(ring.cells[size_t((entry_p + dstep) % int(ring.cells.size()))]);

      auto hops = b.lay_chain(path, "T" + ns + ":" + std::to_string(cat->member_of(side, gi)), 1,
                              false, std::pair<Side, std::string>{side, xlabel});
      for (const Exit& e : exits) {
        std::vector<Coord> epath;
        epath.push_back(e.ring_cell);
        int mi = cat->member_of(side, gi);
        int fu = u_of(e.tgt_side, carrier_off(e.tgt_glue)) + 2 + mi;
        for (int d = depth - 1; d >= 3; --d) epath.push_back(g.at(e.tgt_side, fu, d));
        auto ehops = b.lay_chain(epath, "E" + ns + ":" + std::to_string(e.rule_index), 1, false,
                                 std::nullopt);
        size_t k = radial_end + size_t(e.dist);
        b.tap(path, hops, k, step_side(epath[0], epath[1]), ehops[1]);
        auto& prov = out.rule_paths[size_t(e.rule_index)];
        prov.assign(path.begin(), path.begin() + long(k) + 1);
        prov.insert(prov.end(), epath.begin() + 1, epath.end());
      }
    }
  }

  // Merge chains on lane 3, ending with the two-hop ascent into the carrier.
  {
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> fanin;  // -> (member, rule)
    for (const SourceGroup& grp : groups)
      for (int ri : grp.rule_indices) {
        const auto& r = t.rules[size_t(ri)];
        fanin[{int(r.tgt_side), cat->index_of(r.tgt_label)}].push_back({grp.member, ri});
      }
    for (auto& [key, arr] : fanin) {
      Side side = Side(key.first);
      int gi = key.second;
      int off = carrier_off(gi);
      int u0 = u_of(side, off);
      // A delivery to an initially-on slot would be discarded at runtime;
      // those signals simply die at their fan-in cell.
      bool target_initially_on = false;
      for (const auto& s : t.slots)
        if (s.side == side && cat->index_of(s.glue.label) == gi)
          target_initially_on = s.initial_state == GlueState::On;
      if (target_initially_on) continue;
      int qmax = 0;
      for (auto& [mi, ri] : arr) qmax = std::max(qmax, mi);
      std::vector<Coord> mpath;
      for (int q = qmax; q >= 0; --q) mpath.push_back(g.at(side, u0 + 2 + q, 3));
      mpath.push_back(g.at(side, u0 + 1, 3));
      mpath.push_back(g.at(side, u0, 3));
      mpath.push_back(g.at(side, u0, 2));
      mpath.push_back(g.at(side, u0, 1));
      Coord carrier = g.at(side, u0);
      mpath.push_back(carrier);
      auto mhops = b.lay_chain(mpath, "G" + ns + ":" + std::to_string(cat->member_of(side, gi)),
                               1, false, std::nullopt);
      b.add_rule(carrier, step_side(carrier, mpath[mpath.size() - 2]), mhops.back(), side,
                 exterior_label(side, gi, off));
      for (auto& [mi, ri] : arr) {
        size_t k = size_t(qmax - mi);
        int hop_count = int((4 + mi) - 3);  // exit chain hops: depth-1 .. 3
        std::string elabel =
            "E" + ns + ":" + std::to_string(ri) + ":" + std::to_string(hop_count);
        b.add_rule(mpath[k], opposite(side), elabel, step_side(mpath[k], mpath[k + 1]),
                   mhops[k + 1]);
        auto& prov = out.rule_paths[size_t(ri)];
        prov.insert(prov.end(), mpath.begin() + long(k), mpath.end());
      }
    }
  }

  out.required_boundary = g.ring_cw(0);
  {
    auto r1 = g.ring_cw(1), r2 = g.ring_cw(2);
    out.required_boundary.insert(out.required_boundary.end(), r1.begin(), r1.end());
    out.required_boundary.insert(out.required_boundary.end(), r2.begin(), r2.end());
  }
  return out;
}

}  // namespace bp
}  // namespace stamforge
