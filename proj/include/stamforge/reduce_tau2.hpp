#pragma once

#include "stamforge/macrotile.hpp"

namespace stamforge {
namespace bp {

// ---------------------------------------------------------------------------
// Temperature >= 2 reduction: every generated tile carries at most one
// signal, with neither fan-out nor mutual activation. Cooperation replaces
// the circuits and the two-signal gadgets of the base construction:
//
//   lane 0  exterior carriers, attached one by one over strength-tau rails
//            from the presenter ring; latent slots are holes filled by
//            delivery-gated floating carriers. Strength-tau exterior glues
//            split over two carriers as ceil/floor halves whose labels are
//            direction-tagged, so any binding fires at most one side.
//   lane 1  presenter ring: sequential cooperative growth (rail + chain),
//            seeded by the last verifier tile's strength-tau glue.
//   lane 2  verifier ring: sequential cooperative growth over rails from
//            the core ring; completes only over a complete core boundary.
//   lane 3+ mortar core. Signals run as one-rule relay chains; fan-out uses
//            pre-bonded duple taps, fan-in uses first-come pocket variants,
//            and chain crossings are resolved by a pocket with two floating
//            variants.
// ---------------------------------------------------------------------------

struct Tau2Geometry {
  int m = 0;
  int K = 0;
  int NG = 0;
  int margin = 0;
  int W = 0;

  Coord cell(Side s, int a, int d) const {  // absolute side position a, depth d
    int u = (s == Side::N || s == Side::E) ? a : m - 1 - a;
    switch (s) {
      case Side::N: return {u, m - 1 - d};
      case Side::E: return {m - 1 - d, m - 1 - u};
      case Side::S: return {m - 1 - u, d};
      case Side::W: return {d, u};
      default: return {0, 0};
    }
  }
  int region_base(int gi) const { return margin + (gi - 1) * W; }
  int p_hi(int gi) const { return region_base(gi); }
  int p_lo(int gi) const { return region_base(gi) + 1; }
  int p_land(int gi, int s) const { return region_base(gi) + 3 + 3 * s; }
  int p_launch(int gi) const { return region_base(gi) + 3 + 3 * K; }
  int frame_depth(int member) const { return 6 + 3 * member; }
};

namespace t2 {

// Incremental wire walker: lays one-hop-per-cell relay chains. Each hop glue
// is latent on the upstream face and on on the downstream face; the
// downstream cell's relay rule is added when the walk moves on.
struct Walker {
  Builder& b;
  std::string prefix;
  Coord cur;
  Side in_face = Side::N;
  std::string in_label;
  int n = 0;
  std::vector<Coord> trace;

  Walker(Builder& b_, std::string prefix_, Coord start, Side in_face_, std::string in_label_)
      : b(b_), prefix(std::move(prefix_)), cur(start), in_face(in_face_),
        in_label(std::move(in_label_)) {
    trace.push_back(start);
  }

  std::string next_label() { return prefix + ":" + std::to_string(++n); }

  void step(const Coord& to) {
    std::string label = next_label();
    Side dir = step_side(cur, to);
    b.add_rule(cur, in_face, in_label, dir, label);
    b.add_slot(cur, dir, label, 1, GlueState::Latent);
    b.add_slot(to, opposite(dir), label, 1, GlueState::On);
    cur = to;
    in_face = opposite(dir);
    in_label = label;
    trace.push_back(to);
  }

  // Bridges a pocket: the current cell fires `a` into the pocket; the cell
  // past the pocket holds `g_out` (on) as its incoming hop. The pocket's
  // floating tile(s) supply the actual relay.
  void bridge(const Coord& pocket, const std::string& a, int a_strength,
              const std::string& g_out, int g_strength) {
    Side dir = step_side(cur, pocket);
    b.add_rule(cur, in_face, in_label, dir, a);
    b.add_slot(cur, dir, a, a_strength, GlueState::Latent);
    Coord past = pocket + side_offset(dir);
    b.add_slot(past, opposite(dir), g_out, g_strength, GlueState::On);
    cur = past;
    in_face = opposite(dir);
    in_label = g_out;
    trace.push_back(pocket);
    trace.push_back(past);
  }

  void finish(Side face, const std::string& label, int strength) {
    b.add_rule(cur, in_face, in_label, face, label);
    b.add_slot(cur, face, label, strength, GlueState::Latent);
  }
};

struct CrossingPocket {
  bool has_h = false, has_v = false;
  Coord h_prev, h_next, v_prev, v_next;
  std::string ah, gh, av, gv;
};

}  // namespace t2

inline MacrotileBlueprint reduce_signals_tau_ge2(const MacrotileBlueprint& base, int tau) {
  if (tau < 2) throw std::invalid_argument("reduce_signals_tau_ge2: tau must be >= 2");
  if (base.stage != BlueprintStage::Base)
    throw std::logic_error("reduce_signals_tau_ge2: expects a circuit-free base blueprint");
  const auto cat = base.catalog;
  const TileType& t = base.source_tiles->at(base.source);
  const int K = cat->directional_size();
  const int NG = cat->size();
  const int hi = (tau + 1) / 2;
  const int lo = tau / 2;

  // Source patterns this construction cannot realize: a glue of strength
  // other than tau firing from both sides of an axis would need mutual
  // activation, and strengths above tau would let floating carriers dock on
  // a neighbor's glue alone.
  {
    std::map<std::string, std::set<int>> firing_sides;
    for (const auto& tt : base.source_tiles->types)
      for (const auto& r : tt.rules) firing_sides[r.src_label].insert(int(r.src_side));
    for (const auto& [label, sides] : firing_sides) {
      int gi = cat->index_of(label);
      if (cat->glues[size_t(gi)].strength == tau) continue;  // split glues are fine
      bool ns = sides.count(int(Side::N)) && sides.count(int(Side::S));
      bool ew = sides.count(int(Side::E)) && sides.count(int(Side::W));
      if (ns || ew)
        throw std::invalid_argument(
            "reduce_signals_tau_ge2: glue '" + label +
            "' of strength != tau fires from both sides of an axis");
    }
    for (int gi = 1; gi <= NG; ++gi)
      if (cat->glues[size_t(gi)].strength > tau)
        throw std::invalid_argument("reduce_signals_tau_ge2: glue strength above tau unsupported");
  }

  MacrotileBlueprint out;
  out.tau = tau;
  out.source = base.source;
  out.source_name = t.name;
  out.catalog = cat;
  out.source_tiles = base.source_tiles;
  out.stage = BlueprintStage::ReducedTauGe2;
  out.m = std::max(10 * K * K + 2, 3 * K * K + 12 * K + 10);
  out.rule_paths.resize(t.rules.size());
  out.seed = {3, 3};

  Tau2Geometry g{out.m, K, NG, 0, 3 * K + 6};
  g.margin = (out.m - g.W * NG) / 2;
  const int m = out.m;
  Builder b(out);
  const std::string ns = std::to_string(base.source);
  Geometry rg{m, K, NG, g.margin};

  auto depth_of = [&](const Coord& c) {
    return std::min(std::min(c.x, c.y), std::min(m - 1 - c.x, m - 1 - c.y));
  };

  // -------------------------------------------------------------------
  // Planning.
  // -------------------------------------------------------------------
  auto groups = source_groups(t, *cat);

  struct ExitPlan {
    int rule_index = 0;
    Side tgt_side = Side::N;
    int tgt_glue = 0;
    int land_col = 0;
    int dist = 0;
  };
  struct TrunkPlan {
    SourceGroup grp;
    int depth = 0;
    int launch_col = 0;
    std::vector<ExitPlan> exits;
    std::vector<Coord> ring_cells;
  };
  std::vector<TrunkPlan> trunks;
  for (const SourceGroup& grp : groups) {
    TrunkPlan tp;
    tp.grp = grp;
    tp.depth = g.frame_depth(grp.member);
    tp.launch_col = g.p_launch(grp.glue);
    RingWalk ring(rg, tp.depth);
    Coord entry = g.cell(grp.side, tp.launch_col, tp.depth);
    int entry_p = ring.pos.at(entry);
    for (int ri : grp.rule_indices) {
      const auto& r = t.rules[size_t(ri)];
      ExitPlan e;
      e.rule_index = ri;
      e.tgt_side = r.tgt_side;
      e.tgt_glue = cat->index_of(r.tgt_label);
      e.land_col = g.p_land(e.tgt_glue, grp.member);
      e.dist = ring.cyclic_dist(entry_p, ring.pos.at(g.cell(r.tgt_side, e.land_col, tp.depth)));
      tp.exits.push_back(e);
    }
    std::sort(tp.exits.begin(), tp.exits.end(),
              [](const ExitPlan& a, const ExitPlan& b) { return a.dist < b.dist; });
    tp.ring_cells.push_back(entry);
    for (int d = 1; d <= tp.exits.back().dist + 1; ++d)
      tp.ring_cells.push_back(ring.cells[size_t((entry_p + d) % int(ring.cells.size()))]);
    trunks.push_back(std::move(tp));
  }

  // Cells every laid ring chain passes, and the duple-tap pocket cells.
  std::set<Coord> chain_cells, tap_pockets;
  for (const TrunkPlan& tp : trunks) {
    for (const Coord& c : tp.ring_cells) chain_cells.insert(c);
    for (const ExitPlan& e : tp.exits) {
      tap_pockets.insert(g.cell(e.tgt_side, e.land_col, tp.depth));
      tap_pockets.insert(g.cell(e.tgt_side, e.land_col, tp.depth - 1));
    }
  }
  // Crossings: a vertical wire passing through a cell of a laid ring chain.
  std::map<Coord, t2::CrossingPocket> crossings;
  auto note_crossing = [&](Side side, int col, int from_d, int to_d) {
    for (int d = std::max(6, from_d); d <= to_d; ++d) {
      if ((d - 6) % 3 != 0) continue;
      Coord c = g.cell(side, col, d);
      if (chain_cells.count(c) && !tap_pockets.count(c)) crossings.emplace(c, t2::CrossingPocket{});
    }
  };
  for (const TrunkPlan& tp : trunks) {
    note_crossing(tp.grp.side, tp.launch_col, 6, tp.depth - 1);
    for (const ExitPlan& e : tp.exits) note_crossing(e.tgt_side, e.land_col, 6, tp.depth - 2);
  }

  // Merge plans per target slot.
  struct MergePlan {
    Side side = Side::N;
    int glue = 0;
    bool latent = false;
    bool split = false;
    std::vector<int> land_cols;                    // descending absolute position
    std::map<int, std::string> om_by_col;          // landing glue labels
  };
  std::map<std::pair<int, int>, MergePlan> merges;
  for (const SourceGroup& grp : groups)
    for (int ri : grp.rule_indices) {
      const auto& r = t.rules[size_t(ri)];
      int gi = cat->index_of(r.tgt_label);
      auto& mp = merges[{int(r.tgt_side), gi}];
      mp.side = r.tgt_side;
      mp.glue = gi;
      int col = g.p_land(gi, grp.member);
      if (!mp.om_by_col.count(col)) {
        mp.land_cols.push_back(col);
        mp.om_by_col[col] = "om" + ns + ":" + std::to_string(ri);
      }
    }
  std::set<Coord> merge_pockets;
  for (auto& [key, mp] : merges) {
    std::sort(mp.land_cols.begin(), mp.land_cols.end(), std::greater<int>());
    const GlueSlot* slot = nullptr;
    for (const auto& s : t.slots)
      if (s.side == mp.side && cat->index_of(s.glue.label) == mp.glue) slot = &s;
    mp.latent = slot && slot->initial_state == GlueState::Latent;
    mp.split = slot && slot->glue.strength == tau;
    if (!mp.latent) continue;
    for (size_t i = 1; i < mp.land_cols.size(); ++i)
      merge_pockets.insert(g.cell(mp.side, mp.land_cols[i], 4));
    if (mp.split) {
      merge_pockets.insert(g.cell(mp.side, g.p_lo(mp.glue), 4));
      merge_pockets.insert(g.cell(mp.side, g.p_hi(mp.glue), 4));
    }
  }

  std::set<Coord> pockets = tap_pockets;
  for (auto& [c, cp] : crossings) pockets.insert(c);
  for (const Coord& c : merge_pockets) pockets.insert(c);

  // Latent-carrier holes.
  struct CarrierPlan {
    const GlueSlot* slot = nullptr;
    int gi = 0;
    bool split = false;
    Coord hi_cell, lo_cell;
  };
  std::vector<CarrierPlan> carriers;
  std::set<Coord> holes;
  for (const auto& slot : t.slots) {
    CarrierPlan cp;
    cp.slot = &slot;
    cp.gi = cat->index_of(slot.glue.label);
    cp.split = slot.glue.strength == tau;
    cp.hi_cell = g.cell(slot.side, g.p_hi(cp.gi), 0);
    cp.lo_cell = g.cell(slot.side, g.p_lo(cp.gi), 0);
    if (slot.initial_state == GlueState::Latent) {
      holes.insert(cp.hi_cell);
      if (cp.split) holes.insert(cp.lo_cell);
    }
    carriers.push_back(cp);
  }

  // -------------------------------------------------------------------
  // Core cells and mortar (depth >= 3, pockets absent).
  // -------------------------------------------------------------------
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) {
      Coord c{x, y};
      if (depth_of(c) < 3 || pockets.count(c)) continue;
      b.cell(c);
    }
  for (int y = 3; y < m - 3; ++y)
    for (int x = 3; x < m - 3; ++x) {
      Coord c{x, y};
      if (!out.has(c)) continue;
      for (Coord n : {Coord{x + 1, y}, Coord{x, y + 1}})
        if (out.in_range(n) && depth_of(n) >= 3 && out.has(n))
          b.mortar(c, n, "M" + ns + ":", tau);
    }

  for (int mi = 0; mi < K; ++mi)
    for (const Coord& c : rg.ring_cw(g.frame_depth(mi)))
      if (out.has(c)) b.tag(c, ZoneTag::Frame);
  {
    int sq = std::max(1, K * K);
    int lo_c = (m - sq) / 2;
    for (int y = lo_c; y < lo_c + sq; ++y)
      for (int x = lo_c; x < lo_c + sq; ++x)
        if (out.has({x, y})) b.tag({x, y}, ZoneTag::InteriorFiller);
  }
  for (const auto& [side, gi] : cat->members)
    for (int q = 0; q < K; ++q) {
      Coord fo = g.cell(side, g.p_launch(gi) - q, 4);
      Coord fi = g.cell(side, g.p_land(gi, q), 4);
      if (out.has(fo)) b.tag(fo, ZoneTag::FanOutZone);
      if (out.has(fi)) b.tag(fi, ZoneTag::FanInZone);
    }

  // -------------------------------------------------------------------
  // Growth rings.
  // -------------------------------------------------------------------
  auto ring_partner = [&](const Coord& c, int want_depth) -> std::optional<Coord> {
    for (Side s : {Side::N, Side::E, Side::S, Side::W}) {
      Coord n = c + side_offset(s);
      if (out.in_range(n) && depth_of(n) == want_depth) return n;
    }
    return std::nullopt;
  };
  auto grow_ring = [&](const std::vector<Coord>& ring, const std::string& ns2, int partner_depth,
                       std::optional<std::pair<Coord, std::string>> seed_from) {
    for (size_t k = 0; k < ring.size(); ++k) {
      const Coord c = ring[k];
      b.tag(c, ZoneTag::Circuit);
      if (k == 0 && seed_from) {
        b.add_slot(c, step_side(c, seed_from->first), seed_from->second, tau, GlueState::On);
        b.add_slot(seed_from->first, step_side(seed_from->first, c), seed_from->second, tau,
                   GlueState::On);
        continue;
      }
      const Coord prev = ring[k == 0 ? ring.size() - 1 : k - 1];
      std::string chain = "c" + ns2 + ":" + std::to_string(k);
      auto partner = ring_partner(c, partner_depth);
      if (partner) {
        b.add_slot(c, step_side(c, prev), chain, lo, GlueState::On);
        b.add_slot(prev, step_side(prev, c), chain, lo, GlueState::On);
        std::string rail = "r" + ns2 + ":" + std::to_string(k);
        b.add_slot(c, step_side(c, *partner), rail, hi, GlueState::On);
        b.add_slot(*partner, step_side(*partner, c), rail, hi, GlueState::On);
      } else {
        // Ring corners have no inward partner; gate on the previous cell.
        b.add_slot(c, step_side(c, prev), chain, tau, GlueState::On);
        b.add_slot(prev, step_side(prev, c), chain, tau, GlueState::On);
      }
    }
  };

  auto rotate_to = [](std::vector<Coord> ring, const Coord& start) {
    size_t s = 0;
    while (!(ring[s] == start)) ++s;
    std::rotate(ring.begin(), ring.begin() + long(s), ring.end());
    return ring;
  };
  // Both rings start one past their top-left corner so the seed cell has an
  // inward rail partner; the corner then closes the ring on a tau-chain.
  std::vector<Coord> ring2 = rotate_to(rg.ring_cw(2), Coord{3, m - 3});
  {
    Coord seed_partner = *ring_partner(ring2[0], 3);
    grow_ring(ring2, "2" + ns, 3, std::make_pair(seed_partner, "s2" + ns));
  }
  std::vector<Coord> ring1 = rotate_to(rg.ring_cw(1), Coord{2, m - 2});
  {
    // The presenter seed hangs off the verifier ring's last cell, which is
    // the lane-2 corner directly inward of the presenter's first cell.
    Coord vlast = ring2.back();
    grow_ring(ring1, "1" + ns, 2, std::make_pair(vlast, "s1" + ns));
  }
  std::vector<Coord> ring0 = rg.ring_cw(0);
  for (size_t k = 0; k < ring0.size(); ++k) {
    const Coord c = ring0[k];
    if (holes.count(c)) continue;
    b.tag(c, ZoneTag::Carrier);
    auto partner = ring_partner(c, 1);
    if (partner) {
      std::string rail = "r0" + ns + ":" + std::to_string(k);
      b.add_slot(c, step_side(c, *partner), rail, tau, GlueState::On);
      b.add_slot(*partner, step_side(*partner, c), rail, tau, GlueState::On);
    } else {
      const Coord prev = ring0[k == 0 ? ring0.size() - 1 : k - 1];
      std::string chain = "c0" + ns + ":" + std::to_string(k);
      b.add_slot(c, step_side(c, prev), chain, tau, GlueState::On);
      b.add_slot(prev, step_side(prev, c), chain, tau, GlueState::On);
    }
  }

  // -------------------------------------------------------------------
  // Carriers and sensing.
  // -------------------------------------------------------------------
  for (const CarrierPlan& cp : carriers) {
    const GlueSlot& slot = *cp.slot;
    const Side side = slot.side;
    const bool latent = slot.initial_state == GlueState::Latent;
    const bool sensing_hi = side == Side::N || side == Side::E;
    const int off = g.p_hi(cp.gi);
    const bool is_source =
        std::any_of(t.rules.begin(), t.rules.end(), [&](const TransitionRule& r) {
          return r.src_side == side && cat->index_of(r.src_label) == cp.gi;
        });

    struct Half {
      Coord cell;
      std::string label;
      int strength;
      bool senses;
      int col;
    };
    std::vector<Half> halves;
    if (cp.split) {
      halves.push_back(
          {cp.hi_cell, exterior_label(side, cp.gi, off) + "h", hi, sensing_hi, g.p_hi(cp.gi)});
      halves.push_back(
          {cp.lo_cell, exterior_label(side, cp.gi, off) + "l", lo, !sensing_hi, g.p_lo(cp.gi)});
    } else {
      halves.push_back(
          {cp.hi_cell, exterior_label(side, cp.gi, off), slot.glue.strength, true, g.p_hi(cp.gi)});
    }
    out.exterior.push_back({side, cp.gi, cp.hi_cell, cp.split ? cp.lo_cell : cp.hi_cell, cp.split,
                            latent, slot.initial_state});

    const std::string fw = "fw" + ns + ":" + std::to_string(cat->member_of(side, cp.gi));
    for (size_t h = 0; h < halves.size(); ++h) {
      const Half& half = halves[h];
      const Coord next = g.cell(side, half.col + 1, 0);
      if (!latent) {
        b.add_slot(half.cell, side, half.label, half.strength, GlueState::On);
        b.tag(half.cell, ZoneTag::Carrier);
        if (is_source && half.senses) {
          b.add_rule(half.cell, side, half.label, step_side(half.cell, next), fw + ":1");
          b.add_slot(half.cell, step_side(half.cell, next), fw + ":1", 1, GlueState::Latent);
        }
      } else {
        FloatingTile ft;
        ft.home = half.cell;
        ft.zone = ZoneTag::Carrier;
        std::string psi = "ps" + ns + ":" + std::to_string(cat->member_of(side, cp.gi)) +
                          (h == 0 ? "h" : "l");
        Coord lane1 = half.cell + side_offset(opposite(side));
        ft.type.slots.push_back({side, Glue{half.label, half.strength}, GlueState::On});
        ft.type.slots.push_back({opposite(side), Glue{psi, tau}, GlueState::On});
        b.add_slot(lane1, side, psi, tau, GlueState::Latent);
        if (is_source && half.senses) {
          ft.type.rules.push_back({side, half.label, step_side(half.cell, next), fw + ":1"});
          ft.type.slots.push_back(
              {step_side(half.cell, next), Glue{fw + ":1", 1}, GlueState::Latent});
        }
        out.floating.push_back(std::move(ft));
      }
    }
  }

  // -------------------------------------------------------------------
  // Wires: trunks, taps with ascents, merges, deliveries.
  // -------------------------------------------------------------------
  auto emit_crossing_bridge = [&](t2::Walker& w, const Coord& pocket, bool horizontal) {
    t2::CrossingPocket& cp = crossings.at(pocket);
    std::string a = w.prefix + (horizontal ? ":ah" : ":av") + std::to_string(++w.n);
    std::string gg = w.prefix + (horizontal ? ":gh" : ":gv") + std::to_string(++w.n);
    if (horizontal) {
      cp.has_h = true;
      cp.h_prev = w.cur;
      cp.h_next = pocket + side_offset(step_side(w.cur, pocket));
      cp.ah = a;
      cp.gh = gg;
    } else {
      cp.has_v = true;
      cp.v_prev = w.cur;
      cp.v_next = pocket + side_offset(step_side(w.cur, pocket));
      cp.av = a;
      cp.gv = gg;
    }
    w.bridge(pocket, a, hi, gg, lo);
  };

  auto vertical_walk = [&](t2::Walker& w, Side side, int col, int from_d, int to_d) {
    const int stepd = from_d < to_d ? 1 : -1;
    int d = from_d;
    while (stepd > 0 ? d <= to_d : d >= to_d) {
      Coord to = g.cell(side, col, d);
      if (crossings.count(to)) {
        // The bridge advances past the pocket in one move.
        emit_crossing_bridge(w, to, false);
        d += 2 * stepd;
      } else {
        w.step(to);
        d += stepd;
      }
    }
  };

  for (TrunkPlan& tp : trunks) {
    const SourceGroup& grp = tp.grp;
    const Side side = grp.side;
    const bool sensing_hi = side == Side::N || side == Side::E;
    const bool split = cat->glues[size_t(grp.glue)].strength == tau;
    const int from_col = split && !sensing_hi ? g.p_lo(grp.glue) : g.p_hi(grp.glue);
    const std::string fw = "fw" + ns + ":" + std::to_string(grp.member);

    // Forward chain along lane 0. The first hop slot into from_col+1 pairs
    // with the sensing rule laid with the carrier.
    Coord first = g.cell(side, from_col + 1, 0);
    b.add_slot(first, step_side(first, g.cell(side, from_col, 0)), fw + ":1", 1, GlueState::On);
    t2::Walker w(b, fw, first, step_side(first, g.cell(side, from_col, 0)), fw + ":1");
    w.n = 1;
    for (int a = from_col + 2; a <= tp.launch_col; ++a) w.step(g.cell(side, a, 0));
    for (int d = 1; d <= 5; ++d) w.step(g.cell(side, tp.launch_col, d));
    vertical_walk(w, side, tp.launch_col, 6, tp.depth);

    // Clockwise along the frame with duple taps.
    size_t idx = 1, exit_i = 0;
    while (idx < tp.ring_cells.size()) {
      Coord to = tp.ring_cells[idx];
      const bool is_tap = exit_i < tp.exits.size() && tp.exits[exit_i].dist == int(idx);
      if (!is_tap) {
        if (crossings.count(to)) {
          emit_crossing_bridge(w, to, true);
          idx += 2;
        } else {
          w.step(to);
          idx += 1;
        }
        continue;
      }
      const ExitPlan& e = tp.exits[exit_i++];
      const Coord pb = to;
      const Coord pc = g.cell(e.tgt_side, e.land_col, tp.depth - 1);
      const Coord after = tp.ring_cells[idx + 1];
      const Coord rail_cell = g.cell(e.tgt_side, e.land_col, tp.depth - 2);
      const std::string stem = "x" + ns + ":" + std::to_string(e.rule_index);
      const std::string fa = stem + "a", fb = stem + "b", fg = stem + "g";
      const std::string h0 = stem + "c", h1 = stem + "e";

      const Side dir = step_side(w.cur, pb);
      b.add_rule(w.cur, w.in_face, w.in_label, dir, fa);
      b.add_slot(w.cur, dir, fa, hi, GlueState::Latent);
      b.add_slot(after, step_side(after, pb), h0, 1, GlueState::On);
      b.add_slot(rail_cell, step_side(rail_cell, pc), fg, lo, GlueState::On);
      b.add_slot(rail_cell, step_side(rail_cell, pc), h1, 1, GlueState::On);

      FloatingTile B;
      B.home = pb;
      B.zone = ZoneTag::Gadget;
      B.group = int(out.floating.size());
      B.type.slots.push_back({opposite(dir), Glue{fa, hi}, GlueState::On});
      B.type.slots.push_back({step_side(pb, pc), Glue{fb, tau}, GlueState::On});
      B.type.slots.push_back({step_side(pb, after), Glue{h0, 1}, GlueState::Latent});
      B.type.rules.push_back({opposite(dir), fa, step_side(pb, after), h0});
      FloatingTile C;
      C.home = pc;
      C.zone = ZoneTag::Gadget;
      C.group = B.group;
      C.type.slots.push_back({step_side(pc, pb), Glue{fb, tau}, GlueState::On});
      C.type.slots.push_back({step_side(pc, rail_cell), Glue{fg, lo}, GlueState::On});
      C.type.slots.push_back({step_side(pc, rail_cell), Glue{h1, 1}, GlueState::Latent});
      C.type.rules.push_back({step_side(pc, rail_cell), fg, step_side(pc, rail_cell), h1});
      out.floating.push_back(std::move(B));
      out.floating.push_back(std::move(C));

      // Ascent from the rail cell to the wire row (lane 4, exclusive:
      // the lane-4 landing cell belongs to the merge).
      t2::Walker up(b, "e" + ns + ":" + std::to_string(e.rule_index), rail_cell,
                    step_side(rail_cell, pc), h1);
      if (tp.depth - 3 >= 5)
        vertical_walk(up, e.tgt_side, e.land_col, tp.depth - 3, 5);
      const std::string om = merges.at({int(e.tgt_side), e.tgt_glue}).om_by_col.count(e.land_col)
                                 ? merges.at({int(e.tgt_side), e.tgt_glue}).om_by_col.at(e.land_col)
                                 : "om" + ns + ":" + std::to_string(e.rule_index);
      up.finish(step_side(up.cur, g.cell(e.tgt_side, e.land_col, 4)), om, hi);

      auto& prov = out.rule_paths[size_t(e.rule_index)];
      prov = w.trace;
      prov.push_back(pb);
      prov.push_back(pc);
      prov.insert(prov.end(), up.trace.begin(), up.trace.end());
      prov.push_back(g.cell(e.tgt_side, e.land_col, 4));

      w.cur = after;
      w.in_face = step_side(after, pb);
      w.in_label = h0;
      w.trace.push_back(pb);
      w.trace.push_back(after);
      idx += 2;
    }
  }

  // Merges on lane 4 plus the psi deliveries.
  for (auto& [key, mp] : merges) {
    if (!mp.latent) continue;  // deliveries to on slots die at their landing
    const Side side = mp.side;
    const std::string gm = "g" + ns + ":" + std::to_string(cat->member_of(side, mp.glue));
    const Coord start = g.cell(side, mp.land_cols.front(), 4);
    const Coord below = start + side_offset(opposite(side));
    b.add_slot(start, step_side(start, below), mp.om_by_col.at(mp.land_cols.front()), hi,
               GlueState::On);
    t2::Walker w(b, gm, start, step_side(start, below), mp.om_by_col.at(mp.land_cols.front()));

    const int target_col = mp.split ? g.p_lo(mp.glue) : g.p_hi(mp.glue);
    int col = mp.land_cols.front() - 1;
    while (col > target_col) {
      Coord to = g.cell(side, col, 4);
      if (!merge_pockets.count(to)) {
        w.step(to);
        --col;
        continue;
      }
      // First-come variant pocket at a nearer landing.
      const std::string om = mp.om_by_col.at(col);
      const std::string cpre = gm + ":p" + std::to_string(++w.n);
      const std::string cnx = gm + ":n" + std::to_string(++w.n);
      const std::string rho = gm + ":r" + std::to_string(++w.n);
      const Side dir = step_side(w.cur, to);
      const Coord pbelow = to + side_offset(opposite(side));
      const Coord past = to + side_offset(dir);
      b.add_rule(w.cur, w.in_face, w.in_label, dir, cpre);
      b.add_slot(w.cur, dir, cpre, hi, GlueState::Latent);
      b.add_slot(pbelow, step_side(pbelow, to), rho, lo, GlueState::On);
      b.add_slot(past, opposite(dir), cnx, 1, GlueState::On);
      FloatingTile FP;
      FP.home = to;
      FP.zone = ZoneTag::Gadget;
      FP.type.slots.push_back({opposite(dir), Glue{cpre, hi}, GlueState::On});
      FP.type.slots.push_back({step_side(to, pbelow), Glue{rho, lo}, GlueState::On});
      FP.type.slots.push_back({dir, Glue{cnx, 1}, GlueState::Latent});
      FP.type.rules.push_back({opposite(dir), cpre, dir, cnx});
      FloatingTile FI;
      FI.home = to;
      FI.zone = ZoneTag::Gadget;
      FI.type.slots.push_back({step_side(to, pbelow), Glue{om, hi}, GlueState::On});
      FI.type.slots.push_back({step_side(to, pbelow), Glue{rho, lo}, GlueState::On});
      FI.type.slots.push_back({dir, Glue{cnx, 1}, GlueState::Latent});
      FI.type.rules.push_back({step_side(to, pbelow), om, dir, cnx});
      out.floating.push_back(std::move(FP));
      out.floating.push_back(std::move(FI));
      w.cur = past;
      w.in_face = opposite(dir);
      w.in_label = cnx;
      w.trace.push_back(to);
      w.trace.push_back(past);
      col -= 2;  // the bridge already advanced past the pocket
    }

    const std::string psi_h = "ps" + ns + ":" + std::to_string(cat->member_of(side, mp.glue)) + "h";
    const std::string psi_l = "ps" + ns + ":" + std::to_string(cat->member_of(side, mp.glue)) + "l";
    if (!mp.split) {
      w.step(g.cell(side, g.p_hi(mp.glue), 4));
      for (int d = 3; d >= 1; --d) w.step(g.cell(side, g.p_hi(mp.glue), d));
      w.finish(side, psi_h, tau);
    } else {
      // Fork duple over the (p_lo, p_hi) pocket pair, then two ascents.
      const Coord pb = g.cell(side, g.p_lo(mp.glue), 4);
      const Coord pc = g.cell(side, g.p_hi(mp.glue), 4);
      const std::string stem = gm + ":f";
      const std::string fa = stem + "a", fb = stem + "b", fg = stem + "g";
      const std::string b1 = stem + "1", b2 = stem + "2";
      const Side dir = step_side(w.cur, pb);
      const Coord below_c = pc + side_offset(opposite(side));  // rail provider
      const Coord out_b = pb + side_offset(side);              // depth-3 ascent starts
      const Coord out_c = pc + side_offset(side);
      b.add_rule(w.cur, w.in_face, w.in_label, dir, fa);
      b.add_slot(w.cur, dir, fa, hi, GlueState::Latent);
      b.add_slot(below_c, step_side(below_c, pc), fg, lo, GlueState::On);
      b.add_slot(out_b, step_side(out_b, pb), b1, 1, GlueState::On);
      b.add_slot(out_c, step_side(out_c, pc), b2, 1, GlueState::On);
      FloatingTile B;
      B.home = pb;
      B.zone = ZoneTag::Gadget;
      B.group = int(out.floating.size());
      B.type.slots.push_back({opposite(dir), Glue{fa, hi}, GlueState::On});
      B.type.slots.push_back({dir, Glue{fb, tau}, GlueState::On});
      B.type.slots.push_back({side, Glue{b1, 1}, GlueState::Latent});
      B.type.rules.push_back({opposite(dir), fa, side, b1});
      FloatingTile C;
      C.home = pc;
      C.zone = ZoneTag::Gadget;
      C.group = B.group;
      C.type.slots.push_back({opposite(dir), Glue{fb, tau}, GlueState::On});
      C.type.slots.push_back({step_side(pc, below_c), Glue{fg, lo}, GlueState::On});
      C.type.slots.push_back({side, Glue{b2, 1}, GlueState::Latent});
      C.type.rules.push_back({step_side(pc, below_c), fg, side, b2});
      out.floating.push_back(std::move(B));
      out.floating.push_back(std::move(C));

      t2::Walker wl(b, gm + "L", out_b, step_side(out_b, pb), b1);
      for (int d = 2; d >= 1; --d) wl.step(g.cell(side, g.p_lo(mp.glue), d));
      wl.finish(side, psi_l, tau);
      t2::Walker wh(b, gm + "H", out_c, step_side(out_c, pc), b2);
      for (int d = 2; d >= 1; --d) wh.step(g.cell(side, g.p_hi(mp.glue), d));
      wh.finish(side, psi_h, tau);
    }
  }

  // Crossing gadget variants (both wires registered their corridors).
  for (auto& [c, cp] : crossings) {
    if (cp.has_h && cp.has_v) {
      FloatingTile XH;
      XH.home = c;
      XH.zone = ZoneTag::Gadget;
      XH.type.slots.push_back({step_side(c, cp.h_prev), Glue{cp.ah, hi}, GlueState::On});
      XH.type.slots.push_back({step_side(c, cp.h_next), Glue{cp.gh, lo}, GlueState::On});
      XH.type.slots.push_back({step_side(c, cp.v_prev), Glue{cp.av, hi}, GlueState::On});
      XH.type.slots.push_back({step_side(c, cp.v_next), Glue{cp.gv, lo}, GlueState::Latent});
      XH.type.rules.push_back({step_side(c, cp.v_prev), cp.av, step_side(c, cp.v_next), cp.gv});
      FloatingTile XV;
      XV.home = c;
      XV.zone = ZoneTag::Gadget;
      XV.type.slots.push_back({step_side(c, cp.v_prev), Glue{cp.av, hi}, GlueState::On});
      XV.type.slots.push_back({step_side(c, cp.v_next), Glue{cp.gv, lo}, GlueState::On});
      XV.type.slots.push_back({step_side(c, cp.h_prev), Glue{cp.ah, hi}, GlueState::On});
      XV.type.slots.push_back({step_side(c, cp.h_next), Glue{cp.gh, lo}, GlueState::Latent});
      XV.type.rules.push_back({step_side(c, cp.h_prev), cp.ah, step_side(c, cp.h_next), cp.gh});
      out.floating.push_back(std::move(XH));
      out.floating.push_back(std::move(XV));
    } else if (cp.has_h || cp.has_v) {
      FloatingTile X;
      X.home = c;
      X.zone = ZoneTag::Gadget;
      const bool h = cp.has_h;
      X.type.slots.push_back(
          {step_side(c, h ? cp.h_prev : cp.v_prev), Glue{h ? cp.ah : cp.av, hi}, GlueState::On});
      X.type.slots.push_back(
          {step_side(c, h ? cp.h_next : cp.v_next), Glue{h ? cp.gh : cp.gv, lo}, GlueState::On});
      out.floating.push_back(std::move(X));
    }
  }

  out.required_boundary.clear();
  for (const Coord& c : ring1) out.required_boundary.push_back(c);
  for (const Coord& c : ring0)
    if (!holes.count(c)) out.required_boundary.push_back(c);
  return out;
}

}  // namespace bp
}  // namespace stamforge
