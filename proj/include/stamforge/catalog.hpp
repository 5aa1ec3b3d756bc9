#pragma once

#include <array>
#include <stdexcept>

#include "stamforge/analyzer.hpp"
#include "stamforge/assembly.hpp"

namespace stamforge {

// Global glue ordering shared by every macrotile of a compilation: distinct
// glues G sorted by label with 1-based indices (0 is reserved for "no
// glue"), the per-side lists G_i, and the directional multiset of all
// (side, glue) memberships. Side orderings run west-to-east on N and S and
// north-to-south on E and W, which keeps glue regions of abutting macrotile
// edges aligned.
struct GlueCatalog {
  std::vector<Glue> glues;                          // index 0 unused
  std::unordered_map<std::string, int> glue_index;  // label -> 1-based index
  std::array<std::vector<int>, 4> per_side;         // G_i as glue indices, ascending
  std::vector<std::pair<Side, int>> members;        // directional multiset, N,E,S,W major
  std::map<std::pair<int, int>, int> member_index;  // (side, glue idx) -> multiset position

  int size() const { return int(glues.size()) - 1; }       // |G|
  int directional_size() const { return int(members.size()); }  // |G-multiset|

  int index_of(const std::string& label) const {
    auto it = glue_index.find(label);
    return it == glue_index.end() ? 0 : it->second;
  }
  int member_of(Side s, int glue_idx) const {
    auto it = member_index.find({int(s), glue_idx});
    return it == member_index.end() ? -1 : it->second;
  }
  bool on_side(Side s, int glue_idx) const { return member_of(s, glue_idx) >= 0; }
};

inline GlueCatalog build_catalog(const System& sys) {
  auto diags = validate_tileset(*sys.tiles);
  if (!diags.empty())
    throw std::invalid_argument("build_catalog: tile set fails validation: " + diags[0].message);
  if (sys.tiles->types.empty()) throw std::invalid_argument("build_catalog: empty tile set");

  GlueCatalog cat;
  std::map<std::string, int> strengths;
  for (const auto& t : sys.tiles->types)
    for (const auto& s : t.slots) strengths.emplace(s.glue.label, s.glue.strength);
  if (strengths.empty()) throw std::invalid_argument("build_catalog: tile set declares no glues");

  cat.glues.push_back({"", 0});  // reserved index 0
  for (const auto& [label, strength] : strengths) {
    cat.glue_index.emplace(label, int(cat.glues.size()));
    cat.glues.push_back({label, strength});
  }
  for (const auto& t : sys.tiles->types)
    for (const auto& s : t.slots) {
      if (!is_planar(s.side)) continue;
      int gi = cat.glue_index.at(s.glue.label);
      auto& v = cat.per_side[size_t(s.side)];
      if (std::find(v.begin(), v.end(), gi) == v.end()) v.push_back(gi);
    }
  for (auto& v : cat.per_side) std::sort(v.begin(), v.end());
  for (Side s : {Side::N, Side::E, Side::S, Side::W})
    for (int gi : cat.per_side[size_t(s)]) {
      cat.member_index[{int(s), gi}] = int(cat.members.size());
      cat.members.push_back({s, gi});
    }
  return cat;
}

}  // namespace stamforge
