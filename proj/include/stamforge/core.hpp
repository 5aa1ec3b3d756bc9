#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace stamforge {

// Tile sides. U and D exist so 3D tile definitions can be represented, but
// every operation in this release rejects them with a diagnostic.
enum class Side : uint8_t { N = 0, E = 1, S = 2, W = 3, U = 4, D = 5 };

constexpr Side opposite(Side s) {
  switch (s) {
    case Side::N: return Side::S;
    case Side::E: return Side::W;
    case Side::S: return Side::N;
    case Side::W: return Side::E;
    case Side::U: return Side::D;
    case Side::D: return Side::U;
  }
  return Side::N;
}

constexpr bool is_planar(Side s) { return s != Side::U && s != Side::D; }

inline const char* side_name(Side s) {
  switch (s) {
    case Side::N: return "N";
    case Side::E: return "E";
    case Side::S: return "S";
    case Side::W: return "W";
    case Side::U: return "U";
    case Side::D: return "D";
  }
  return "?";
}

inline std::optional<Side> side_from_name(const std::string& s) {
  if (s == "N") return Side::N;
  if (s == "E") return Side::E;
  if (s == "S") return Side::S;
  if (s == "W") return Side::W;
  if (s == "U") return Side::U;
  if (s == "D") return Side::D;
  return std::nullopt;
}

struct Coord {
  int32_t x = 0;
  int32_t y = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
  // Row-major order: least y first, then least x. This is the canonical
  // ordering used to pick a supertile's origin representative.
  friend bool operator<(const Coord& a, const Coord& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  }
  Coord operator+(const Coord& o) const { return {x + o.x, y + o.y}; }
  Coord operator-(const Coord& o) const { return {x - o.x, y - o.y}; }
};

constexpr Coord side_offset(Side s) {
  switch (s) {
    case Side::N: return {0, 1};
    case Side::E: return {1, 0};
    case Side::S: return {0, -1};
    case Side::W: return {-1, 0};
    default: return {0, 0};
  }
}

struct CoordHash {
  size_t operator()(const Coord& c) const {
    uint64_t v = (uint64_t(uint32_t(c.x)) << 32) | uint32_t(c.y);
    v *= 0x9e3779b97f4a7c15ull;
    return size_t(v ^ (v >> 29));
  }
};

enum class GlueState : uint8_t { Latent = 0, On = 1 };

struct Glue {
  std::string label;
  int strength = 0;

  friend bool operator==(const Glue&, const Glue&) = default;
};

// Two glues bind iff label and strength both match.
inline bool glues_match(const Glue& a, const Glue& b) {
  return a.strength == b.strength && a.label == b.label;
}

struct GlueSlot {
  Side side = Side::N;
  Glue glue;
  GlueState initial_state = GlueState::Latent;

  friend bool operator==(const GlueSlot&, const GlueSlot&) = default;
};

// Activation rule: when the glue at (src_side, src_label) binds, turn the
// slot (tgt_side, tgt_label) on. STAM+ has no deactivation; a parsed
// deactivation rule keeps the flag so validation can reject it.
struct TransitionRule {
  Side src_side = Side::N;
  std::string src_label;
  Side tgt_side = Side::N;
  std::string tgt_label;
  bool deactivate = false;

  friend bool operator==(const TransitionRule&, const TransitionRule&) = default;
};

struct TileType {
  std::string name;
  std::vector<GlueSlot> slots;
  std::vector<TransitionRule> rules;

  // At most one slot per (side, label); see validate_tileset.
  int find_slot(Side side, const std::string& label) const {
    for (size_t i = 0; i < slots.size(); ++i)
      if (slots[i].side == side && slots[i].glue.label == label) return int(i);
    return -1;
  }

  // Indices of rules fired by the binding of (side, label).
  void rules_from(Side side, const std::string& label, std::vector<int>& out) const {
    for (size_t i = 0; i < rules.size(); ++i)
      if (rules[i].src_side == side && rules[i].src_label == label) out.push_back(int(i));
  }

  int signal_count() const { return int(rules.size()); }
};

struct Tileset {
  std::vector<TileType> types;
  std::unordered_map<std::string, uint32_t> index;

  uint32_t add(TileType t) {
    uint32_t id = uint32_t(types.size());
    index.emplace(t.name, id);
    types.push_back(std::move(t));
    return id;
  }
  const TileType& at(uint32_t i) const { return types[i]; }
  int find(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? -1 : int(it->second);
  }
  size_t size() const { return types.size(); }
};

using TilesetPtr = std::shared_ptr<const Tileset>;

inline void hash_combine(uint64_t& h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 12) + (h >> 4);
}

inline uint64_t hash_string(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace stamforge
