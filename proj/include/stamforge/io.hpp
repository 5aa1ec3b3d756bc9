#pragma once

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "stamforge/assembly.hpp"

namespace stamforge {

struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

namespace iodetail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    if (tok[0] == '#') break;  // comment to end of line
    out.push_back(tok);
  }
  return out;
}

inline long long parse_int(const std::string& s, int line) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError(line, "expected integer, got '" + s + "'");
  return v;
}

inline GlueState parse_state(const std::string& s, int line) {
  if (s == "on") return GlueState::On;
  if (s == "latent") return GlueState::Latent;
  throw ParseError(line, "expected on|latent, got '" + s + "'");
}

}  // namespace iodetail

// Line-oriented tile system format. Keyword-led blocks:
//
//   stamforge-format 1
//   tileset <name>
//   tau <int>
//   dim 2|3
//   glue <label> <strength>
//   tile <name>
//     side <N|E|S|W|U|D> <label> <on|latent>
//     signal <side> <label> -> <side> <label> [activate|deactivate]
//   end
//   config
//     supertile <count|inf>
//       at <x> <y> <tile>
//     end
//   end
//
// Unknown keys are rejected. An absent config block means the default
// initial state (infinite copies of every singleton tile).
inline System parse_tileset(const std::string& text) {
  System sys;
  auto tiles = std::make_shared<Tileset>();
  std::unordered_map<std::string, int> declared_glues;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_header = false, have_name = false, have_tau = false;

  enum class Ctx { Top, Tile, Config, Supertile };
  Ctx ctx = Ctx::Top;
  TileType cur_tile;
  InitialEntry cur_entry;
  std::vector<std::pair<Coord, std::string>> cur_cells;

  auto require_glue = [&](const std::string& label, int strength, int line) {
    auto it = declared_glues.find(label);
    if (it == declared_glues.end())
      throw ParseError(line, "tile references undeclared glue '" + label + "'");
    if (strength >= 0 && it->second != strength)
      throw ParseError(line, "glue '" + label + "' strength mismatch with declaration");
    return it->second;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    auto tok = iodetail::tokenize(raw);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];

    if (!have_header) {
      if (kw != "stamforge-format" || tok.size() != 2 || tok[1] != "1")
        throw ParseError(lineno, "missing header: expected 'stamforge-format 1'");
      have_header = true;
      continue;
    }

    switch (ctx) {
      case Ctx::Top: {
        if (kw == "tileset" && tok.size() == 2) {
          sys.name = tok[1];
          have_name = true;
        } else if (kw == "tau" && tok.size() == 2) {
          long long t = iodetail::parse_int(tok[1], lineno);
          if (t < 1) throw ParseError(lineno, "tau must be >= 1");
          sys.tau = int(t);
          have_tau = true;
        } else if (kw == "dim" && tok.size() == 2) {
          long long d = iodetail::parse_int(tok[1], lineno);
          if (d != 2 && d != 3) throw ParseError(lineno, "dim must be 2 or 3");
          sys.dim = int(d);
        } else if (kw == "glue" && tok.size() == 3) {
          long long s = iodetail::parse_int(tok[2], lineno);
          if (s < 0) throw ParseError(lineno, "glue strength must be >= 0");
          if (!declared_glues.emplace(tok[1], int(s)).second)
            throw ParseError(lineno, "glue '" + tok[1] + "' declared twice");
        } else if (kw == "tile" && tok.size() == 2) {
          if (tiles->find(tok[1]) >= 0)
            throw ParseError(lineno, "tile '" + tok[1] + "' declared twice");
          cur_tile = TileType{};
          cur_tile.name = tok[1];
          ctx = Ctx::Tile;
        } else if (kw == "config" && tok.size() == 1) {
          ctx = Ctx::Config;
        } else {
          throw ParseError(lineno, "unknown or malformed directive '" + kw + "'");
        }
        break;
      }
      case Ctx::Tile: {
        if (kw == "side" && tok.size() == 4) {
          auto side = side_from_name(tok[1]);
          if (!side) throw ParseError(lineno, "bad side '" + tok[1] + "'");
          int strength = require_glue(tok[2], -1, lineno);
          GlueState st = iodetail::parse_state(tok[3], lineno);
          cur_tile.slots.push_back({*side, Glue{tok[2], strength}, st});
        } else if (kw == "signal" && (tok.size() == 6 || tok.size() == 7)) {
          if (tok[3] != "->") throw ParseError(lineno, "expected '->' in signal");
          auto s1 = side_from_name(tok[1]);
          auto s2 = side_from_name(tok[4]);
          if (!s1 || !s2) throw ParseError(lineno, "bad side in signal");
          TransitionRule r{*s1, tok[2], *s2, tok[5], false};
          if (tok.size() == 7) {
            if (tok[6] == "deactivate")
              r.deactivate = true;
            else if (tok[6] != "activate")
              throw ParseError(lineno, "bad action '" + tok[6] + "'");
          }
          cur_tile.rules.push_back(std::move(r));
        } else if (kw == "end" && tok.size() == 1) {
          tiles->add(std::move(cur_tile));
          ctx = Ctx::Top;
        } else {
          throw ParseError(lineno, "unknown directive '" + kw + "' in tile block");
        }
        break;
      }
      case Ctx::Config: {
        if (kw == "supertile" && tok.size() == 2) {
          cur_entry = InitialEntry{};
          if (tok[1] == "inf") {
            cur_entry.infinite = true;
          } else {
            cur_entry.infinite = false;
            long long n = iodetail::parse_int(tok[1], lineno);
            if (n < 1) throw ParseError(lineno, "supertile count must be >= 1 or inf");
            cur_entry.count = uint64_t(n);
          }
          cur_cells.clear();
          ctx = Ctx::Supertile;
        } else if (kw == "end" && tok.size() == 1) {
          ctx = Ctx::Top;
        } else {
          throw ParseError(lineno, "unknown directive '" + kw + "' in config block");
        }
        break;
      }
      case Ctx::Supertile: {
        if (kw == "at" && tok.size() == 4) {
          Coord c{int32_t(iodetail::parse_int(tok[1], lineno)),
                  int32_t(iodetail::parse_int(tok[2], lineno))};
          cur_cells.push_back({c, tok[3]});
        } else if (kw == "end" && tok.size() == 1) {
          if (cur_cells.empty()) throw ParseError(lineno, "empty supertile");
          Assembly a;
          a.tiles = tiles;
          for (const auto& [c, name] : cur_cells) {
            int ti = tiles->find(name);
            if (ti < 0) throw ParseError(lineno, "supertile references unknown tile '" + name + "'");
            for (const auto& cell : a.cells)
              if (cell.first == c) throw ParseError(lineno, "duplicate supertile coordinate");
            a.cells.push_back({c, initial_placement(tiles->at(uint32_t(ti)), uint32_t(ti))});
          }
          a.sort_cells();
          cur_entry.supertile = canonicalize(std::move(a));
          sys.initial.push_back(std::move(cur_entry));
          ctx = Ctx::Config;
        } else {
          throw ParseError(lineno, "unknown directive '" + kw + "' in supertile block");
        }
        break;
      }
    }
  }
  if (ctx != Ctx::Top) throw ParseError(lineno, "unterminated block");
  if (!have_name) throw ParseError(lineno, "missing 'tileset' directive");
  if (!have_tau) throw ParseError(lineno, "missing 'tau' directive");

  sys.tiles = tiles;

  auto diags = validate_tileset(*tiles);
  if (!diags.empty()) {
    std::string msg = "validation failed:";
    for (const auto& d : diags) msg += "\n  [" + d.code + "] " + d.message;
    throw std::runtime_error(msg);
  }
  return sys;
}

// Deterministic serialization: glue declarations sorted by label, tiles and
// rules in definition order. parse(serialize(sys)) reproduces the system.
inline std::string serialize(const System& sys) {
  std::ostringstream out;
  out << "stamforge-format 1\n";
  out << "tileset " << sys.name << "\n";
  out << "tau " << sys.tau << "\n";
  out << "dim " << sys.dim << "\n";

  std::map<std::string, int> glues;
  for (const auto& t : sys.tiles->types)
    for (const auto& s : t.slots) glues.emplace(s.glue.label, s.glue.strength);
  for (const auto& [label, strength] : glues) out << "glue " << label << " " << strength << "\n";

  for (const auto& t : sys.tiles->types) {
    out << "tile " << t.name << "\n";
    for (const auto& s : t.slots)
      out << "  side " << side_name(s.side) << " " << s.glue.label << " "
          << (s.initial_state == GlueState::On ? "on" : "latent") << "\n";
    for (const auto& r : t.rules) {
      out << "  signal " << side_name(r.src_side) << " " << r.src_label << " -> "
          << side_name(r.tgt_side) << " " << r.tgt_label;
      if (r.deactivate) out << " deactivate";
      out << "\n";
    }
    out << "end\n";
  }

  if (!sys.initial.empty()) {
    out << "config\n";
    for (const auto& e : sys.initial) {
      out << "supertile " << (e.infinite ? std::string("inf") : std::to_string(e.count)) << "\n";
      for (const auto& [c, p] : e.supertile.assembly.cells)
        out << "  at " << c.x << " " << c.y << " " << sys.tiles->at(p.type).name << "\n";
      out << "end\n";
    }
    out << "end\n";
  }
  return out.str();
}

}  // namespace stamforge
