#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "stamforge/io.hpp"

using namespace stamforge;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture_path(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

bool systems_equal(const System& a, const System& b) {
  if (a.name != b.name || a.tau != b.tau || a.dim != b.dim) return false;
  if (a.tiles->size() != b.tiles->size()) return false;
  for (size_t i = 0; i < a.tiles->size(); ++i) {
    const TileType& ta = a.tiles->types[i];
    const TileType& tb = b.tiles->types[i];
    if (ta.name != tb.name || ta.slots != tb.slots || ta.rules != tb.rules) return false;
  }
  if (a.initial.size() != b.initial.size()) return false;
  for (size_t i = 0; i < a.initial.size(); ++i) {
    if (a.initial[i].infinite != b.initial[i].infinite) return false;
    if (!a.initial[i].infinite && a.initial[i].count != b.initial[i].count) return false;
    if (!(a.initial[i].supertile.assembly.cells == b.initial[i].supertile.assembly.cells))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("committed fixtures parse and match the in-memory definitions") {
  struct Row {
    const char* file;
    System sys;
  };
  Row rows[] = {{"duple1.stam", fixtures::duple1()},
                {"duple2.stam", fixtures::duple2()},
                {"echo.stam", fixtures::echo()},
                {"nosplit.stam", fixtures::nosplit()},
                {"pumping.stam", fixtures::pumping()},
                {"latch.stam", fixtures::latch()}};
  for (auto& r : rows) {
    CAPTURE(r.file);
    System parsed = parse_tileset(slurp(fixture_path(r.file)));
    CHECK(systems_equal(parsed, r.sys));
  }
}

TEST_CASE("round-trip identity for all committed fixtures") {
  for (const auto& e : std::filesystem::directory_iterator(FIXTURE_DIR)) {
    if (e.path().extension() != ".stam") continue;
    CAPTURE(e.path().filename().string());
    std::string text = slurp(e.path().string());
    System sys = parse_tileset(text);
    std::string once = serialize(sys);
    System sys2 = parse_tileset(once);
    CHECK(systems_equal(sys, sys2));
    CHECK(serialize(sys2) == once);
  }
}

TEST_CASE("parse errors carry line diagnostics") {
  SECTION("empty file: missing header") {
    try {
      parse_tileset("");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
  }
  SECTION("undeclared glue") {
    std::string text =
        "stamforge-format 1\ntileset t\ntau 1\ntile A\n  side E ghost on\nend\n";
    CHECK_THROWS_WITH(parse_tileset(text), Catch::Matchers::ContainsSubstring("undeclared glue"));
  }
  SECTION("deactivation is rejected as not STAM+") {
    std::string text =
        "stamforge-format 1\ntileset t\ntau 1\nglue a 1\nglue b 1\n"
        "tile A\n  side E a on\n  side N b on\n  signal E a -> N b deactivate\nend\n";
    CHECK_THROWS_WITH(parse_tileset(text), Catch::Matchers::ContainsSubstring("not STAM+"));
  }
  SECTION("unknown keys are rejected") {
    std::string text = "stamforge-format 1\ntileset t\ntau 1\nfrobnicate 3\n";
    CHECK_THROWS_AS(parse_tileset(text), ParseError);
  }
  SECTION("bad tau") {
    std::string text = "stamforge-format 1\ntileset t\ntau 0\n";
    CHECK_THROWS_AS(parse_tileset(text), ParseError);
  }
}

TEST_CASE("config blocks: counts and supertiles") {
  std::string text =
      "stamforge-format 1\n"
      "tileset seeded\n"
      "tau 2\n"
      "dim 2\n"
      "glue x 2\n"
      "tile A\n  side E x on\nend\n"
      "tile B\n  side W x on\nend\n"
      "config\n"
      "supertile inf\n"
      "  at 0 0 A\n"
      "  at 1 0 B\n"
      "end\n"
      "supertile 3\n"
      "  at 0 0 A\n"
      "end\n"
      "end\n";
  System sys = parse_tileset(text);
  REQUIRE(sys.initial.size() == 2);
  CHECK(sys.initial[0].infinite);
  CHECK(sys.initial[0].supertile.size() == 2);
  CHECK_FALSE(sys.initial[1].infinite);
  CHECK(sys.initial[1].count == 3);

  System again = parse_tileset(serialize(sys));
  CHECK(systems_equal(sys, again));
}
