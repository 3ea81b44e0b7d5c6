#include <set>

#include "afmsnn/errors.hpp"
#include "afmsnn/io.hpp"
#include "afmsnn/patterns.hpp"
#include "doctest.h"

using namespace afmsnn;

TEST_CASE("embedded glyphs match the fixture file") {
  const auto from_file = parse_symbol_fixture(read_file(AFMSNN_SOURCE_DIR "/data/symbols.txt"));
  const auto builtin = builtin_symbols();
  REQUIRE(from_file.size() == builtin.size());
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    CHECK(from_file[i].label == builtin[i].label);
    CHECK(from_file[i] == builtin[i]);
  }
  CHECK(parse_symbol_fixture(format_symbol_fixture(builtin)).size() == builtin.size());
}

TEST_CASE("glyph art round-trips and rejects malformed input") {
  const auto& o = builtin_symbol("O");
  CHECK(SymbolGrid::from_art(o.to_art(), "O") == o);
  CHECK(o.black_count() == 12);
  CHECK_THROWS_AS(SymbolGrid::from_art("#####\n#...#\n", "bad"), InvalidArgument);
  CHECK_THROWS_AS(SymbolGrid::from_art("####x\n#...#\n#...#\n#...#\n#####\n", "bad"), InvalidArgument);
  CHECK_THROWS(builtin_symbol("Q"));
}

TEST_CASE("pixel distances") {
  const auto& z = builtin_symbol("Z");
  const auto& x = builtin_symbol("X");
  CHECK(hamming(z, z) == 0);
  CHECK(hamming(z, x) == hamming(x, z));
  CHECK(hamming(z, x) == added_pixels(z, x) + missing_pixels(z, x));
  CHECK(added_pixels(z, x) == missing_pixels(x, z));
}

TEST_CASE("library of 20 with up to 3 flips") {
  const auto lib = make_library(builtin_symbol("O"), 20, 3, 1);
  REQUIRE(lib.size() == 20);
  CHECK(lib.entries[0].grid == lib.correct);
  std::set<std::string> arts;
  for (const auto& e : lib.entries) {
    arts.insert(e.grid.to_art());
    CHECK(hamming(e.grid, lib.correct) <= 3);
  }
  CHECK(arts.size() == 20);
  for (std::size_t i = 1; i < lib.size(); ++i) CHECK(hamming(lib.entries[i].grid, lib.correct) >= 1);
}

TEST_CASE("smallest library") {
  const auto lib = make_library(builtin_symbol("X"), 2, 1, 3);
  REQUIRE(lib.size() == 2);
  CHECK(hamming(lib.entries[1].grid, lib.correct) == 1);
}

TEST_CASE("additional-only libraries never remove pixels") {
  const auto lib = make_library(builtin_symbol("Z"), 20, 3, 5, VariantMode::kAdditionalOnly);
  for (const auto& e : lib.entries) CHECK(missing_pixels(e.grid, lib.correct) == 0);
}

TEST_CASE("library generation is deterministic") {
  const auto a = serialize_library(make_library(builtin_symbol("O"), 20, 3, 42));
  const auto b = serialize_library(make_library(builtin_symbol("O"), 20, 3, 42));
  const auto c = serialize_library(make_library(builtin_symbol("O"), 20, 3, 43));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("unsatisfiable libraries are rejected") {
  // "O" has 13 white pixels: one added pixel gives only 13 distinct variants.
  CHECK_THROWS_AS(make_library(builtin_symbol("O"), 15, 1, 1, VariantMode::kAdditionalOnly), UnsatisfiableError);
  CHECK_NOTHROW(make_library(builtin_symbol("O"), 14, 1, 1, VariantMode::kAdditionalOnly));
  CHECK_THROWS_AS(make_library(builtin_symbol("O"), 27, 1, 1), UnsatisfiableError);
  CHECK_THROWS_AS(make_library(builtin_symbol("O"), 0, 1, 1), InvalidArgument);
}

TEST_CASE("target times") {
  const auto lib = make_library(builtin_symbol("O"), 2, 1, 1);
  auto extra = lib.correct;
  auto missing = lib.correct;
  int added = 0;
  for (auto&& px : extra.pixels)
    if (!px && added < 2) {
      px = true;
      ++added;
    }
  for (auto&& px : missing.pixels)
    if (px) {
      px = false;
      break;
    }
  CHECK(target_time(lib.correct, lib) == 100e-12);
  CHECK(target_time(extra, lib) == doctest::Approx(80e-12));
  CHECK(target_time(missing, lib) == doctest::Approx(90e-12));

  auto one_extra = lib.correct;
  for (auto&& px : one_extra.pixels)
    if (!px) {
      px = true;
      break;
    }
  CHECK(target_time(one_extra, lib) == target_time(missing, lib));
}
