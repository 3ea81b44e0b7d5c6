#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace afmsnn {

inline constexpr int kGridSide = 5;
inline constexpr int kGridCells = kGridSide * kGridSide;

/// A 5x5 black/white glyph, row-major; `true` is a black pixel.
struct SymbolGrid {
  std::array<bool, kGridCells> pixels{};
  std::string label;

  bool operator==(const SymbolGrid& other) const { return pixels == other.pixels; }

  int black_count() const;
  /// Five lines of '#' (black) and '.' (white).
  std::string to_art() const;
  static SymbolGrid from_art(std::string_view art, std::string label);
};

int hamming(const SymbolGrid& a, const SymbolGrid& b);
/// Pixels black in `variant` but white in `correct`.
int added_pixels(const SymbolGrid& variant, const SymbolGrid& correct);
/// Pixels white in `variant` but black in `correct`.
int missing_pixels(const SymbolGrid& variant, const SymbolGrid& correct);

/// Which pixel flips a library variant may contain.
enum class VariantMode {
  kMixed,           // any pixel may flip
  kAdditionalOnly,  // only white pixels turn black
};

struct LibraryEntry {
  SymbolGrid grid;
  double t_target = 0.0;  // s, measured from the input-layer spike
};

struct TrainingLibrary {
  SymbolGrid correct;
  std::vector<LibraryEntry> entries;  // entries[0] is the correct symbol
  double base_time = 0.0;             // s
  double shift_per_pixel = 0.0;       // s

  std::size_t size() const { return entries.size(); }
};

/// Glyphs shipped with the library (Z, O, X, +, T), parsed from the embedded fixture.
std::vector<SymbolGrid> builtin_symbols();
const SymbolGrid& builtin_symbol(std::string_view label);

/// Fixture format: a ':label' line, five lines of five '#'/'.' characters,
/// glyphs separated by blank lines.
std::vector<SymbolGrid> parse_symbol_fixture(std::string_view text);
std::string format_symbol_fixture(const std::vector<SymbolGrid>& symbols);

/// base_time - shift_per_pixel * Hamming(variant, library.correct).
double target_time(const SymbolGrid& variant, const TrainingLibrary& library);

/// The correct symbol plus size - 1 distinct variants with 1..max_flips flipped
/// pixels, drawn from a generator seeded with `rng_seed`.
TrainingLibrary make_library(const SymbolGrid& correct, int size, int max_flips, std::uint64_t rng_seed,
                             VariantMode mode = VariantMode::kMixed, double base_time = 100e-12,
                             double shift_per_pixel = 10e-12);

/// Structured text (JSON): label, pixel art and target time in ps per entry.
std::string serialize_library(const TrainingLibrary& library);

}  // namespace afmsnn
