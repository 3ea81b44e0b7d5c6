#include "afmsnn/patterns.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "afmsnn/errors.hpp"
#include "afmsnn/units.hpp"
#include "json.hpp"

namespace afmsnn {

namespace {

// Keep in sync with data/symbols.txt (checked by the unit tests).
constexpr std::string_view kBuiltinFixture = R"(:Z
#####
...#.
..#..
.#...
#####

:O
.###.
#...#
#...#
#...#
.###.

:X
#...#
.#.#.
..#..
.#.#.
#...#

:+
..#..
..#..
#####
..#..
..#..

:T
#####
..#..
..#..
..#..
..#..
)";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

int SymbolGrid::black_count() const { return static_cast<int>(std::count(pixels.begin(), pixels.end(), true)); }

std::string SymbolGrid::to_art() const {
  std::string out;
  out.reserve(kGridCells + kGridSide);
  for (int r = 0; r < kGridSide; ++r) {
    for (int c = 0; c < kGridSide; ++c) out += pixels[static_cast<std::size_t>(r * kGridSide + c)] ? '#' : '.';
    out += '\n';
  }
  return out;
}

SymbolGrid SymbolGrid::from_art(std::string_view art, std::string label) {
  SymbolGrid g;
  g.label = std::move(label);
  std::size_t cell = 0;
  for (char ch : art) {
    if (ch == '#' || ch == '.') {
      if (cell >= kGridCells) throw InvalidArgument("symbol '" + g.label + "': more than 25 pixels");
      g.pixels[cell++] = (ch == '#');
    } else if (ch != '\n' && ch != '\r' && ch != ' ') {
      throw InvalidArgument(std::string("symbol '") + g.label + "': unexpected character '" + ch + "'");
    }
  }
  if (cell != kGridCells) throw InvalidArgument("symbol '" + g.label + "': expected exactly 25 pixels");
  return g;
}

int hamming(const SymbolGrid& a, const SymbolGrid& b) {
  int d = 0;
  for (std::size_t i = 0; i < kGridCells; ++i) d += a.pixels[i] != b.pixels[i];
  return d;
}

int added_pixels(const SymbolGrid& variant, const SymbolGrid& correct) {
  int d = 0;
  for (std::size_t i = 0; i < kGridCells; ++i) d += variant.pixels[i] && !correct.pixels[i];
  return d;
}

int missing_pixels(const SymbolGrid& variant, const SymbolGrid& correct) {
  int d = 0;
  for (std::size_t i = 0; i < kGridCells; ++i) d += !variant.pixels[i] && correct.pixels[i];
  return d;
}

std::vector<SymbolGrid> parse_symbol_fixture(std::string_view text) {
  std::vector<SymbolGrid> out;
  std::string label;
  std::string art;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    out.push_back(SymbolGrid::from_art(art, label));
    art.clear();
    open = false;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) {
      flush();
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == ':') {
      flush();
      label = std::string(trim(line.substr(1)));
      if (label.empty()) throw InvalidArgument("symbol fixture: empty label");
      open = true;
      continue;
    }
    if (!open) throw InvalidArgument("symbol fixture: pixel row before any ':label' line");
    if (line.size() != kGridSide) throw InvalidArgument("symbol fixture: rows must have 5 characters ('" + label + "')");
    art += line;
    art += '\n';
    if (end == text.size()) break;
  }
  flush();

  std::set<std::string> seen;
  for (const auto& g : out)
    if (!seen.insert(g.label).second) throw InvalidArgument("symbol fixture: duplicate label '" + g.label + "'");
  return out;
}

std::string format_symbol_fixture(const std::vector<SymbolGrid>& symbols) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out += '\n';
    out += ':' + symbols[i].label + '\n' + symbols[i].to_art();
  }
  return out;
}

std::vector<SymbolGrid> builtin_symbols() { return parse_symbol_fixture(kBuiltinFixture); }

const SymbolGrid& builtin_symbol(std::string_view label) {
  static const std::vector<SymbolGrid> symbols = builtin_symbols();
  for (const auto& s : symbols)
    if (s.label == label) return s;
  throw InvalidArgument("unknown symbol '" + std::string(label) + "'");
}

double target_time(const SymbolGrid& variant, const TrainingLibrary& library) {
  return library.base_time - library.shift_per_pixel * hamming(variant, library.correct);
}

TrainingLibrary make_library(const SymbolGrid& correct, int size, int max_flips, std::uint64_t rng_seed,
                             VariantMode mode, double base_time, double shift_per_pixel) {
  if (size < 2) throw InvalidArgument("make_library: size must be at least 2");
  if (max_flips < 1) throw InvalidArgument("make_library: max_flips must be at least 1");

  std::vector<int> pool;
  for (int i = 0; i < kGridCells; ++i)
    if (mode == VariantMode::kMixed || !correct.pixels[static_cast<std::size_t>(i)]) pool.push_back(i);
  const int flips = std::min<int>(max_flips, static_cast<int>(pool.size()));

  double available = 0.0;
  for (int k = 1; k <= flips; ++k) available += binomial(static_cast<int>(pool.size()), k);
  if (available < size - 1)
    throw UnsatisfiableError("make_library: only " + std::to_string(static_cast<long long>(available)) +
                             " distinct variants exist for the requested flips");

  TrainingLibrary lib;
  lib.correct = correct;
  lib.base_time = base_time;
  lib.shift_per_pixel = shift_per_pixel;
  lib.entries.push_back({correct, base_time});

  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> flip_count(1, flips);
  std::set<std::array<bool, kGridCells>> seen{correct.pixels};
  long attempts = 0;
  while (static_cast<int>(lib.entries.size()) < size) {
    if (++attempts > 1'000'000) throw UnsatisfiableError("make_library: could not draw enough distinct variants");
    const int k = flip_count(rng);
    // Partial Fisher-Yates over the candidate pixels.
    std::vector<int> candidates = pool;
    SymbolGrid v = correct;
    for (int j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(j), candidates.size() - 1);
      std::swap(candidates[static_cast<std::size_t>(j)], candidates[pick(rng)]);
      auto& px = v.pixels[static_cast<std::size_t>(candidates[static_cast<std::size_t>(j)])];
      px = !px;
    }
    if (!seen.insert(v.pixels).second) continue;
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "~%02zu", lib.entries.size());
    v.label = correct.label + suffix;
    lib.entries.push_back({v, 0.0});
    lib.entries.back().t_target = target_time(v, lib);
  }
  return lib;
}

std::string serialize_library(const TrainingLibrary& library) {
  nlohmann::ordered_json j;
  j["correct"] = library.correct.label;
  j["base_time_ps"] = to_ps(library.base_time);
  j["shift_per_pixel_ps"] = to_ps(library.shift_per_pixel);
  auto& entries = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : library.entries) {
    nlohmann::ordered_json row;
    row["label"] = e.grid.label;
    std::vector<std::string> rows;
    std::istringstream art(e.grid.to_art());
    for (std::string line; std::getline(art, line);) rows.push_back(line);
    row["pixels"] = rows;
    row["hamming"] = hamming(e.grid, library.correct);
    row["t_target_ps"] = to_ps(e.t_target);
    entries.push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace afmsnn
