#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modgrid/error.hpp"
#include "modgrid/geometry.hpp"
#include "modgrid/svg_reader.hpp"

namespace modgrid {

/// Index characters in assignment order. 'O' reads as the empty cell in
/// layouts and 'I' is too close to '1', so neither names a module.
inline constexpr std::string_view kIndexAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZ";
inline constexpr std::size_t kMaxModules = kIndexAlphabet.size();
inline constexpr int kDefaultProfileOrder = 3;
inline constexpr int kDefaultProfileResolution = 96;
inline constexpr std::size_t kDefaultPaletteSize = 10;

inline bool is_index_char(char32_t c) {
  return c < 128 && kIndexAlphabet.find(static_cast<char>(c)) != std::string_view::npos;
}

/// s x s mean brightness values, row-major, row 0 at the top.
struct BrightnessProfile {
  int order = 0;
  std::vector<double> values;

  double mean() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
  }
  double at(int row, int col) const { return values[static_cast<std::size_t>(row * order + col)]; }

  friend bool operator==(const BrightnessProfile&, const BrightnessProfile&) = default;
};

struct Module {
  char index_char = '1';
  std::string name;
  ModuleGeometry geometry;
  BrightnessProfile profile;
};

class ModulePalette {
 public:
  ModulePalette() = default;
  ModulePalette(std::vector<Module> modules, int order, int resolution)
      : modules_(std::move(modules)), order_(order), resolution_(resolution) {}

  std::size_t size() const { return modules_.size(); }
  bool empty() const { return modules_.empty(); }
  int order() const { return order_; }
  int resolution() const { return resolution_; }
  const Module& operator[](std::size_t i) const { return modules_[i]; }
  const std::vector<Module>& modules() const { return modules_; }

  std::optional<std::size_t> find(char index_char) const {
    for (std::size_t i = 0; i < modules_.size(); ++i)
      if (modules_[i].index_char == index_char) return i;
    return std::nullopt;
  }

 private:
  std::vector<Module> modules_;
  int order_ = kDefaultProfileOrder;
  int resolution_ = kDefaultProfileResolution;
};

/// Smallest multiple of s that is >= max(resolution, s).
inline int effective_resolution(int s, int resolution) {
  const int r = std::max(resolution, s);
  return (r + s - 1) / s * s;
}

inline BrightnessProfile profile_module(const ModuleGeometry& geometry, int s,
                                        int resolution = kDefaultProfileResolution) {
  if (s < 1) throw Error(ErrorCode::InvalidArgument, "profile order must be >= 1");
  const int res = effective_resolution(s, resolution);
  const auto pixels = rasterize_module(geometry, res);
  const int block = res / s;
  BrightnessProfile profile{s, std::vector<double>(static_cast<std::size_t>(s * s), 0.0)};
  for (int by = 0; by < s; ++by) {
    for (int bx = 0; bx < s; ++bx) {
      double sum = 0.0;
      for (int y = by * block; y < (by + 1) * block; ++y)
        for (int x = bx * block; x < (bx + 1) * block; ++x)
          sum += pixels[static_cast<std::size_t>(y * res + x)];
      profile.values[static_cast<std::size_t>(by * s + bx)] = sum / (block * block);
    }
  }
  return profile;
}

namespace palette_detail {

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool has_svg_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".svg";
}

}  // namespace palette_detail

inline constexpr const char* kProfileCacheName = "profiles.json";

/// Module files of a palette directory, byte-wise sorted by filename.
inline std::vector<std::filesystem::path> list_palette_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw Error(ErrorCode::Io, "palette directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && palette_detail::has_svg_extension(entry.path()))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return files;
}

/// Loads every *.svg module in `dir`. A valid `profiles.json` beside the
/// modules short-circuits rasterization for entries whose (file, content
/// hash, order, resolution) match; anything else is recomputed.
inline ModulePalette load_palette(const std::filesystem::path& dir, int s = kDefaultProfileOrder,
                                  int resolution = kDefaultProfileResolution) {
  using namespace palette_detail;
  if (s < 1) throw Error(ErrorCode::InvalidArgument, "profile order must be >= 1");
  const auto files = list_palette_files(dir);
  if (files.empty()) throw Error(ErrorCode::EmptyPalette, "no .svg modules in " + dir.string());
  if (files.size() > kMaxModules)
    throw Error(ErrorCode::IndexOverflow, std::to_string(files.size()) + " modules in " + dir.string() +
                                              ", at most " + std::to_string(kMaxModules) + " supported");

  nlohmann::json cache;
  if (const auto cache_path = dir / kProfileCacheName; std::filesystem::exists(cache_path)) {
    try {
      cache = nlohmann::json::parse(read_file(cache_path));
    } catch (const std::exception&) {
      cache = nullptr;  // stale or corrupt cache is ignored
    }
  }
  const int res = effective_resolution(s, resolution);

  std::vector<Module> modules;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string text = read_file(files[i]);
    const std::string name = files[i].filename().string();
    Module m;
    m.index_char = kIndexAlphabet[i];
    m.name = name;
    m.geometry = parse_module_svg(text, name);
    const std::string hash = hex64(fnv1a(text));

    std::optional<BrightnessProfile> cached;
    if (cache.is_object() && cache.contains("entries") && cache["entries"].is_array()) {
      for (const auto& e : cache["entries"]) {
        if (e.value("file", "") == name && e.value("hash", "") == hash && e.value("order", 0) == s &&
            e.value("resolution", 0) == res && e.contains("values") && e["values"].is_array() &&
            e["values"].size() == static_cast<std::size_t>(s * s)) {
          BrightnessProfile p{s, e["values"].get<std::vector<double>>()};
          if (std::all_of(p.values.begin(), p.values.end(), [](double v) { return v >= 0 && v <= 1; }))
            cached = std::move(p);
          break;
        }
      }
    }
    m.profile = cached ? *cached : profile_module(m.geometry, s, res);
    modules.push_back(std::move(m));
  }
  return ModulePalette(std::move(modules), s, res);
}

/// Writes `profiles.json` for the modules in `dir` at order s. Returns the
/// freshly profiled palette.
inline ModulePalette write_profile_cache(const std::filesystem::path& dir, int s = kDefaultProfileOrder,
                                         int resolution = kDefaultProfileResolution) {
  using namespace palette_detail;
  // Recompute from scratch rather than trusting whatever cache exists.
  std::filesystem::remove(dir / kProfileCacheName);
  ModulePalette palette = load_palette(dir, s, resolution);
  nlohmann::json entries = nlohmann::json::array();
  const auto files = list_palette_files(dir);
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto& m = palette[i];
    entries.push_back({{"file", m.name},
                       {"hash", hex64(fnv1a(read_file(files[i])))},
                       {"index", std::string(1, m.index_char)},
                       {"order", s},
                       {"resolution", palette.resolution()},
                       {"values", m.profile.values}});
  }
  nlohmann::json doc{{"version", 1}, {"entries", entries}};
  std::ofstream out(dir / kProfileCacheName, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / kProfileCacheName).string());
  out << doc.dump(2) << '\n';
  return palette;
}

namespace palette_detail {

// Dispersed fill order over a 6x6 micro grid: every run of nine consecutive
// cells lands once in each 2x2 block (so s=3 profiles stay flat) and the 2x2
// phase follows a Bayer order.
inline std::array<int, 36> micro_fill_order() {
  constexpr int bayer2[2][2] = {{0, 2}, {3, 1}};
  constexpr int dispersed3[3][3] = {{6, 8, 4}, {1, 0, 3}, {5, 2, 7}};
  std::array<int, 36> order{};
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) order[static_cast<std::size_t>(bayer2[r % 2][c % 2] * 9 + dispersed3[r / 2][c / 2])] = r * 6 + c;
  return order;
}

}  // namespace palette_detail

/// Procedural stand-in palette: module k (0-based) inks
/// round(36 * (n - 1 - k) / (n - 1)) of 36 micro squares, so module '1' is
/// solid black, the last module is blank, and mean brightness strictly
/// increases with the index.
inline ModulePalette default_palette(std::size_t n = kDefaultPaletteSize, int s = kDefaultProfileOrder,
                                     int resolution = kDefaultProfileResolution) {
  if (n < 1 || n > kMaxModules)
    throw Error(ErrorCode::OutOfRange, "default palette size must be in [1, " + std::to_string(kMaxModules) + "]");
  if (s < 1) throw Error(ErrorCode::InvalidArgument, "profile order must be >= 1");
  constexpr int kMicro = 6;
  const auto order = palette_detail::micro_fill_order();
  std::vector<Module> modules;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t filled =
        n == 1 ? 36 : static_cast<std::size_t>(std::lround(36.0 * static_cast<double>(n - 1 - k) / static_cast<double>(n - 1)));
    std::vector<int> cells(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(filled));
    std::sort(cells.begin(), cells.end());
    Shape shape;
    for (int cell : cells) {
      const double x0 = static_cast<double>(cell % kMicro) / kMicro;
      const double y0 = static_cast<double>(cell / kMicro) / kMicro;
      const double x1 = static_cast<double>(cell % kMicro + 1) / kMicro;
      const double y1 = static_cast<double>(cell / kMicro + 1) / kMicro;
      shape.contours.push_back({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }
    Module m;
    m.index_char = kIndexAlphabet[k];
    m.name = std::string("default-") + m.index_char;
    if (!shape.contours.empty()) m.geometry.shapes.push_back(std::move(shape));
    m.profile = profile_module(m.geometry, s, resolution);
    modules.push_back(std::move(m));
  }
  return ModulePalette(std::move(modules), s, effective_resolution(s, resolution));
}

}  // namespace modgrid
