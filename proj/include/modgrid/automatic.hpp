#pragma once

// Image-driven placement: greyscale -> normalize -> square grid -> per-cell
// s x s brightness profile -> distance to every module profile -> roulette
// pick with Boltzmann weights exp(-d / tau) (argmin when tau == 0).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "modgrid/composition.hpp"
#include "modgrid/error.hpp"
#include "modgrid/image.hpp"
#include "modgrid/image_io.hpp"
#include "modgrid/palette.hpp"
#include "modgrid/random.hpp"

namespace modgrid {

enum class SkipRule {
  Bright,  // leave cells whose mean exceeds the threshold empty
  Dark,    // leave cells whose mean is below the threshold empty
};

struct GenerationParams {
  std::size_t rows = 16;
  double norm_min = 0.0;
  double norm_max = 1.0;
  double place_max = 0.98;
  int s = kDefaultProfileOrder;
  double tau = 0.05;
  std::uint64_t seed = 0;
  SkipRule skip = SkipRule::Bright;
};

struct FieldError {
  std::string field;
  std::string message;
};

inline std::vector<FieldError> check_params(const GenerationParams& p) {
  std::vector<FieldError> errors;
  if (p.rows < 1) errors.push_back({"rows", "must be >= 1"});
  if (!(p.norm_min >= 0.0 && p.norm_min <= 1.0)) errors.push_back({"norm_min", "must be in [0, 1]"});
  if (!(p.norm_max >= 0.0 && p.norm_max <= 1.0)) errors.push_back({"norm_max", "must be in [0, 1]"});
  if (!(p.norm_min < p.norm_max)) errors.push_back({"norm_max", "must be greater than norm_min"});
  if (!(p.place_max > 0.0 && p.place_max <= 1.0)) errors.push_back({"place_max", "must be in (0, 1]"});
  if (p.s < 1) errors.push_back({"s", "must be >= 1"});
  if (!(p.tau >= 0.0) || !std::isfinite(p.tau)) errors.push_back({"tau", "must be >= 0"});
  return errors;
}

inline void validate(const GenerationParams& p) {
  const auto errors = check_params(p);
  if (!errors.empty()) throw Error(ErrorCode::InvalidArgument, errors.front().field + " " + errors.front().message);
}

struct GridSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double cell_px = 0.0;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Square cells of height / rows pixels; columns that do not fit entirely are
/// dropped (at least one column is kept).
inline GridSpec grid_from_image(std::size_t width, std::size_t height, std::size_t rows) {
  if (rows < 1) throw Error(ErrorCode::InvalidArgument, "rows must be >= 1");
  if (rows > height)
    throw Error(ErrorCode::InvalidArgument,
                "rows (" + std::to_string(rows) + ") exceeds image height (" + std::to_string(height) + ")");
  const double cell = static_cast<double>(height) / static_cast<double>(rows);
  const auto cols = static_cast<std::size_t>(std::floor(static_cast<double>(width) / cell));
  return {rows, std::max<std::size_t>(cols, 1), cell};
}

struct CellRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

namespace automatic_detail {

// Pixel indices whose centres lie in [a, b), clamped to [0, limit).
inline std::pair<std::size_t, std::size_t> pixel_range(double a, double b, std::size_t limit) {
  const auto first = [limit](double edge) {
    const double i = std::ceil(edge - 0.5);
    return static_cast<std::size_t>(std::clamp(i, 0.0, static_cast<double>(limit)));
  };
  return {first(a), first(b)};
}

// Per-pixel sub-index along one axis: the pixel range of part k is
// [first(a + k * (b - a) / s), first(a + (k + 1) * (b - a) / s)).
inline std::vector<std::size_t> part_bounds(double a, double b, int s, std::size_t limit) {
  std::vector<std::size_t> bounds(static_cast<std::size_t>(s) + 1);
  for (int k = 0; k <= s; ++k) {
    const double edge = k == s ? b : a + (b - a) * k / s;
    bounds[static_cast<std::size_t>(k)] = pixel_range(edge, edge, limit).first;
  }
  return bounds;
}

}  // namespace automatic_detail

struct CellStats {
  double mean = 0.0;
  BrightnessProfile profile;
};

/// Mean brightness of the whole cell plus its s x s profile. Pixels belong to
/// the cell (and to a sub-rectangle) when their centre does; an empty
/// sub-rectangle takes the whole-cell mean.
inline CellStats cell_stats(const GreyRaster& raster, const CellRect& rect, int s) {
  using namespace automatic_detail;
  if (s < 1) throw Error(ErrorCode::InvalidArgument, "profile order must be >= 1");
  const auto xs = part_bounds(rect.x0, rect.x1, s, raster.width);
  const auto ys = part_bounds(rect.y0, rect.y1, s, raster.height);
  const auto n = static_cast<std::size_t>(s);
  std::vector<double> sums(n * n, 0.0);
  std::vector<std::size_t> counts(n * n, 0);
  double total = 0.0;
  std::size_t total_count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t y = ys[j]; y < ys[j + 1]; ++y) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t x = xs[i]; x < xs[i + 1]; ++x) {
          sums[j * n + i] += raster.values[y * raster.width + x];
          ++counts[j * n + i];
        }
      }
    }
  }
  for (std::size_t k = 0; k < n * n; ++k) {
    total += sums[k];
    total_count += counts[k];
  }
  if (total_count == 0) throw Error(ErrorCode::InvalidArgument, "cell covers no pixels");
  CellStats stats;
  stats.mean = total / static_cast<double>(total_count);
  stats.profile = {s, std::vector<double>(n * n)};
  for (std::size_t k = 0; k < n * n; ++k)
    stats.profile.values[k] = counts[k] ? sums[k] / static_cast<double>(counts[k]) : stats.mean;
  return stats;
}

inline BrightnessProfile cell_profile(const GreyRaster& raster, const CellRect& rect, int s) {
  return cell_stats(raster, rect, s).profile;
}

/// Mean absolute difference between two profiles of the same order; in [0, 1].
inline double module_distance(const BrightnessProfile& cell, const BrightnessProfile& module) {
  if (cell.order != module.order || cell.values.size() != module.values.size())
    throw Error(ErrorCode::OrderMismatch, "profile orders differ (" + std::to_string(cell.order) + " vs " +
                                              std::to_string(module.order) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < cell.values.size(); ++i) sum += std::abs(cell.values[i] - module.values[i]);
  return sum / static_cast<double>(cell.values.size());
}

/// Selection probabilities exp(-d/tau) / sum; shifted by min(d) so small
/// temperatures do not underflow.
inline std::vector<double> selection_probabilities(std::span<const double> distances, double tau) {
  if (distances.empty()) throw Error(ErrorCode::InvalidArgument, "no candidate modules");
  const double dmin = *std::min_element(distances.begin(), distances.end());
  std::vector<double> p(distances.size());
  if (tau == 0.0) {
    const auto best = static_cast<std::size_t>(std::min_element(distances.begin(), distances.end()) - distances.begin());
    p[best] = 1.0;
    return p;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] = std::exp(-(distances[i] - dmin) / tau);
  for (double& v : p) v /= total;
  return p;
}

/// Returns the 0-based index of the chosen module. tau == 0 is the greedy
/// limit (lowest index wins ties); otherwise the first index whose
/// cumulative probability exceeds u.
inline std::size_t select_module(std::span<const double> distances, double tau, double u) {
  if (distances.empty()) throw Error(ErrorCode::InvalidArgument, "no candidate modules");
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0");
  if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorCode::InvalidArgument, "u must be in [0, 1)");
  if (tau == 0.0)
    return static_cast<std::size_t>(std::min_element(distances.begin(), distances.end()) - distances.begin());
  const auto p = selection_probabilities(distances, tau);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cumulative += p[i];
    if (cumulative > u) return i;
  }
  // Rounding left the total just below u; the last candidate with mass wins.
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0.0) return i;
  return p.size() - 1;
}

/// Greyscale and normalize an input image.
inline GreyRaster prepare_raster(const RgbImage& image, const GenerationParams& params) {
  return normalize(to_greyscale(image), params.norm_min, params.norm_max);
}

inline bool skip_cell(double mean, const GenerationParams& params) {
  return params.skip == SkipRule::Bright ? mean > params.place_max : mean < params.place_max;
}

inline Composition generate_from_raster(const GreyRaster& raster, const ModulePalette& palette,
                                        const GenerationParams& params, std::uint64_t frame_index = 0,
                                        const CellOrder& order = {}) {
  validate(params);
  if (palette.empty()) throw Error(ErrorCode::EmptyPalette, "palette has no modules");
  if (params.s != palette.order())
    throw Error(ErrorCode::OrderMismatch, "params.s = " + std::to_string(params.s) +
                                              " but palette profiles have order " + std::to_string(palette.order()));
  const GridSpec grid = grid_from_image(raster.width, raster.height, params.rows);
  Composition comp;
  comp.rows = grid.rows;
  comp.cols = grid.cols;
  comp.cell_px = grid.cell_px;
  comp.canvas_w = static_cast<double>(raster.width);
  comp.canvas_h = static_cast<double>(raster.height);
  comp.placements.assign(grid.rows * grid.cols, std::nullopt);

  std::vector<double> distances(palette.size());
  for (std::size_t i : order.resolve(comp.placements.size())) {
    const std::size_t r = i / grid.cols, c = i % grid.cols;
    const CellRect rect{static_cast<double>(c) * grid.cell_px, static_cast<double>(r) * grid.cell_px,
                        static_cast<double>(c + 1) * grid.cell_px, static_cast<double>(r + 1) * grid.cell_px};
    const CellStats stats = cell_stats(raster, rect, params.s);
    if (skip_cell(stats.mean, params)) continue;
    for (std::size_t m = 0; m < palette.size(); ++m) distances[m] = module_distance(stats.profile, palette[m].profile);
    comp.placements[i] = select_module(distances, params.tau, cell_uniform(params.seed, frame_index, r, c));
  }
  return comp;
}

inline Composition generate_automatic(const RgbImage& image, const ModulePalette& palette,
                                      const GenerationParams& params, std::uint64_t frame_index = 0,
                                      const CellOrder& order = {}) {
  validate(params);
  return generate_from_raster(prepare_raster(image, params), palette, params, frame_index, order);
}

inline bool is_frame_file(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

/// Image files of a frame directory, byte-wise sorted by filename.
inline std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::Io, "frame directory not found: " + dir.string());
  std::vector<std::filesystem::path> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && is_frame_file(entry.path())) frames.push_back(entry.path());
  std::sort(frames.begin(), frames.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  if (frames.empty()) throw Error(ErrorCode::EmptyDirectory, "no image frames in " + dir.string());
  return frames;
}

struct FrameResult {
  std::filesystem::path path;
  std::optional<Composition> composition;
  std::string error;  // set when composition is empty
};

/// One composition per frame, in filename order. Frame k uses frame index k
/// in the per-cell random stream. A failing frame is reported in its slot and
/// does not stop the others. Frames are processed on up to `threads` workers.
inline std::vector<FrameResult> generate_sequence(const std::filesystem::path& frame_dir, const ModulePalette& palette,
                                                  const GenerationParams& params, unsigned threads = 0) {
  validate(params);
  const auto frames = list_frames(frame_dir);
  std::vector<FrameResult> results(frames.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < frames.size();) {
      results[k].path = frames[k];
      try {
        results[k].composition = generate_automatic(read_image(frames[k]), palette, params, k);
      } catch (const std::exception& e) {
        results[k].error = frames[k].filename().string() + ": " + e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(frames.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace modgrid
