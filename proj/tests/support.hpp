#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// re-derive results from the definitions with plain loops; they do not call
// the library code paths they are used to check.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "modgrid/modgrid.hpp"

namespace testsupport {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("modgrid-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string square_svg(const std::string& body, double size = 100.0) {
  const std::string s = std::to_string(size);
  return "<?xml version=\"1.0\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + s + " " + s + "\">" +
         body + "</svg>\n";
}

/// Module whose left `fraction` is black.
inline std::string left_fill_svg(double fraction) {
  return square_svg("<rect x=\"0\" y=\"0\" width=\"" + std::to_string(100.0 * fraction) + "\" height=\"100\"/>");
}

inline modgrid::RgbImage grey_image(std::size_t w, std::size_t h, std::uint8_t v) {
  return modgrid::RgbImage(w, h, {v, v, v});
}

/// Left-to-right linear ramp from 0 to 255.
inline modgrid::RgbImage horizontal_gradient(std::size_t w, std::size_t h) {
  modgrid::RgbImage img(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(x) / static_cast<double>(w - 1)));
      img.set(x, y, {v, v, v});
    }
  return img;
}

inline modgrid::RgbImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng, bool smooth = true) {
  modgrid::RgbImage img(w, h);
  std::uniform_int_distribution<int> byte(0, 255);
  if (!smooth) {
    for (auto& b : img.data) b = static_cast<std::uint8_t>(byte(rng));
    return img;
  }
  // Sum of a few random blobs plus noise so cells span the brightness range.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Blob { double cx, cy, r, a; };
  std::vector<Blob> blobs(5);
  for (auto& b : blobs) b = {unit(rng) * static_cast<double>(w), unit(rng) * static_cast<double>(h), 10 + unit(rng) * static_cast<double>(w) / 2, unit(rng) * 2 - 1};
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      double v = 0.5;
      for (const auto& b : blobs) {
        const double dx = static_cast<double>(x) - b.cx, dy = static_cast<double>(y) - b.cy;
        v += b.a * std::exp(-(dx * dx + dy * dy) / (b.r * b.r));
      }
      v += (unit(rng) - 0.5) * 0.1;
      const auto c = static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0);
      img.set(x, y, {c, static_cast<std::uint8_t>(255 - c / 2), static_cast<std::uint8_t>(c / 3)});
    }
  return img;
}

// ---- oracles ---------------------------------------------------------------

/// Brightness straight from the luma definition, normalized and clamped.
inline double oracle_brightness(const modgrid::RgbImage& img, std::size_t x, std::size_t y, double lo, double hi) {
  const auto p = img.pixel(x, y);
  const double b = (0.2126 * p.r + 0.7152 * p.g + 0.0722 * p.b) / 255.0;
  const double n = (b - lo) / (hi - lo);
  return n < 0 ? 0 : n > 1 ? 1 : n;
}

struct OracleCell {
  double mean = 0;
  std::vector<double> profile;
};

/// Visits every pixel of the image and tests whether its centre lies in the
/// cell and in each sub-rectangle.
inline OracleCell oracle_cell(const modgrid::RgbImage& img, double lo, double hi, double x0, double y0, double side,
                              int s) {
  const auto n = static_cast<std::size_t>(s);
  std::vector<double> sum(n * n, 0.0);
  std::vector<int> cnt(n * n, 0);
  double total = 0;
  int total_cnt = 0;
  for (std::size_t y = 0; y < img.height; ++y) {
    const double cy = static_cast<double>(y) + 0.5;
    if (cy < y0 || cy >= y0 + side) continue;
    for (std::size_t x = 0; x < img.width; ++x) {
      const double cx = static_cast<double>(x) + 0.5;
      if (cx < x0 || cx >= x0 + side) continue;
      const double b = oracle_brightness(img, x, y, lo, hi);
      total += b;
      ++total_cnt;
      for (std::size_t j = 0; j < n; ++j) {
        const double ya = j == 0 ? y0 : y0 + side * static_cast<double>(j) / s;
        const double yb = j + 1 == n ? y0 + side : y0 + side * static_cast<double>(j + 1) / s;
        if (cy < ya || cy >= yb) continue;
        for (std::size_t i = 0; i < n; ++i) {
          const double xa = i == 0 ? x0 : x0 + side * static_cast<double>(i) / s;
          const double xb = i + 1 == n ? x0 + side : x0 + side * static_cast<double>(i + 1) / s;
          if (cx < xa || cx >= xb) continue;
          sum[j * n + i] += b;
          ++cnt[j * n + i];
        }
      }
    }
  }
  OracleCell cell;
  cell.mean = total / total_cnt;
  for (std::size_t k = 0; k < n * n; ++k) cell.profile.push_back(cnt[k] ? sum[k] / cnt[k] : cell.mean);
  return cell;
}

/// Brute-force argmin of the mean absolute profile difference.
inline std::size_t oracle_argmin(const std::vector<double>& profile, const modgrid::ModulePalette& palette) {
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t m = 0; m < palette.size(); ++m) {
    double d = 0;
    for (std::size_t k = 0; k < profile.size(); ++k) d += std::fabs(profile[k] - palette[m].profile.values[k]);
    d /= static_cast<double>(profile.size());
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

/// Mean brightness of an axis-aligned pixel block of a rendered image.
inline double block_mean(const modgrid::RgbImage& img, std::size_t x0, std::size_t y0, std::size_t x1, std::size_t y1) {
  double sum = 0;
  for (std::size_t y = y0; y < y1; ++y)
    for (std::size_t x = x0; x < x1; ++x) {
      const auto p = img.pixel(x, y);
      sum += (p.r + p.g + p.b) / (3.0 * 255.0);
    }
  return sum / static_cast<double>((x1 - x0) * (y1 - y0));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// Layout repair rules re-implemented from their plain-language statement.
inline std::vector<std::string> reference_repair(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') { if (!cur.empty() && cur.back() == '\r') cur.pop_back(); lines.push_back(cur); cur.clear(); }
    else cur += ch;
  }
  if (!cur.empty()) { if (cur.back() == '\r') cur.pop_back(); lines.push_back(cur); }
  std::vector<std::string> grid;
  const std::size_t cols = lines.empty() ? 0 : lines[0].size();
  for (const auto& line : lines) {
    std::string row(cols, '0');
    for (std::size_t c = 0; c < cols && c < line.size(); ++c) {
      const char ch = line[c];
      if (ch == '0' || ch == 'o' || ch == 'O') row[c] = '0';
      else if ((ch >= '1' && ch <= '9') || (ch >= 'A' && ch <= 'Z' && ch != 'I')) row[c] = ch;
      else row[c] = '*';
    }
    grid.push_back(row);
  }
  return grid;
}

}  // namespace testsupport
