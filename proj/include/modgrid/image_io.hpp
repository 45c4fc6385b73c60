#pragma once

// PNG (via libpng's simplified API) and binary/plain PNM decoding, PNG
// encoding. Transparent PNG pixels are composited over white paper.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "modgrid/error.hpp"
#include "modgrid/image.hpp"

namespace modgrid {

inline constexpr std::size_t kMaxDecodedPixels = 100'000'000;

inline bool looks_like_png(std::string_view bytes) {
  return bytes.size() >= 8 && bytes.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8);
}

inline bool looks_like_pnm(std::string_view bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6');
}

inline bool is_supported_image(std::string_view bytes) { return looks_like_png(bytes) || looks_like_pnm(bytes); }

inline RgbImage decode_png(std::string_view bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw Error(ErrorCode::ImageFormat, std::string("PNG: ") + image.message);
  if (static_cast<std::size_t>(image.width) * image.height > kMaxDecodedPixels) {
    png_image_free(&image);
    throw Error(ErrorCode::TooLarge, "PNG dimensions too large");
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::ImageFormat, "PNG: " + msg);
  }
  RgbImage out(image.width, image.height);
  for (std::size_t i = 0; i < out.width * out.height; ++i) {
    const unsigned a = rgba[i * 4 + 3];
    const auto over_white = [a](unsigned c) {
      return static_cast<std::uint8_t>((c * a + 255u * (255u - a) + 127u) / 255u);
    };
    out.set(i, {over_white(rgba[i * 4]), over_white(rgba[i * 4 + 1]), over_white(rgba[i * 4 + 2])});
  }
  return out;
}

inline RgbImage decode_pnm(std::string_view bytes) {
  std::size_t pos = 2;
  const auto next_token = [&]() -> long {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t begin = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (begin == pos) throw Error(ErrorCode::ImageFormat, "PNM: malformed header");
    return std::stol(std::string(bytes.substr(begin, pos - begin)));
  };
  const char kind = bytes[1];
  const long w = next_token(), h = next_token(), maxval = next_token();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw Error(ErrorCode::ImageFormat, "PNM: bad header values");
  if (static_cast<std::size_t>(w) * static_cast<std::size_t>(h) > kMaxDecodedPixels)
    throw Error(ErrorCode::TooLarge, "PNM dimensions too large");
  const bool colour = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';
  const std::size_t channels = colour ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * channels;
  std::vector<unsigned> samples(count);
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t bps = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + count * bps) throw Error(ErrorCode::ImageFormat, "PNM: truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) {
      const auto hi = static_cast<unsigned char>(bytes[pos + i * bps]);
      samples[i] = bps == 1 ? hi : (hi << 8u) | static_cast<unsigned char>(bytes[pos + i * bps + 1]);
    }
  } else {
    for (auto& s : samples) s = static_cast<unsigned>(next_token());
  }
  RgbImage out(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  const auto scale = [maxval](unsigned v) {
    return static_cast<std::uint8_t>((std::min<unsigned>(v, static_cast<unsigned>(maxval)) * 255u + static_cast<unsigned>(maxval) / 2) /
                                     static_cast<unsigned>(maxval));
  };
  for (std::size_t i = 0; i < out.width * out.height; ++i) {
    if (colour)
      out.set(i, {scale(samples[i * 3]), scale(samples[i * 3 + 1]), scale(samples[i * 3 + 2])});
    else
      out.set(i, {scale(samples[i]), scale(samples[i]), scale(samples[i])});
  }
  return out;
}

inline RgbImage decode_image(std::string_view bytes) {
  if (looks_like_png(bytes)) return decode_png(bytes);
  if (looks_like_pnm(bytes)) return decode_pnm(bytes);
  throw Error(ErrorCode::ImageFormat, "unsupported image format (expected PNG or PNM)");
}

inline std::string read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_binary(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw Error(ErrorCode::Io, "cannot write " + path.string());
}

inline RgbImage read_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_binary(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.filename().string() + ": " + e.detail());
  }
}

inline std::string encode_png(const RgbImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data.data(), 0, nullptr))
    throw Error(ErrorCode::ImageFormat, std::string("PNG encode: ") + image.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data.data(), 0, nullptr))
    throw Error(ErrorCode::ImageFormat, std::string("PNG encode: ") + image.message);
  out.resize(size);
  return out;
}

inline std::string encode_ppm(const RgbImage& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

inline void write_png(const std::filesystem::path& path, const RgbImage& img) { write_binary(path, encode_png(img)); }

}  // namespace modgrid
