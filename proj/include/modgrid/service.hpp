#pragma once

// Local preview service for the browser UI.
//
//   POST /api/upload            raw image bytes (PNG/PNM) -> {token, width, height}
//   POST /api/generate          GenerateRequest JSON -> {variants: [{seed, svg, thumbnail_png_base64}]}
//   GET  /api/palette           {modules: [{index_char, svg, mean_brightness}]}
//   GET  /api/template?rows=&cols=   text/plain blank layout
//   GET  /                      static UI bundle (when a bundle directory is configured)

#include <httplib.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "modgrid/assisted.hpp"
#include "modgrid/automatic.hpp"
#include "modgrid/config.hpp"
#include "modgrid/exporter.hpp"
#include "modgrid/image_io.hpp"
#include "modgrid/palette.hpp"

namespace modgrid {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path ui_dir;
  std::size_t max_upload_bytes = 32u << 20;
  std::chrono::seconds upload_ttl{3600};
  std::size_t max_grid_side = 512;
  int max_variants = 16;
  int thumbnail_edge = 512;
};

/// Token -> decoded image, with expiry. Safe for concurrent use.
class UploadStore {
 public:
  using Clock = std::chrono::steady_clock;

  explicit UploadStore(std::chrono::seconds ttl) : ttl_(ttl) {}

  std::string put(RgbImage image) {
    std::unique_lock lock(mutex_);
    purge_locked();
    std::string token = fresh_token();
    while (entries_.contains(token)) token = fresh_token();
    entries_.emplace(token, Entry{std::make_shared<const RgbImage>(std::move(image)), Clock::now()});
    return token;
  }

  std::shared_ptr<const RgbImage> get(const std::string& token) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(token);
    if (it == entries_.end() || Clock::now() - it->second.created > ttl_) return nullptr;
    return it->second.image;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

 private:
  struct Entry {
    std::shared_ptr<const RgbImage> image;
    Clock::time_point created;
  };

  void purge_locked() {
    const auto now = Clock::now();
    std::erase_if(entries_, [&](const auto& kv) { return now - kv.second.created > ttl_; });
  }

  std::string fresh_token() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string token;
    for (int half = 0; half < 2; ++half) {
      std::uint64_t bits = (static_cast<std::uint64_t>(device_()) << 32) | device_();
      for (int i = 0; i < 16; ++i, bits >>= 4) token += kHex[bits & 0xF];
    }
    return token;
  }

  std::chrono::seconds ttl_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::random_device device_;
};

/// Seed for callers that did not pass one. Kept below 2^53 so it survives a
/// round trip through JavaScript numbers.
inline std::uint64_t fresh_seed() {
  std::random_device rd;
  return ((static_cast<std::uint64_t>(rd()) << 32) | rd()) & ((std::uint64_t{1} << 53) - 1);
}

class PreviewService {
 public:
  struct HttpError {
    int status;
    nlohmann::json body;
  };

  PreviewService(ModulePalette palette, ServiceOptions options = {})
      : options_(std::move(options)), uploads_(options_.upload_ttl) {
    base_ = std::make_shared<const ModulePalette>(std::move(palette));
    palettes_.emplace(base_->order(), base_);
    install_routes();
  }

  /// Blocks serving requests until stop().
  bool listen() { return server_.listen(options_.host, options_.port); }

  /// Binds an ephemeral port; serve with listen_after_bind().
  int bind_any_port() { return server_.bind_to_any_port(options_.host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

  httplib::Server& server() { return server_; }
  const UploadStore& uploads() const { return uploads_; }

  // Handlers are public so they can be exercised without a socket.

  nlohmann::json palette_json() const {
    const auto palette = base_palette();
    nlohmann::json modules = nlohmann::json::array();
    for (const auto& m : palette->modules())
      modules.push_back({{"index_char", std::string(1, m.index_char)},
                         {"mean_brightness", m.profile.mean()},
                         {"svg", module_svg(m)}});
    return {{"modules", modules}};
  }

  nlohmann::json upload(const std::string& bytes) {
    if (bytes.size() > options_.max_upload_bytes)
      throw HttpError{413, {{"error", "upload exceeds " + std::to_string(options_.max_upload_bytes) + " bytes"}}};
    if (!is_supported_image(bytes)) throw HttpError{415, {{"error", "unsupported image format (expected PNG or PNM)"}}};
    RgbImage image;
    try {
      image = decode_image(bytes);
    } catch (const Error& e) {
      throw HttpError{415, {{"error", e.what()}}};
    }
    const auto w = image.width, h = image.height;
    const std::string token = uploads_.put(std::move(image));
    return {{"token", token}, {"width", w}, {"height", h}};
  }

  nlohmann::json generate(const nlohmann::json& req) {
    nlohmann::json fields = nlohmann::json::object();
    const auto fail = [&](const std::string& field, const std::string& msg) {
      if (!fields.contains(field)) fields[field] = msg;
    };
    if (!req.is_object()) throw HttpError{400, {{"error", "request body must be a JSON object"}}};
    const std::string method = req.value("method", "");
    if (method != "assisted" && method != "automatic") fail("method", "must be \"assisted\" or \"automatic\"");
    const nlohmann::json params = req.contains("params") ? req["params"] : nlohmann::json::object();
    if (!params.is_object()) fail("params", "must be an object");

    const auto number = [&](const char* key, double fallback) -> double {
      if (!params.is_object() || !params.contains(key)) return fallback;
      if (!params[key].is_number()) {
        fail(key, "must be a number");
        return fallback;
      }
      return params[key].get<double>();
    };
    const auto integer = [&](const char* key, long long fallback) -> long long {
      if (!params.is_object() || !params.contains(key)) return fallback;
      if (!params[key].is_number_integer()) {
        fail(key, "must be an integer");
        return fallback;
      }
      return params[key].get<long long>();
    };

    GenerationParams gp;
    const long long rows = integer("rows", static_cast<long long>(gp.rows));
    if (rows < 1) fail("rows", "must be >= 1");
    gp.rows = static_cast<std::size_t>(std::max<long long>(rows, 1));
    gp.norm_min = number("norm_min", gp.norm_min);
    gp.norm_max = number("norm_max", gp.norm_max);
    gp.place_max = number("place_max", gp.place_max);
    gp.s = static_cast<int>(integer("s", base_palette()->order()));
    gp.tau = number("tau", gp.tau);
    if (params.is_object() && params.contains("skip_dark")) {
      if (!params["skip_dark"].is_boolean()) fail("skip_dark", "must be a boolean");
      else if (params["skip_dark"].get<bool>()) gp.skip = SkipRule::Dark;
    }
    for (const auto& e : check_params(gp)) fail(e.field, e.message);
    if (gp.s > 16) fail("s", "must be <= 16");

    std::uint64_t seed0 = 0;
    if (params.is_object() && params.contains("seed")) {
      const auto& s = params["seed"];
      if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0))
        seed0 = s.get<std::uint64_t>();
      else if (s.is_string() && !s.get<std::string>().empty() &&
               s.get<std::string>().find_first_not_of("0123456789") == std::string::npos)
        seed0 = std::stoull(s.get<std::string>());
      else
        fail("seed", "must be a non-negative integer");
    } else {
      seed0 = fresh_seed();
    }

    const long long variants = req.contains("variants") ? (req["variants"].is_number_integer() ? req["variants"].get<long long>() : -1) : 1;
    if (variants < 1 || variants > options_.max_variants)
      fail("variants", "must be an integer in [1, " + std::to_string(options_.max_variants) + "]");

    const double width = number("width", 1000.0);
    const double height = number("height", 1000.0);
    std::optional<ConfigLayout> layout;
    std::shared_ptr<const RgbImage> image;
    if (method == "assisted") {
      if (!(width > 0)) fail("width", "must be > 0");
      if (!(height > 0)) fail("height", "must be > 0");
      if (!req.contains("config_text") || !req["config_text"].is_string()) {
        fail("config_text", "required for assisted generation");
      } else {
        try {
          layout = parse_config(req["config_text"].get<std::string>());
        } catch (const Error& e) {
          fail("config_text", e.what());
        }
      }
    } else if (method == "automatic") {
      if (!req.contains("image_ref") || !req["image_ref"].is_string()) fail("image_ref", "required for automatic generation");
    }
    if (!fields.empty()) throw HttpError{400, {{"error", "validation failed"}, {"fields", fields}}};

    if (method == "automatic") {
      image = uploads_.get(req["image_ref"].get<std::string>());
      if (!image) throw HttpError{404, {{"error", "unknown or expired image token"}}};
    }

    nlohmann::json out = nlohmann::json::array();
    try {
      const auto palette = palette_for(gp.s);
      if (layout && (layout->rows > options_.max_grid_side || layout->cols > options_.max_grid_side))
        throw HttpError{422, {{"error", "grid exceeds " + std::to_string(options_.max_grid_side) + " cells per side"}}};
      if (image) {
        const GridSpec grid = grid_from_image(image->width, image->height, gp.rows);
        if (grid.rows > options_.max_grid_side || grid.cols > options_.max_grid_side)
          throw HttpError{422, {{"error", "grid exceeds " + std::to_string(options_.max_grid_side) + " cells per side"}}};
      }
      for (long long k = 0; k < variants; ++k) {
        gp.seed = seed0 + static_cast<std::uint64_t>(k);
        const Composition comp = layout ? generate_assisted(*layout, *palette, width, height, gp.seed)
                                        : generate_automatic(*image, *palette, gp);
        RenderOptions thumb;
        const double edge = std::max(comp.canvas_w, comp.canvas_h);
        thumb.px_per_unit = edge > options_.thumbnail_edge ? options_.thumbnail_edge / edge : 1.0;
        out.push_back({{"seed", gp.seed},
                       {"svg", render_svg(comp, *palette)},
                       {"thumbnail_png_base64", httplib::detail::base64_encode(encode_png(render_png(comp, *palette, thumb)))}});
      }
    } catch (const Error& e) {
      throw HttpError{422, {{"error", e.what()}}};
    }
    return {{"variants", out}};
  }

 private:
  std::shared_ptr<const ModulePalette> base_palette() const { return base_; }

  // Module geometry is fixed; profiles for other orders are derived on demand.
  std::shared_ptr<const ModulePalette> palette_for(int s) {
    std::lock_guard lock(palette_mutex_);
    if (auto it = palettes_.find(s); it != palettes_.end()) return it->second;
    const auto& base = *base_;
    std::vector<Module> modules = base.modules();
    for (auto& m : modules) m.profile = profile_module(m.geometry, s, base.resolution());
    auto p = std::make_shared<const ModulePalette>(std::move(modules), s, effective_resolution(s, base.resolution()));
    palettes_.emplace(s, p);
    return p;
  }

  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      send_json(res, 200, f());
    } catch (const HttpError& e) {
      send_json(res, e.status, e.body);
    } catch (const std::exception& e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  }

  void install_routes() {
    server_.set_payload_max_length(options_.max_upload_bytes);
    server_.Get("/api/palette", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return palette_json(); });
    });
    server_.Get("/api/template", [](const httplib::Request& req, httplib::Response& res) {
      const auto dim = [&](const char* key) -> long long {
        if (!req.has_param(key)) return 0;
        const std::string v = req.get_param_value(key);
        if (v.empty() || v.size() > 6 || v.find_first_not_of("0123456789") != std::string::npos) return 0;
        return std::stoll(v);
      };
      const long long rows = dim("rows"), cols = dim("cols");
      if (rows < 1 || cols < 1 || rows > 4096 || cols > 4096) {
        send_json(res, 400, {{"error", "rows and cols must be integers in [1, 4096]"}});
        return;
      }
      res.set_content(export_template(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)), "text/plain");
    });
    server_.Post("/api/upload", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (req.is_multipart_form_data() && req.has_file("file")) return upload(req.get_file_value("file").content);
        return upload(req.body);
      });
    });
    server_.Post("/api/generate", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        nlohmann::json body;
        try {
          body = nlohmann::json::parse(req.body);
        } catch (const std::exception&) {
          throw HttpError{400, {{"error", "request body is not valid JSON"}}};
        }
        return generate(body);
      });
    });
    std::error_code ec;
    if (!options_.ui_dir.empty() && std::filesystem::is_directory(options_.ui_dir, ec)) {
      server_.set_mount_point("/", options_.ui_dir.string());
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<!doctype html><title>modgrid</title><p>UI bundle not configured; the JSON API is under /api/.</p>",
                        "text/html");
      });
    }
  }

  ServiceOptions options_;
  httplib::Server server_;
  UploadStore uploads_;
  std::shared_ptr<const ModulePalette> base_;
  std::mutex palette_mutex_;
  std::map<int, std::shared_ptr<const ModulePalette>> palettes_;
};

}  // namespace modgrid
