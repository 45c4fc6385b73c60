#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage, 2 input/file,
// 3 generation.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "modgrid/modgrid.hpp"
#include "modgrid/service.hpp"

namespace modgrid::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kGeneration = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::OutOfRange:
      return kUsage;
    case ErrorCode::EmptyPalette:
    case ErrorCode::BadGeometry:
    case ErrorCode::IndexOverflow:
    case ErrorCode::EmptyConfig:
    case ErrorCode::UnknownCharacter:
    case ErrorCode::ImageFormat:
    case ErrorCode::Io:
    case ErrorCode::EmptyDirectory:
      return kInput;
    case ErrorCode::OrderMismatch:
    case ErrorCode::DanglingModule:
    case ErrorCode::TooLarge:
      return kGeneration;
  }
  return kGeneration;
}

/// Shortest decimal form that reads back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Rgb parse_hex_color(const std::string& s) {
  const auto bad = [&] { return Error(ErrorCode::InvalidArgument, "colour '" + s + "' is not #rrggbb"); };
  if (s.size() != 7 || s[0] != '#') throw bad();
  if (s.find_first_not_of("0123456789abcdefABCDEF", 1) != std::string::npos) throw bad();
  const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(std::stoul(s.substr(i, 2), nullptr, 16)); };
  return {byte(1), byte(3), byte(5)};
}

inline std::uint64_t time_seed() {
  const auto ns = std::chrono::system_clock::now().time_since_epoch().count();
  return mix64(static_cast<std::uint64_t>(ns)) & ((std::uint64_t{1} << 53) - 1);
}

struct PaletteFlags {
  std::string dir;
  std::size_t default_size = kDefaultPaletteSize;
  int resolution = kDefaultProfileResolution;

  ModulePalette load(int s) const {
    if (!dir.empty()) return load_palette(dir, s, resolution);
    return default_palette(default_size, s, resolution);
  }
  std::string describe() const {
    return dir.empty() ? "default:" + std::to_string(default_size) : dir;
  }
};

struct RenderFlags {
  double px_per_unit = 1.0;
  std::string fg = "#000000";
  std::string bg = "#ffffff";
  bool invert = false;
  bool flatten = false;

  RenderOptions options() const {
    RenderOptions o;
    o.px_per_unit = px_per_unit;
    o.foreground = parse_hex_color(fg);
    o.background = parse_hex_color(bg);
    o.invert = invert;
    o.flatten = flatten;
    return o;
  }
  std::string describe() const {
    return "px_per_unit=" + fmt(px_per_unit) + " fg=" + fg + " bg=" + bg + " invert=" + (invert ? "1" : "0") +
           " flatten=" + (flatten ? "1" : "0");
  }
};

inline void write_outputs(const std::filesystem::path& base, const Composition& comp, const ModulePalette& palette,
                          const RenderOptions& opts) {
  const std::string svg = render_svg(comp, palette, opts);
  const RgbImage png = render_png(comp, palette, opts);
  write_binary(base.string() + ".svg", svg);
  write_png(base.string() + ".png", png);
}

inline std::string params_line(const GenerationParams& p) {
  return "rows=" + std::to_string(p.rows) + " norm_min=" + fmt(p.norm_min) + " norm_max=" + fmt(p.norm_max) +
         " place_max=" + fmt(p.place_max) + " s=" + std::to_string(p.s) + " tau=" + fmt(p.tau) +
         " seed=" + std::to_string(p.seed) + " skip=" + (p.skip == SkipRule::Bright ? "bright" : "dark");
}

/// Runs one invocation. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Modular grid composition engine", "modgrid"};
  app.require_subcommand(1);

  PaletteFlags palette_flags;
  if (const char* env = std::getenv("MODGRID_PALETTE"); env && *env) palette_flags.dir = env;
  const auto add_palette_flags = [&](CLI::App* sub) {
    sub->add_option("--palette", palette_flags.dir, "Palette directory of *.svg modules (default: $MODGRID_PALETTE or built-in)");
    sub->add_option("--palette-size", palette_flags.default_size, "Module count of the built-in palette")
        ->check(CLI::Range(std::size_t{1}, kMaxModules));
    sub->add_option("--resolution", palette_flags.resolution, "Profiling raster size in pixels per side")
        ->check(CLI::Range(1, 4096));
  };
  RenderFlags render_flags;
  const auto add_render_flags = [&](CLI::App* sub) {
    sub->add_option("--px-per-unit", render_flags.px_per_unit, "Raster scale factor")->check(CLI::PositiveNumber);
    sub->add_option("--fg", render_flags.fg, "Foreground colour #rrggbb");
    sub->add_option("--bg", render_flags.bg, "Background colour #rrggbb");
    sub->add_flag("--invert", render_flags.invert, "Swap foreground and background");
    sub->add_flag("--flatten", render_flags.flatten, "Emit standalone SVG paths instead of <use> instances");
  };
  std::optional<std::uint64_t> seed;
  std::string output;

  // assisted
  auto* assisted = app.add_subcommand("assisted", "Place modules from a layout file");
  std::string config_file, config_dir;
  double canvas_w = 0, canvas_h = 0;
  bool strict = false;
  assisted->add_option("--config", config_file, "Layout file");
  assisted->add_option("--config-dir", config_dir, "Directory with horizontal.mcfg / vertical.mcfg");
  assisted->add_option("--width", canvas_w, "Canvas width")->required()->check(CLI::PositiveNumber);
  assisted->add_option("--height", canvas_h, "Canvas height")->required()->check(CLI::PositiveNumber);
  assisted->add_option("--seed", seed, "Random seed (default: from the clock)");
  assisted->add_flag("--strict", strict, "Reject characters that do not name a module");
  assisted->add_option("-o,--output", output, "Output basename")->required();
  add_palette_flags(assisted);
  add_render_flags(assisted);

  // auto and sequence share the generation parameters
  GenerationParams gp;
  bool skip_dark = false;
  std::string image_file, frames_dir;
  unsigned threads = 0;
  const auto add_generation_flags = [&](CLI::App* sub) {
    sub->add_option("--rows", gp.rows, "Grid rows")->required()->check(CLI::PositiveNumber);
    sub->add_option("--tau", gp.tau, "Selection temperature (0 = greedy)")->check(CLI::NonNegativeNumber);
    sub->add_option("--norm-min", gp.norm_min, "Normalization lower threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--norm-max", gp.norm_max, "Normalization upper threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--place-max", gp.place_max, "Placement brightness threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--s", gp.s, "Profile subdivision order")->check(CLI::Range(1, 16));
    sub->add_option("--seed", seed, "Random seed (default: from the clock)");
    sub->add_flag("--skip-dark", skip_dark, "Leave cells darker than --place-max empty instead of brighter ones");
    add_palette_flags(sub);
    add_render_flags(sub);
  };
  auto* automatic = app.add_subcommand("auto", "Depict an image with modules");
  automatic->add_option("--image", image_file, "Input image (PNG or PNM)")->required();
  automatic->add_option("-o,--output", output, "Output basename")->required();
  add_generation_flags(automatic);

  auto* sequence = app.add_subcommand("sequence", "Depict every frame of a directory");
  sequence->add_option("--frames", frames_dir, "Directory of frames (PNG or PNM), filename order")->required();
  sequence->add_option("-o,--output", output, "Output directory")->required();
  sequence->add_option("--threads", threads, "Worker threads (0 = hardware)");
  add_generation_flags(sequence);

  auto* tmpl = app.add_subcommand("template", "Write a blank layout file");
  std::size_t t_rows = 0, t_cols = 0;
  tmpl->add_option("--rows", t_rows, "Rows")->required()->check(CLI::PositiveNumber);
  tmpl->add_option("--cols", t_cols, "Columns")->required()->check(CLI::PositiveNumber);
  tmpl->add_option("-o,--output", output, "Output file")->required();

  auto* profile = app.add_subcommand("profile", "Write profiles.json for a palette directory");
  int profile_s = kDefaultProfileOrder;
  profile->add_option("--palette", palette_flags.dir, "Palette directory")->required();
  profile->add_option("--s", profile_s, "Profile subdivision order")->check(CLI::Range(1, 16));
  profile->add_option("--resolution", palette_flags.resolution, "Profiling raster size")->check(CLI::Range(1, 4096));

  auto* serve = app.add_subcommand("serve", "Run the local preview service");
  ServiceOptions service_options;
  int serve_s = kDefaultProfileOrder;
  serve->add_option("--palette", palette_flags.dir, "Palette directory (default: $MODGRID_PALETTE or built-in)");
  serve->add_option("--port", service_options.port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", service_options.host, "Bind address");
  serve->add_option("--ui-dir", service_options.ui_dir, "Built UI bundle served at /");
  serve->add_option("--s", serve_s, "Default profile order")->check(CLI::Range(1, 16));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "modgrid: usage error: " << e.what() << " (see --help)\n";
    return kUsage;
  }

  try {
    if (tmpl->parsed()) {
      write_binary(output, export_template(t_rows, t_cols));
      out << "modgrid template rows=" << t_rows << " cols=" << t_cols << " out=" << output << "\n";
      return kOk;
    }
    if (profile->parsed()) {
      const ModulePalette palette = write_profile_cache(palette_flags.dir, profile_s, palette_flags.resolution);
      out << "modgrid profile palette=" << palette_flags.dir << " s=" << profile_s
          << " resolution=" << palette.resolution() << " modules=" << palette.size() << "\n";
      return kOk;
    }
    if (serve->parsed()) {
      PreviewService service(palette_flags.load(serve_s), service_options);
      out << "modgrid serve palette=" << palette_flags.describe() << " s=" << serve_s << " host=" << service_options.host
          << " port=" << service_options.port << std::endl;
      if (!service.listen()) {
        err << "modgrid: cannot listen on " << service_options.host << ":" << service_options.port << "\n";
        return kInput;
      }
      return kOk;
    }

    const RenderOptions render = render_flags.options();
    if (assisted->parsed()) {
      if (config_file.empty() && config_dir.empty()) {
        err << "modgrid: usage error: assisted needs --config or --config-dir\n";
        return kUsage;
      }
      const std::uint64_t s = seed.value_or(time_seed());
      std::filesystem::path layout_path = config_file;
      std::string orientation = "explicit";
      if (config_file.empty()) {
        const Orientation o = choose_orientation(canvas_w, canvas_h);
        orientation = to_string(o);
        layout_path = oriented_layout_path(config_dir, o);
      }
      const ConfigLayout layout = load_layout(layout_path, strict ? ParseMode::Strict : ParseMode::Lenient);
      const ModulePalette palette = palette_flags.load(kDefaultProfileOrder);
      const Composition comp = generate_assisted(layout, palette, canvas_w, canvas_h, s);
      write_outputs(output, comp, palette, render);
      write_binary(output + ".used.mcfg", serialize_config(layout));
      out << "modgrid assisted config=" << layout_path.string() << " orientation=" << orientation
          << " width=" << fmt(canvas_w) << " height=" << fmt(canvas_h) << " seed=" << s
          << " strict=" << (strict ? 1 : 0) << " palette=" << palette_flags.describe() << " " << render_flags.describe()
          << " out=" << output << "\n";
      return kOk;
    }

    gp.seed = seed.value_or(time_seed());
    gp.skip = skip_dark ? SkipRule::Dark : SkipRule::Bright;
    if (const auto errors = check_params(gp); !errors.empty()) {
      err << "modgrid: usage error: --" << errors.front().field << " " << errors.front().message << "\n";
      return kUsage;
    }
    const ModulePalette palette = palette_flags.load(gp.s);

    if (automatic->parsed()) {
      const RgbImage image = read_image(image_file);
      if (gp.rows > image.height) {
        err << "modgrid: usage error: --rows " << gp.rows << " exceeds image height " << image.height << "\n";
        return kUsage;
      }
      const Composition comp = generate_automatic(image, palette, gp);
      write_outputs(output, comp, palette, render);
      out << "modgrid auto image=" << image_file << " " << params_line(gp) << " palette=" << palette_flags.describe()
          << " " << render_flags.describe() << " out=" << output << "\n";
      return kOk;
    }

    if (sequence->parsed()) {
      const auto results = generate_sequence(frames_dir, palette, gp, threads);
      std::filesystem::create_directories(output);
      int failures = 0;
      for (std::size_t k = 0; k < results.size(); ++k) {
        if (!results[k].composition) {
          err << "modgrid: frame error: " << results[k].error << "\n";
          ++failures;
          continue;
        }
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05zu", k);
        write_outputs(std::filesystem::path(output) / name, *results[k].composition, palette, render);
      }
      out << "modgrid sequence frames=" << frames_dir << " count=" << results.size() << " failed=" << failures << " "
          << params_line(gp) << " palette=" << palette_flags.describe() << " " << render_flags.describe()
          << " out=" << output << "\n";
      return failures ? kGeneration : kOk;
    }
  } catch (const Error& e) {
    err << "modgrid: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "modgrid: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    err << "modgrid: " << e.what() << "\n";
    return kGeneration;
  }
  return kUsage;
}

}  // namespace modgrid::cli
