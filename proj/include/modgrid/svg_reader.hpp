#pragma once

// Minimal reader for module artwork. Understands the subset of SVG that
// vector editors emit for flat two-tone drawings: <svg viewBox>, <g>, <rect>,
// <polygon>, <polyline>, <circle>, <ellipse> and <path> (all commands, curves
// and arcs flattened), with fill / fill-rule / style / transform attributes.
// Anything inside <defs>, <clipPath>, <mask>, <symbol> or <pattern> is skipped.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modgrid/error.hpp"
#include "modgrid/geometry.hpp"

namespace modgrid {

namespace svg_detail {

struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  Point apply(Point p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
  Affine then(const Affine& o) const {  // o applied after *this
    return {o.a * a + o.c * b,     o.b * a + o.d * b,     o.a * c + o.c * d,
            o.b * c + o.d * d,     o.a * e + o.c * f + o.e, o.b * e + o.d * f + o.f};
  }
};

struct Tag {
  std::string name;
  std::map<std::string, std::string, std::less<>> attrs;
  bool closing = false;
  bool self_closing = false;
};

/// Splits a document into element tags; text, comments, processing
/// instructions and doctype are dropped.
inline std::vector<Tag> tokenize(std::string_view text) {
  std::vector<Tag> tags;
  std::size_t i = 0;
  while ((i = text.find('<', i)) != std::string_view::npos) {
    if (text.compare(i, 4, "<!--") == 0) {
      const auto end = text.find("-->", i + 4);
      if (end == std::string_view::npos) break;
      i = end + 3;
      continue;
    }
    if (text.compare(i, 9, "<![CDATA[") == 0) {
      const auto end = text.find("]]>", i);
      if (end == std::string_view::npos) break;
      i = end + 3;
      continue;
    }
    if (text.compare(i, 2, "<?") == 0 || text.compare(i, 2, "<!") == 0) {
      const auto end = text.find('>', i);
      if (end == std::string_view::npos) break;
      i = end + 1;
      continue;
    }
    Tag tag;
    std::size_t p = i + 1;
    if (p < text.size() && text[p] == '/') {
      tag.closing = true;
      ++p;
    }
    const std::size_t name_begin = p;
    while (p < text.size() && !std::isspace(static_cast<unsigned char>(text[p])) && text[p] != '>' &&
           text[p] != '/')
      ++p;
    tag.name = std::string(text.substr(name_begin, p - name_begin));
    if (const auto colon = tag.name.find(':'); colon != std::string::npos)
      tag.name = tag.name.substr(colon + 1);
    for (;;) {
      while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
      if (p >= text.size()) throw Error(ErrorCode::BadGeometry, "unterminated tag <" + tag.name);
      if (text[p] == '>') {
        ++p;
        break;
      }
      if (text[p] == '/') {
        tag.self_closing = true;
        ++p;
        continue;
      }
      const std::size_t key_begin = p;
      while (p < text.size() && text[p] != '=' && text[p] != '>' && text[p] != '/' &&
             !std::isspace(static_cast<unsigned char>(text[p])))
        ++p;
      std::string key(text.substr(key_begin, p - key_begin));
      while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
      std::string value;
      if (p < text.size() && text[p] == '=') {
        ++p;
        while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
        if (p < text.size() && (text[p] == '"' || text[p] == '\'')) {
          const char quote = text[p++];
          const auto end = text.find(quote, p);
          if (end == std::string_view::npos)
            throw Error(ErrorCode::BadGeometry, "unterminated attribute " + key);
          value = std::string(text.substr(p, end - p));
          p = end + 1;
        }
      }
      tag.attrs[std::move(key)] = std::move(value);
    }
    tags.push_back(std::move(tag));
    i = p;
  }
  return tags;
}

/// Sequential number reader for path data, point lists and transforms.
class NumberStream {
 public:
  explicit NumberStream(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (pos_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ','))
      ++pos_;
  }
  bool at_end() {
    skip_separators();
    return pos_ >= s_.size();
  }
  bool next_is_number() {
    skip_separators();
    if (pos_ >= s_.size()) return false;
    const char ch = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '.';
  }
  char peek() {
    skip_separators();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  char take() { return s_[pos_++]; }

  double number() {
    skip_separators();
    std::size_t p = pos_;
    if (p < s_.size() && s_[p] == '+') ++p;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + p, s_.data() + s_.size(), value);
    if (ec != std::errc())
      throw Error(ErrorCode::BadGeometry, "malformed number in '" + std::string(s_) + "'");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return value;
  }
  // Arc flags may be written without separators ("a1 1 0 01 1 1").
  bool flag() {
    skip_separators();
    if (pos_ < s_.size() && (s_[pos_] == '0' || s_[pos_] == '1')) return s_[pos_++] == '1';
    throw Error(ErrorCode::BadGeometry, "malformed arc flag");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

inline double parse_length(std::string_view s) {
  NumberStream ns(s);
  return ns.number();
}

inline Affine parse_transform(std::string_view s) {
  Affine total;
  std::size_t p = 0;
  while (p < s.size()) {
    while (p < s.size() && (std::isspace(static_cast<unsigned char>(s[p])) || s[p] == ',')) ++p;
    if (p >= s.size()) break;
    const auto open = s.find('(', p);
    const auto close = s.find(')', p);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      throw Error(ErrorCode::BadGeometry, "malformed transform '" + std::string(s) + "'");
    std::string name(s.substr(p, open - p));
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    NumberStream args(s.substr(open + 1, close - open - 1));
    std::vector<double> v;
    while (!args.at_end()) v.push_back(args.number());
    Affine t;
    const auto arg = [&](std::size_t i, double fallback) { return i < v.size() ? v[i] : fallback; };
    if (name == "matrix" && v.size() == 6) {
      t = {v[0], v[1], v[2], v[3], v[4], v[5]};
    } else if (name == "translate" && !v.empty()) {
      t.e = v[0];
      t.f = arg(1, 0.0);
    } else if (name == "scale" && !v.empty()) {
      t.a = v[0];
      t.d = arg(1, v[0]);
    } else if (name == "rotate" && !v.empty()) {
      const double r = v[0] * std::numbers::pi / 180.0;
      const double cx = arg(1, 0.0), cy = arg(2, 0.0);
      const Affine to{1, 0, 0, 1, -cx, -cy};
      const Affine rot{std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
      const Affine back{1, 0, 0, 1, cx, cy};
      t = to.then(rot).then(back);
    } else if (name == "skewX" && !v.empty()) {
      t.c = std::tan(v[0] * std::numbers::pi / 180.0);
    } else if (name == "skewY" && !v.empty()) {
      t.b = std::tan(v[0] * std::numbers::pi / 180.0);
    } else {
      throw Error(ErrorCode::BadGeometry, "unsupported transform '" + name + "'");
    }
    // Transform lists apply right-to-left to points.
    total = t.then(total);
    p = close + 1;
  }
  return total;
}

inline std::optional<std::array<double, 3>> parse_color(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty() || s == "none" || s == "transparent") return std::nullopt;
  const auto hex = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    return 0;
  };
  if (s.front() == '#') {
    if (s.size() == 4)
      return std::array<double, 3>{hex(s[1]) / 15.0, hex(s[2]) / 15.0, hex(s[3]) / 15.0};
    if (s.size() == 7)
      return std::array<double, 3>{(hex(s[1]) * 16 + hex(s[2])) / 255.0,
                                   (hex(s[3]) * 16 + hex(s[4])) / 255.0,
                                   (hex(s[5]) * 16 + hex(s[6])) / 255.0};
  }
  if (s.starts_with("rgb(")) {
    NumberStream ns(s.substr(4, s.find(')') - 4));
    std::array<double, 3> rgb{};
    for (auto& c : rgb) c = ns.number() / 255.0;
    return rgb;
  }
  if (s == "white") return std::array<double, 3>{1, 1, 1};
  return std::array<double, 3>{0, 0, 0};
}

struct Style {
  std::string fill = "#000000";
  std::string fill_rule = "nonzero";
  Affine transform;
};

inline Style inherit(const Style& parent, const Tag& tag) {
  Style s = parent;
  if (auto it = tag.attrs.find("fill"); it != tag.attrs.end()) s.fill = it->second;
  if (auto it = tag.attrs.find("fill-rule"); it != tag.attrs.end()) s.fill_rule = it->second;
  if (auto it = tag.attrs.find("style"); it != tag.attrs.end()) {
    std::string_view decls = it->second;
    while (!decls.empty()) {
      const auto semi = decls.find(';');
      std::string_view decl = decls.substr(0, semi);
      decls = semi == std::string_view::npos ? std::string_view{} : decls.substr(semi + 1);
      const auto colon = decl.find(':');
      if (colon == std::string_view::npos) continue;
      std::string key;
      for (char ch : decl.substr(0, colon))
        if (!std::isspace(static_cast<unsigned char>(ch))) key += ch;
      std::string value(decl.substr(colon + 1));
      if (key == "fill") s.fill = value;
      if (key == "fill-rule") s.fill_rule = value;
    }
  }
  if (auto it = tag.attrs.find("transform"); it != tag.attrs.end())
    s.transform = parse_transform(it->second).then(parent.transform);
  return s;
}

inline void flatten_cubic(Contour& out, Point p0, Point p1, Point p2, Point p3) {
  constexpr int kSegments = 16;
  for (int i = 1; i <= kSegments; ++i) {
    const double t = static_cast<double>(i) / kSegments, u = 1 - t;
    out.push_back({u * u * u * p0.x + 3 * u * u * t * p1.x + 3 * u * t * t * p2.x + t * t * t * p3.x,
                   u * u * u * p0.y + 3 * u * u * t * p1.y + 3 * u * t * t * p2.y + t * t * t * p3.y});
  }
}

inline void flatten_quad(Contour& out, Point p0, Point p1, Point p2) {
  constexpr int kSegments = 16;
  for (int i = 1; i <= kSegments; ++i) {
    const double t = static_cast<double>(i) / kSegments, u = 1 - t;
    out.push_back({u * u * p0.x + 2 * u * t * p1.x + t * t * p2.x,
                   u * u * p0.y + 2 * u * t * p1.y + t * t * p2.y});
  }
}

// Endpoint-parameterized elliptical arc, converted to centre form.
inline void flatten_arc(Contour& out, Point p0, double rx, double ry, double phi_deg, bool large,
                        bool sweep, Point p1) {
  if (p0.x == p1.x && p0.y == p1.y) return;
  rx = std::abs(rx);
  ry = std::abs(ry);
  if (rx == 0 || ry == 0) {
    out.push_back(p1);
    return;
  }
  const double phi = phi_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(phi), sn = std::sin(phi);
  const double dx = (p0.x - p1.x) / 2, dy = (p0.y - p1.y) / 2;
  const double x1 = cs * dx + sn * dy, y1 = -sn * dx + cs * dy;
  const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
  if (lambda > 1) {
    rx *= std::sqrt(lambda);
    ry *= std::sqrt(lambda);
  }
  const double num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
  const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
  double coef = std::sqrt(std::max(0.0, num / den));
  if (large == sweep) coef = -coef;
  const double cxp = coef * rx * y1 / ry, cyp = -coef * ry * x1 / rx;
  const double cx = cs * cxp - sn * cyp + (p0.x + p1.x) / 2;
  const double cy = sn * cxp + cs * cyp + (p0.y + p1.y) / 2;
  const auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  const double theta = angle(1, 0, (x1 - cxp) / rx, (y1 - cyp) / ry);
  double delta = angle((x1 - cxp) / rx, (y1 - cyp) / ry, (-x1 - cxp) / rx, (-y1 - cyp) / ry);
  if (!sweep && delta > 0) delta -= 2 * std::numbers::pi;
  if (sweep && delta < 0) delta += 2 * std::numbers::pi;
  const int segments = std::max(4, static_cast<int>(std::ceil(std::abs(delta) / (std::numbers::pi / 32))));
  for (int i = 1; i <= segments; ++i) {
    const double t = theta + delta * i / segments;
    const double ex = rx * std::cos(t), ey = ry * std::sin(t);
    out.push_back({cs * ex - sn * ey + cx, sn * ex + cs * ey + cy});
  }
  out.back() = p1;
}

inline std::vector<Contour> parse_path_data(std::string_view d) {
  std::vector<Contour> contours;
  Contour current;
  Point pos, start, last_ctrl;
  char last_cmd = 0;
  NumberStream ns(d);
  const auto flush = [&] {
    if (current.size() >= 3) contours.push_back(std::move(current));
    current.clear();
  };
  char cmd = 0;
  while (!ns.at_end()) {
    if (!ns.next_is_number()) {
      cmd = ns.take();
    } else if (cmd == 0) {
      throw Error(ErrorCode::BadGeometry, "path data must start with a command");
    } else if (cmd == 'M') {
      cmd = 'L';  // implicit lineto after moveto
    } else if (cmd == 'm') {
      cmd = 'l';
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd)) != 0;
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    const auto pt = [&] {
      const double x = ns.number();
      const double y = ns.number();
      return rel ? Point{pos.x + x, pos.y + y} : Point{x, y};
    };
    if (up != 'M' && up != 'Z' && current.empty()) current.push_back(pos);
    switch (up) {
      case 'M':
        flush();
        pos = pt();
        start = pos;
        current.push_back(pos);
        break;
      case 'L':
        pos = pt();
        current.push_back(pos);
        break;
      case 'H': {
        const double x = ns.number();
        pos.x = rel ? pos.x + x : x;
        current.push_back(pos);
        break;
      }
      case 'V': {
        const double y = ns.number();
        pos.y = rel ? pos.y + y : y;
        current.push_back(pos);
        break;
      }
      case 'C': {
        const Point c1 = pt(), c2 = pt(), end = pt();
        flatten_cubic(current, pos, c1, c2, end);
        last_ctrl = c2;
        pos = end;
        break;
      }
      case 'S': {
        const bool smooth = last_cmd == 'C' || last_cmd == 'S';
        const Point c1 = smooth ? Point{2 * pos.x - last_ctrl.x, 2 * pos.y - last_ctrl.y} : pos;
        const Point c2 = pt(), end = pt();
        flatten_cubic(current, pos, c1, c2, end);
        last_ctrl = c2;
        pos = end;
        break;
      }
      case 'Q': {
        const Point c = pt(), end = pt();
        flatten_quad(current, pos, c, end);
        last_ctrl = c;
        pos = end;
        break;
      }
      case 'T': {
        const bool smooth = last_cmd == 'Q' || last_cmd == 'T';
        const Point c = smooth ? Point{2 * pos.x - last_ctrl.x, 2 * pos.y - last_ctrl.y} : pos;
        const Point end = pt();
        flatten_quad(current, pos, c, end);
        last_ctrl = c;
        pos = end;
        break;
      }
      case 'A': {
        const double rx = ns.number(), ry = ns.number(), rot = ns.number();
        const bool large = ns.flag(), sweep = ns.flag();
        const Point end = pt();
        flatten_arc(current, pos, rx, ry, rot, large, sweep, end);
        pos = end;
        break;
      }
      case 'Z':
        flush();
        pos = start;
        break;
      default:
        throw Error(ErrorCode::BadGeometry, std::string("unsupported path command '") + cmd + "'");
    }
    if (up == 'Z' && ns.next_is_number())
      throw Error(ErrorCode::BadGeometry, "numbers after closepath");
    last_cmd = up;
    if (up == 'Z') cmd = 0;
  }
  flush();
  return contours;
}

inline Contour ellipse_contour(double cx, double cy, double rx, double ry) {
  constexpr int kSegments = 64;
  Contour c;
  for (int i = 0; i < kSegments; ++i) {
    const double t = 2 * std::numbers::pi * i / kSegments;
    c.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
  }
  return c;
}

inline double attr_number(const Tag& tag, std::string_view key, double fallback = 0.0) {
  const auto it = tag.attrs.find(key);
  return it == tag.attrs.end() || it->second.empty() ? fallback : parse_length(it->second);
}

}  // namespace svg_detail

/// Parses a module drawing. The viewBox (or width/height when absent) must be
/// square; coordinates are normalized to the unit square. `name` is only used
/// in diagnostics.
inline ModuleGeometry parse_module_svg(std::string_view text, const std::string& name = "<svg>") {
  using namespace svg_detail;
  const auto tags = tokenize(text);
  std::optional<std::array<double, 4>> view;
  std::vector<Style> stack;
  ModuleGeometry geometry;
  int skip_depth = 0;

  for (const auto& tag : tags) {
    const bool container = tag.name == "svg" || tag.name == "g" || tag.name == "a";
    const bool skipped = tag.name == "defs" || tag.name == "clipPath" || tag.name == "mask" ||
                         tag.name == "symbol" || tag.name == "pattern" || tag.name == "marker";
    if (tag.closing) {
      if (skipped && skip_depth > 0) --skip_depth;
      else if (container && skip_depth == 0 && !stack.empty()) stack.pop_back();
      continue;
    }
    if (skipped) {
      if (!tag.self_closing) ++skip_depth;
      continue;
    }
    if (skip_depth > 0) continue;

    if (tag.name == "svg" && !view) {
      if (auto it = tag.attrs.find("viewBox"); it != tag.attrs.end()) {
        NumberStream ns(it->second);
        std::array<double, 4> vb{};
        for (auto& v : vb) v = ns.number();
        view = vb;
      } else if (tag.attrs.contains("width") && tag.attrs.contains("height")) {
        view = std::array<double, 4>{0, 0, attr_number(tag, "width"), attr_number(tag, "height")};
      } else {
        throw Error(ErrorCode::BadGeometry, name + ": missing viewBox");
      }
      const double w = (*view)[2], h = (*view)[3];
      if (!(w > 0) || !(h > 0) || std::abs(w - h) > 1e-9 * std::max(w, h))
        throw Error(ErrorCode::BadGeometry, name + ": viewBox is not square");
      stack.push_back(inherit(Style{}, tag));
      if (tag.self_closing) stack.pop_back();
      continue;
    }
    if (!view) continue;
    const Style parent = stack.empty() ? Style{} : stack.back();
    const Style style = inherit(parent, tag);
    if (container) {
      if (!tag.self_closing) stack.push_back(style);
      continue;
    }

    std::vector<Contour> contours;
    if (tag.name == "rect") {
      const double x = attr_number(tag, "x"), y = attr_number(tag, "y");
      const double w = attr_number(tag, "width"), h = attr_number(tag, "height");
      if (w > 0 && h > 0) contours.push_back({{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}});
    } else if (tag.name == "polygon" || tag.name == "polyline") {
      NumberStream ns(tag.attrs.contains("points") ? tag.attrs.find("points")->second : "");
      Contour c;
      while (!ns.at_end()) {
        const double x = ns.number();
        c.push_back({x, ns.number()});
      }
      if (c.size() >= 3) contours.push_back(std::move(c));
    } else if (tag.name == "circle") {
      const double r = attr_number(tag, "r");
      if (r > 0) contours.push_back(ellipse_contour(attr_number(tag, "cx"), attr_number(tag, "cy"), r, r));
    } else if (tag.name == "ellipse") {
      const double rx = attr_number(tag, "rx"), ry = attr_number(tag, "ry");
      if (rx > 0 && ry > 0)
        contours.push_back(ellipse_contour(attr_number(tag, "cx"), attr_number(tag, "cy"), rx, ry));
    } else if (tag.name == "path") {
      if (auto it = tag.attrs.find("d"); it != tag.attrs.end()) contours = parse_path_data(it->second);
    } else {
      continue;
    }
    const auto color = parse_color(style.fill);
    if (contours.empty() || !color) continue;

    Shape shape;
    const double luma = 0.2126 * (*color)[0] + 0.7152 * (*color)[1] + 0.0722 * (*color)[2];
    shape.ink = luma >= 0.5 ? Ink::Paper : Ink::Ink;
    shape.fill_rule = style.fill_rule == "evenodd" ? FillRule::EvenOdd : FillRule::NonZero;
    const auto [vx, vy, vw, vh] = *view;
    for (auto& contour : contours) {
      for (auto& p : contour) {
        p = style.transform.apply(p);
        p = {(p.x - vx) / vw, (p.y - vy) / vh};
      }
    }
    shape.contours = std::move(contours);
    geometry.shapes.push_back(std::move(shape));
  }
  if (!view) throw Error(ErrorCode::BadGeometry, name + ": no <svg> element");
  if (!geometry.fits_unit_square(1e-6))
    throw Error(ErrorCode::BadGeometry, name + ": drawing extends outside the viewBox");
  return geometry;
}

}  // namespace modgrid
