#pragma once

// Text formats (WKT subset, GeoJSON subset) and seeded synthetic datasets.

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "geo2vec/error.hpp"
#include "geo2vec/geometry.hpp"
#include "geo2vec/random.hpp"

namespace geo2vec {

class Dataset {
 public:
  std::string name;
  std::optional<SimilarityTransform> transform;

  Dataset() = default;
  explicit Dataset(std::string n) : name(std::move(n)) {}

  void add(GeoEntity e, std::optional<int> label = std::nullopt) {
    if (index_.count(e.id())) throw DataError("duplicate entity id '" + e.id() + "'");
    index_.emplace(e.id(), entities_.size());
    if (label) labels_[e.id()] = *label;
    entities_.push_back(std::move(e));
  }

  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }
  const std::vector<GeoEntity>& entities() const { return entities_; }
  const GeoEntity& operator[](std::size_t i) const { return entities_[i]; }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }
  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("unknown entity id '" + id + "'");
    return it->second;
  }
  const GeoEntity& at(const std::string& id) const { return entities_[index_of(id)]; }

  const std::map<std::string, int>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }
  std::optional<int> label(const std::string& id) const {
    auto it = labels_.find(id);
    if (it == labels_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<GeoEntity> entities_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, int> labels_;
};

// ---------------------------------------------------------------------------
// WKT
// ---------------------------------------------------------------------------

namespace detail {

class WktReader {
 public:
  explicit WktReader(std::string_view text) : text_(text) {}

  GeoEntity read(std::string id) {
    skip_ws();
    const std::size_t kw_at = pos_;
    const std::string kw = keyword();
    if (kw.empty()) fail("expected geometry type");
    skip_ws();
    const std::string next = peek_keyword();
    if (next == "EMPTY" || next == "Z" || next == "M" || next == "ZM") {
      throw ParseError("unsupported WKT modifier '" + next + "'", pos_);
    }
    GeoEntity e;
    if (kw == "POINT") {
      expect('(');
      const Coord c = coord();
      expect(')');
      e = GeoEntity::point(std::move(id), c);
    } else if (kw == "LINESTRING") {
      e = GeoEntity::polyline(std::move(id), coord_list());
    } else if (kw == "POLYGON") {
      Polygon p = polygon_text();
      e = GeoEntity::polygon(std::move(id), std::move(p.exterior), std::move(p.holes));
    } else if (kw == "MULTIPOLYGON") {
      expect('(');
      std::vector<Polygon> parts;
      parts.push_back(polygon_text());
      while (accept(',')) parts.push_back(polygon_text());
      expect(')');
      e = GeoEntity::multipolygon(std::move(id), std::move(parts));
    } else {
      throw ParseError("unsupported geometry type '" + kw + "'", kw_at);
    }
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("WKT syntax error: " + msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string keyword() {
    std::string out;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_]))));
      ++pos_;
    }
    return out;
  }

  std::string peek_keyword() {
    const std::size_t save = pos_;
    std::string out = keyword();
    pos_ = save;
    return out;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') fail("unexpected '+'");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("expected number");
    if (!std::isfinite(v)) fail("non-finite number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  Coord coord() {
    const double x = number();
    const std::size_t before = pos_;
    skip_ws();
    if (pos_ == before) fail("expected whitespace between coordinates");
    const double y = number();
    return {x, y};
  }

  std::vector<Coord> coord_list() {
    expect('(');
    std::vector<Coord> pts;
    pts.push_back(coord());
    while (accept(',')) pts.push_back(coord());
    expect(')');
    return pts;
  }

  Polygon polygon_text() {
    expect('(');
    Polygon p;
    p.exterior.vertices = coord_list();
    while (accept(',')) p.holes.push_back(Ring{coord_list()});
    expect(')');
    return p;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

}  // namespace detail

inline GeoEntity parse_wkt(std::string_view text, std::string id = "0") {
  return detail::WktReader(text).read(std::move(id));
}

// Shortest round-trip decimal representation; rings are written closed.
inline std::string to_wkt(const GeoEntity& e) {
  std::string out;
  auto coord = [&](Coord c) {
    detail::append_number(out, c.x);
    out.push_back(' ');
    detail::append_number(out, c.y);
  };
  auto list = [&](const std::vector<Coord>& pts, bool closed) {
    out.push_back('(');
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out += ", ";
      coord(pts[i]);
    }
    if (closed) {
      out += ", ";
      coord(pts.front());
    }
    out.push_back(')');
  };
  auto poly = [&](const Polygon& p) {
    out.push_back('(');
    list(p.exterior.vertices, true);
    for (const Ring& h : p.holes) {
      out += ", ";
      list(h.vertices, true);
    }
    out.push_back(')');
  };
  switch (e.kind()) {
    case EntityKind::Point:
      out = "POINT (";
      coord(e.as_point());
      out.push_back(')');
      break;
    case EntityKind::Polyline:
      out = "LINESTRING ";
      list(e.as_polyline().vertices, false);
      break;
    case EntityKind::Polygon:
      out = "POLYGON ";
      poly(e.as_polygon());
      break;
    case EntityKind::MultiPolygon: {
      out = "MULTIPOLYGON (";
      const auto& parts = e.as_multipolygon();
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        poly(parts[i]);
      }
      out.push_back(')');
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// GeoJSON
// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline Coord json_coord(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw DataError("coordinate must be an [x, y] number array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<Coord> json_coords(const json& j) {
  if (!j.is_array()) throw DataError("expected coordinate array");
  std::vector<Coord> out;
  out.reserve(j.size());
  for (const json& c : j) out.push_back(json_coord(c));
  return out;
}

inline Polygon json_polygon(const json& j) {
  if (!j.is_array() || j.empty()) throw DataError("polygon needs at least one ring");
  Polygon p;
  p.exterior.vertices = json_coords(j[0]);
  for (std::size_t i = 1; i < j.size(); ++i) p.holes.push_back(Ring{json_coords(j[i])});
  return p;
}

inline GeoEntity json_geometry(const json& g, std::string id) {
  if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) throw DataError("geometry without type");
  if (!g.contains("coordinates")) throw DataError("geometry without coordinates");
  const std::string type = g["type"].get<std::string>();
  const json& c = g["coordinates"];
  if (type == "Point") return GeoEntity::point(std::move(id), json_coord(c));
  if (type == "LineString") return GeoEntity::polyline(std::move(id), json_coords(c));
  if (type == "Polygon") {
    Polygon p = json_polygon(c);
    return GeoEntity::polygon(std::move(id), std::move(p.exterior), std::move(p.holes));
  }
  if (type == "MultiPolygon") {
    if (!c.is_array()) throw DataError("expected polygon array");
    std::vector<Polygon> parts;
    for (const json& pj : c) parts.push_back(json_polygon(pj));
    return GeoEntity::multipolygon(std::move(id), std::move(parts));
  }
  throw DataError("unsupported geometry type '" + type + "'");
}

inline json coords_json(const std::vector<Coord>& pts, bool closed) {
  json arr = json::array();
  for (const Coord& c : pts) arr.push_back({c.x, c.y});
  if (closed) arr.push_back({pts.front().x, pts.front().y});
  return arr;
}

inline json polygon_json(const Polygon& p) {
  json rings = json::array();
  rings.push_back(coords_json(p.exterior.vertices, true));
  for (const Ring& h : p.holes) rings.push_back(coords_json(h.vertices, true));
  return rings;
}

}  // namespace detail

inline Dataset parse_geojson(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed GeoJSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw DataError("expected a FeatureCollection with a features array");
  }
  Dataset ds(doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "");
  const json& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& f = features[i];
    if (!f.is_object() || f.value("type", "") != "Feature") {
      throw DataError("feature " + std::to_string(i) + " is not a Feature object");
    }
    std::string id = std::to_string(i);
    if (f.contains("id")) {
      const json& jid = f["id"];
      if (jid.is_string()) id = jid.get<std::string>();
      else if (jid.is_number_integer()) id = std::to_string(jid.get<std::int64_t>());
      else throw DataError("feature " + std::to_string(i) + " has a non string/integer id");
    }
    if (!f.contains("geometry")) throw DataError("feature " + std::to_string(i) + " has no geometry");
    GeoEntity e = detail::json_geometry(f["geometry"], id);
    std::optional<int> label;
    if (f.contains("properties") && f["properties"].is_object() && f["properties"].contains("label")) {
      const json& l = f["properties"]["label"];
      if (l.is_number_integer()) {
        label = l.get<int>();
      } else if (l.is_number_float() && std::floor(l.get<double>()) == l.get<double>()) {
        label = static_cast<int>(l.get<double>());
      } else if (!l.is_null()) {
        throw DataError("feature '" + id + "' has a non-integer label");
      }
    }
    ds.add(std::move(e), label);
  }
  return ds;
}

inline std::string serialize_geojson(const Dataset& ds) {
  using detail::json;
  json features = json::array();
  for (const GeoEntity& e : ds.entities()) {
    json geom;
    switch (e.kind()) {
      case EntityKind::Point:
        geom = {{"type", "Point"}, {"coordinates", {e.as_point().x, e.as_point().y}}};
        break;
      case EntityKind::Polyline:
        geom = {{"type", "LineString"}, {"coordinates", detail::coords_json(e.as_polyline().vertices, false)}};
        break;
      case EntityKind::Polygon:
        geom = {{"type", "Polygon"}, {"coordinates", detail::polygon_json(e.as_polygon())}};
        break;
      case EntityKind::MultiPolygon: {
        json parts = json::array();
        for (const Polygon& p : e.as_multipolygon()) parts.push_back(detail::polygon_json(p));
        geom = {{"type", "MultiPolygon"}, {"coordinates", parts}};
        break;
      }
    }
    json props = json::object();
    if (auto l = ds.label(e.id())) props["label"] = *l;
    features.push_back({{"type", "Feature"}, {"id", e.id()}, {"properties", props}, {"geometry", geom}});
  }
  std::string out;
  // One feature per line keeps files diffable.
  out += "{\"type\":\"FeatureCollection\"";
  if (!ds.name.empty()) out += ",\"name\":" + json(ds.name).dump();
  out += ",\"features\":[\n";
  for (std::size_t i = 0; i < features.size(); ++i) {
    out += features[i].dump();
    out += i + 1 < features.size() ? ",\n" : "\n";
  }
  out += "]}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic datasets
// ---------------------------------------------------------------------------

enum class ShapeFamily : int { Rectangle = 0, LShape = 1, TShape = 2, EShape = 3, Cross = 4 };

inline constexpr std::array<std::string_view, 5> kShapeFamilyNames = {"rectangle", "L", "T", "E", "cross"};
inline constexpr std::array<int, 5> kShapeFamilyEdges = {4, 6, 8, 12, 12};

inline ShapeFamily shape_family_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kShapeFamilyNames.size(); ++i)
    if (kShapeFamilyNames[i] == name) return static_cast<ShapeFamily>(i);
  throw DataError("unknown shape family '" + std::string(name) + "'");
}

struct SynthesisSpec {
  std::vector<std::string> classes{kShapeFamilyNames.begin(), kShapeFamilyNames.end()};
  int count_per_class = 40;
  double vertex_noise = 0.01;  // relative to template size
  double rotation_min = 0.0;
  double rotation_max = 2.0 * std::numbers::pi;
  double scale_min = 1.0;
  double scale_max = 1.0;
  BBox placement{{0.0, 0.0}, {100.0, 100.0}};
  double overlap_fraction = 0.0;  // scattered datasets only
  std::uint64_t seed = 0;

  void validate() const {
    if (count_per_class < 1) throw DataError("count_per_class must be >= 1");
    if (!(vertex_noise >= 0.0)) throw DataError("vertex_noise must be >= 0");
    if (!(rotation_min <= rotation_max)) throw DataError("rotation range must be ordered");
    if (!(scale_min > 0.0 && scale_min <= scale_max)) throw DataError("scale range must be positive and ordered");
    if (placement.empty() || !(placement.width() > 0.0 && placement.height() > 0.0))
      throw DataError("placement box must have positive extent");
    if (!(overlap_fraction >= 0.0 && overlap_fraction <= 1.0)) throw DataError("overlap_fraction must be in [0, 1]");
  }
};

namespace detail {

// Outline of a family member with unit-scale proportions drawn from rng,
// centered on its bounding box.
inline std::vector<Coord> family_template(ShapeFamily family, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double t = 0.22 + 0.12 * u(rng);  // arm thickness
  std::vector<Coord> v;
  switch (family) {
    case ShapeFamily::Rectangle: {
      const double w = 0.45 + 0.35 * u(rng);
      v = {{0, 0}, {w, 0}, {w, 1}, {0, 1}};
      break;
    }
    case ShapeFamily::LShape: {
      const double w = 0.65 + 0.3 * u(rng);
      v = {{0, 0}, {w, 0}, {w, t}, {t, t}, {t, 1}, {0, 1}};
      break;
    }
    case ShapeFamily::TShape: {
      const double w = 0.8 + 0.2 * u(rng);
      const double s = 0.5 * t;
      v = {{-s, 0}, {s, 0}, {s, 1 - t}, {w / 2, 1 - t}, {w / 2, 1}, {-w / 2, 1}, {-w / 2, 1 - t}, {-s, 1 - t}};
      break;
    }
    case ShapeFamily::EShape: {
      const double w = 0.65 + 0.25 * u(rng);
      const double a = 0.8 * t;  // spine width
      const double arm = 0.6 * t;
      const double mid_lo = 0.5 - arm / 2, mid_hi = 0.5 + arm / 2;
      const double mid_w = w * (0.75 + 0.25 * u(rng));
      v = {{0, 0},      {w, 0},          {w, arm},      {a, arm},  {a, mid_lo}, {mid_w, mid_lo},
           {mid_w, mid_hi}, {a, mid_hi}, {a, 1 - arm}, {w, 1 - arm}, {w, 1},   {0, 1}};
      break;
    }
    case ShapeFamily::Cross: {
      const double h = 0.5 * t;
      v = {{-h, -0.5}, {h, -0.5}, {h, -h}, {0.5, -h}, {0.5, h},   {h, h},
           {h, 0.5},   {-h, 0.5}, {-h, h}, {-0.5, h}, {-0.5, -h}, {-h, -h}};
      break;
    }
  }
  BBox box;
  for (const Coord& c : v) box.expand(c);
  const Coord mid = box.center();
  for (Coord& c : v) c = c - mid;
  return v;
}

// No two non-adjacent edges of the ring intersect.
inline bool ring_is_simple(const std::vector<Coord>& ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Segment s{ring[i], ring[(i + 1) % n]};
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(s, Segment{ring[j], ring[(j + 1) % n]})) return false;
    }
  }
  return true;
}

}  // namespace detail

// Labeled polygons from the five families; labels index spec.classes.
inline Dataset synthesize_shapes(const SynthesisSpec& spec) {
  spec.validate();
  Dataset ds("shapes");
  Rng rng = make_rng(spec.seed, "synthesize_shapes");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const ShapeFamily family = shape_family_from_name(spec.classes[c]);
    for (int i = 0; i < spec.count_per_class; ++i) {
      std::vector<Coord> ring;
      for (int attempt = 0;; ++attempt) {
        ring = detail::family_template(family, rng);
        for (Coord& p : ring) p = p + Coord{spec.vertex_noise * noise(rng), spec.vertex_noise * noise(rng)};
        if (detail::ring_is_simple(ring)) break;
        if (attempt > 100) throw DataError("vertex_noise too large to keep shapes simple");
      }
      const double angle = spec.rotation_min + (spec.rotation_max - spec.rotation_min) * u(rng);
      const double scale = spec.scale_min + (spec.scale_max - spec.scale_min) * u(rng);
      const Coord at{spec.placement.min.x + spec.placement.width() * u(rng),
                     spec.placement.min.y + spec.placement.height() * u(rng)};
      for (Coord& p : ring) p = rotate(p, angle) * scale + at;
      std::string id = std::string(kShapeFamilyNames[static_cast<int>(family)]) + "-" + std::to_string(i);
      ds.add(GeoEntity::polygon(std::move(id), Ring{std::move(ring)}), static_cast<int>(c));
    }
  }
  return ds;
}

// Mixed points, polylines (2-10 vertices) and polygons, count_per_class of each.
// Entities drawn with probability overlap_fraction are deliberately placed to
// intersect an earlier entity (points inside polygons or on polyline vertices,
// polylines through polygons or across polylines, polygons over polygons); all
// others keep a positive distance from everything placed before them.
inline Dataset synthesize_scattered(const SynthesisSpec& spec) {
  spec.validate();
  Dataset ds("scattered");
  Rng rng = make_rng(spec.seed, "synthesize_scattered");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const BBox& area = spec.placement;
  const double extent = std::max(area.width(), area.height());
  const double min_gap = 1e-4 * extent;

  auto size_draw = [&] { return spec.scale_min + (spec.scale_max - spec.scale_min) * u(rng); };
  auto uniform_point = [&] {
    return Coord{area.min.x + area.width() * u(rng), area.min.y + area.height() * u(rng)};
  };
  auto random_polygon = [&](Coord center, double size) {
    std::uniform_int_distribution<int> nv(3, 10);
    const int n = nv(rng);
    std::vector<double> angles(static_cast<std::size_t>(n));
    for (double& a : angles) a = 2.0 * std::numbers::pi * u(rng);
    std::sort(angles.begin(), angles.end());
    std::vector<Coord> ring;
    for (double a : angles) {
      const double r = 0.5 * size * (0.5 + 0.5 * u(rng));
      ring.push_back(center + Coord{r * std::cos(a), r * std::sin(a)});
    }
    return ring;
  };
  auto random_polyline = [&](Coord start, double size) {
    std::uniform_int_distribution<int> nv(2, 10);
    const int n = nv(rng);
    std::vector<Coord> pts{start};
    double heading = 2.0 * std::numbers::pi * u(rng);
    for (int i = 1; i < n; ++i) {
      heading += (u(rng) - 0.5) * std::numbers::pi / 2.0;
      const double step = size * (0.3 + 0.7 * u(rng)) / std::sqrt(static_cast<double>(n));
      pts.push_back(pts.back() + Coord{step * std::cos(heading), step * std::sin(heading)});
    }
    return pts;
  };
  auto random_inside = [&](const GeoEntity& poly) {
    const BBox b = bbox(poly);
    for (;;) {
      const Coord p{b.min.x + b.width() * u(rng), b.min.y + b.height() * u(rng)};
      if (point_in_entity(p, poly) && unsigned_distance(p, poly) > 0.0) return p;
    }
  };

  std::vector<std::size_t> polygons, polylines;
  auto keeps_gap = [&](const GeoEntity& e) {
    const BBox be = bbox(e);
    for (const GeoEntity& other : ds.entities()) {
      const BBox bo = bbox(other);
      if (be.min.x - bo.max.x > min_gap || bo.min.x - be.max.x > min_gap || be.min.y - bo.max.y > min_gap ||
          bo.min.y - be.max.y > min_gap)
        continue;
      if (min_entity_distance(e, other) <= min_gap) return false;
      if (e.has_interior() && point_in_entity(other.vertices().front(), e)) return false;
      if (other.has_interior() && point_in_entity(e.vertices().front(), other)) return false;
    }
    return true;
  };
  auto place = [&](EntityKind kind, std::string id) {
    const bool overlap = !ds.empty() && u(rng) < spec.overlap_fraction;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const double size = size_draw();
      try {
        if (kind == EntityKind::Point) {
          if (overlap && (!polygons.empty() || !polylines.empty())) {
            const bool use_line = polygons.empty() || (!polylines.empty() && u(rng) < 0.5);
            if (use_line) {
              const auto& v = ds[polylines[static_cast<std::size_t>(u(rng) * polylines.size())]].as_polyline().vertices;
              return GeoEntity::point(std::move(id), v[static_cast<std::size_t>(u(rng) * v.size())]);
            }
            return GeoEntity::point(std::move(id),
                                    random_inside(ds[polygons[static_cast<std::size_t>(u(rng) * polygons.size())]]));
          }
          GeoEntity e = GeoEntity::point(id, uniform_point());
          if (keeps_gap(e)) return e;
        } else if (kind == EntityKind::Polyline) {
          if (overlap && (!polygons.empty() || !polylines.empty())) {
            const bool use_line = polygons.empty() || (!polylines.empty() && u(rng) < 0.3);
            Coord start;
            if (use_line) {
              const auto& v = ds[polylines[static_cast<std::size_t>(u(rng) * polylines.size())]].as_polyline().vertices;
              const std::size_t k = static_cast<std::size_t>(u(rng) * (v.size() - 1));
              const double f = u(rng);
              start = v[k] * (1.0 - f) + v[k + 1] * f;
            } else {
              start = random_inside(ds[polygons[static_cast<std::size_t>(u(rng) * polygons.size())]]);
            }
            std::vector<Coord> pts = random_polyline(start, size);
            // Center the walk on the anchor so it runs through it.
            const Coord shift = start - pts[pts.size() / 2];
            if (pts.size() > 2) for (Coord& p : pts) p = p + shift;
            GeoEntity e = GeoEntity::polyline(id, std::move(pts));
            return e;
          }
          GeoEntity e = GeoEntity::polyline(id, random_polyline(uniform_point(), size));
          if (keeps_gap(e)) return e;
        } else {
          if (overlap && !polygons.empty()) {
            const GeoEntity& target = ds[polygons[static_cast<std::size_t>(u(rng) * polygons.size())]];
            const BBox b = bbox(target);
            const Coord c{b.min.x + b.width() * u(rng), b.min.y + b.height() * u(rng)};
            std::vector<Coord> ring = random_polygon(c, size * (0.3 + 1.2 * u(rng)));
            if (!detail::ring_is_simple(ring)) continue;
            return GeoEntity::polygon(std::move(id), Ring{std::move(ring)});
          }
          std::vector<Coord> ring = random_polygon(uniform_point(), size);
          if (!detail::ring_is_simple(ring)) continue;
          GeoEntity e = GeoEntity::polygon(id, Ring{std::move(ring)});
          if (keeps_gap(e)) return e;
        }
      } catch (const GeometryError&) {
        // Degenerate draw; try again.
      }
    }
    throw DataError("placement area too crowded for the requested counts");
  };

  const int n = spec.count_per_class;
  for (int i = 0; i < n; ++i) {
    ds.add(place(EntityKind::Polygon, "pg-" + std::to_string(i)));
    polygons.push_back(ds.size() - 1);
  }
  for (int i = 0; i < n; ++i) {
    ds.add(place(EntityKind::Polyline, "pl-" + std::to_string(i)));
    polylines.push_back(ds.size() - 1);
  }
  for (int i = 0; i < n; ++i) ds.add(place(EntityKind::Point, "pt-" + std::to_string(i)));
  return ds;
}

}  // namespace geo2vec
