#pragma once

// Vector geo-entities (point, polyline, polygon with holes, multipolygon) and
// exact signed distance evaluation over them. All arithmetic is double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "geo2vec/error.hpp"

namespace geo2vec {

struct Coord {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

inline Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }
inline Coord operator-(Coord a, Coord b) { return {a.x - b.x, a.y - b.y}; }
inline Coord operator*(Coord a, double s) { return {a.x * s, a.y * s}; }
inline Coord operator*(double s, Coord a) { return {a.x * s, a.y * s}; }
inline Coord operator/(Coord a, double s) { return {a.x / s, a.y / s}; }
inline double dot(Coord a, Coord b) { return a.x * b.x + a.y * b.y; }
inline double cross(Coord a, Coord b) { return a.x * b.y - a.y * b.x; }
inline double norm(Coord a) { return std::hypot(a.x, a.y); }
inline double distance(Coord a, Coord b) { return norm(a - b); }
inline bool is_finite(Coord a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline Coord rotate(Coord p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

struct Segment {
  Coord a;
  Coord b;
  double length() const { return distance(a, b); }
};

struct BBox {
  Coord min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Coord max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  bool empty() const { return min.x > max.x || min.y > max.y; }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  Coord center() const { return {0.5 * (min.x + max.x), 0.5 * (min.y + max.y)}; }
  void expand(Coord p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  void expand(const BBox& o) {
    if (o.empty()) return;
    expand(o.min);
    expand(o.max);
  }
  bool contains(Coord p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  static BBox canonical() { return {{-1.0, -1.0}, {1.0, 1.0}}; }
};

// Closed implicitly: the first vertex is not repeated at the end.
struct Ring {
  std::vector<Coord> vertices;
};

struct Polygon {
  Ring exterior;
  std::vector<Ring> holes;
};

struct Polyline {
  std::vector<Coord> vertices;
};

using MultiPolygon = std::vector<Polygon>;

enum class EntityKind : std::uint8_t { Point = 0, Polyline = 1, Polygon = 2, MultiPolygon = 3 };

inline const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::Point: return "Point";
    case EntityKind::Polyline: return "Polyline";
    case EntityKind::Polygon: return "Polygon";
    case EntityKind::MultiPolygon: return "MultiPolygon";
  }
  return "?";
}

// Twice the signed area (positive for counter-clockwise).
inline double signed_area2(std::span<const Coord> ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) acc += cross(ring[i], ring[(i + 1) % n]);
  return acc;
}

inline double point_segment_distance(Coord p, Coord a, Coord b) {
  const Coord ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

// Sign of the turn a->b->c.
inline int orientation(Coord a, Coord b, Coord c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

inline bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  // Touching and collinear cases show up as a zero endpoint distance.
  return point_segment_distance(t.a, s.a, s.b) == 0.0 || point_segment_distance(t.b, s.a, s.b) == 0.0 ||
         point_segment_distance(s.a, t.a, t.b) == 0.0 || point_segment_distance(s.b, t.a, t.b) == 0.0;
}

inline double segment_distance(const Segment& s, const Segment& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({point_segment_distance(t.a, s.a, s.b), point_segment_distance(t.b, s.a, s.b),
                   point_segment_distance(s.a, t.a, t.b), point_segment_distance(s.b, t.a, t.b)});
}

// Winding number of ring around p.
inline int winding_number(Coord p, std::span<const Coord> ring) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Coord a = ring[i];
    const Coord b = ring[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0.0) ++wn;
    } else if (b.y <= p.y && cross(b - a, p - a) < 0.0) {
      --wn;
    }
  }
  return wn;
}

namespace detail {

inline std::vector<Coord> dedupe_consecutive(std::vector<Coord> pts, bool closed) {
  std::vector<Coord> out;
  out.reserve(pts.size());
  for (const Coord& p : pts) {
    if (!is_finite(p)) throw GeometryError("non-finite coordinate");
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  if (closed) {
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  }
  return out;
}

inline Ring make_ring(std::vector<Coord> pts, bool ccw) {
  Ring r{dedupe_consecutive(std::move(pts), true)};
  if (r.vertices.size() < 3) throw GeometryError("ring needs at least 3 distinct vertices");
  const double a2 = signed_area2(r.vertices);
  if (a2 == 0.0 || !std::isfinite(a2)) throw GeometryError("ring has zero area");
  if ((a2 > 0.0) != ccw) std::reverse(r.vertices.begin(), r.vertices.end());
  return r;
}

inline Polygon make_polygon(Ring exterior, std::vector<Ring> holes) {
  Polygon poly;
  poly.exterior = make_ring(std::move(exterior.vertices), true);
  for (Ring& h : holes) {
    Ring hole = make_ring(std::move(h.vertices), false);
    for (const Coord& v : hole.vertices) {
      if (winding_number(v, poly.exterior.vertices) == 0) {
        throw GeometryError("hole ring is not inside its exterior ring");
      }
      for (std::size_t i = 0; i < poly.exterior.vertices.size(); ++i) {
        const auto& ext = poly.exterior.vertices;
        if (point_segment_distance(v, ext[i], ext[(i + 1) % ext.size()]) == 0.0) {
          throw GeometryError("hole ring touches its exterior ring");
        }
      }
    }
    poly.holes.push_back(std::move(hole));
  }
  return poly;
}

}  // namespace detail

// A validated geometry with an opaque id. Construct through the factories,
// which clean repeated vertices and canonicalize ring orientation
// (exterior counter-clockwise, holes clockwise).
class GeoEntity {
 public:
  using Geometry = std::variant<Coord, Polyline, Polygon, MultiPolygon>;

  GeoEntity() : geometry_(Coord{}) {}

  static GeoEntity point(std::string id, Coord p) {
    if (!is_finite(p)) throw GeometryError("non-finite coordinate");
    return GeoEntity(std::move(id), p);
  }

  static GeoEntity polyline(std::string id, std::vector<Coord> pts) {
    Polyline line{detail::dedupe_consecutive(std::move(pts), false)};
    if (line.vertices.size() < 2) throw GeometryError("polyline needs at least 2 distinct vertices");
    return GeoEntity(std::move(id), std::move(line));
  }

  static GeoEntity polygon(std::string id, Ring exterior, std::vector<Ring> holes = {}) {
    return GeoEntity(std::move(id), detail::make_polygon(std::move(exterior), std::move(holes)));
  }

  static GeoEntity multipolygon(std::string id, std::vector<Polygon> parts) {
    if (parts.empty()) throw GeometryError("multipolygon needs at least one polygon");
    MultiPolygon mp;
    for (Polygon& p : parts) mp.push_back(detail::make_polygon(std::move(p.exterior), std::move(p.holes)));
    return GeoEntity(std::move(id), std::move(mp));
  }

  EntityKind kind() const { return static_cast<EntityKind>(geometry_.index()); }
  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }
  const Geometry& geometry() const { return geometry_; }

  const Coord& as_point() const { return std::get<Coord>(geometry_); }
  const Polyline& as_polyline() const { return std::get<Polyline>(geometry_); }
  const Polygon& as_polygon() const { return std::get<Polygon>(geometry_); }
  const MultiPolygon& as_multipolygon() const { return std::get<MultiPolygon>(geometry_); }

  bool has_interior() const { return kind() == EntityKind::Polygon || kind() == EntityKind::MultiPolygon; }

  // Calls f(const std::vector<Coord>& ring) for every ring of every polygon.
  template <class F>
  void for_each_ring(F&& f) const {
    auto visit = [&](const Polygon& p) {
      f(p.exterior.vertices);
      for (const Ring& h : p.holes) f(h.vertices);
    };
    if (kind() == EntityKind::Polygon) visit(as_polygon());
    if (kind() == EntityKind::MultiPolygon)
      for (const Polygon& p : as_multipolygon()) visit(p);
  }

  template <class F>
  void for_each_vertex(F&& f) const {
    switch (kind()) {
      case EntityKind::Point: f(as_point()); break;
      case EntityKind::Polyline:
        for (const Coord& c : as_polyline().vertices) f(c);
        break;
      default:
        for_each_ring([&](const std::vector<Coord>& ring) {
          for (const Coord& c : ring) f(c);
        });
    }
  }

  // Boundary edges. A point yields no edges.
  template <class F>
  void for_each_edge(F&& f) const {
    if (kind() == EntityKind::Polyline) {
      const auto& v = as_polyline().vertices;
      for (std::size_t i = 0; i + 1 < v.size(); ++i) f(Segment{v[i], v[i + 1]});
      return;
    }
    for_each_ring([&](const std::vector<Coord>& ring) {
      for (std::size_t i = 0; i < ring.size(); ++i) f(Segment{ring[i], ring[(i + 1) % ring.size()]});
    });
  }

  std::vector<Coord> vertices() const {
    std::vector<Coord> out;
    for_each_vertex([&](Coord c) { out.push_back(c); });
    return out;
  }

  std::vector<Segment> edges() const {
    std::vector<Segment> out;
    for_each_edge([&](const Segment& s) { out.push_back(s); });
    return out;
  }

  // Boundary pieces for distance queries; a point is a zero-length segment.
  std::vector<Segment> boundary() const {
    if (kind() == EntityKind::Point) return {Segment{as_point(), as_point()}};
    return edges();
  }

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for_each_vertex([&](Coord) { ++n; });
    return n;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for_each_edge([&](const Segment&) { ++n; });
    return n;
  }

  double boundary_length() const {
    double acc = 0.0;
    for_each_edge([&](const Segment& s) { acc += s.length(); });
    return acc;
  }

  // Applies map to every coordinate and revalidates. Orientation is
  // re-canonicalized, so reflections are allowed.
  template <class F>
  GeoEntity mapped(F&& map) const {
    auto ring_of = [&](const Ring& r) {
      Ring out;
      for (const Coord& c : r.vertices) out.vertices.push_back(map(c));
      return out;
    };
    auto poly_of = [&](const Polygon& p) {
      Polygon out{ring_of(p.exterior), {}};
      for (const Ring& h : p.holes) out.holes.push_back(ring_of(h));
      return out;
    };
    switch (kind()) {
      case EntityKind::Point: return point(id_, map(as_point()));
      case EntityKind::Polyline: {
        std::vector<Coord> pts;
        for (const Coord& c : as_polyline().vertices) pts.push_back(map(c));
        return polyline(id_, std::move(pts));
      }
      case EntityKind::Polygon: {
        Polygon p = poly_of(as_polygon());
        return polygon(id_, std::move(p.exterior), std::move(p.holes));
      }
      case EntityKind::MultiPolygon: {
        std::vector<Polygon> parts;
        for (const Polygon& p : as_multipolygon()) parts.push_back(poly_of(p));
        return multipolygon(id_, std::move(parts));
      }
    }
    return *this;
  }

 private:
  GeoEntity(std::string id, Geometry g) : id_(std::move(id)), geometry_(std::move(g)) {}

  std::string id_;
  Geometry geometry_;
};

// Nonzero winding over the canonically oriented rings: inside the exterior and
// outside every hole.
inline bool point_in_polygon(Coord p, const Polygon& poly) {
  int wn = winding_number(p, poly.exterior.vertices);
  for (const Ring& h : poly.holes) wn += winding_number(p, h.vertices);
  return wn != 0;
}

inline bool point_in_entity(Coord p, const GeoEntity& e) {
  switch (e.kind()) {
    case EntityKind::Polygon: return point_in_polygon(p, e.as_polygon());
    case EntityKind::MultiPolygon:
      for (const Polygon& poly : e.as_multipolygon())
        if (point_in_polygon(p, poly)) return true;
      return false;
    default: return false;
  }
}

inline double unsigned_distance(Coord p, const GeoEntity& e) {
  if (e.kind() == EntityKind::Point) return distance(p, e.as_point());
  double best = std::numeric_limits<double>::infinity();
  e.for_each_edge([&](const Segment& s) { best = std::min(best, point_segment_distance(p, s.a, s.b)); });
  return best;
}

// Signed distance to the boundary; negative inside the filled region.
inline double sdf(Coord p, const GeoEntity& e) {
  const double d = unsigned_distance(p, e);
  return point_in_entity(p, e) ? -d : d;
}

// Independent reference: nearest of ~n points placed uniformly by arc length
// along the boundary, signed by even-odd ray casting. Error is at most
// perimeter / (2n).
inline double brute_force_sdf(Coord p, const GeoEntity& e, std::size_t n) {
  if (e.kind() == EntityKind::Point) return distance(p, e.as_point());
  const double perimeter = e.boundary_length();
  double best2 = std::numeric_limits<double>::infinity();
  e.for_each_edge([&](const Segment& s) {
    const std::size_t steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * s.length() / perimeter)));
    const double inv = 1.0 / static_cast<double>(steps);
    const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
    const double ox = s.a.x - p.x, oy = s.a.y - p.y;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) * inv;
      const double qx = ox + dx * t, qy = oy + dy * t;
      best2 = std::min(best2, qx * qx + qy * qy);
    }
  });
  const double best = std::sqrt(best2);
  auto even_odd = [&](const Polygon& poly) {
    bool inside = false;
    auto cast = [&](const std::vector<Coord>& ring) {
      for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const Coord& a = ring[i];
        const Coord& b = ring[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
      }
    };
    cast(poly.exterior.vertices);
    for (const Ring& h : poly.holes) cast(h.vertices);
    return inside;
  };
  bool inside = false;
  if (e.kind() == EntityKind::Polygon) inside = even_odd(e.as_polygon());
  if (e.kind() == EntityKind::MultiPolygon)
    for (const Polygon& poly : e.as_multipolygon()) inside = inside || even_odd(poly);
  return inside ? -best : best;
}

inline BBox bbox(const GeoEntity& e) {
  BBox b;
  e.for_each_vertex([&](Coord c) { b.expand(c); });
  return b;
}

inline BBox bbox(std::span<const GeoEntity> entities) {
  BBox b;
  for (const GeoEntity& e : entities) b.expand(bbox(e));
  return b;
}

// q = (p - center) * scale
struct SimilarityTransform {
  Coord center{};
  double scale = 1.0;

  Coord apply(Coord p) const { return (p - center) * scale; }
  Coord invert(Coord q) const { return q / scale + center; }
  GeoEntity apply(const GeoEntity& e) const {
    return e.mapped([this](Coord p) { return apply(p); });
  }
  GeoEntity invert(const GeoEntity& e) const {
    return e.mapped([this](Coord q) { return invert(q); });
  }

  // Centers box at the origin and maps its larger side onto [-1, 1].
  static SimilarityTransform to_canonical(const BBox& box) {
    const double side = std::max(box.width(), box.height());
    if (box.empty() || !(side > 0.0)) throw GeometryError("zero-extent geometry has no canonical space");
    return {box.center(), 2.0 / side};
  }
};

struct NormalizedEntity {
  GeoEntity entity;
  SimilarityTransform transform;
};

struct NormalizedDataset {
  std::vector<GeoEntity> entities;
  SimilarityTransform transform;
};

inline NormalizedEntity normalize_shape(const GeoEntity& e) {
  if (e.kind() == EntityKind::Point) throw GeometryError("shape undefined for points");
  const BBox box = bbox(e);
  if (!(std::max(box.width(), box.height()) > 0.0)) throw GeometryError("shape undefined for zero-extent entity");
  const SimilarityTransform t = SimilarityTransform::to_canonical(box);
  return {t.apply(e), t};
}

inline NormalizedDataset normalize_dataset(std::span<const GeoEntity> entities) {
  if (entities.empty()) throw GeometryError("cannot normalize an empty dataset");
  const SimilarityTransform t = SimilarityTransform::to_canonical(bbox(entities));
  NormalizedDataset out{{}, t};
  out.entities.reserve(entities.size());
  for (const GeoEntity& e : entities) out.entities.push_back(t.apply(e));
  return out;
}

// Smallest boundary-to-boundary distance (0 when boundaries meet).
inline double min_entity_distance(const GeoEntity& a, const GeoEntity& b) {
  const std::vector<Segment> sa = a.boundary();
  const std::vector<Segment> sb = b.boundary();
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : sa) {
    for (const Segment& t : sb) {
      best = std::min(best, segment_distance(s, t));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

}  // namespace geo2vec
