#pragma once

// Three-stage adaptive sampling (vertex, perpendicular edge, uniform space)
// and the data-driven estimation of the sampling deviation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "geo2vec/error.hpp"
#include "geo2vec/geometry.hpp"
#include "geo2vec/random.hpp"

namespace geo2vec {

enum class Mode : std::uint8_t { Shape = 0, Location = 1 };

inline const char* to_string(Mode m) { return m == Mode::Shape ? "shape" : "location"; }

struct SdfSample {
  Coord position;
  double signed_distance = 0.0;
};

struct SamplingParams {
  double sigma = 0.05;      // deviation of vertex and edge offsets, canonical units
  double epsilon = 100.0;   // samples per unit
  int n_axis = 8;           // uniform grid resolution per axis
  int k = 5;                // neighbours pooled when estimating sigma
  int subset = 1000;        // entities drawn when estimating sigma
  bool quadratic_counts = false;  // pi*sigma^2*eps^2 and 2*sigma*l*eps^2 instead of the linear forms
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DataError("sigma must be > 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DataError("epsilon must be > 0");
    if (n_axis < 2) throw DataError("n_axis must be >= 2");
    if (k < 1) throw DataError("k must be >= 1");
    if (subset < 1) throw DataError("subset must be >= 1");
  }

  std::size_t vertex_count() const {
    const double raw = quadratic_counts ? std::numbers::pi * sigma * sigma * epsilon * epsilon : epsilon * sigma;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(raw)));
  }

  std::size_t edge_count(double edge_length) const {
    const double raw = quadratic_counts ? 2.0 * sigma * edge_length * epsilon * epsilon : epsilon * edge_length;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(raw)));
  }
};

struct TrainingSet {
  std::vector<SdfSample> vertex;
  std::vector<SdfSample> edge;
  std::vector<SdfSample> space;

  std::size_t size() const { return vertex.size() + edge.size() + space.size(); }

  std::vector<SdfSample> all() const {
    std::vector<SdfSample> out;
    out.reserve(size());
    out.insert(out.end(), vertex.begin(), vertex.end());
    out.insert(out.end(), edge.begin(), edge.end());
    out.insert(out.end(), space.begin(), space.end());
    return out;
  }
};

namespace detail {

inline double pooled_deviation(const std::vector<double>& d) {
  if (d.empty()) throw DataError("no distances to estimate sigma from");
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (double v : d) var += (v - mean) * (v - mean);
  var /= static_cast<double>(d.size());
  const double sd = std::sqrt(var);
  // Degenerate distributions (e.g. a regular grid) fall back to the mean.
  if (sd > 1e-12 * std::max(1.0, mean)) return sd;
  if (mean > 0.0) return mean;
  throw DataError("all neighbour distances are zero; sigma is undefined");
}

}  // namespace detail

// Standard deviation of the boundary distances from a random subset of
// entities to their k nearest neighbours.
inline double estimate_sigma_loc(std::span<const GeoEntity> entities, int k, int subset, std::uint64_t seed) {
  if (entities.size() < 2) throw DataError("sigma_loc needs at least 2 entities");
  Rng rng = make_rng(seed, "sigma_loc");
  const auto chosen = sample_without_replacement(entities.size(), static_cast<std::size_t>(subset), rng);
  std::vector<double> pooled;
  for (std::size_t i : chosen) {
    std::vector<double> d;
    d.reserve(entities.size() - 1);
    for (std::size_t j = 0; j < entities.size(); ++j)
      if (j != i) d.push_back(min_entity_distance(entities[i], entities[j]));
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take), d.end());
    pooled.insert(pooled.end(), d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return detail::pooled_deviation(pooled);
}

// Edges of e with the ids of the vertices they join; two edges are adjacent
// when they share a vertex id.
struct IndexedEdge {
  Segment segment;
  std::size_t from;
  std::size_t to;
};

inline std::vector<IndexedEdge> indexed_edges(const GeoEntity& e) {
  std::vector<IndexedEdge> out;
  std::size_t base = 0;
  if (e.kind() == EntityKind::Polyline) {
    const auto& v = e.as_polyline().vertices;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) out.push_back({{v[i], v[i + 1]}, i, i + 1});
    return out;
  }
  e.for_each_ring([&](const std::vector<Coord>& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back({{ring[i], ring[(i + 1) % n]}, base + i, base + (i + 1) % n});
    base += n;
  });
  return out;
}

inline bool edges_adjacent(const IndexedEdge& a, const IndexedEdge& b) {
  return a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to;
}

// Per edge of each selected entity (in its own canonical space), the
// distances to its k nearest non-adjacent edges; the deviation of the pool.
inline double estimate_sigma_shp(std::span<const GeoEntity> entities, int k, int subset, std::uint64_t seed) {
  std::vector<std::size_t> shaped;
  for (std::size_t i = 0; i < entities.size(); ++i)
    if (entities[i].kind() != EntityKind::Point) shaped.push_back(i);
  if (shaped.empty()) throw DataError("sigma_shp needs at least one polyline or polygon");
  Rng rng = make_rng(seed, "sigma_shp");
  const auto chosen = sample_without_replacement(shaped.size(), static_cast<std::size_t>(subset), rng);
  std::vector<double> pooled;
  for (std::size_t c : chosen) {
    const GeoEntity canonical = normalize_shape(entities[shaped[c]]).entity;
    const std::vector<IndexedEdge> edges = indexed_edges(canonical);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      std::vector<double> d;
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (j == i || edges_adjacent(edges[i], edges[j])) continue;
        d.push_back(segment_distance(edges[i].segment, edges[j].segment));
      }
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take), d.end());
      pooled.insert(pooled.end(), d.begin(), d.begin() + static_cast<std::ptrdiff_t>(take));
    }
  }
  return detail::pooled_deviation(pooled);
}

inline std::vector<SdfSample> sample_vertex(Coord v, const GeoEntity& e, double sigma, std::size_t count, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SdfSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = gauss(rng), dy = gauss(rng);
    const Coord p{v.x + sigma * dx, v.y + sigma * dy};
    out.push_back({p, sdf(p, e)});
  }
  return out;
}

// x' = (1-f) a + f b + s * d * n, with n the unit left normal of b - a,
// f ~ U(0,1), d ~ N(0, sigma^2) and s uniform on {-1, +1}.
inline std::vector<SdfSample> sample_edge(Coord a, Coord b, const GeoEntity& e, double sigma, std::size_t count,
                                          Rng& rng) {
  const double len = distance(a, b);
  if (!(len > 0.0)) throw GeometryError("cannot sample a degenerate edge");
  const Coord normal{-(b.y - a.y) / len, (b.x - a.x) / len};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution side(0.5);
  std::vector<SdfSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double f = unit(rng);
    const double d = sigma * gauss(rng);
    const double s = side(rng) ? 1.0 : -1.0;
    const Coord p = a * (1.0 - f) + b * f + normal * (s * d);
    out.push_back({p, sdf(p, e)});
  }
  return out;
}

// n_axis x n_axis grid with inclusive endpoints, row-major from domain.min.
inline std::vector<Coord> grid_points(const BBox& domain, int n_axis) {
  if (n_axis < 2) throw DataError("grid resolution must be >= 2");
  std::vector<Coord> out;
  out.reserve(static_cast<std::size_t>(n_axis) * static_cast<std::size_t>(n_axis));
  const double sx = domain.width() / (n_axis - 1), sy = domain.height() / (n_axis - 1);
  for (int r = 0; r < n_axis; ++r)
    for (int c = 0; c < n_axis; ++c) out.push_back({domain.min.x + sx * c, domain.min.y + sy * r});
  return out;
}

inline std::vector<SdfSample> sample_space(const BBox& domain, const GeoEntity& e, int n_axis) {
  std::vector<SdfSample> out;
  for (const Coord& p : grid_points(domain, n_axis)) out.push_back({p, sdf(p, e)});
  return out;
}

// Entity e must already live in the canonical space of its mode; domain is
// [-1,1]^2 for shapes and the dataset's canonical box for locations.
inline TrainingSet build_training_set(const GeoEntity& e, const SamplingParams& p, const BBox& domain, Rng& rng) {
  p.validate();
  TrainingSet ts;
  const std::size_t per_vertex = p.vertex_count();
  e.for_each_vertex([&](Coord v) {
    auto s = sample_vertex(v, e, p.sigma, per_vertex, rng);
    ts.vertex.insert(ts.vertex.end(), s.begin(), s.end());
  });
  e.for_each_edge([&](const Segment& s) {
    auto samples = sample_edge(s.a, s.b, e, p.sigma, p.edge_count(s.length()), rng);
    ts.edge.insert(ts.edge.end(), samples.begin(), samples.end());
  });
  ts.space = sample_space(domain, e, p.n_axis);
  return ts;
}

// Stream seeded from (p.seed, entity id) so results do not depend on the
// order or thread entities are processed in.
inline TrainingSet build_training_set(const GeoEntity& e, const SamplingParams& p, const BBox& domain) {
  Rng rng = make_rng(p.seed, e.id());
  return build_training_set(e, p, domain, rng);
}

inline std::size_t expected_sample_count(const GeoEntity& e, const SamplingParams& p) {
  std::size_t n = e.vertex_count() * p.vertex_count();
  e.for_each_edge([&](const Segment& s) { n += p.edge_count(s.length()); });
  return n + static_cast<std::size_t>(p.n_axis) * static_cast<std::size_t>(p.n_axis);
}

}  // namespace geo2vec
