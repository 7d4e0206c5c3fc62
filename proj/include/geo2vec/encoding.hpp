#pragma once

// Sinusoidal positional encoding with dataset-derived frequency bounds, and
// the radial (rotation-invariant) extension.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "geo2vec/error.hpp"
#include "geo2vec/geometry.hpp"
#include "geo2vec/sampling.hpp"

namespace geo2vec {

struct EncodingConfig {
  double l_min = 0.0;  // log2 of the lowest frequency multiplier
  double l_max = 6.0;  // log2 of the highest
  int count = 8;       // frequencies per input component
  bool rotation_invariant = true;
  Mode mode = Mode::Shape;

  void validate() const {
    if (!(l_max >= l_min) || !std::isfinite(l_min) || !std::isfinite(l_max))
      throw DataError("encoding needs finite l_min <= l_max");
    if (count < 1) throw DataError("encoding needs at least one frequency");
  }

  int input_dim() const { return rotation_invariant ? 3 : 2; }
  int width() const { return 2 * count * input_dim(); }

  // Exponents uniformly spaced in [l_min, l_max]; a single frequency uses l_min.
  std::vector<double> exponents() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = count > 1 ? (l_max - l_min) / (count - 1) : 0.0;
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::min(l_max, l_min + step * i);
    return out;
  }
};

struct FrequencyBounds {
  double l_min;
  double l_max;
};

inline constexpr double kShapeHeadroomOctaves = 6.0;

// Bounds from the extents of a dataset already in its mode's canonical space:
// l_min = 1 - log2(D_max), and l_max = log2(2 / D_min) (plus headroom for shapes).
inline FrequencyBounds frequency_bounds(const BBox& extent, Mode mode, double headroom = kShapeHeadroomOctaves) {
  const double dx = extent.width(), dy = extent.height();
  const double d_min = std::min(dx, dy), d_max = std::max(dx, dy);
  if (extent.empty() || !(d_min > 0.0)) throw DataError("frequency bounds need a dataset with nonzero extent");
  FrequencyBounds b{1.0 - std::log2(d_max), std::log2(2.0 / d_min)};
  if (mode == Mode::Shape) b.l_max += headroom;
  return b;
}

inline FrequencyBounds frequency_bounds(std::span<const GeoEntity> entities, Mode mode,
                                        double headroom = kShapeHeadroomOctaves) {
  return frequency_bounds(bbox(entities), mode, headroom);
}

// Precomputed 2^l * pi multipliers for a config.
class PositionalEncoder {
 public:
  explicit PositionalEncoder(const EncodingConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    for (double l : cfg.exponents()) multipliers_.push_back(std::exp2(l) * std::numbers::pi);
  }

  const EncodingConfig& config() const { return cfg_; }
  int width() const { return cfg_.width(); }

  // Component-major, frequency-minor: for each component c, for each
  // frequency w: sin(w c), cos(w c). out.size() must be 2 * count * x.size().
  template <class T>
  void pe(std::span<const double> x, std::span<T> out) const {
    std::size_t k = 0;
    for (double c : x) {
      for (double w : multipliers_) {
        out[k++] = static_cast<T>(std::sin(w * c));
        out[k++] = static_cast<T>(std::cos(w * c));
      }
    }
  }

  // pe of (x, y, r) with r the distance from the origin.
  template <class T>
  void pe_r(Coord p, std::span<T> out) const {
    const double v[3] = {p.x, p.y, std::sqrt(p.x * p.x + p.y * p.y)};
    pe(std::span<const double>(v, 3), out);
  }

  template <class T>
  void encode(Coord p, std::span<T> out) const {
    if (cfg_.rotation_invariant) {
      pe_r(p, out);
    } else {
      const double v[2] = {p.x, p.y};
      pe(std::span<const double>(v, 2), out);
    }
  }

  std::vector<double> encode(Coord p) const {
    std::vector<double> out(static_cast<std::size_t>(width()));
    encode(p, std::span<double>(out));
    return out;
  }

 private:
  EncodingConfig cfg_;
  std::vector<double> multipliers_;
};

inline std::vector<double> pe(std::span<const double> x, const EncodingConfig& cfg) {
  PositionalEncoder enc(cfg);
  std::vector<double> out(2 * static_cast<std::size_t>(cfg.count) * x.size());
  enc.pe(x, std::span<double>(out));
  return out;
}

inline std::vector<double> pe_r(Coord p, const EncodingConfig& cfg) {
  PositionalEncoder enc(cfg);
  std::vector<double> out(6 * static_cast<std::size_t>(cfg.count));
  enc.pe_r(p, std::span<double>(out));
  return out;
}

}  // namespace geo2vec
