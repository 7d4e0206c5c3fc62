#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geo2vec/encoding.hpp"

using namespace geo2vec;

TEST(Encoding, ExponentsSpanBounds) {
  EncodingConfig c;
  c.l_min = -1;
  c.l_max = 3;
  c.count = 5;
  EXPECT_EQ(c.exponents(), (std::vector<double>{-1, 0, 1, 2, 3}));
  c.count = 1;
  EXPECT_EQ(c.exponents(), (std::vector<double>{-1}));
}

TEST(Encoding, PeValuesAndLayout) {
  EncodingConfig c;
  c.l_min = 0;
  c.l_max = 1;
  c.count = 2;
  const double x[2] = {0.25, -0.5};
  const auto v = pe(std::span<const double>(x, 2), c);
  ASSERT_EQ(v.size(), 8u);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(v[0], std::sin(pi * 0.25), 1e-15);
  EXPECT_NEAR(v[1], std::cos(pi * 0.25), 1e-15);
  EXPECT_NEAR(v[2], std::sin(2 * pi * 0.25), 1e-15);
  EXPECT_NEAR(v[3], std::cos(2 * pi * 0.25), 1e-15);
  EXPECT_NEAR(v[4], std::sin(-pi * 0.5), 1e-15);
  for (std::size_t i = 0; i < v.size(); i += 2) EXPECT_NEAR(v[i] * v[i] + v[i + 1] * v[i + 1], 1.0, 1e-14);
}

TEST(Encoding, RadialBlockIsRotationInvariant) {
  EncodingConfig c;
  c.count = 8;
  const std::size_t block = 2 * static_cast<std::size_t>(c.count);
  for (double angle : {0.3, 1.0, 2.5, -4.0}) {
    const Coord p{0.37, -0.81};
    const auto a = pe_r(p, c), b = pe_r(rotate(p, angle), c);
    ASSERT_EQ(a.size(), 3 * block);
    for (std::size_t i = 2 * block; i < 3 * block; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Encoding, EncoderWidthFollowsMode) {
  EncodingConfig c;
  c.count = 4;
  c.rotation_invariant = false;
  EXPECT_EQ(PositionalEncoder(c).encode({0.1, 0.2}).size(), 16u);
  c.rotation_invariant = true;
  EXPECT_EQ(PositionalEncoder(c).encode({0.1, 0.2}).size(), 24u);
  c.count = 0;
  EXPECT_THROW(PositionalEncoder{c}, DataError);
}

TEST(Encoding, FrequencyBoundsOnCanonicalBox) {
  const FrequencyBounds loc = frequency_bounds(BBox::canonical(), Mode::Location);
  EXPECT_EQ(loc.l_min, 0.0);
  EXPECT_EQ(loc.l_max, 0.0);
  const FrequencyBounds shp = frequency_bounds(BBox::canonical(), Mode::Shape);
  EXPECT_EQ(shp.l_min, 0.0);
  EXPECT_EQ(shp.l_max, kShapeHeadroomOctaves);
  const FrequencyBounds half = frequency_bounds(BBox{{-0.5, -0.5}, {0.5, 0.5}}, Mode::Location);
  EXPECT_EQ(half.l_min, 1.0);
  EXPECT_EQ(half.l_max, 1.0);
}

TEST(Encoding, FrequencyBoundsUseBothSides) {
  const FrequencyBounds b = frequency_bounds(BBox{{0, 0}, {2, 0.5}}, Mode::Location);
  EXPECT_EQ(b.l_min, 0.0);
  EXPECT_EQ(b.l_max, 2.0);
  EXPECT_THROW(frequency_bounds(BBox{{0, 0}, {2, 0}}, Mode::Location), DataError);
}
