#include <gtest/gtest.h>

#include "geo2vec/ingest.hpp"
#include "test_util.hpp"

using namespace geo2vec;

namespace {

void expect_same_geometry(const GeoEntity& a, const GeoEntity& b) {
  ASSERT_EQ(a.kind(), b.kind());
  EXPECT_EQ(a.id(), b.id());
  EXPECT_EQ(a.vertices(), b.vertices());
}

}  // namespace

TEST(Wkt, ParsesEveryKind) {
  EXPECT_EQ(parse_wkt("POINT (1 2)").as_point(), (Coord{1, 2}));
  EXPECT_EQ(parse_wkt("LINESTRING(0 0, 1 1, 2 0)").edge_count(), 2u);
  const GeoEntity poly = parse_wkt("POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1))");
  EXPECT_EQ(poly.as_polygon().holes.size(), 1u);
  const GeoEntity mp = parse_wkt("MULTIPOLYGON (((0 0, 1 0, 1 1, 0 0)), ((5 5, 6 5, 6 6, 5 5)))");
  EXPECT_EQ(mp.as_multipolygon().size(), 2u);
  EXPECT_EQ(parse_wkt("point(1e2 -3.5)").as_point(), (Coord{100, -3.5}));
}

TEST(Wkt, ErrorsCarryOffsets) {
  try {
    parse_wkt("POINT (1 2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 10u);
  }
  EXPECT_THROW(parse_wkt("TRIANGLE ((0 0, 1 0, 0 1, 0 0))"), ParseError);
  EXPECT_THROW(parse_wkt("POINT EMPTY"), ParseError);
  EXPECT_THROW(parse_wkt("POINT Z (1 2 3)"), ParseError);
  EXPECT_THROW(parse_wkt("POINT (1 2) x"), ParseError);
  EXPECT_THROW(parse_wkt("POLYGON ((0 0, 1 1, 2 2, 0 0))"), GeometryError);
}

TEST(Wkt, RoundTripsRandomEntities) {
  Rng rng = make_rng(5, "wkt-roundtrip");
  for (int i = 0; i < 200; ++i) {
    const GeoEntity e = test_support::random_entity(rng, "e" + std::to_string(i));
    expect_same_geometry(parse_wkt(to_wkt(e), e.id()), e);
  }
}

TEST(Wkt, FuzzedInputNeverCrashes) {
  Rng rng = make_rng(9, "wkt-fuzz");
  const std::string seed_text = "MULTIPOLYGON (((0 0, 4 0, 4 4, 0 4, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1)))";
  const std::string alphabet = "()0123456789.,- eEPOINTLSRGYMU";
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    std::string text = seed_text;
    std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
    const int edits = 1 + i % 4;
    for (int k = 0; k < edits; ++k) text[pos(rng)] = alphabet[ch(rng)];
    try {
      (void)parse_wkt(text);
    } catch (const Error&) {
    }
  }
}

TEST(GeoJson, RoundTripKeepsIdsLabelsAndGeometry) {
  Rng rng = make_rng(13, "geojson-roundtrip");
  Dataset ds("mixed");
  for (int i = 0; i < 50; ++i) ds.add(test_support::random_entity(rng, "e" + std::to_string(i)), i % 3);
  const Dataset back = parse_geojson(serialize_geojson(ds));
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    expect_same_geometry(back[i], ds[i]);
    EXPECT_EQ(back.label(ds[i].id()), ds.label(ds[i].id()));
  }
}

TEST(GeoJson, IntegerIdsAndMissingIds) {
  const std::string text = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","id":7,"properties":{},"geometry":{"type":"Point","coordinates":[1,2]}},
    {"type":"Feature","properties":{"label":2},"geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]}}]})";
  const Dataset ds = parse_geojson(text);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].id(), "7");
  EXPECT_FALSE(ds[1].id().empty());
  EXPECT_EQ(ds.label(ds[1].id()), 2);
}

TEST(GeoJson, RejectsMalformedInput) {
  EXPECT_THROW(parse_geojson("{\"type\": "), ParseError);
  EXPECT_THROW(parse_geojson(R"({"type":"Feature"})"), DataError);
  EXPECT_THROW(parse_geojson(R"({"type":"FeatureCollection","features":[
    {"type":"Feature","id":"a","geometry":{"type":"Point","coordinates":[0,0]}},
    {"type":"Feature","id":"a","geometry":{"type":"Point","coordinates":[1,0]}}]})"),
               DataError);
  EXPECT_THROW(parse_geojson(R"({"type":"FeatureCollection","features":[
    {"type":"Feature","id":"a","geometry":{"type":"Circle","coordinates":[0,0]}}]})"),
               DataError);
  EXPECT_THROW(parse_geojson(R"({"type":"FeatureCollection","features":[
    {"type":"Feature","id":"a","geometry":{"type":"Point","coordinates":["x",0]}}]})"),
               DataError);
}

TEST(GeoJson, FuzzedInputNeverCrashes) {
  Dataset ds;
  ds.add(GeoEntity::polygon("p", Ring{{{0, 0}, {1, 0}, {1, 1}}}), 1);
  ds.add(GeoEntity::polyline("l", {{0, 0}, {2, 2}}));
  const std::string base = serialize_geojson(ds);
  Rng rng = make_rng(17, "geojson-fuzz");
  const std::string alphabet = "{}[]\":,0123456789.-abcdefghijklmnopqrstuvwxyzPLF ";
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1), pos(0, base.size() - 1);
  for (int i = 0; i < 2000; ++i) {
    std::string text = base;
    for (int k = 0; k <= i % 3; ++k) text[pos(rng)] = alphabet[ch(rng)];
    try {
      (void)parse_geojson(text);
    } catch (const Error&) {
    }
  }
}

TEST(Synthesis, ShapesAreDeterministicAndLabelled) {
  SynthesisSpec spec;
  spec.count_per_class = 6;
  spec.seed = 42;
  const Dataset a = synthesize_shapes(spec), b = synthesize_shapes(spec);
  ASSERT_EQ(a.size(), 30u);
  EXPECT_EQ(serialize_geojson(a), serialize_geojson(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int label = *a.label(a[i].id());
    EXPECT_EQ(a[i].edge_count(), static_cast<std::size_t>(kShapeFamilyEdges[static_cast<std::size_t>(label)]));
    EXPECT_TRUE(detail::ring_is_simple(a[i].as_polygon().exterior.vertices));
  }
  spec.seed = 43;
  EXPECT_NE(serialize_geojson(synthesize_shapes(spec)), serialize_geojson(a));
}

TEST(Synthesis, ScatteredHasEveryKindAndOverlaps) {
  SynthesisSpec spec;
  spec.count_per_class = 30;
  spec.overlap_fraction = 1.0;
  spec.seed = 1;
  const Dataset ds = synthesize_scattered(spec);
  ASSERT_EQ(ds.size(), 90u);
  int points = 0, lines = 0, polys = 0;
  for (const GeoEntity& e : ds.entities()) {
    points += e.kind() == EntityKind::Point;
    lines += e.kind() == EntityKind::Polyline;
    polys += e.kind() == EntityKind::Polygon;
  }
  EXPECT_EQ(points, 30);
  EXPECT_EQ(lines, 30);
  EXPECT_EQ(polys, 30);
  spec.overlap_fraction = 0.0;
  const Dataset apart = synthesize_scattered(spec);
  for (std::size_t i = 0; i < apart.size(); ++i)
    for (std::size_t j = i + 1; j < apart.size(); ++j) ASSERT_GT(min_entity_distance(apart[i], apart[j]), 0.0);
}

TEST(Synthesis, SpecValidation) {
  SynthesisSpec spec;
  spec.count_per_class = 0;
  EXPECT_THROW(synthesize_shapes(spec), DataError);
  spec = {};
  spec.classes = {"hexagon"};
  EXPECT_THROW(synthesize_shapes(spec), DataError);
  spec = {};
  spec.overlap_fraction = 1.5;
  EXPECT_THROW(synthesize_scattered(spec), DataError);
}

TEST(DatasetTest, DuplicateIdsAndLookup) {
  Dataset ds;
  ds.add(GeoEntity::point("a", {0, 0}));
  EXPECT_THROW(ds.add(GeoEntity::point("a", {1, 1})), DataError);
  EXPECT_EQ(ds.index_of("a"), 0u);
  EXPECT_THROW((void)ds.index_of("b"), DataError);
  EXPECT_FALSE(ds.label("a").has_value());
}
