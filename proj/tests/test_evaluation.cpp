#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "geo2vec/evaluation.hpp"
#include "test_util.hpp"

using namespace geo2vec;

namespace {

ProbeConfig quick_probe() {
  ProbeConfig p;
  p.epochs = 60;
  p.hidden = 32;
  p.seed = 1;
  return p;
}

// Independent predicate: sampled boundary points of a lying within tol of b's
// boundary, or a's vertex inside b's filled region (by the brute-force sign).
bool brute_force_intersects(const GeoEntity& a, const GeoEntity& b) {
  const double tol = 1e-9;
  if (a.kind() == EntityKind::Point) return brute_force_sdf(a.as_point(), b, 200000) <= tol;
  if (b.has_interior() && brute_force_sdf(a.vertices().front(), b, 200000) < 0) return true;
  for (const Segment& s : a.edges())
    for (const Segment& t : b.edges())
      if (segments_intersect(s, t)) return true;
  return false;
}

}  // namespace

TEST(Topology, BinaryLabelsMatchBruteForce) {
  SynthesisSpec spec;
  spec.count_per_class = 25;
  spec.overlap_fraction = 0.5;
  spec.seed = 8;
  const Dataset ds = synthesize_scattered(spec);
  int checked = 0, positives = 0;
  for (const GeoEntity& a : ds.entities()) {
    if (a.kind() == EntityKind::Polygon) continue;
    for (const GeoEntity& b : ds.entities()) {
      if (&a == &b) continue;
      PairType type;
      if (a.kind() == EntityKind::Point && b.kind() == EntityKind::Polygon) type = PairType::PtPg;
      else if (a.kind() == EntityKind::Point && b.kind() == EntityKind::Polyline) type = PairType::PtPl;
      else if (a.kind() == EntityKind::Polyline && b.kind() == EntityKind::Polyline) type = PairType::PlPl;
      else continue;
      const int label = topology_ground_truth(a, b, type);
      ASSERT_EQ(label == 1, brute_force_intersects(a, b)) << a.id() << " vs " << b.id();
      ++checked;
      positives += label;
    }
  }
  EXPECT_GT(checked, 1000);
  EXPECT_GT(positives, 10);
}

TEST(Topology, MultiClassRelations) {
  const GeoEntity big = GeoEntity::polygon("big", Ring{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}});
  const GeoEntity small = GeoEntity::polygon("small", Ring{{{2, 2}, {3, 2}, {3, 3}, {2, 3}}});
  const GeoEntity far = GeoEntity::polygon("far", Ring{{{20, 0}, {21, 0}, {21, 1}}});
  const GeoEntity cross = GeoEntity::polyline("cross", {{-1, 5}, {11, 5}});
  EXPECT_EQ(topology_relation(small, big), Topology::Within);
  EXPECT_EQ(topology_relation(big, small), Topology::Contains);
  EXPECT_EQ(topology_relation(big, far), Topology::Disjoint);
  EXPECT_EQ(topology_relation(cross, big), Topology::TouchesOrCrosses);
  EXPECT_EQ(topology_ground_truth(small, big, PairType::PgPg), 2);
  EXPECT_EQ(topology_vocabulary(PairType::PtPg).size(), 2u);
}

TEST(Pairs, TopologyPairsAreBalanced) {
  SynthesisSpec spec;
  spec.count_per_class = 40;
  spec.overlap_fraction = 0.8;
  spec.seed = 2;
  const Dataset ds = synthesize_scattered(spec);
  const PairTask t = make_topology_pairs(ds, PairType::PtPg, 200, 3);
  std::map<int, int> counts;
  for (int l : t.label) ++counts[l];
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts[0], counts[1]);
  for (std::size_t i = 0; i < t.pairs.size(); ++i)
    EXPECT_EQ(t.label[i], topology_ground_truth(ds.at(t.pairs[i].first), ds.at(t.pairs[i].second), PairType::PtPg));
  spec.overlap_fraction = 0.0;
  EXPECT_THROW(make_topology_pairs(synthesize_scattered(spec), PairType::PtPg, 200, 3), DataError);
}

TEST(Pairs, DistancePairsUseCanonicalUnits) {
  SynthesisSpec spec;
  spec.count_per_class = 20;
  spec.seed = 5;
  const Dataset ds = synthesize_scattered(spec);
  const PairTask t = make_distance_pairs(ds, 90, 1);
  EXPECT_EQ(t.pairs.size(), 90u);
  const NormalizedDataset canon = normalize_dataset(ds.entities());
  for (std::size_t i = 0; i < t.pairs.size(); ++i) {
    const double raw = min_entity_distance(ds.at(t.pairs[i].first), ds.at(t.pairs[i].second));
    EXPECT_NEAR(t.distance[i], raw * canon.transform.scale, 1e-9);
    EXPECT_LE(t.distance[i], 2.0 * std::sqrt(2.0) + 1e-9);
  }
}

TEST(Probe, ClassifierSeparatesClusters) {
  Rng rng = make_rng(4, "clusters");
  std::normal_distribution<double> g(0, 0.3);
  FeatureMatrix x(300, 4);
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    const int c = i % 3;
    for (int j = 0; j < 4; ++j) x(i, j) = g(rng) + (j == c ? 2.0 : 0.0);
    y.push_back(c);
  }
  const ProbeReport r = train_probe_classifier(x, y, quick_probe());
  EXPECT_GT(r.value, 0.95);
  EXPECT_NEAR(r.baseline, 1.0 / 3.0, 0.05);
  EXPECT_EQ(r.train_size + r.test_size, 300u);
}

TEST(Probe, RegressorFitsSmoothTarget) {
  Rng rng = make_rng(6, "regression");
  std::uniform_real_distribution<double> u(-1, 1);
  FeatureMatrix x(400, 2);
  std::vector<double> y;
  for (int i = 0; i < 400; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y.push_back(x(i, 0) + 0.5 * x(i, 1) * x(i, 1));
  }
  const ProbeReport r = train_probe_regressor(x, y, quick_probe());
  EXPECT_LT(r.value, 0.2 * r.baseline);
  EXPECT_GT(*r.r2, 0.9);
}

TEST(Probe, PermutedLabelsStayNearChance) {
  Rng rng = make_rng(7, "noise");
  std::normal_distribution<double> g(0, 1);
  FeatureMatrix x(400, 6);
  std::vector<int> y;
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 400; ++i) {
    for (int j = 0; j < 6; ++j) x(i, j) = g(rng);
    y.push_back(coin(rng));
  }
  const ProbeReport r = train_probe_classifier(x, y, quick_probe());
  EXPECT_LT(r.value, 0.65);
}

TEST(Probe, InputValidation) {
  FeatureMatrix x(4, 2);
  x.setZero();
  EXPECT_THROW(train_probe_classifier(x, {0, 1, 0}, quick_probe()), DataError);
  x(0, 0) = std::nan("");
  EXPECT_THROW(train_probe_classifier(x, {0, 1, 0, 1}, quick_probe()), DataError);
  ProbeConfig bad = quick_probe();
  bad.train_fraction = 1.0;
  EXPECT_THROW(bad.validate(), DataError);
}

TEST(Probe, MissingIdsAreListed) {
  EmbeddingSet s;
  s.push("a", std::vector<float>{1.0f});
  try {
    (void)embedding_rows(s, {"a", "b", "c"});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("b c"), std::string::npos);
  }
}

TEST(Budget, PlanReachesBudget) {
  SynthesisSpec spec;
  spec.count_per_class = 4;
  const Dataset ds = synthesize_shapes(spec);
  std::vector<GeoEntity> canonical;
  for (const GeoEntity& e : ds.entities()) canonical.push_back(normalize_shape(e).entity);
  for (std::size_t budget : {64u, 100u, 288u}) {
    const BudgetPlan p = plan_budget(canonical, 0.05, budget, 8);
    EXPECT_GE(p.mean_samples, static_cast<double>(budget));
    EXPECT_LT(p.mean_samples, static_cast<double>(budget) + 12.0);
    EXPECT_LE(p.n_axis * p.n_axis, static_cast<int>(budget) / 4);
  }
  EXPECT_THROW(plan_budget(canonical, 0.05, 5, 8), DataError);
}

TEST(Reporting, CsvRows) {
  ProbeReport r;
  r.task = "distance";
  r.metric = "mae";
  r.value = 0.5;
  r.baseline = 1.0;
  r.r2 = 0.75;
  r.seed = 3;
  EXPECT_EQ(metrics_csv_header(), "task,metric,value,baseline,seed\n");
  EXPECT_EQ(metrics_csv_row(r), "distance,mae,0.5,1,3\ndistance,r2,0.75,0,3\n");
  EXPECT_NE(summary_table({r}).find("distance"), std::string::npos);
}
