#include <gtest/gtest.h>

#include <cmath>

#include "geo2vec/ingest.hpp"
#include "geo2vec/training.hpp"
#include "test_util.hpp"

using namespace geo2vec;

namespace {

TrainConfig tiny(Mode mode) {
  TrainConfig c = TrainConfig::defaults(mode);
  c.hidden = {16, 16};
  c.latent_dim = 8;
  c.epochs = 3;
  c.sampling.epsilon = 20;
  c.sampling.n_axis = 4;
  c.freq_count = 3;
  c.seed = 11;
  c.threads = 1;
  return c;
}

Dataset small_shapes() {
  SynthesisSpec s;
  s.count_per_class = 2;
  s.seed = 4;
  return synthesize_shapes(s);
}

Dataset small_scattered() {
  SynthesisSpec s;
  s.count_per_class = 4;
  s.overlap_fraction = 0.5;
  s.seed = 4;
  return synthesize_scattered(s);
}

}  // namespace

TEST(Training, DeterministicAcrossRunsAndThreads) {
  const Dataset ds = small_shapes();
  TrainConfig c = tiny(Mode::Shape);
  const TrainResult a = train(ds, c);
  c.threads = 3;
  const TrainResult b = train(ds, c);
  EXPECT_EQ(serialize_checkpoint(a.checkpoint), serialize_checkpoint(b.checkpoint));
  EXPECT_EQ(serialize_embeddings(a.embeddings), serialize_embeddings(b.embeddings));
  c.seed = 12;
  EXPECT_NE(serialize_embeddings(train(ds, c).embeddings), serialize_embeddings(a.embeddings));
}

TEST(Training, LossDecreases) {
  const Dataset ds = small_shapes();
  TrainConfig c = tiny(Mode::Shape);
  c.epochs = 8;
  const TrainResult r = train(ds, c);
  auto epoch_mean = [&](int e) {
    double s = 0;
    int n = 0;
    for (const LossRecord& l : r.history)
      if (l.epoch == e) {
        s += l.loss;
        ++n;
      }
    return s / n;
  };
  EXPECT_LT(epoch_mean(7), epoch_mean(0));
}

TEST(Training, ResumeMatchesStraightRun) {
  const Dataset ds = small_shapes();
  TrainConfig c = tiny(Mode::Shape);
  c.epochs = 4;
  const TrainResult straight = train(ds, c);
  c.epochs = 2;
  const TrainResult first = train(ds, c);
  const Checkpoint mid = deserialize_checkpoint(serialize_checkpoint(first.checkpoint));
  c.epochs = 4;
  const TrainResult resumed = train(ds, c, &mid);
  EXPECT_EQ(serialize_checkpoint(resumed.checkpoint), serialize_checkpoint(straight.checkpoint));
  std::vector<double> tail;
  for (const LossRecord& l : straight.history)
    if (l.epoch >= 2) tail.push_back(l.loss);
  ASSERT_EQ(tail.size(), resumed.history.size());
  for (std::size_t i = 0; i < tail.size(); ++i) EXPECT_EQ(tail[i], resumed.history[i].loss);
}

TEST(Training, ResumeRejectsMismatch) {
  const Dataset ds = small_shapes();
  TrainConfig c = tiny(Mode::Shape);
  c.epochs = 1;
  const TrainResult r = train(ds, c);
  TrainConfig other = c;
  other.latent_dim = 4;
  EXPECT_THROW(train(ds, other, &r.checkpoint), FormatError);
  EXPECT_THROW(train(small_scattered(), tiny(Mode::Location), &r.checkpoint), FormatError);
}

TEST(Training, CallbackCadence) {
  const Dataset ds = small_shapes();
  TrainConfig c = tiny(Mode::Shape);
  c.epochs = 5;
  c.checkpoint_every = 2;
  std::vector<std::uint32_t> seen;
  train(ds, c, nullptr, [&](const Checkpoint& ck, const std::vector<LossRecord>&) { seen.push_back(ck.epochs_completed); });
  EXPECT_EQ(seen, (std::vector<std::uint32_t>{2, 4, 5}));
}

TEST(Training, LocationModeEmbedsEveryEntity) {
  const Dataset ds = small_scattered();
  const TrainResult r = train(ds, tiny(Mode::Location));
  EXPECT_EQ(r.embeddings.kind, EmbeddingKind::Location);
  ASSERT_EQ(r.embeddings.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(r.embeddings.ids[i], ds[i].id());
  EXPECT_FALSE(r.checkpoint.loss.clamp.has_value());
}

TEST(Training, ShapeModeSkipsPointsAndCompletes) {
  const Dataset ds = small_scattered();
  const TrainResult r = train(ds, tiny(Mode::Shape));
  std::size_t non_points = 0;
  for (const GeoEntity& e : ds.entities()) non_points += e.kind() != EntityKind::Point;
  EXPECT_EQ(r.embeddings.size(), non_points);
  const EmbeddingSet full = complete_shape_embeddings(ds, r.embeddings);
  ASSERT_EQ(full.size(), ds.size());
  const auto p = full.row(full.index_of("pt-0"));
  double norm2 = 0;
  for (float v : p) norm2 += v * v;
  EXPECT_NEAR(norm2, 1.0, 1e-6);
}

TEST(Training, DivergenceRaisesNumericError) {
  TrainConfig c = tiny(Mode::Location);
  c.lr_network = 1e300;
  EXPECT_THROW(train(small_scattered(), c), NumericError);
}

TEST(Training, ConfigValidation) {
  TrainConfig c = tiny(Mode::Shape);
  c.batch_size = 0;
  EXPECT_THROW(train(small_shapes(), c), DataError);
  c = tiny(Mode::Shape);
  c.checkpoint_every = 0;
  EXPECT_THROW(train(small_shapes(), c), DataError);
}

TEST(Files, CheckpointRoundTripAndErrors) {
  const TrainResult r = train(small_shapes(), tiny(Mode::Shape));
  const std::string bytes = serialize_checkpoint(r.checkpoint);
  EXPECT_EQ(bytes.substr(0, 4), "G2V1");
  const Checkpoint back = deserialize_checkpoint(bytes, Mode::Shape);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
  EXPECT_TRUE(back.mlp.arch == r.checkpoint.mlp.arch);
  EXPECT_THROW(deserialize_checkpoint(bytes, Mode::Location), FormatError);
  EXPECT_THROW(deserialize_checkpoint("XXXX" + bytes.substr(4)), FormatError);
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1})
    EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, cut)), FormatError) << "cut " << cut;
  test_support::TempDir dir;
  save_checkpoint(dir.file("c.g2v"), r.checkpoint);
  EXPECT_EQ(serialize_checkpoint(load_checkpoint(dir.file("c.g2v"))), bytes);
}

TEST(Files, EmbeddingRoundTripAndErrors) {
  EmbeddingSet s;
  s.kind = EmbeddingKind::Location;
  s.dim = 3;
  s.push("a", std::vector<float>{1, 2, 3});
  s.push("b", std::vector<float>{-1, 0.5f, 1e-30f});
  const std::string bytes = serialize_embeddings(s);
  EXPECT_EQ(bytes.substr(0, 4), "G2VE");
  const EmbeddingSet back = deserialize_embeddings(bytes);
  EXPECT_EQ(back.ids, s.ids);
  EXPECT_EQ(back.values, s.values);
  EXPECT_THROW(deserialize_embeddings(bytes.substr(0, bytes.size() - 2)), FormatError);
  EXPECT_THROW(deserialize_embeddings("G2VX" + bytes.substr(4)), FormatError);
  EXPECT_THROW(deserialize_embeddings(bytes + "x"), FormatError);
}

TEST(Embeddings, CombineConcatenatesById) {
  EmbeddingSet loc, shp;
  loc.dim = 2;
  shp.dim = 1;
  loc.push("a", std::vector<float>{1, 2});
  loc.push("b", std::vector<float>{3, 4});
  shp.push("b", std::vector<float>{9});
  shp.push("a", std::vector<float>{8});
  const EmbeddingSet c = combine(loc, shp);
  EXPECT_EQ(c.dim, 3);
  EXPECT_EQ(c.values, (std::vector<float>{1, 2, 8, 3, 4, 9}));
  shp.ids[0] = "z";
  EXPECT_THROW(combine(loc, shp), DataError);
}

TEST(Files, LossCsv) {
  const std::string csv = loss_history_csv({{0, 0, 0.5}, {0, 1, 0.25}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,batch,loss");
  EXPECT_NE(csv.find("0,1,0.25"), std::string::npos);
}

TEST(Reconstruction, FieldHasRequestedShape) {
  const Dataset ds = small_shapes();
  const TrainResult r = train(ds, tiny(Mode::Shape));
  const auto f = reconstruct_field(r.checkpoint, ds[0].id(), 8);
  EXPECT_EQ(f.size(), 64u);
  for (double v : f) EXPECT_TRUE(std::isfinite(v));
  EXPECT_THROW(reconstruct_field(r.checkpoint, "nope", 8), DataError);
  EXPECT_THROW(reconstruct_field(r.checkpoint, ds[0].id(), 1), DataError);
}
