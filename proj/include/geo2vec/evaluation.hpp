#pragma once

// Frozen-embedding probes for the downstream tasks: shape classification,
// edge-count and line-length regression, pairwise distance estimation and
// topological relation classification, plus the sample-budget sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geo2vec/autodecoder.hpp"
#include "geo2vec/error.hpp"
#include "geo2vec/geometry.hpp"
#include "geo2vec/ingest.hpp"
#include "geo2vec/random.hpp"
#include "geo2vec/training.hpp"

namespace geo2vec {

struct ProbeConfig {
  int hidden = 128;
  int epochs = 200;
  double learning_rate = 3e-3;
  double train_fraction = 0.7;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;

  void validate() const {
    if (hidden < 1 || epochs < 1 || batch_size < 1) throw DataError("probe needs positive width, epochs and batch");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DataError("train fraction must be in (0, 1)");
    if (!(learning_rate > 0.0)) throw DataError("probe learning rate must be > 0");
  }
};

struct ProbeReport {
  std::string task;
  std::string metric;  // "accuracy" or "mae"
  double value = 0.0;
  double baseline = 0.0;  // majority-class accuracy or mean-predictor MAE
  std::optional<double> r2;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  std::vector<double> test_predictions;
  std::vector<double> test_targets;
};

using FeatureMatrix = MatrixX<double>;  // one row per example

namespace detail {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline Split random_split(std::size_t n, double fraction, Rng& rng) {
  const auto order = permutation(n, rng);
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n - 1);
  return {{order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)},
          {order.begin() + static_cast<std::ptrdiff_t>(k), order.end()}};
}

inline Split stratified_split(const std::vector<int>& labels, double fraction, Rng& rng) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Split s;
  for (auto& [label, idx] : by_class) {
    const auto order = permutation(idx.size(), rng);
    const std::size_t k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size())));
    if (k >= idx.size()) throw DataError("class " + std::to_string(label) + " has no test examples");
    if (k == 0) throw DataError("class " + std::to_string(label) + " has no training examples");
    for (std::size_t i = 0; i < idx.size(); ++i) (i < k ? s.train : s.test).push_back(idx[order[i]]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace detail

// Two-layer MLP probe (ReLU hidden layer) on standardized inputs, trained with
// Adam and a linearly decaying learning rate.
class Probe {
 public:
  Probe(int inputs, int outputs, const ProbeConfig& cfg) : cfg_(cfg), outputs_(outputs) {
    Rng rng = make_rng(cfg.seed, "probe-init");
    auto fill = [&](MatrixX<double>& m, int rows, int cols) {
      const double b = std::sqrt(6.0 / cols);
      std::uniform_real_distribution<double> u(-b, b);
      m.resize(rows, cols);
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
    };
    fill(w1_, cfg.hidden, inputs);
    fill(w2_, outputs, cfg.hidden);
    w2_ *= 0.1;
    b1_ = VectorX<double>::Zero(cfg.hidden);
    b2_ = VectorX<double>::Zero(outputs);
  }

  // Columns of x are examples. For classification targets hold class ids.
  void fit(const MatrixX<double>& x, const std::vector<double>& targets, bool classify) {
    const Eigen::Index n = x.cols();
    mean_ = x.rowwise().mean();
    scale_ = ((x.colwise() - mean_).array().square().rowwise().mean()).sqrt().matrix();
    for (Eigen::Index i = 0; i < scale_.size(); ++i) scale_(i) = scale_(i) > 1e-12 ? 1.0 / scale_(i) : 1.0;
    if (!classify) {
      double m = 0.0, v = 0.0;
      for (double t : targets) m += t;
      m /= static_cast<double>(targets.size());
      for (double t : targets) v += (t - m) * (t - m);
      target_mean_ = m;
      target_scale_ = std::sqrt(v / static_cast<double>(targets.size()));
      if (!(target_scale_ > 1e-12)) target_scale_ = 1.0;
    }
    const MatrixX<double> xs = standardize(x);
    AdamState<double> adam;
    MlpParams<double> shell;
    std::vector<MatrixX<double>> m{MatrixX<double>::Zero(w1_.rows(), w1_.cols()), MatrixX<double>::Zero(w2_.rows(), w2_.cols())};
    std::vector<MatrixX<double>> v = m;
    std::vector<VectorX<double>> mb{VectorX<double>::Zero(b1_.size()), VectorX<double>::Zero(b2_.size())};
    std::vector<VectorX<double>> vb = mb;
    Rng rng = make_rng(cfg_.seed, "probe-batches");
    const std::size_t bs = std::min<std::size_t>(cfg_.batch_size, static_cast<std::size_t>(n));
    const std::size_t steps_per_epoch = (static_cast<std::size_t>(n) + bs - 1) / bs;
    const double total_steps = static_cast<double>(steps_per_epoch) * cfg_.epochs;
    std::uint64_t step = 0;
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      const auto order = permutation(static_cast<std::size_t>(n), rng);
      for (std::size_t start = 0; start < order.size(); start += bs) {
        const std::size_t len = std::min(bs, order.size() - start);
        MatrixX<double> xb(xs.rows(), static_cast<Eigen::Index>(len));
        for (std::size_t i = 0; i < len; ++i) xb.col(static_cast<Eigen::Index>(i)) = xs.col(static_cast<Eigen::Index>(order[start + i]));
        MatrixX<double> pre = (w1_ * xb).colwise() + b1_;
        MatrixX<double> h = pre.cwiseMax(0.0);
        MatrixX<double> out = (w2_ * h).colwise() + b2_;
        MatrixX<double> dout(out.rows(), out.cols());
        for (std::size_t i = 0; i < len; ++i) {
          const double t = targets[order[start + i]];
          auto col = out.col(static_cast<Eigen::Index>(i));
          if (classify) {
            const double mx = col.maxCoeff();
            VectorX<double> p = (col.array() - mx).exp();
            p /= p.sum();
            p(static_cast<Eigen::Index>(t)) -= 1.0;
            dout.col(static_cast<Eigen::Index>(i)) = p;
          } else {
            dout(0, static_cast<Eigen::Index>(i)) = col(0) - (t - target_mean_) / target_scale_;
          }
        }
        dout /= static_cast<double>(len);
        const MatrixX<double> gw2 = dout * h.transpose();
        const VectorX<double> gb2 = dout.rowwise().sum();
        const MatrixX<double> dh = (w2_.transpose() * dout).cwiseProduct(pre.unaryExpr([](double a) { return a > 0.0 ? 1.0 : 0.0; }));
        const MatrixX<double> gw1 = dh * xb.transpose();
        const VectorX<double> gb1 = dh.rowwise().sum();
        ++step;
        adam.lr_network = cfg_.learning_rate * std::max(0.0, 1.0 - static_cast<double>(step - 1) / total_steps);
        const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step));
        detail::adam_update(w1_, gw1, m[0], v[0], adam.lr_network, adam, bc1, bc2);
        detail::adam_update(w2_, gw2, m[1], v[1], adam.lr_network, adam, bc1, bc2);
        detail::adam_update(b1_, gb1, mb[0], vb[0], adam.lr_network, adam, bc1, bc2);
        detail::adam_update(b2_, gb2, mb[1], vb[1], adam.lr_network, adam, bc1, bc2);
      }
    }
  }

  // Raw outputs: logits for classification, de-standardized value for regression.
  MatrixX<double> outputs(const MatrixX<double>& x) const {
    const MatrixX<double> h = ((w1_ * standardize(x)).colwise() + b1_).cwiseMax(0.0);
    return (w2_ * h).colwise() + b2_;
  }

  std::vector<double> predict_values(const MatrixX<double>& x) const {
    const MatrixX<double> o = outputs(x);
    std::vector<double> out(static_cast<std::size_t>(o.cols()));
    for (Eigen::Index i = 0; i < o.cols(); ++i) out[static_cast<std::size_t>(i)] = o(0, i) * target_scale_ + target_mean_;
    return out;
  }

  std::vector<int> predict_classes(const MatrixX<double>& x) const {
    const MatrixX<double> o = outputs(x);
    std::vector<int> out(static_cast<std::size_t>(o.cols()));
    for (Eigen::Index i = 0; i < o.cols(); ++i) {
      Eigen::Index best = 0;
      o.col(i).maxCoeff(&best);
      out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
  }

 private:
  MatrixX<double> standardize(const MatrixX<double>& x) const {
    return (x.colwise() - mean_).array().colwise() * scale_.array();
  }

  ProbeConfig cfg_;
  int outputs_;
  MatrixX<double> w1_, w2_;
  VectorX<double> b1_, b2_;
  VectorX<double> mean_, scale_;
  double target_mean_ = 0.0, target_scale_ = 1.0;
};

namespace detail {

inline MatrixX<double> gather_columns(const FeatureMatrix& rows, const std::vector<std::size_t>& idx) {
  MatrixX<double> out(rows.cols(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(idx[i])).transpose();
  return out;
}

}  // namespace detail

// Classification probe on labels in [0, classes). Metric: test accuracy;
// baseline: accuracy of predicting the majority training class.
inline ProbeReport train_probe_classifier(const FeatureMatrix& features, const std::vector<int>& labels,
                                          const ProbeConfig& cfg, std::string task = "classification") {
  cfg.validate();
  if (static_cast<std::size_t>(features.rows()) != labels.size() || labels.empty())
    throw DataError("feature rows and labels differ in count");
  if (!features.allFinite()) throw DataError("non-finite embedding features");
  const int classes = *std::max_element(labels.begin(), labels.end()) + 1;
  if (*std::min_element(labels.begin(), labels.end()) < 0) throw DataError("negative class label");
  Rng rng = make_rng(cfg.seed, "probe-split");
  const detail::Split split = detail::stratified_split(labels, cfg.train_fraction, rng);
  std::vector<double> train_y;
  for (std::size_t i : split.train) train_y.push_back(labels[i]);
  Probe probe(static_cast<int>(features.cols()), classes, cfg);
  probe.fit(detail::gather_columns(features, split.train), train_y, true);
  const std::vector<int> pred = probe.predict_classes(detail::gather_columns(features, split.test));
  std::map<int, std::size_t> freq;
  for (std::size_t i : split.train) ++freq[labels[i]];
  const int majority = std::max_element(freq.begin(), freq.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
  ProbeReport r;
  r.task = std::move(task);
  r.metric = "accuracy";
  r.seed = cfg.seed;
  r.train_size = split.train.size();
  r.test_size = split.test.size();
  std::size_t correct = 0, majority_hits = 0;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const int truth = labels[split.test[i]];
    correct += pred[i] == truth;
    majority_hits += majority == truth;
    r.test_predictions.push_back(pred[i]);
    r.test_targets.push_back(truth);
  }
  r.value = static_cast<double>(correct) / static_cast<double>(split.test.size());
  r.baseline = static_cast<double>(majority_hits) / static_cast<double>(split.test.size());
  return r;
}

// Regression probe. Metric: test MAE; baseline: MAE of the training mean; R^2 on test.
inline ProbeReport train_probe_regressor(const FeatureMatrix& features, const std::vector<double>& targets,
                                         const ProbeConfig& cfg, std::string task = "regression") {
  cfg.validate();
  if (static_cast<std::size_t>(features.rows()) != targets.size() || targets.size() < 2)
    throw DataError("feature rows and targets differ in count");
  for (double t : targets)
    if (!std::isfinite(t)) throw DataError("non-finite regression target");
  if (!features.allFinite()) throw DataError("non-finite embedding features");
  Rng rng = make_rng(cfg.seed, "probe-split");
  const detail::Split split = detail::random_split(targets.size(), cfg.train_fraction, rng);
  std::vector<double> train_y;
  for (std::size_t i : split.train) train_y.push_back(targets[i]);
  Probe probe(static_cast<int>(features.cols()), 1, cfg);
  probe.fit(detail::gather_columns(features, split.train), train_y, false);
  const std::vector<double> pred = probe.predict_values(detail::gather_columns(features, split.test));
  const double train_mean = std::accumulate(train_y.begin(), train_y.end(), 0.0) / static_cast<double>(train_y.size());
  ProbeReport r;
  r.task = std::move(task);
  r.metric = "mae";
  r.seed = cfg.seed;
  r.train_size = split.train.size();
  r.test_size = split.test.size();
  double mae = 0.0, base = 0.0, test_mean = 0.0;
  for (std::size_t i : split.test) test_mean += targets[i];
  test_mean /= static_cast<double>(split.test.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const double t = targets[split.test[i]];
    mae += std::abs(pred[i] - t);
    base += std::abs(train_mean - t);
    ss_res += (pred[i] - t) * (pred[i] - t);
    ss_tot += (t - test_mean) * (t - test_mean);
    r.test_predictions.push_back(pred[i]);
    r.test_targets.push_back(t);
  }
  r.value = mae / static_cast<double>(split.test.size());
  r.baseline = base / static_cast<double>(split.test.size());
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return r;
}

// Rows of the embedding matrix for the given ids, in order.
inline FeatureMatrix embedding_rows(const EmbeddingSet& set, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < set.size(); ++i) index.emplace(set.ids[i], i);
  FeatureMatrix out(static_cast<Eigen::Index>(ids.size()), set.dim);
  std::vector<std::string> missing;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto it = index.find(ids[r]);
    if (it == index.end()) {
      missing.push_back(ids[r]);
      continue;
    }
    const auto v = set.row(it->second);
    for (int c = 0; c < set.dim; ++c) out(static_cast<Eigen::Index>(r), c) = v[static_cast<std::size_t>(c)];
  }
  if (!missing.empty()) {
    std::string msg = "embeddings missing for ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw DataError(msg);
  }
  return out;
}

inline ProbeReport task_shape_classification(const Dataset& data, const EmbeddingSet& shape, const ProbeConfig& cfg) {
  if (!data.has_labels()) throw DataError("shape classification needs labels");
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const GeoEntity& e : data.entities()) {
    if (auto l = data.label(e.id())) {
      ids.push_back(e.id());
      labels.push_back(*l);
    }
  }
  return train_probe_classifier(embedding_rows(shape, ids), labels, cfg, "shape");
}

inline ProbeReport task_edge_count(const Dataset& data, const EmbeddingSet& shape, const ProbeConfig& cfg) {
  std::vector<std::string> ids;
  std::vector<double> counts;
  for (const GeoEntity& e : data.entities()) {
    if (!e.has_interior()) continue;
    ids.push_back(e.id());
    counts.push_back(static_cast<double>(e.edge_count()));
  }
  if (ids.size() < 2) throw DataError("edge-count task needs polygons");
  return train_probe_regressor(embedding_rows(shape, ids), counts, cfg, "edge");
}

// Regression on [z_loc, z_shp] against polyline length in the dataset's canonical space.
inline ProbeReport task_line_length(const Dataset& data, const EmbeddingSet& combined, const ProbeConfig& cfg) {
  const NormalizedDataset canon = normalize_dataset(data.entities());
  std::vector<std::string> ids;
  std::vector<double> lengths;
  for (const GeoEntity& e : canon.entities) {
    if (e.kind() != EntityKind::Polyline) continue;
    ids.push_back(e.id());
    lengths.push_back(e.boundary_length());
  }
  if (ids.size() < 2) throw DataError("line-length task needs polylines");
  return train_probe_regressor(embedding_rows(combined, ids), lengths, cfg, "length");
}

// ---------------------------------------------------------------------------
// Pairwise tasks
// ---------------------------------------------------------------------------

enum class PairType { PtPl, PtPg, PlPl, PlPg, PgPg };

inline const char* to_string(PairType t) {
  switch (t) {
    case PairType::PtPl: return "Pt-Pl";
    case PairType::PtPg: return "Pt-Pg";
    case PairType::PlPl: return "Pl-Pl";
    case PairType::PlPg: return "Pl-Pg";
    case PairType::PgPg: return "Pg-Pg";
  }
  return "?";
}

inline bool is_binary(PairType t) { return t == PairType::PtPl || t == PairType::PtPg || t == PairType::PlPl; }

enum class Topology : int { Disjoint = 0, TouchesOrCrosses = 1, Within = 2, Contains = 3 };

inline const std::vector<std::string>& topology_vocabulary(PairType t) {
  static const std::vector<std::string> binary{"disjoint", "intersects"};
  static const std::vector<std::string> multi{"disjoint", "touches-or-crosses", "within", "contains"};
  return is_binary(t) ? binary : multi;
}

// Relation of a to b: boundaries meeting wins; otherwise containment of one
// entity's boundary in the other's filled region.
inline Topology topology_relation(const GeoEntity& a, const GeoEntity& b) {
  if (min_entity_distance(a, b) == 0.0) return Topology::TouchesOrCrosses;
  if (b.has_interior() && point_in_entity(a.vertices().front(), b)) return Topology::Within;
  if (a.has_interior() && point_in_entity(b.vertices().front(), a)) return Topology::Contains;
  return Topology::Disjoint;
}

// Class index in topology_vocabulary(type).
inline int topology_ground_truth(const GeoEntity& a, const GeoEntity& b, PairType type) {
  const Topology t = topology_relation(a, b);
  if (is_binary(type)) return t == Topology::Disjoint ? 0 : 1;
  return static_cast<int>(t);
}

inline EntityKind first_kind(PairType t) {
  switch (t) {
    case PairType::PtPl:
    case PairType::PtPg: return EntityKind::Point;
    case PairType::PlPl:
    case PairType::PlPg: return EntityKind::Polyline;
    case PairType::PgPg: return EntityKind::Polygon;
  }
  return EntityKind::Point;
}

inline EntityKind second_kind(PairType t) {
  switch (t) {
    case PairType::PtPl:
    case PairType::PlPl: return EntityKind::Polyline;
    default: return EntityKind::Polygon;
  }
}

struct PairTask {
  PairType type = PairType::PgPg;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> distance;  // canonical units
  std::vector<int> label;
  std::vector<std::string> vocabulary;
};

namespace detail {

inline std::vector<std::size_t> of_kind(const std::vector<GeoEntity>& es, EntityKind k) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const EntityKind ek = es[i].kind() == EntityKind::MultiPolygon ? EntityKind::Polygon : es[i].kind();
    if (ek == k) out.push_back(i);
  }
  return out;
}

}  // namespace detail

// count random distinct pairs drawn evenly across the given type
// combinations, with boundary distances in the dataset's canonical space.
inline PairTask make_distance_pairs(const Dataset& data, std::size_t count, std::uint64_t seed,
                                    const std::vector<PairType>& types = {PairType::PtPg, PairType::PlPg,
                                                                          PairType::PgPg}) {
  const NormalizedDataset canon = normalize_dataset(data.entities());
  Rng rng = make_rng(seed, "distance-pairs");
  PairTask task;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t t = 0; t < types.size(); ++t) {
    const auto first = detail::of_kind(canon.entities, first_kind(types[t]));
    const auto second = detail::of_kind(canon.entities, second_kind(types[t]));
    if (first.empty() || second.empty()) throw DataError(std::string("no entities for pair type ") + to_string(types[t]));
    const std::size_t want = count / types.size() + (t < count % types.size() ? 1 : 0);
    std::uniform_int_distribution<std::size_t> pa(0, first.size() - 1), pb(0, second.size() - 1);
    std::size_t made = 0;
    for (std::size_t attempt = 0; made < want && attempt < 100 * want + 1000; ++attempt) {
      const std::size_t a = first[pa(rng)], b = second[pb(rng)];
      if (a == b || !seen.emplace(a, b).second) continue;
      task.pairs.emplace_back(canon.entities[a].id(), canon.entities[b].id());
      task.distance.push_back(min_entity_distance(canon.entities[a], canon.entities[b]));
      ++made;
    }
  }
  return task;
}

// Balanced topology pairs of one type: the same number per class, at most
// count / classes and at most the rarest usable class. Classes with fewer
// than min_per_class candidates are dropped; fewer than two usable classes
// is class starvation.
inline PairTask make_topology_pairs(const Dataset& data, PairType type, std::size_t count, std::uint64_t seed,
                                    std::size_t min_per_class = 10) {
  const std::vector<GeoEntity>& es = data.entities();
  const auto first = detail::of_kind(es, first_kind(type));
  const auto second = detail::of_kind(es, second_kind(type));
  const std::vector<std::string>& vocab = topology_vocabulary(type);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_class(vocab.size());
  for (std::size_t a : first) {
    for (std::size_t b : second) {
      if (a == b) continue;
      if (first_kind(type) == second_kind(type) && a > b) continue;
      by_class[static_cast<std::size_t>(topology_ground_truth(es[a], es[b], type))].emplace_back(a, b);
    }
  }
  std::size_t usable = 0, smallest = std::numeric_limits<std::size_t>::max();
  for (const auto& c : by_class)
    if (c.size() >= min_per_class) {
      ++usable;
      smallest = std::min(smallest, c.size());
    }
  if (usable < 2) throw DataError(std::string("class starvation for ") + to_string(type) + " topology pairs");
  const std::size_t per_class = std::min(smallest, std::max<std::size_t>(1, count / usable));
  const NormalizedDataset canon = normalize_dataset(es);
  Rng rng = make_rng(seed, std::string("topology-pairs-") + to_string(type));
  PairTask task;
  task.type = type;
  task.vocabulary = vocab;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < min_per_class) continue;
    const auto pick = sample_without_replacement(by_class[c].size(), per_class, rng);
    for (std::size_t i : pick) {
      const auto [a, b] = by_class[c][i];
      task.pairs.emplace_back(es[a].id(), es[b].id());
      task.label.push_back(static_cast<int>(c));
      task.distance.push_back(min_entity_distance(canon.entities[a], canon.entities[b]));
    }
  }
  return task;
}

inline FeatureMatrix pair_features(const EmbeddingSet& set, const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::string> a, b;
  for (const auto& [x, y] : pairs) {
    a.push_back(x);
    b.push_back(y);
  }
  const FeatureMatrix fa = embedding_rows(set, a), fb = embedding_rows(set, b);
  FeatureMatrix out(fa.rows(), fa.cols() + fb.cols());
  out << fa, fb;
  return out;
}

inline ProbeReport task_distance(const EmbeddingSet& loc, const PairTask& pairs, const ProbeConfig& cfg) {
  return train_probe_regressor(pair_features(loc, pairs.pairs), pairs.distance, cfg, "distance");
}

// Labels are compacted to the classes present before probing.
inline ProbeReport task_topology(const EmbeddingSet& loc, const PairTask& pairs, const ProbeConfig& cfg) {
  std::map<int, int> remap;
  for (int l : pairs.label) remap.emplace(l, 0);
  int next = 0;
  for (auto& [k, v] : remap) v = next++;
  std::vector<int> labels;
  for (int l : pairs.label) labels.push_back(remap[l]);
  return train_probe_classifier(pair_features(loc, pairs.pairs), labels, cfg,
                                std::string("topology ") + to_string(pairs.type));
}

// ---------------------------------------------------------------------------
// Sample-budget sweep
// ---------------------------------------------------------------------------

struct BudgetPlan {
  std::size_t budget;
  int n_axis;
  double epsilon;
  double mean_samples;  // realized mean samples per entity
};

// Grid of at most a quarter of the budget, then the epsilon whose mean
// per-entity sample count first reaches the budget.
inline BudgetPlan plan_budget(const std::vector<GeoEntity>& canonical, double sigma, std::size_t budget, int max_axis,
                              bool quadratic = false) {
  BudgetPlan plan{budget, 2, 0.0, 0.0};
  plan.n_axis = std::clamp(static_cast<int>(std::floor(std::sqrt(static_cast<double>(budget) / 4.0))), 2, max_axis);
  SamplingParams p;
  p.sigma = sigma;
  p.n_axis = plan.n_axis;
  p.quadratic_counts = quadratic;
  auto mean_count = [&](double eps) {
    p.epsilon = eps;
    double total = 0.0;
    for (const GeoEntity& e : canonical) total += static_cast<double>(expected_sample_count(e, p));
    return total / static_cast<double>(canonical.size());
  };
  const double floor_count = mean_count(1e-12);
  if (floor_count > static_cast<double>(budget))
    throw DataError("budget " + std::to_string(budget) + " is below the minimum of " + std::to_string(floor_count) +
                    " samples per entity");
  double lo = 1e-12, hi = 1.0;
  while (mean_count(hi) < static_cast<double>(budget)) hi *= 2.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean_count(mid) < static_cast<double>(budget) ? lo : hi) = mid;
  }
  plan.epsilon = hi;
  plan.mean_samples = mean_count(hi);
  return plan;
}

struct BudgetRow {
  BudgetPlan plan;
  ProbeReport shape;
  ProbeReport edge;
};

// Trains one shape model per budget (same seed) and probes both shape tasks.
// Sample sets are not nested across budgets.
inline std::vector<BudgetRow> sample_budget_sweep(const Dataset& data, const std::vector<std::size_t>& budgets,
                                                  const TrainConfig& base, const ProbeConfig& probe) {
  TrainConfig cfg = base;
  cfg.mode = Mode::Shape;
  const PreparedData prep = prepare_training_data(data, cfg);
  std::vector<BudgetRow> rows;
  for (std::size_t budget : budgets) {
    if (budget < 4) throw DataError("budget too small");
    BudgetRow row;
    row.plan = plan_budget(prep.entities, prep.sigma, budget, base.sampling.n_axis, base.sampling.quadratic_counts);
    TrainConfig run = cfg;
    run.sampling.epsilon = row.plan.epsilon;
    run.sampling.n_axis = row.plan.n_axis;
    run.sampling.sigma = prep.sigma;
    run.estimate_sigma = false;
    const TrainResult trained = train(data, run);
    row.shape = task_shape_classification(data, trained.embeddings, probe);
    row.edge = task_edge_count(data, trained.embeddings, probe);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

inline std::string metrics_csv_header() { return "task,metric,value,baseline,seed\n"; }

inline std::string metrics_csv_row(const ProbeReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.task << ',' << r.metric << ',' << r.value << ',' << r.baseline << ',' << r.seed << '\n';
  if (r.r2) out << r.task << ",r2," << *r.r2 << ",0," << r.seed << '\n';
  return out.str();
}

inline std::string summary_table(const std::vector<ProbeReport>& reports) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "task                  metric     value   baseline  train  test\n";
  for (const ProbeReport& r : reports) {
    std::string task = r.task;
    task.resize(std::max<std::size_t>(task.size(), 21), ' ');
    std::string metric = r.metric;
    metric.resize(std::max<std::size_t>(metric.size(), 9), ' ');
    out << task << ' ' << metric << ' ' << r.value << "  " << r.baseline << "  " << r.train_size << "  "
        << r.test_size << '\n';
  }
  return out.str();
}

}  // namespace geo2vec
