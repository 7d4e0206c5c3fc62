#pragma once

// End-to-end auto-decoder training: sample every entity, pool and shuffle the
// samples, then mini-batch over the network and the touched latent codes.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "geo2vec/autodecoder.hpp"
#include "geo2vec/encoding.hpp"
#include "geo2vec/error.hpp"
#include "geo2vec/geometry.hpp"
#include "geo2vec/ingest.hpp"
#include "geo2vec/io.hpp"
#include "geo2vec/parallel.hpp"
#include "geo2vec/random.hpp"
#include "geo2vec/sampling.hpp"

namespace geo2vec {

struct TrainConfig {
  Mode mode = Mode::Shape;
  SamplingParams sampling;
  bool estimate_sigma = true;  // replace sampling.sigma by the dataset estimate
  int freq_count = 8;
  bool rotation_invariant = true;  // shape mode only
  double headroom = kShapeHeadroomOctaves;
  LossConfig loss;
  std::vector<int> hidden{256, 256, 256, 256};
  int latent_dim = 64;
  double alpha = 0.01;
  std::size_t batch_size = 32;
  int epochs = 50;
  double lr_network = 1e-4;
  double lr_latent = 1e-3;
  std::uint64_t seed = 0;
  bool resample_each_epoch = false;
  int checkpoint_every = 1;  // epochs between on_epoch callbacks
  std::size_t threads = 0;  // 0: GEO2VEC_THREADS or hardware concurrency

  static TrainConfig defaults(Mode mode) {
    TrainConfig c;
    c.mode = mode;
    c.loss = LossConfig::for_mode(mode);
    c.epochs = mode == Mode::Shape ? 50 : 30;
    c.rotation_invariant = mode == Mode::Shape;
    return c;
  }

  void validate() const {
    if (batch_size < 1) throw DataError("batch size must be >= 1");
    if (epochs < 1) throw DataError("epochs must be >= 1");
    if (checkpoint_every < 1) throw DataError("checkpoint_every must be >= 1");
    if (freq_count < 1) throw DataError("freq_count must be >= 1");
    if (latent_dim < 1) throw DataError("latent_dim must be >= 1");
    if (!(lr_network > 0.0) || !(lr_latent > 0.0)) throw DataError("learning rates must be > 0");
    loss.validate();
    SamplingParams s = sampling;
    if (estimate_sigma) s.sigma = 1.0;
    s.validate();
  }
};

struct Checkpoint {
  Mode mode = Mode::Shape;
  EncodingConfig encoding;
  LossConfig loss;
  BBox domain = BBox::canonical();
  double sigma = 0.0;
  std::uint32_t epochs_completed = 0;
  MlpParams<float> mlp;
  LatentTable<float> latents;
  std::optional<AdamState<float>> optimizer;
};

enum class EmbeddingKind : std::uint8_t { Shape = 0, Location = 1, Combined = 2 };

struct EmbeddingSet {
  EmbeddingKind kind = EmbeddingKind::Shape;
  int dim = 0;
  std::vector<std::string> ids;
  std::vector<float> values;  // ids.size() x dim, row per entity

  std::size_t size() const { return ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return i;
    throw DataError("no embedding for id '" + id + "'");
  }
  void push(std::string id, std::span<const float> v) {
    if (dim == 0 && ids.empty()) dim = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != dim) throw DataError("embedding dimension mismatch");
    ids.push_back(std::move(id));
    values.insert(values.end(), v.begin(), v.end());
  }
};

struct LossRecord {
  int epoch;
  std::size_t batch;
  double loss;  // batch objective divided by batch size
};

struct TrainResult {
  Checkpoint checkpoint;
  EmbeddingSet embeddings;
  std::vector<LossRecord> history;
};

// Entities moved into the canonical space of the training mode.
struct PreparedData {
  std::vector<GeoEntity> entities;
  BBox domain;
  double sigma;
  EncodingConfig encoding;
};

inline PreparedData prepare_training_data(const Dataset& data, const TrainConfig& cfg) {
  if (data.empty()) throw DataError("cannot train on an empty dataset");
  PreparedData out;
  std::vector<GeoEntity> source;
  if (cfg.mode == Mode::Shape) {
    for (const GeoEntity& e : data.entities())
      if (e.kind() != EntityKind::Point) source.push_back(e);
    if (source.empty()) throw DataError("shape training needs at least one non-point entity");
    for (const GeoEntity& e : source) out.entities.push_back(normalize_shape(e).entity);
    out.domain = BBox::canonical();
    out.sigma = cfg.estimate_sigma ? estimate_sigma_shp(source, cfg.sampling.k, cfg.sampling.subset, cfg.seed)
                                   : cfg.sampling.sigma;
  } else {
    out.entities = normalize_dataset(data.entities()).entities;
    out.domain = bbox(out.entities);
    out.sigma = cfg.estimate_sigma && out.entities.size() >= 2
                    ? estimate_sigma_loc(out.entities, cfg.sampling.k, cfg.sampling.subset, cfg.seed)
                    : cfg.sampling.sigma;
  }
  const FrequencyBounds fb = frequency_bounds(bbox(out.entities), cfg.mode, cfg.headroom);
  out.encoding.l_min = fb.l_min;
  out.encoding.l_max = fb.l_max;
  out.encoding.count = cfg.freq_count;
  out.encoding.rotation_invariant = cfg.mode == Mode::Shape && cfg.rotation_invariant;
  out.encoding.mode = cfg.mode;
  return out;
}

// Pooled training samples X_G: encoded positions, targets and owning entity.
struct SamplePool {
  MatrixX<float> features;
  std::vector<float> targets;
  std::vector<std::uint32_t> entity;

  std::size_t size() const { return targets.size(); }
};

inline SamplePool build_sample_pool(const PreparedData& prep, const SamplingParams& params, std::size_t threads) {
  std::vector<TrainingSet> sets(prep.entities.size());
  parallel_for(prep.entities.size(), threads,
               [&](std::size_t i) { sets[i] = build_training_set(prep.entities[i], params, prep.domain); });
  std::size_t total = 0;
  for (const auto& s : sets) total += s.size();
  const PositionalEncoder enc(prep.encoding);
  SamplePool pool;
  pool.features.resize(enc.width(), static_cast<Eigen::Index>(total));
  pool.targets.resize(total);
  pool.entity.resize(total);
  std::vector<std::size_t> offset(sets.size() + 1, 0);
  for (std::size_t i = 0; i < sets.size(); ++i) offset[i + 1] = offset[i] + sets[i].size();
  parallel_for(sets.size(), threads, [&](std::size_t i) {
    std::size_t k = offset[i];
    for (const SdfSample& s : sets[i].all()) {
      enc.encode(s.position, std::span<float>(pool.features.col(static_cast<Eigen::Index>(k)).data(),
                                              static_cast<std::size_t>(enc.width())));
      pool.targets[k] = static_cast<float>(s.signed_distance);
      pool.entity[k] = static_cast<std::uint32_t>(i);
      ++k;
    }
  });
  return pool;
}

inline EmbeddingSet embeddings_from(const LatentTable<float>& table, Mode mode) {
  EmbeddingSet out;
  out.kind = mode == Mode::Shape ? EmbeddingKind::Shape : EmbeddingKind::Location;
  out.dim = table.dim();
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto z = table.code(i);
    out.push(table.ids()[i], std::span<const float>(z.data(), static_cast<std::size_t>(z.size())));
  }
  return out;
}

using EpochCallback = std::function<void(const Checkpoint&, const std::vector<LossRecord>&)>;

inline TrainResult train(const Dataset& data, const TrainConfig& cfg, const Checkpoint* resume = nullptr,
                         const EpochCallback& on_epoch = {}) {
  cfg.validate();
  const std::size_t threads = cfg.threads ? cfg.threads : default_thread_count();
  const PreparedData prep = prepare_training_data(data, cfg);
  SamplingParams params = cfg.sampling;
  params.sigma = prep.sigma;
  params.seed = cfg.seed;

  Architecture arch;
  arch.pe_width = prep.encoding.width();
  arch.latent_dim = cfg.latent_dim;
  arch.hidden = cfg.hidden;
  arch.alpha = cfg.alpha;

  std::vector<std::string> ids;
  for (const GeoEntity& e : prep.entities) ids.push_back(e.id());

  TrainResult result;
  Checkpoint& ck = result.checkpoint;
  ck.mode = cfg.mode;
  ck.encoding = prep.encoding;
  ck.loss = cfg.loss;
  ck.domain = prep.domain;
  ck.sigma = prep.sigma;
  AutoDecoder<float> ad;
  if (resume) {
    if (resume->mode != cfg.mode)
      throw FormatError(std::string("checkpoint mode is ") + to_string(resume->mode) + ", training mode is " +
                        to_string(cfg.mode));
    if (!(resume->mlp.arch == arch) || resume->latents.ids() != ids || !resume->optimizer)
      throw FormatError("checkpoint does not match this dataset and configuration");
    ad.mlp = resume->mlp;
    ad.latents = resume->latents;
    ad.optimizer = *resume->optimizer;
    ck.epochs_completed = resume->epochs_completed;
  } else {
    ad = init_autodecoder<float>(arch, ids, cfg.loss.sigma_z, cfg.seed);
    ad.optimizer.lr_network = cfg.lr_network;
    ad.optimizer.lr_latent = cfg.lr_latent;
  }

  GradientEngine<float> engine(threads);
  SamplePool pool;
  bool have_pool = false;
  MatrixX<float> batch_features(arch.pe_width, 0);
  std::vector<float> batch_targets;
  std::vector<std::uint32_t> batch_entity;

  auto snapshot = [&] {
    ck.mlp = ad.mlp;
    ck.latents = ad.latents;
    ck.optimizer = ad.optimizer;
  };

  for (int epoch = static_cast<int>(ck.epochs_completed); epoch < cfg.epochs; ++epoch) {
    if (!have_pool || cfg.resample_each_epoch) {
      SamplingParams ep = params;
      if (cfg.resample_each_epoch) ep.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch));
      pool = build_sample_pool(prep, ep, threads);
      have_pool = true;
    }
    Rng shuffle = make_rng(cfg.seed, "shuffle-" + std::to_string(epoch));
    const std::vector<std::size_t> order = permutation(pool.size(), shuffle);
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      batch_features.resize(arch.pe_width, static_cast<Eigen::Index>(len));
      batch_targets.resize(len);
      batch_entity.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t s = order[start + i];
        batch_features.col(static_cast<Eigen::Index>(i)) = pool.features.col(static_cast<Eigen::Index>(s));
        batch_targets[i] = pool.targets[s];
        batch_entity[i] = pool.entity[s];
      }
      const Gradients<float> g = engine.compute(ad.mlp, ad.latents,
                                                BatchView<float>{batch_features, batch_targets, batch_entity}, cfg.loss);
      const double loss = g.objective / static_cast<double>(len);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", batch " << batch_index;
        throw NumericError(msg.str());
      }
      result.history.push_back({epoch, batch_index, loss});
      adam_step(ad.mlp, ad.latents, g, ad.optimizer);
    }
    ck.epochs_completed = static_cast<std::uint32_t>(epoch + 1);
    if (on_epoch && ((epoch + 1) % cfg.checkpoint_every == 0 || epoch + 1 == cfg.epochs)) {
      snapshot();
      on_epoch(ck, result.history);
    }
  }
  snapshot();
  result.embeddings = embeddings_from(ad.latents, cfg.mode);
  return result;
}

// Constant unit-norm shape vector for every point entity.
inline EmbeddingSet embed_points(const Dataset& data, int dim) {
  if (dim < 1) throw DataError("embedding dimension must be >= 1");
  EmbeddingSet out;
  out.kind = EmbeddingKind::Shape;
  out.dim = dim;
  const std::vector<float> v(static_cast<std::size_t>(dim), static_cast<float>(1.0 / std::sqrt(static_cast<double>(dim))));
  for (const GeoEntity& e : data.entities())
    if (e.kind() == EntityKind::Point) out.push(e.id(), v);
  return out;
}

// Shape embeddings for every entity of data in dataset order: learned codes
// for non-points, the uniform vector for points.
inline EmbeddingSet complete_shape_embeddings(const Dataset& data, const EmbeddingSet& learned) {
  const EmbeddingSet points = embed_points(data, learned.dim);
  EmbeddingSet out;
  out.kind = EmbeddingKind::Shape;
  out.dim = learned.dim;
  std::size_t p = 0;
  for (const GeoEntity& e : data.entities()) {
    if (e.kind() == EntityKind::Point) out.push(e.id(), points.row(p++));
    else out.push(e.id(), learned.row(learned.index_of(e.id())));
  }
  return out;
}

// Per id: [location, shape].
inline EmbeddingSet combine(const EmbeddingSet& loc, const EmbeddingSet& shp) {
  if (loc.size() != shp.size()) throw DataError("location and shape embeddings cover different entities");
  std::unordered_map<std::string, std::size_t> shp_index;
  for (std::size_t i = 0; i < shp.size(); ++i) shp_index.emplace(shp.ids[i], i);
  EmbeddingSet out;
  out.kind = EmbeddingKind::Combined;
  out.dim = loc.dim + shp.dim;
  std::vector<float> row(static_cast<std::size_t>(out.dim));
  for (std::size_t i = 0; i < loc.size(); ++i) {
    auto it = shp_index.find(loc.ids[i]);
    if (it == shp_index.end()) throw DataError("no shape embedding for id '" + loc.ids[i] + "'");
    const auto a = loc.row(i);
    const auto b = shp.row(it->second);
    std::copy(a.begin(), a.end(), row.begin());
    std::copy(b.begin(), b.end(), row.begin() + loc.dim);
    out.push(loc.ids[i], row);
  }
  return out;
}

// Predicted field on a res x res grid over domain (checkpoint domain by
// default), row-major from the min corner.
inline std::vector<double> reconstruct_field(const Checkpoint& ck, const std::string& id, int resolution,
                                             std::optional<BBox> domain = std::nullopt) {
  if (!ck.latents.contains(id)) throw DataError("unknown entity id '" + id + "'");
  const std::vector<Coord> grid = grid_points(domain.value_or(ck.domain), resolution);
  const PositionalEncoder enc(ck.encoding);
  const auto z = ck.latents.code(ck.latents.index_of(id));
  MatrixX<float> cond(ck.mlp.arch.cond_width(), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto col = cond.col(static_cast<Eigen::Index>(i));
    enc.encode(grid[i], std::span<float>(col.data(), static_cast<std::size_t>(enc.width())));
    col.tail(z.size()) = z;
  }
  const VectorX<float> out = forward_batch(ck.mlp, cond);
  return std::vector<double>(out.data(), out.data() + out.size());
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCheckpointMagic = "G2V1";
inline constexpr std::string_view kEmbeddingMagic = "G2VE";
inline constexpr std::uint8_t kEmbeddingVersion = 1;

namespace detail {

template <class M>
void write_tensor(BinaryWriter& w, const M& m) {
  // Row-major element order.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.f32(m(i, j));
}

template <class M>
void read_tensor(BinaryReader& r, M& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.f32();
}

}  // namespace detail

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  BinaryWriter w;
  w.bytes(kCheckpointMagic);
  w.u8(static_cast<std::uint8_t>(ck.mode));
  w.f64(ck.encoding.l_min);
  w.f64(ck.encoding.l_max);
  w.u32(static_cast<std::uint32_t>(ck.encoding.count));
  w.u8(ck.encoding.rotation_invariant ? 1 : 0);
  w.u8(ck.loss.clamp ? 1 : 0);
  w.f64(ck.loss.clamp.value_or(0.0));
  w.f64(ck.loss.gamma);
  w.f64(ck.loss.sigma_z);
  const Architecture& a = ck.mlp.arch;
  w.f64(a.alpha);
  w.u32(static_cast<std::uint32_t>(a.pe_width));
  w.u32(static_cast<std::uint32_t>(a.latent_dim));
  w.u32(static_cast<std::uint32_t>(a.hidden.size()));
  for (int h : a.hidden) w.u32(static_cast<std::uint32_t>(h));
  w.f64(ck.domain.min.x);
  w.f64(ck.domain.min.y);
  w.f64(ck.domain.max.x);
  w.f64(ck.domain.max.y);
  w.f64(ck.sigma);
  for (std::size_t k = 0; k < ck.mlp.weights.size(); ++k) {
    detail::write_tensor(w, ck.mlp.weights[k]);
    detail::write_tensor(w, ck.mlp.biases[k]);
  }
  const auto& codes = ck.latents.codes();
  w.u32(static_cast<std::uint32_t>(ck.latents.size()));
  w.u32(static_cast<std::uint32_t>(ck.latents.dim()));
  for (const std::string& id : ck.latents.ids()) w.str(id);
  detail::write_tensor(w, MatrixX<float>(codes.transpose()));
  w.u32(ck.epochs_completed);
  w.u8(ck.optimizer ? 1 : 0);
  if (ck.optimizer) {
    const AdamState<float>& s = *ck.optimizer;
    w.u64(s.step);
    w.f64(s.lr_network);
    w.f64(s.lr_latent);
    w.f64(s.beta1);
    w.f64(s.beta2);
    w.f64(s.epsilon);
    for (std::size_t k = 0; k < s.m_weights.size(); ++k) {
      detail::write_tensor(w, s.m_weights[k]);
      detail::write_tensor(w, s.v_weights[k]);
      detail::write_tensor(w, s.m_biases[k]);
      detail::write_tensor(w, s.v_biases[k]);
    }
    detail::write_tensor(w, MatrixX<float>(s.m_latent.transpose()));
    detail::write_tensor(w, MatrixX<float>(s.v_latent.transpose()));
  }
  return w.data();
}

inline Checkpoint deserialize_checkpoint(std::string_view bytes, std::optional<Mode> expected = std::nullopt) {
  BinaryReader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != kCheckpointMagic) throw FormatError("not a checkpoint (bad magic)");
  Checkpoint ck;
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw FormatError("unknown mode tag " + std::to_string(mode));
  ck.mode = static_cast<Mode>(mode);
  if (expected && *expected != ck.mode)
    throw FormatError(std::string("checkpoint mode is ") + to_string(ck.mode) + ", expected " + to_string(*expected));
  ck.encoding.l_min = r.f64();
  ck.encoding.l_max = r.f64();
  ck.encoding.count = static_cast<int>(r.u32());
  ck.encoding.rotation_invariant = r.u8() != 0;
  ck.encoding.mode = ck.mode;
  const bool clamped = r.u8() != 0;
  const double clamp = r.f64();
  ck.loss.clamp = clamped ? std::optional<double>(clamp) : std::nullopt;
  ck.loss.gamma = r.f64();
  ck.loss.sigma_z = r.f64();
  Architecture a;
  a.alpha = r.f64();
  a.pe_width = static_cast<int>(r.u32());
  a.latent_dim = static_cast<int>(r.u32());
  const std::uint32_t layers = r.u32();
  if (layers > 1024) throw FormatError("implausible layer count");
  a.hidden.clear();
  for (std::uint32_t i = 0; i < layers; ++i) a.hidden.push_back(static_cast<int>(r.u32()));
  try {
    a.validate();
    ck.encoding.validate();
  } catch (const DataError& e) {
    throw FormatError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (a.pe_width != ck.encoding.width()) throw FormatError("encoding width does not match network input");
  ck.domain.min.x = r.f64();
  ck.domain.min.y = r.f64();
  ck.domain.max.x = r.f64();
  ck.domain.max.y = r.f64();
  ck.sigma = r.f64();
  ck.mlp = MlpParams<float>::zeros(a);
  for (std::size_t k = 0; k < ck.mlp.weights.size(); ++k) {
    detail::read_tensor(r, ck.mlp.weights[k]);
    detail::read_tensor(r, ck.mlp.biases[k]);
  }
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  if (static_cast<int>(dim) != a.latent_dim) throw FormatError("latent dimension mismatch");
  std::vector<std::string> ids;
  for (std::uint32_t i = 0; i < count; ++i) ids.push_back(r.str());
  ck.latents = LatentTable<float>(std::move(ids), static_cast<int>(dim));
  MatrixX<float> codes(count, dim);
  detail::read_tensor(r, codes);
  ck.latents.codes() = codes.transpose();
  ck.epochs_completed = r.u32();
  if (r.u8() != 0) {
    AdamState<float> s = AdamState<float>::zeros_like(ck.mlp, ck.latents);
    s.step = r.u64();
    s.lr_network = r.f64();
    s.lr_latent = r.f64();
    s.beta1 = r.f64();
    s.beta2 = r.f64();
    s.epsilon = r.f64();
    for (std::size_t k = 0; k < s.m_weights.size(); ++k) {
      detail::read_tensor(r, s.m_weights[k]);
      detail::read_tensor(r, s.v_weights[k]);
      detail::read_tensor(r, s.m_biases[k]);
      detail::read_tensor(r, s.v_biases[k]);
    }
    MatrixX<float> m(count, dim), v(count, dim);
    detail::read_tensor(r, m);
    detail::read_tensor(r, v);
    s.m_latent = m.transpose();
    s.v_latent = v.transpose();
    ck.optimizer = std::move(s);
  }
  if (!r.at_end()) throw FormatError("trailing bytes after checkpoint");
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) { write_file(path, serialize_checkpoint(ck)); }

inline Checkpoint load_checkpoint(const std::string& path, std::optional<Mode> expected = std::nullopt) {
  return deserialize_checkpoint(read_file(path), expected);
}

inline std::string serialize_embeddings(const EmbeddingSet& set) {
  BinaryWriter w;
  w.bytes(kEmbeddingMagic);
  w.u8(kEmbeddingVersion);
  w.u32(static_cast<std::uint32_t>(set.size()));
  w.u32(static_cast<std::uint32_t>(set.dim));
  for (std::size_t i = 0; i < set.size(); ++i) {
    w.str(set.ids[i]);
    for (float v : set.row(i)) w.f32(v);
  }
  return w.data();
}

inline EmbeddingSet deserialize_embeddings(std::string_view bytes) {
  BinaryReader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != kEmbeddingMagic) throw FormatError("not an embedding file (bad magic)");
  const std::uint8_t version = r.u8();
  if (version != kEmbeddingVersion) throw FormatError("unsupported embedding file version " + std::to_string(version));
  EmbeddingSet set;
  const std::uint32_t count = r.u32();
  set.dim = static_cast<int>(r.u32());
  std::vector<float> row(static_cast<std::size_t>(set.dim));
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = r.str();
    for (float& v : row) v = r.f32();
    set.push(std::move(id), row);
  }
  if (!r.at_end()) throw FormatError("trailing bytes after embeddings");
  return set;
}

inline void save_embeddings(const std::string& path, const EmbeddingSet& set) {
  write_file(path, serialize_embeddings(set));
}

inline EmbeddingSet load_embeddings(const std::string& path) { return deserialize_embeddings(read_file(path)); }

inline std::string loss_history_csv(const std::vector<LossRecord>& history) {
  std::ostringstream out;
  out.precision(9);
  out << "epoch,batch,loss\n";
  for (const LossRecord& r : history) out << r.epoch << ',' << r.batch << ',' << r.loss << '\n';
  return out.str();
}

}  // namespace geo2vec
