#pragma once

// Auto-decoder network: an MLP conditioned at every layer on
// c = [pe(x), z_E], a per-entity latent table, exact reverse-mode gradients of
// the summed SDF loss plus the latent prior, and Adam.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geo2vec/error.hpp"
#include "geo2vec/parallel.hpp"
#include "geo2vec/random.hpp"
#include "geo2vec/sampling.hpp"

namespace geo2vec {

struct Architecture {
  int pe_width = 48;
  int latent_dim = 64;
  std::vector<int> hidden{256, 256, 256, 256};
  double alpha = 0.01;  // LeakyReLU negative slope

  int cond_width() const { return pe_width + latent_dim; }
  int layer_count() const { return static_cast<int>(hidden.size()) + 1; }
  int layer_inputs(int k) const { return k == 0 ? cond_width() : hidden[static_cast<std::size_t>(k - 1)] + cond_width(); }
  int layer_outputs(int k) const {
    return k + 1 == layer_count() ? 1 : hidden[static_cast<std::size_t>(k)];
  }

  void validate() const {
    if (pe_width < 0 || latent_dim < 1) throw DataError("architecture needs latent_dim >= 1");
    for (int h : hidden)
      if (h < 1) throw DataError("hidden widths must be positive");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw DataError("LeakyReLU slope must be in [0, 1)");
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct LossConfig {
  std::optional<double> clamp = 0.1;
  double gamma = 1e-4;
  double sigma_z = 0.1;

  void validate() const {
    if (clamp && !(*clamp > 0.0)) throw DataError("loss clamp must be > 0");
    if (!(gamma >= 0.0)) throw DataError("gamma must be >= 0");
    if (!(sigma_z > 0.0)) throw DataError("sigma_z must be > 0");
  }

  double prior_weight() const { return gamma / (sigma_z * sigma_z); }

  static LossConfig for_mode(Mode mode) {
    if (mode == Mode::Shape) return {0.1, 1e-4, 0.1};
    return {std::nullopt, 0.0, 0.1};
  }
};

// Clamped L1 when cfg.clamp is set, plain L1 otherwise.
inline double sdf_loss(double predicted, double target, const LossConfig& cfg) {
  if (cfg.clamp) {
    const double d = *cfg.clamp;
    return std::abs(std::clamp(predicted, -d, d) - std::clamp(target, -d, d));
  }
  return std::abs(predicted - target);
}

// d loss / d predicted. Zero at the L1 kink and outside the clamp band.
inline double sdf_loss_derivative(double predicted, double target, const LossConfig& cfg) {
  double diff = predicted - target;
  if (cfg.clamp) {
    const double d = *cfg.clamp;
    if (!(std::abs(predicted) < d)) return 0.0;
    diff = predicted - std::clamp(target, -d, d);
  }
  return static_cast<double>((diff > 0.0) - (diff < 0.0));
}

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct MlpParams {
  Architecture arch;
  std::vector<MatrixX<Scalar>> weights;  // layer k: outputs x inputs, inputs ordered [h_k, c]
  std::vector<VectorX<Scalar>> biases;

  static MlpParams zeros(const Architecture& arch) {
    arch.validate();
    MlpParams p{arch, {}, {}};
    for (int k = 0; k < arch.layer_count(); ++k) {
      p.weights.push_back(MatrixX<Scalar>::Zero(arch.layer_outputs(k), arch.layer_inputs(k)));
      p.biases.push_back(VectorX<Scalar>::Zero(arch.layer_outputs(k)));
    }
    return p;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) n += weights[k].size() + biases[k].size();
    return n;
  }
};

template <class Scalar>
class LatentTable {
 public:
  LatentTable() = default;
  LatentTable(std::vector<std::string> ids, int dim) : ids_(std::move(ids)), codes_(MatrixX<Scalar>::Zero(dim, 0)) {
    if (dim < 1) throw DataError("latent dimension must be >= 1");
    codes_.resize(dim, static_cast<Eigen::Index>(ids_.size()));
    codes_.setZero();
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], i).second) throw DataError("duplicate latent id '" + ids_[i] + "'");
    }
  }

  int dim() const { return static_cast<int>(codes_.rows()); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("unknown entity id '" + id + "'");
    return it->second;
  }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  MatrixX<Scalar>& codes() { return codes_; }
  const MatrixX<Scalar>& codes() const { return codes_; }
  auto code(std::size_t i) { return codes_.col(static_cast<Eigen::Index>(i)); }
  auto code(std::size_t i) const { return codes_.col(static_cast<Eigen::Index>(i)); }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  MatrixX<Scalar> codes_;
};

template <class Scalar>
struct AdamState {
  double lr_network = 1e-4;
  double lr_latent = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<MatrixX<Scalar>> m_weights, v_weights;
  std::vector<VectorX<Scalar>> m_biases, v_biases;
  MatrixX<Scalar> m_latent, v_latent;

  static AdamState zeros_like(const MlpParams<Scalar>& p, const LatentTable<Scalar>& t) {
    AdamState s;
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
      s.m_weights.push_back(MatrixX<Scalar>::Zero(p.weights[k].rows(), p.weights[k].cols()));
      s.v_weights.push_back(MatrixX<Scalar>::Zero(p.weights[k].rows(), p.weights[k].cols()));
      s.m_biases.push_back(VectorX<Scalar>::Zero(p.biases[k].size()));
      s.v_biases.push_back(VectorX<Scalar>::Zero(p.biases[k].size()));
    }
    s.m_latent = MatrixX<Scalar>::Zero(t.codes().rows(), t.codes().cols());
    s.v_latent = MatrixX<Scalar>::Zero(t.codes().rows(), t.codes().cols());
    return s;
  }
};

template <class Scalar>
struct AutoDecoder {
  MlpParams<Scalar> mlp;
  LatentTable<Scalar> latents;
  AdamState<Scalar> optimizer;
};

inline constexpr double kOutputInitScale = 0.01;

// Weights and biases ~ U(-b, b) with b = 1/sqrt(fan_in) (scaled down on the
// output layer); latents ~ N(0, sigma_z^2).
template <class Scalar>
AutoDecoder<Scalar> init_autodecoder(const Architecture& arch, std::vector<std::string> ids, double sigma_z,
                                     std::uint64_t seed) {
  if (!(sigma_z > 0.0)) throw DataError("sigma_z must be > 0");
  AutoDecoder<Scalar> ad{MlpParams<Scalar>::zeros(arch), LatentTable<Scalar>(std::move(ids), arch.latent_dim), {}};
  Rng rng = make_rng(seed, "init_network");
  for (std::size_t k = 0; k < ad.mlp.weights.size(); ++k) {
    // The output layer starts small so early predictions sit inside the
    // clamp band, where the clamped loss has a gradient.
    const double scale = k + 1 == ad.mlp.weights.size() ? kOutputInitScale : 1.0;
    const double bound = scale / std::sqrt(static_cast<double>(ad.mlp.weights[k].cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < ad.mlp.weights[k].cols(); ++j)
      for (Eigen::Index i = 0; i < ad.mlp.weights[k].rows(); ++i) ad.mlp.weights[k](i, j) = static_cast<Scalar>(u(rng));
    for (Eigen::Index i = 0; i < ad.mlp.biases[k].size(); ++i) ad.mlp.biases[k](i) = static_cast<Scalar>(u(rng));
  }
  Rng zrng = make_rng(seed, "init_latents");
  std::normal_distribution<double> gauss(0.0, sigma_z);
  auto& codes = ad.latents.codes();
  for (Eigen::Index j = 0; j < codes.cols(); ++j)
    for (Eigen::Index i = 0; i < codes.rows(); ++i) codes(i, j) = static_cast<Scalar>(gauss(zrng));
  ad.optimizer = AdamState<Scalar>::zeros_like(ad.mlp, ad.latents);
  return ad;
}

namespace detail {

template <class Derived>
void leaky_relu_inplace(Eigen::MatrixBase<Derived>& a, typename Derived::Scalar alpha) {
  a = a.unaryExpr([alpha](auto v) { return v > 0 ? v : alpha * v; });
}

}  // namespace detail

// Batched forward pass. cond holds one conditioning column [pe; z] per sample.
// Pre-activations are kept in pre (when given) for the backward pass.
template <class Scalar>
VectorX<Scalar> forward_batch(const MlpParams<Scalar>& p, const MatrixX<Scalar>& cond,
                              std::vector<MatrixX<Scalar>>* pre = nullptr,
                              std::vector<MatrixX<Scalar>>* act = nullptr) {
  const Architecture& arch = p.arch;
  const int cw = arch.cond_width();
  if (cond.rows() != cw) throw DataError("conditioning width mismatch");
  const Scalar alpha = static_cast<Scalar>(arch.alpha);
  const int layers = arch.layer_count();
  if (pre) pre->resize(static_cast<std::size_t>(layers));
  if (act) act->resize(static_cast<std::size_t>(layers));
  MatrixX<Scalar> h;
  for (int k = 0; k < layers; ++k) {
    const auto& w = p.weights[static_cast<std::size_t>(k)];
    MatrixX<Scalar> a;
    if (k == 0) {
      a.noalias() = w * cond;
    } else {
      const Eigen::Index hw = h.rows();
      a.noalias() = w.leftCols(hw) * h;
      a.noalias() += w.rightCols(cw) * cond;
    }
    a.colwise() += p.biases[static_cast<std::size_t>(k)];
    if (k + 1 == layers) return a.row(0).transpose();
    if (pre) (*pre)[static_cast<std::size_t>(k)] = a;
    detail::leaky_relu_inplace(a, alpha);
    h = std::move(a);
    if (act) (*act)[static_cast<std::size_t>(k)] = h;
  }
  return {};
}

// Single prediction s = G(z, pe(x)).
template <class Scalar>
Scalar forward(const MlpParams<Scalar>& p, std::span<const Scalar> z, std::span<const Scalar> features) {
  if (static_cast<int>(features.size()) != p.arch.pe_width || static_cast<int>(z.size()) != p.arch.latent_dim)
    throw DataError("feature or latent width mismatch");
  MatrixX<Scalar> cond(p.arch.cond_width(), 1);
  for (std::size_t i = 0; i < features.size(); ++i) cond(static_cast<Eigen::Index>(i), 0) = features[i];
  for (std::size_t i = 0; i < z.size(); ++i) cond(static_cast<Eigen::Index>(features.size() + i), 0) = z[i];
  return forward_batch(p, cond)(0);
}

template <class Scalar>
struct Gradients {
  std::vector<MatrixX<Scalar>> weights;
  std::vector<VectorX<Scalar>> biases;
  std::vector<std::size_t> touched;  // latent indices, ascending
  MatrixX<Scalar> latent;            // one column per touched entry
  double objective = 0.0;            // summed loss + latent prior over the batch
  double data_loss = 0.0;

  static Gradients zeros_like(const MlpParams<Scalar>& p) {
    Gradients g;
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
      g.weights.push_back(MatrixX<Scalar>::Zero(p.weights[k].rows(), p.weights[k].cols()));
      g.biases.push_back(VectorX<Scalar>::Zero(p.biases[k].size()));
    }
    return g;
  }
};

// A mini-batch: column i of features is pe(x_i); entity[i] indexes the latent table.
template <class Scalar>
struct BatchView {
  Eigen::Ref<const MatrixX<Scalar>> features;
  std::span<const Scalar> targets;
  std::span<const std::uint32_t> entity;
};

inline constexpr Eigen::Index kGradientChunk = 128;

// Reusable buffers for batch_gradients. Work is split into fixed-size chunks
// reduced in chunk order, so results are bitwise independent of thread count.
template <class Scalar>
class GradientEngine {
 public:
  explicit GradientEngine(std::size_t threads = 1) : threads_(std::max<std::size_t>(1, threads)) {}

  Gradients<Scalar> compute(const MlpParams<Scalar>& p, const LatentTable<Scalar>& table, const BatchView<Scalar>& batch,
                            const LossConfig& loss) {
    const Eigen::Index n = batch.features.cols();
    if (n == 0) throw DataError("empty batch");
    if (batch.features.rows() != p.arch.pe_width) throw DataError("feature width mismatch");
    if (static_cast<Eigen::Index>(batch.targets.size()) != n || static_cast<Eigen::Index>(batch.entity.size()) != n)
      throw DataError("batch size mismatch");
    const Eigen::Index chunks = (n + kGradientChunk - 1) / kGradientChunk;
    while (static_cast<Eigen::Index>(parts_.size()) < chunks) parts_.emplace_back();
    dz_.resize(p.arch.latent_dim, n);
    losses_.resize(static_cast<std::size_t>(n));

    parallel_for(static_cast<std::size_t>(chunks), threads_, [&](std::size_t c) {
      const Eigen::Index begin = static_cast<Eigen::Index>(c) * kGradientChunk;
      const Eigen::Index len = std::min(kGradientChunk, n - begin);
      chunk(p, table, batch, loss, begin, len, parts_[c]);
    });

    Gradients<Scalar> g = std::move(parts_[0].grads);
    for (Eigen::Index c = 1; c < chunks; ++c) {
      for (std::size_t k = 0; k < g.weights.size(); ++k) {
        g.weights[k] += parts_[static_cast<std::size_t>(c)].grads.weights[k];
        g.biases[k] += parts_[static_cast<std::size_t>(c)].grads.biases[k];
      }
    }
    parts_[0].grads = Gradients<Scalar>{};

    // Per-entity latent gradients in sample order.
    std::vector<std::size_t> order(batch.entity.begin(), batch.entity.end());
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    g.touched = order;
    g.latent = MatrixX<Scalar>::Zero(p.arch.latent_dim, static_cast<Eigen::Index>(order.size()));
    std::vector<std::size_t> slot(table.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) slot[order[i]] = i;
    double data_loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      g.latent.col(static_cast<Eigen::Index>(slot[batch.entity[static_cast<std::size_t>(i)]])) += dz_.col(i);
      data_loss += losses_[static_cast<std::size_t>(i)];
    }
    const double w = loss.prior_weight();
    double prior = 0.0;
    if (w > 0.0) {
      for (std::size_t i = 0; i < order.size(); ++i) {
        const auto z = table.code(order[i]);
        prior += w * static_cast<double>(z.squaredNorm());
        g.latent.col(static_cast<Eigen::Index>(i)) += static_cast<Scalar>(2.0 * w) * z;
      }
    }
    g.data_loss = data_loss;
    g.objective = data_loss + prior;
    return g;
  }

 private:
  struct Part {
    Gradients<Scalar> grads;
    MatrixX<Scalar> cond;
    std::vector<MatrixX<Scalar>> pre, act;
  };

  void chunk(const MlpParams<Scalar>& p, const LatentTable<Scalar>& table, const BatchView<Scalar>& batch,
             const LossConfig& loss, Eigen::Index begin, Eigen::Index len, Part& part) {
    const Architecture& arch = p.arch;
    const int cw = arch.cond_width(), pw = arch.pe_width, d = arch.latent_dim;
    part.cond.resize(cw, len);
    part.cond.topRows(pw) = batch.features.middleCols(begin, len);
    for (Eigen::Index i = 0; i < len; ++i)
      part.cond.col(i).tail(d) = table.code(batch.entity[static_cast<std::size_t>(begin + i)]);
    const VectorX<Scalar> out = forward_batch(p, part.cond, &part.pre, &part.act);

    MatrixX<Scalar> delta(1, len);
    for (Eigen::Index i = 0; i < len; ++i) {
      const double pred = static_cast<double>(out(i));
      const double target = static_cast<double>(batch.targets[static_cast<std::size_t>(begin + i)]);
      losses_[static_cast<std::size_t>(begin + i)] = sdf_loss(pred, target, loss);
      delta(0, i) = static_cast<Scalar>(sdf_loss_derivative(pred, target, loss));
    }

    if (part.grads.weights.size() != p.weights.size()) part.grads = Gradients<Scalar>::zeros_like(p);
    const Scalar alpha = static_cast<Scalar>(arch.alpha);
    MatrixX<Scalar> dcond_latent = MatrixX<Scalar>::Zero(d, len);
    for (int k = arch.layer_count() - 1; k >= 0; --k) {
      const auto ks = static_cast<std::size_t>(k);
      const auto& w = p.weights[ks];
      auto& gw = part.grads.weights[ks];
      part.grads.biases[ks] = delta.rowwise().sum().transpose();
      if (k == 0) {
        gw.noalias() = delta * part.cond.transpose();
      } else {
        const auto& h = part.act[ks - 1];
        gw.leftCols(h.rows()).noalias() = delta * h.transpose();
        gw.rightCols(cw).noalias() = delta * part.cond.transpose();
      }
      dcond_latent.noalias() += w.rightCols(d).transpose() * delta;
      if (k == 0) break;
      const auto& a = part.pre[ks - 1];
      MatrixX<Scalar> dh = w.leftCols(a.rows()).transpose() * delta;
      delta = dh.cwiseProduct(a.unaryExpr([alpha](Scalar v) { return v > 0 ? Scalar(1) : alpha; }));
    }
    dz_.middleCols(begin, len) = dcond_latent;
  }

  std::size_t threads_;
  std::vector<Part> parts_;
  MatrixX<Scalar> dz_;
  std::vector<double> losses_;
};

// Exact gradients of sum_i loss(G(z_{E_i}, x_i), s_i) + gamma/sigma_z^2 * sum_E ||z_E||^2,
// the prior counted once per entity present in the batch.
template <class Scalar>
Gradients<Scalar> batch_gradients(const MlpParams<Scalar>& p, const LatentTable<Scalar>& table,
                                  const BatchView<Scalar>& batch, const LossConfig& loss, std::size_t threads = 1) {
  GradientEngine<Scalar> engine(threads);
  return engine.compute(p, table, batch, loss);
}

namespace detail {

template <class P, class G, class M>
void adam_update(P& param, const G& grad, M& m, M& v, double lr, const AdamState<typename P::Scalar>& s, double bc1,
                 double bc2) {
  using S = typename P::Scalar;
  const S b1 = static_cast<S>(s.beta1), b2 = static_cast<S>(s.beta2);
  m = b1 * m + (S(1) - b1) * grad;
  v = b2 * v + (S(1) - b2) * grad.cwiseProduct(grad);
  const S step = static_cast<S>(lr / bc1);
  const S vs = static_cast<S>(1.0 / std::sqrt(bc2));
  const S eps = static_cast<S>(s.epsilon);
  param.array() -= step * m.array() / ((v.array().sqrt() * vs) + eps);
}

}  // namespace detail

// Adam with bias correction; the network is updated densely, latents only in
// the columns the batch touched.
template <class Scalar>
void adam_step(MlpParams<Scalar>& p, LatentTable<Scalar>& table, const Gradients<Scalar>& g, AdamState<Scalar>& s) {
  s.step += 1;
  const double t = static_cast<double>(s.step);
  const double bc1 = 1.0 - std::pow(s.beta1, t);
  const double bc2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t k = 0; k < p.weights.size(); ++k) {
    detail::adam_update(p.weights[k], g.weights[k], s.m_weights[k], s.v_weights[k], s.lr_network, s, bc1, bc2);
    detail::adam_update(p.biases[k], g.biases[k], s.m_biases[k], s.v_biases[k], s.lr_network, s, bc1, bc2);
  }
  for (std::size_t i = 0; i < g.touched.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(g.touched[i]);
    VectorX<Scalar> z = table.codes().col(col);
    VectorX<Scalar> m = s.m_latent.col(col), v = s.v_latent.col(col);
    const VectorX<Scalar> grad = g.latent.col(static_cast<Eigen::Index>(i));
    detail::adam_update(z, grad, m, v, s.lr_latent, s, bc1, bc2);
    table.codes().col(col) = z;
    s.m_latent.col(col) = m;
    s.v_latent.col(col) = v;
  }
}

}  // namespace geo2vec
