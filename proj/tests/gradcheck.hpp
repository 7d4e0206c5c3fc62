#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "geo2vec/autodecoder.hpp"

namespace geo2vec::test_support {

struct GradProblem {
  AutoDecoder<double> ad;
  MatrixX<double> features;
  std::vector<double> targets;
  std::vector<std::uint32_t> entity;
  LossConfig loss;
};

// Random small network, batch and loss drawn from seed.
inline GradProblem random_grad_problem(std::uint64_t seed) {
  Rng rng = make_rng(seed, "gradcheck");
  std::uniform_int_distribution<int> layers(1, 3), width(2, 9), pe_w(0, 6), lat(1, 4), ents(1, 4), batch(1, 300);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Architecture arch;
  arch.pe_width = pe_w(rng);
  arch.latent_dim = lat(rng);
  arch.hidden.clear();
  for (int i = layers(rng); i > 0; --i) arch.hidden.push_back(width(rng));
  arch.alpha = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
  std::vector<std::string> ids;
  for (int i = ents(rng); i > 0; --i) ids.push_back("e" + std::to_string(i));
  GradProblem g{init_autodecoder<double>(arch, ids, 0.5, seed), {}, {}, {}, {}};
  // Full-scale output weights so predictions spread across the clamp band.
  g.ad.mlp.weights.back() *= 1.0 / kOutputInitScale;
  const int n = batch(rng);
  g.features.resize(arch.pe_width, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < arch.pe_width; ++i) g.features(i, j) = u(rng);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(ids.size() - 1));
  for (int j = 0; j < n; ++j) {
    g.targets.push_back(0.3 * u(rng));
    g.entity.push_back(pick(rng));
  }
  g.loss.clamp = std::bernoulli_distribution(0.5)(rng) ? std::optional<double>(0.1) : std::nullopt;
  g.loss.gamma = std::bernoulli_distribution(0.5)(rng) ? 1e-2 : 0.0;
  g.loss.sigma_z = 0.5;
  return g;
}

// Objective evaluated independently of the backward pass.
inline double reference_objective(const GradProblem& g) {
  const Eigen::Index n = g.features.cols();
  MatrixX<double> cond(g.ad.mlp.arch.cond_width(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    cond.col(j).head(g.features.rows()) = g.features.col(j);
    cond.col(j).tail(g.ad.mlp.arch.latent_dim) = g.ad.latents.code(g.entity[static_cast<std::size_t>(j)]);
  }
  const VectorX<double> pred = forward_batch(g.ad.mlp, cond);
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) total += sdf_loss(pred(j), g.targets[static_cast<std::size_t>(j)], g.loss);
  std::set<std::uint32_t> seen(g.entity.begin(), g.entity.end());
  for (std::uint32_t e : seen) total += g.loss.prior_weight() * g.ad.latents.code(e).squaredNorm();
  return total;
}

// ||numeric - analytic|| / max(||numeric||, ||analytic||) over every parameter
// and every latent entry, by central differences. A small step keeps the
// stencil from straddling L1 and LeakyReLU kinks.
inline double gradient_relative_error(GradProblem& g, double h = 1e-6) {
  GradientEngine<double> engine(1);
  const Gradients<double> an =
      engine.compute(g.ad.mlp, g.ad.latents, BatchView<double>{g.features, g.targets, g.entity}, g.loss);
  std::vector<double> numeric, analytic;
  auto probe = [&](double& x, double a) {
    const double saved = x;
    x = saved + h;
    const double up = reference_objective(g);
    x = saved - h;
    const double down = reference_objective(g);
    x = saved;
    numeric.push_back((up - down) / (2 * h));
    analytic.push_back(a);
  };
  for (std::size_t k = 0; k < g.ad.mlp.weights.size(); ++k) {
    auto& w = g.ad.mlp.weights[k];
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) probe(w(i, j), an.weights[k](i, j));
    auto& b = g.ad.mlp.biases[k];
    for (Eigen::Index i = 0; i < b.size(); ++i) probe(b(i), an.biases[k](i));
  }
  auto& codes = g.ad.latents.codes();
  for (Eigen::Index e = 0; e < codes.cols(); ++e) {
    const auto it = std::find(an.touched.begin(), an.touched.end(), static_cast<std::size_t>(e));
    for (Eigen::Index i = 0; i < codes.rows(); ++i) {
      const double a = it == an.touched.end() ? 0.0 : an.latent(i, it - an.touched.begin());
      probe(codes(i, e), a);
    }
  }
  double diff = 0.0, nn = 0.0, na = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    diff += (numeric[i] - analytic[i]) * (numeric[i] - analytic[i]);
    nn += numeric[i] * numeric[i];
    na += analytic[i] * analytic[i];
  }
  const double scale = std::sqrt(std::max(nn, na));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

}  // namespace geo2vec::test_support
