#include <gtest/gtest.h>

#include "geo2vec/autodecoder.hpp"
#include "gradcheck.hpp"

using namespace geo2vec;

TEST(Loss, ClampedAndPlainL1) {
  const LossConfig clamped = LossConfig::for_mode(Mode::Shape);
  EXPECT_DOUBLE_EQ(sdf_loss(0.5, 0.7, clamped), 0.0);
  EXPECT_DOUBLE_EQ(sdf_loss(0.05, 0.7, clamped), 0.05);
  EXPECT_DOUBLE_EQ(sdf_loss_derivative(0.05, 0.7, clamped), -1.0);
  EXPECT_DOUBLE_EQ(sdf_loss_derivative(0.5, -0.7, clamped), 0.0);
  const LossConfig plain = LossConfig::for_mode(Mode::Location);
  EXPECT_FALSE(plain.clamp.has_value());
  EXPECT_DOUBLE_EQ(plain.gamma, 0.0);
  EXPECT_DOUBLE_EQ(sdf_loss(0.5, 0.7, plain), 0.2);
  EXPECT_DOUBLE_EQ(sdf_loss_derivative(0.9, 0.7, plain), 1.0);
}

TEST(Gradients, MatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    test_support::GradProblem g = test_support::random_grad_problem(seed);
    EXPECT_LE(test_support::gradient_relative_error(g), 1e-4) << "seed " << seed;
  }
}

TEST(Gradients, ObjectiveMatchesReference) {
  test_support::GradProblem g = test_support::random_grad_problem(99);
  const auto an = batch_gradients(g.ad.mlp, g.ad.latents, BatchView<double>{g.features, g.targets, g.entity}, g.loss);
  EXPECT_NEAR(an.objective, test_support::reference_objective(g), 1e-10);
}

TEST(Gradients, BitwiseIndependentOfThreadCount) {
  Architecture arch;
  arch.pe_width = 12;
  arch.latent_dim = 8;
  arch.hidden = {32, 32};
  std::vector<std::string> ids{"a", "b", "c"};
  const auto ad = init_autodecoder<float>(arch, ids, 0.1, 5);
  Rng rng = make_rng(5, "batch");
  std::uniform_real_distribution<float> u(-1, 1);
  const int n = 1000;
  MatrixX<float> f(arch.pe_width, n);
  std::vector<float> t(n);
  std::vector<std::uint32_t> e(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < arch.pe_width; ++i) f(i, j) = u(rng);
    t[static_cast<std::size_t>(j)] = 0.1f * u(rng);
    e[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(j % 3);
  }
  const LossConfig loss = LossConfig::for_mode(Mode::Shape);
  const auto g1 = batch_gradients(ad.mlp, ad.latents, BatchView<float>{f, t, e}, loss, 1);
  const auto g4 = batch_gradients(ad.mlp, ad.latents, BatchView<float>{f, t, e}, loss, 4);
  for (std::size_t k = 0; k < g1.weights.size(); ++k) {
    EXPECT_TRUE(g1.weights[k] == g4.weights[k]);
    EXPECT_TRUE(g1.biases[k] == g4.biases[k]);
  }
  EXPECT_TRUE(g1.latent == g4.latent);
  EXPECT_EQ(g1.objective, g4.objective);
}

TEST(Adam, FirstStepMovesBySignedLearningRate) {
  test_support::GradProblem g = test_support::random_grad_problem(3);
  const auto before = g.ad;
  const auto grads =
      batch_gradients(g.ad.mlp, g.ad.latents, BatchView<double>{g.features, g.targets, g.entity}, g.loss);
  AdamState<double> s = AdamState<double>::zeros_like(g.ad.mlp, g.ad.latents);
  s.lr_network = 1e-3;
  s.lr_latent = 1e-2;
  adam_step(g.ad.mlp, g.ad.latents, grads, s);
  for (std::size_t k = 0; k < grads.weights.size(); ++k) {
    const auto& gw = grads.weights[k];
    const MatrixX<double> delta = g.ad.mlp.weights[k] - before.mlp.weights[k];
    for (Eigen::Index j = 0; j < gw.cols(); ++j)
      for (Eigen::Index i = 0; i < gw.rows(); ++i) {
        if (std::abs(gw(i, j)) < 1e-3) continue;
        EXPECT_NEAR(delta(i, j), -1e-3 * (gw(i, j) > 0 ? 1 : -1), 1e-8);
      }
  }
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, UntouchedLatentsStayFixed) {
  Architecture arch;
  arch.pe_width = 4;
  arch.latent_dim = 3;
  arch.hidden = {5};
  auto ad = init_autodecoder<double>(arch, {"a", "b", "c"}, 0.1, 1);
  MatrixX<double> f = MatrixX<double>::Random(4, 10);
  std::vector<double> t(10, 0.05);
  std::vector<std::uint32_t> e(10, 1);
  const MatrixX<double> codes = ad.latents.codes();
  for (int step = 0; step < 5; ++step) {
    const auto g = batch_gradients(ad.mlp, ad.latents, BatchView<double>{f, t, e}, LossConfig::for_mode(Mode::Shape));
    ASSERT_EQ(g.touched, (std::vector<std::size_t>{1}));
    adam_step(ad.mlp, ad.latents, g, ad.optimizer);
  }
  EXPECT_TRUE(ad.latents.codes().col(0) == codes.col(0));
  EXPECT_TRUE(ad.latents.codes().col(2) == codes.col(2));
  EXPECT_FALSE(ad.latents.codes().col(1) == codes.col(1));
}

TEST(AutoDecoderInit, DeterministicAndShaped) {
  Architecture arch;
  arch.pe_width = 6;
  arch.latent_dim = 4;
  arch.hidden = {8, 8};
  const auto a = init_autodecoder<float>(arch, {"x", "y"}, 0.1, 9);
  const auto b = init_autodecoder<float>(arch, {"x", "y"}, 0.1, 9);
  EXPECT_TRUE(a.mlp.weights[1] == b.mlp.weights[1]);
  EXPECT_TRUE(a.latents.codes() == b.latents.codes());
  EXPECT_EQ(a.mlp.weights[0].cols(), 10);
  EXPECT_EQ(a.mlp.weights[1].cols(), 18);
  EXPECT_EQ(a.mlp.weights[2].rows(), 1);
  EXPECT_THROW(init_autodecoder<float>(arch, {"x", "x"}, 0.1, 9), DataError);
  EXPECT_THROW(init_autodecoder<float>(arch, {"x"}, 0.0, 9), DataError);
}

TEST(Forward, SingleMatchesBatch) {
  Architecture arch;
  arch.pe_width = 3;
  arch.latent_dim = 2;
  arch.hidden = {4};
  const auto ad = init_autodecoder<double>(arch, {"a"}, 0.3, 2);
  const std::vector<double> feat{0.1, -0.2, 0.3}, z{ad.latents.code(0)(0), ad.latents.code(0)(1)};
  MatrixX<double> cond(5, 1);
  cond << 0.1, -0.2, 0.3, z[0], z[1];
  EXPECT_DOUBLE_EQ(forward<double>(ad.mlp, z, feat), forward_batch(ad.mlp, cond)(0));
  EXPECT_THROW(forward<double>(ad.mlp, z, std::vector<double>{1.0}), DataError);
}
