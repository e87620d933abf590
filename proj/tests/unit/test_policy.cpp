/*
 Copyright 2026 The Paddle Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <fstream>
#include <random>

#include "paddle/errors.hpp"
#include "paddle/policy/checkpoint.hpp"
#include "paddle/policy/policy.hpp"
#include "test_util.hpp"

namespace paddle::policy {
namespace {

// Value heads of the regression forward pass in FrozenOutput.
constexpr double kFrozenOutput[2] = {-0.089387007057666779, -0.54109358787536621};

PolicySpec tiny_mlp() {
  PolicySpec s;
  s.encoder = EncoderKind::kMlp;
  s.window = 1;
  s.mlp_hidden = {4};
  s.head_hidden = {};
  return s;
}

PolicySpec tiny_attention() {
  PolicySpec s;
  s.encoder = EncoderKind::kAttention;
  s.window = 3;
  s.embed_dim = 4;
  s.heads = 2;
  s.blocks = 1;
  s.ff_dim = 2;
  s.head_hidden = {};
  s.shared_encoder = true;
  return s;
}

template <typename Scalar>
void randomize(ActorCritic<Scalar>& net, std::uint64_t seed, double scale = 0.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  for (Eigen::Index i = 0; i < net.num_params(); ++i) net.params().values()[i] = Scalar(n(rng));
  net.params().mat(net.log_std_block()).setConstant(Scalar(-0.5));
}

Matrix<double> random_inputs(const PolicySpec& s, int batch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix<double> x(s.input_dim(), batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  return x;
}

TEST(LogProb, UnitStdAtMean) {
  ActionDistribution<double> d{Vector<double>::Zero(2), Vector<double>::Ones(2)};
  EXPECT_NEAR(log_prob(d, d.mean), -std::log(2.0 * std::numbers::pi), 1e-14);
  ActionDistribution<double> wide{d.mean, 2.0 * d.std};
  EXPECT_NEAR(log_prob(d, d.mean) - log_prob(wide, d.mean), 2.0 * std::log(2.0), 1e-14);
}

TEST(LogProb, ModeIsMaximal) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  ActionDistribution<double> d{Vector<double>(2), Vector<double>(2)};
  d.mean << 0.3, -0.2;
  d.std << 0.5, 1.5;
  for (int k = 0; k < 100; ++k) {
    Vector<double> a(2);
    a << n(rng), n(rng);
    EXPECT_LE(log_prob(d, a), log_prob(d, d.mean));
    EXPECT_TRUE(std::isfinite(log_prob(d, a)));
  }
}

TEST(Policy, ZeroActionHeadGivesZeroMean) {
  for (const auto& spec : {tiny_mlp(), tiny_attention()}) {
    ActorCritic<double> net(spec, 3);
    randomize(net, 3);
    for (const auto& b : net.params().blocks()) {
      if (b.name.rfind("actor.head", 0) == 0) net.params().values().segment(b.offset, b.size()).setZero();
    }
    const auto out = net.forward(random_inputs(spec, 5, 4));
    EXPECT_TRUE(out.mean.isZero(0));
  }
}

TEST(Policy, PureFunctionOfInput) {
  const auto spec = tiny_attention();
  ActorCritic<double> net(spec, 5);
  randomize(net, 5);
  Matrix<double> x = random_inputs(spec, 1, 6);
  Matrix<double> xx(spec.input_dim(), 2);
  xx << x, x;
  const auto a = net.forward(xx);
  EXPECT_EQ(a.mean.col(0), a.mean.col(1));
  EXPECT_EQ(a.value_r(0), a.value_r(1));
  const auto b = net.forward(x);
  EXPECT_EQ(b.mean.col(0), a.mean.col(0));
}

TEST(Policy, LogStdBounded) {
  auto spec = tiny_mlp();
  ActorCritic<double> net(spec, 1);
  net.params().mat(net.log_std_block())(0, 0) = 9.0;
  net.params().mat(net.log_std_block())(1, 0) = -9.0;
  const auto out = net.forward(random_inputs(spec, 1, 1));
  EXPECT_EQ(out.log_std[0], spec.log_std_max);
  EXPECT_EQ(out.log_std[1], spec.log_std_min);
}

TEST(Policy, NonFiniteInputRejected) {
  const auto spec = tiny_mlp();
  ActorCritic<double> net(spec, 1);
  auto x = random_inputs(spec, 1, 1);
  x(0, 0) = std::nan("");
  EXPECT_THROW(net.forward(x), std::invalid_argument);
}

TEST(Policy, FrozenOutput) {
  PolicySpec spec;  // default attention encoder
  spec.window = 4;
  ActorCritic<float> net(spec, 42);
  std::vector<cmdp::Observation> hist(4);
  for (int t = 0; t < 4; ++t) {
    hist[t].joint_angles = spec.features.neutral + cmdp::JointVector(0.05 * t, -0.03 * t);
    hist[t].joint_velocities = {0.2 * t, -0.1};
    hist[t].sensed_forces = {0.01 * t, -0.02, 0.001};
  }
  const auto x = encode_window<float>(spec, hist, 3);
  const auto out = net.forward(x);
  // the action mean starts at zero; the value heads carry the signal
  EXPECT_EQ(out.mean.norm(), 0.0f);
  EXPECT_NEAR(out.value_r(0), kFrozenOutput[0], 1e-6);
  EXPECT_NEAR(out.value_c(0), kFrozenOutput[1], 1e-6);
  EXPECT_NEAR(out.log_std(0), spec.init_log_std, 1e-7);
}

TEST(Policy, EveryWindowSlotMatters) {
  for (auto spec : {tiny_mlp(), tiny_attention()}) {
    spec.window = 5;
    ActorCritic<double> net(spec, 8);
    randomize(net, 8);
    const auto x = random_inputs(spec, 1, 9);
    const auto base = net.forward(x);
    const int od = spec.obs_dim();
    for (int k = 0; k < spec.window; ++k) {
      auto y = x;
      y.block(k * od, 0, od, 1).array() += 0.3;
      const auto out = net.forward(y);
      const double diff = (out.mean - base.mean).norm() + std::abs(out.value_r(0) - base.value_r(0));
      EXPECT_GT(diff, 1e-9) << "slot " << k;
    }
  }
}

// loss = sum_j w_j logp_j + u_j V_r,j + v_j V_c,j
double probe_loss(const ActorCritic<double>& net, const Matrix<double>& x, const Matrix<double>& a,
                  const RowVector<double>& w, const RowVector<double>& u, const RowVector<double>& v) {
  const auto out = net.forward(x);
  const auto lp = batch_log_prob<double>(out.mean, out.log_std, a);
  return (lp.array() * w.array()).sum() + (out.value_r.array() * u.array()).sum() +
         (out.value_c.array() * v.array()).sum();
}

void gradient_check(const PolicySpec& spec, std::uint64_t seed) {
  ActorCritic<double> net(spec, seed);
  ASSERT_LE(net.num_params(), 200);
  randomize(net, seed);
  const int B = 6;
  const auto x = random_inputs(spec, B, seed + 1);
  std::mt19937_64 rng(seed + 2);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix<double> a(spec.act_dim, B);
  RowVector<double> w(B), u(B), v(B);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
  for (int j = 0; j < B; ++j) {
    w[j] = n(rng);
    u[j] = n(rng);
    v[j] = n(rng);
  }
  typename ActorCritic<double>::Tape tape;
  const auto out = net.forward(x, &tape);
  typename ActorCritic<double>::OutputGrad g;
  const Vector<double> inv_var = (-2.0 * out.log_std.array()).exp();
  g.mean = ((a - out.mean).array().colwise() * inv_var.array()).matrix() * w.transpose().asDiagonal();
  g.log_std = Vector<double>::Zero(spec.act_dim);
  for (int j = 0; j < B; ++j) {
    const Vector<double> z2 = ((a.col(j) - out.mean.col(j)).array().square() * inv_var.array()).matrix();
    g.log_std += w[j] * (z2.array() - 1.0).matrix();
  }
  g.value_r = u;
  g.value_c = v;
  Vector<double> grad = net.params().zeros();
  net.backward(tape, g, grad);

  // entries whose true gradient is ~0 are judged against a 1e-5 floor
  const double h = 1e-5;
  double worst = 0.0, wfd = 0.0, wg = 0.0;
  Eigen::Index where = -1;
  for (Eigen::Index i = 0; i < net.num_params(); ++i) {
    auto p = net;
    p.params().values()[i] += h;
    const double lp = probe_loss(p, x, a, w, u, v);
    p.params().values()[i] -= 2 * h;
    const double lm = probe_loss(p, x, a, w, u, v);
    const double fd = (lp - lm) / (2 * h);
    const double e = std::abs(fd - grad[i]) / std::max(1e-5, std::abs(fd) + std::abs(grad[i]));
    if (e > worst) {
      worst = e;
      where = i;
      wfd = fd;
      wg = grad[i];
    }
  }
  EXPECT_LT(worst, 1e-4) << "param " << where << " fd " << wfd << " analytic " << wg;
}

TEST(PolicyGradient, MlpMatchesFiniteDifferences) {
  for (std::uint64_t s : {1u, 2u, 3u}) gradient_check(tiny_mlp(), s);
}

TEST(PolicyGradient, AttentionMatchesFiniteDifferences) {
  for (std::uint64_t s : {4u, 5u, 6u}) gradient_check(tiny_attention(), s);
}

TEST(PolicyGradient, SharedMlpEncoderMatchesFiniteDifferences) {
  auto spec = tiny_mlp();
  spec.shared_encoder = true;
  spec.window = 2;
  spec.mlp_hidden = {5, 3};
  spec.head_hidden = {3};
  gradient_check(spec, 7);
}

TEST(Checkpoint, RoundTripExact) {
  testing::TempDir dir("ckpt");
  PolicySpec spec = tiny_attention();
  ActorCritic<float> net(spec, 11);
  auto ck = make_checkpoint(net, "fp1");
  ck.put("lagrange/state", {0.5f, 1.0f, -0.25f});
  save_checkpoint(dir / "a.ckpt", ck);
  const auto back = load_checkpoint(dir / "a.ckpt", std::string("fp1"));
  const auto net2 = policy_from_checkpoint<float>(back);
  EXPECT_EQ(net2.params().values(), net.params().values());
  EXPECT_EQ(back.spec.to_json(), spec.to_json());
  ASSERT_NE(back.find("lagrange/state"), nullptr);
  EXPECT_EQ(back.find("lagrange/state")->data, (std::vector<float>{0.5f, 1.0f, -0.25f}));
  EXPECT_EQ(checkpoint_to_bytes(back), checkpoint_to_bytes(ck));
}

TEST(Checkpoint, TruncatedFileFails) {
  testing::TempDir dir("ckpt");
  ActorCritic<float> net(tiny_mlp(), 1);
  const auto bytes = checkpoint_to_bytes(make_checkpoint(net, "fp"));
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, bytes.size() / 2, bytes.size() - 1}) {
    std::ofstream(dir / "t.ckpt", std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(cut));
    EXPECT_THROW(load_checkpoint(dir / "t.ckpt"), IoError) << cut;
  }
}

TEST(Checkpoint, VersionMismatchFails) {
  ActorCritic<float> net(tiny_mlp(), 1);
  auto bytes = checkpoint_to_bytes(make_checkpoint(net, "fp"));
  bytes[8] = static_cast<char>(kCheckpointVersion + 1);
  EXPECT_THROW(checkpoint_from_bytes(bytes), IoError);
}

TEST(Checkpoint, FingerprintMismatch) {
  testing::TempDir dir("ckpt");
  ActorCritic<float> net(tiny_mlp(), 1);
  save_checkpoint(dir / "c.ckpt", make_checkpoint(net, "one"));
  EXPECT_THROW(load_checkpoint(dir / "c.ckpt", std::string("two")), ConfigError);
  const auto forced = load_checkpoint(dir / "c.ckpt", std::string("two"), true);
  ASSERT_EQ(forced.warnings.size(), 1u);
  EXPECT_EQ(policy_from_checkpoint<float>(forced).params().values(), net.params().values());
}

}  // namespace
}  // namespace paddle::policy
