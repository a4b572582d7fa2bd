#include "sbam/synth.hpp"

#include <gtest/gtest.h>

namespace sbam {
namespace {

using synth::SynthConfig;

TEST(Synth, FrameCountAndTimestamps) {
  SynthConfig cfg;
  cfg.n_demos = 2;
  cfg.duration = 5.0;
  cfg.rate = 20.0;
  const auto demos = synth::synth_pour(cfg);
  ASSERT_EQ(demos.size(), 2u);
  ASSERT_EQ(demos[0].frames.size(), 101u);
  EXPECT_DOUBLE_EQ(demos[0].frames.back().timestamp, 5.0);
  EXPECT_EQ(demos[0].ground_truth_keypoints, (std::vector<double>{0.30, 0.45, 0.65, 0.95}));
}

TEST(Synth, SameSeedSameData) {
  SynthConfig cfg;
  cfg.n_demos = 3;
  EXPECT_EQ(synth::synth_pour(cfg), synth::synth_pour(cfg));
  SynthConfig other = cfg;
  other.seed = 2;
  EXPECT_NE(synth::synth_pour(cfg)[0], synth::synth_pour(other)[0]);
  const auto demos = synth::synth_pour(cfg);
  EXPECT_NE(demos[0], demos[1]);
}

TEST(Synth, NoiseHasTheRequestedSpread) {
  SynthConfig noisy, clean;
  noisy.n_demos = clean.n_demos = 1;
  clean.noise_sigma = 0.0;
  const auto a = synth::synth_pour(noisy)[0], b = synth::synth_pour(clean)[0];
  double sum = 0.0, sq = 0.0, rot = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < a.frames.size(); ++f)
    for (std::size_t o = 0; o < a.objects.size(); ++o) {
      const Vec3 d = a.frames[f].poses[o].position - b.frames[f].poses[o].position;
      for (int k = 0; k < 3; ++k) {
        sum += d[k];
        sq += d[k] * d[k];
        ++count;
      }
      rot += rotation_distance(a.frames[f].poses[o], b.frames[f].poses[o]);
    }
  const double n = static_cast<double>(count);
  EXPECT_NEAR(sum / n, 0.0, 0.3);
  EXPECT_NEAR(std::sqrt(sq / n - (sum / n) * (sum / n)), 5.0, 0.2);
  // mean of a chi distribution with 3 degrees of freedom is 2 sqrt(2 / pi) sigma
  const double sigma_r = 5.0 * synth::kRotationNoisePerMm;
  EXPECT_NEAR(rot / (n / 3.0), 2.0 * std::sqrt(2.0 / M_PI) * sigma_r, 0.1 * sigma_r);
}

TEST(Synth, SpoutIsAboveCupWhilePouring) {
  SynthConfig cfg;
  cfg.n_demos = 1;
  cfg.noise_sigma = 0.0;
  const auto d = synth::synth_pour(cfg)[0];
  const std::size_t cup = d.object_index("cup large"), bottle = d.object_index("apple juice");
  for (double s = 0.45; s <= 0.65; s += 0.05) {
    const Vec3 opening = d.pose_at(cup, s).apply(Vec3(0, 0, 60));
    const Vec3 spout = d.pose_at(bottle, s).apply(Vec3(0, 0, 125));
    EXPECT_LT((spout - opening).head<2>().norm(), 1e-6);
    EXPECT_NEAR(spout.z() - opening.z(), 70.0, 1e-6);
  }
  // both objects rest in their start poses outside the action
  EXPECT_LT(translation_distance(d.frames.front().poses[cup], d.frames.back().poses[cup]), 1e-9);
  EXPECT_LT(translation_distance(d.frames.front().poses[bottle], d.frames.back().poses[bottle]), 1e-9);
}

TEST(Synth, RollStrokesBetweenTurnarounds) {
  SynthConfig cfg;
  cfg.n_demos = 1;
  cfg.noise_sigma = 0.0;
  const auto d = synth::synth_roll(cfg)[0];
  const auto truth = synth::roll_ground_truth();
  ASSERT_EQ(truth.size(), 11u);
  const std::size_t pin = d.object_index("rolling pin");
  for (std::size_t k = 0; k < truth.size(); ++k)
    EXPECT_NEAR(d.pose_at(pin, truth[k]).position.x(), k % 2 ? 520.0 : 400.0, 1e-6);
}

TEST(Synth, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.n_demos = 0;
  EXPECT_THROW(synth::synth_pour(cfg), InputError);
  cfg = SynthConfig{};
  cfg.noise_sigma = -1.0;
  EXPECT_THROW(synth::synth_roll(cfg), InputError);
  cfg = SynthConfig{};
  cfg.duration = 0.1;
  EXPECT_THROW(synth::synth_pour(cfg), InputError);
}

}  // namespace
}  // namespace sbam
