#include "sbam/learning.hpp"

#include <gtest/gtest.h>

#include <random>

namespace sbam {
namespace {

std::vector<ObjectDecl> two_objects() {
  return {{"a", {{"top", "a", Vec3(0, 0, 10), Quat::Identity(), Vec3::Zero()},
                 {"bottom", "a", Vec3(0, 0, -10), Quat::Identity(), Vec3::Zero()}}},
          {"b", {{"rim", "b", Vec3(0, 0, 5), Quat::Identity(), Vec3::Zero()}}}};
}

TEST(Learning, UpdateAveragesTimeOfTwoDemonstrations) {
  const GcacotKeypoint kp{0.10, 5.0, 0.0, 1};
  const auto u = update_keypoint(kp, 0.30, 9.0);
  EXPECT_NEAR(u.t, 0.20, 1e-15);
  EXPECT_NEAR(u.mean, 7.0, 1e-15);
  EXPECT_NEAR(u.stddev, 4.0, 1e-15);
  EXPECT_EQ(u.n, 2);
}

TEST(Learning, UpdateThirdDemonstrationByHand) {
  // n = 3, previous mean 7 and std 4, new value 11:
  // mean = 11/3 + 2/3 * 7 = 25/3, std = sqrt(((11 - 7)^2 + 1 * 4^2) / 2) = 4
  const auto u = update_keypoint({0.2, 7.0, 4.0, 2}, 0.5, 11.0);
  EXPECT_NEAR(u.t, 0.3, 1e-15);
  EXPECT_NEAR(u.mean, 25.0 / 3.0, 1e-14);
  EXPECT_NEAR(u.stddev, 4.0, 1e-14);
  EXPECT_EQ(u.n, 3);
}

TEST(Learning, IdenticalDemonstrationsKeepZeroStd) {
  GcacotKeypoint kp{0.4, -12.5, 0.0, 1};
  for (int d = 2; d <= 10; ++d) {
    kp = update_keypoint(kp, 0.4, -12.5);
    EXPECT_EQ(kp.stddev, 0.0);
    EXPECT_EQ(kp.n, d);
  }
  EXPECT_DOUBLE_EQ(kp.t, 0.4);
  EXPECT_DOUBLE_EQ(kp.mean, -12.5);
}

TEST(Learning, IncrementalMeanEqualsBatchMean) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(50.0, 10.0);
  std::vector<double> v{g(rng)};
  GcacotKeypoint kp{0.5, v[0], 0.0, 1};
  for (int d = 0; d < 30; ++d) {
    v.push_back(g(rng));
    kp = update_keypoint(kp, 0.5, v.back());
    EXPECT_GE(kp.stddev, 0.0);
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  EXPECT_NEAR(kp.mean, mean / static_cast<double>(v.size()), 1e-9);
}

TEST(Learning, AngularUpdateFollowsTheShorterArc) {
  const auto u = update_keypoint({0.5, M_PI - 0.1, 0.0, 1}, 0.5, -M_PI + 0.1, true);
  EXPECT_NEAR(std::abs(u.mean), M_PI, 1e-12);
  EXPECT_NEAR(u.stddev, 0.2, 1e-12);
}

TEST(Learning, EnumeratePairs) {
  const auto objs = two_objects();
  const auto all = enumerate_pairs(objs);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].label(), "top of a | bottom of a");
  EXPECT_EQ(enumerate_pairs(objs, false).size(), 2u);
  EXPECT_THROW(find_region(objs, {"a", "rim"}), InputError);
}

TEST(Learning, MatchIdenticalCandidatesOneToOne) {
  Gcacot g;
  g.keypoints = {{0.0, 0.0, 0.0, 1}, {0.3, 10.0, 0.0, 1}, {0.6, -5.0, 0.0, 1}, {1.0, 0.0, 0.0, 1}};
  const std::vector<KeypointCandidate> in{{0.0, 0.0}, {0.3, 10.0}, {0.6, -5.0}, {1.0, 0.0}};
  const auto m = match_candidates(g, in);
  for (std::size_t i = 0; i < in.size(); ++i) EXPECT_EQ(m.assignment[i], i);
  EXPECT_EQ(m.cost, 0.0);
}

TEST(Learning, MatchLeavesExtraCandidateUnmatched) {
  Gcacot g;
  g.keypoints = {{0.0, 0.0, 0.0, 1}, {0.5, 10.0, 0.0, 1}, {1.0, 0.0, 0.0, 1}};
  const std::vector<KeypointCandidate> in{{0.0, 0.0}, {0.2, -8.0}, {0.52, 10.5}, {1.0, 0.0}};
  const auto m = match_candidates(g, in);
  EXPECT_EQ(m.assignment[0], 0u);
  EXPECT_FALSE(m.assignment[1].has_value());
  EXPECT_EQ(m.assignment[2], 1u);
  EXPECT_EQ(m.assignment[3], 2u);
}

TEST(Learning, MatchIsOrderPreserving) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Gcacot g;
    std::vector<KeypointCandidate> in;
    std::vector<double> te{0.0, 1.0}, ti{0.0, 1.0};
    for (int i = 0; i < 4; ++i) te.push_back(u(rng));
    for (int i = 0; i < 5; ++i) ti.push_back(u(rng));
    std::sort(te.begin(), te.end());
    std::sort(ti.begin(), ti.end());
    for (double t : te) g.keypoints.push_back({t, 100 * u(rng), 0.0, 1});
    for (double t : ti) in.push_back({t, 100 * u(rng)});
    const auto m = match_candidates(g, in);
    std::optional<std::size_t> last;
    for (const auto& a : m.assignment) {
      if (!a) continue;
      if (last) {
        EXPECT_GT(*a, *last);
      }
      last = a;
    }
    EXPECT_EQ(m.assignment.front(), 0u);
    EXPECT_EQ(m.assignment.back(), g.keypoints.size() - 1);
  }
}

std::vector<DemoTrack> constant_tracks(const SbamBuilder& b, const std::vector<KeypointCandidate>& c) {
  std::vector<DemoTrack> out;
  for (const auto& g : b.gcacots()) out.push_back({g.pair, g.dim, c});
  return out;
}

TEST(Learning, BuilderWithIdenticalDemonstrations) {
  SbamBuilder b(ConstraintKind::Cartesian, {}, two_objects());
  const std::vector<KeypointCandidate> c{{0.0, 1.0}, {0.3, 4.0}, {0.7, -2.0}, {1.0, 1.0}};
  for (int d = 0; d < 10; ++d) b.ingest_demonstration(constant_tracks(b, c));
  const Sbam m = b.finish();
  EXPECT_EQ(m.demo_count, 10);
  ASSERT_EQ(m.gcacots.size(), 9u);
  for (const auto& g : m.gcacots) {
    ASSERT_EQ(g.keypoints.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_DOUBLE_EQ(g.keypoints[k].t, c[k].t);
      EXPECT_DOUBLE_EQ(g.keypoints[k].mean, c[k].v);
      EXPECT_EQ(g.keypoints[k].stddev, 0.0);
      EXPECT_EQ(g.keypoints[k].n, 10);
    }
  }
  ASSERT_EQ(m.global_keypoints.size(), 4u);
  EXPECT_EQ(m.global_keypoints.front(), 0.0);
  EXPECT_NEAR(m.global_keypoints[1], 0.3, 0.02);
  EXPECT_NEAR(m.global_keypoints[2], 0.7, 0.02);
  EXPECT_EQ(m.global_keypoints.back(), 1.0);
}

TEST(Learning, BuilderSpawnsOrDropsUnmatchedCandidates) {
  const std::vector<KeypointCandidate> base{{0.0, 0.0}, {0.5, 10.0}, {1.0, 0.0}};
  const std::vector<KeypointCandidate> extra{{0.0, 0.0}, {0.2, -9.0}, {0.5, 10.0}, {1.0, 0.0}};
  for (bool spawn : {true, false}) {
    LearningConfig cfg;
    cfg.spawn_unmatched = spawn;
    SbamBuilder b(ConstraintKind::Cartesian, {}, two_objects(), cfg);
    b.ingest_demonstration(constant_tracks(b, base));
    b.ingest_demonstration(constant_tracks(b, extra));
    const auto& g = b.gcacots().front();
    ASSERT_EQ(g.keypoints.size(), spawn ? 4u : 3u);
    if (spawn) {
      EXPECT_EQ(g.keypoints[1], (GcacotKeypoint{0.2, -9.0, 0.0, 1}));
    }
  }
}

TEST(Learning, BuilderRejectsBadTracks) {
  SbamBuilder b(ConstraintKind::Cartesian, {}, two_objects());
  auto tracks = constant_tracks(b, {{0.0, 0.0}, {1.0, 0.0}});
  tracks.push_back(tracks.front());
  EXPECT_THROW(b.ingest_demonstration(tracks), InputError);
  auto unsorted = constant_tracks(b, {{0.5, 0.0}, {0.2, 0.0}});
  EXPECT_THROW(b.ingest_demonstration(unsorted), InputError);
  EXPECT_THROW(SbamBuilder(ConstraintKind::Symbolic, {}, two_objects()), InputError);
}

TEST(Learning, GlobalKeypointsFromWeightedHistogram) {
  Gcacot g;
  g.keypoints = {{0.0, 0, 0, 20}, {0.21, 0, 0, 20}, {0.63, 0, 0, 20}, {0.91, 0, 0, 1}, {1.0, 0, 0, 20}};
  const std::vector<Gcacot> gs{g, g, g};
  const auto h = keypoint_histogram(gs);
  EXPECT_EQ(h.counts[10], 60.0);
  EXPECT_EQ(h.counts[31], 60.0);
  EXPECT_EQ(h.counts[45], 3.0);
  // the lightly supported keypoint at 0.9 stays below the prominence threshold
  ASSERT_EQ(h.times.size(), 4u);
  EXPECT_NEAR(h.times[1], 0.21, 0.02);
  EXPECT_NEAR(h.times[2], 0.63, 0.02);
}

TEST(Learning, GlobalKeypointsWithoutInteriorKeypoints) {
  Gcacot g;
  g.keypoints = {{0.0, 0, 0, 3}, {1.0, 0, 0, 3}};
  const std::vector<Gcacot> gs{g};
  EXPECT_EQ(extract_global_keypoints(gs), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(extract_global_keypoints(std::vector<Gcacot>{}), InputError);
}

TEST(Learning, TargetInterpolatesAndClamps) {
  Gcacot g;
  g.keypoints = {{0.2, 10.0, 1.0, 4}, {0.6, 30.0, 3.0, 4}};
  EXPECT_EQ(target_at(g, 0.0), std::make_pair(10.0, 1.0));
  EXPECT_EQ(target_at(g, 1.0), std::make_pair(30.0, 3.0));
  const auto [m, s] = target_at(g, 0.3);
  EXPECT_NEAR(m, 15.0, 1e-12);
  EXPECT_NEAR(s, 1.5, 1e-12);
}

TEST(Learning, TargetSkipsWeaklySupportedKeypoints) {
  Gcacot g;
  g.keypoints = {{0.0, 0.0, 1.0, 8}, {0.4, 100.0, 0.0, 1}, {1.0, 10.0, 1.0, 8}};
  EXPECT_NEAR(target_at(g, 0.4, 1).first, 100.0, 1e-12);
  EXPECT_NEAR(target_at(g, 0.4, 4).first, 4.0, 1e-12);
  EXPECT_NEAR(target_at(g, 0.4, 99).first, 100.0, 1e-12);  // nothing qualifies: use all
}

TEST(Learning, AngularTargetUsesShorterArc) {
  Gcacot g;
  g.angular = true;
  g.keypoints = {{0.0, M_PI - 0.2, 0.0, 1}, {1.0, -M_PI + 0.2, 0.0, 1}};
  EXPECT_NEAR(std::abs(target_at(g, 0.5).first), M_PI, 1e-12);
}

}  // namespace
}  // namespace sbam
