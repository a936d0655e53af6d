#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "beamsweep/codebook.hpp"

using namespace beamsweep;

namespace {

const Interval kRange{M_PI / 6.0, 5.0 * M_PI / 6.0};
const double kGain2dB = std::pow(10.0, 0.2);

const HierarchicalCodebook& reference_codebook() {
  static const HierarchicalCodebook cb =
      build_codebook(7, kRange, ArrayConfig{128, 0.5, false}, 0, kGain2dB);
  return cb;
}

PathSet single_path(double theta) {
  PathSet p;
  p.paths.push_back({theta, 1.0, {1.0, 0.0}});
  return p;
}

}  // namespace

TEST_CASE("pointing angles") {
  CHECK(pointing_angle(1, 1, kRange) == doctest::Approx(M_PI / 3.0).epsilon(1e-15));
  CHECK(pointing_angle(1, 2, kRange) == doctest::Approx(2.0 * M_PI / 3.0).epsilon(1e-15));
  CHECK(pointing_angle(2, 3, kRange) == doctest::Approx(7.0 * M_PI / 12.0).epsilon(1e-15));
  CHECK_THROWS_AS(pointing_angle(2, 5, kRange), std::invalid_argument);
  CHECK_THROWS_AS(pointing_angle(2, 0, kRange), std::invalid_argument);
}

TEST_CASE("build_codebook sizes and regions") {
  const auto& cb = reference_codebook();
  CHECK(cb.total_vectors() == 254);
  CHECK(cb.leaf_count() == 128);
  const double leaf_span = (2.0 * M_PI / 3.0) / 128.0;
  for (int i = 1; i <= 128; i += 17) {
    CHECK(cb.region({7, i}).width() == doctest::Approx(leaf_span).epsilon(1e-12));
  }

  auto tiny = build_codebook(1, kRange, ArrayConfig{8, 0.5, false});
  CHECK(tiny.total_vectors() == 2);
  CHECK(tiny.region({1, 1}).lo == kRange.lo);
  CHECK(tiny.region({1, 2}).hi == kRange.hi);
  CHECK(tiny.region({1, 1}).hi == tiny.region({1, 2}).lo);

  CHECK_THROWS_AS(build_codebook(3, kRange, ArrayConfig{8, 0.5, false}, 16), std::invalid_argument);
}

TEST_CASE("regions partition each level and bisect exactly") {
  const auto& cb = reference_codebook();
  for (int h = 1; h <= 7; ++h) {
    double cursor = kRange.lo;
    for (int i = 1; i <= (1 << h); ++i) {
      const Interval r = cb.region({h, i});
      CHECK(r.lo == cursor);
      cursor = r.hi;
    }
    CHECK(cursor == kRange.hi);
  }
  for (int h = 1; h < 7; ++h) {
    for (int i = 1; i <= (1 << h); ++i) {
      const Vertex v{h, i};
      CHECK(cb.region(v).lo == cb.region(v.left_child()).lo);
      CHECK(cb.region(v).hi == cb.region(v.right_child()).hi);
      CHECK(cb.region(v.left_child()).hi == cb.region(v.right_child()).lo);
    }
  }
}

TEST_CASE("beamforming vectors have unit norm") {
  const auto& cb = reference_codebook();
  for (int h = 1; h <= 7; ++h) {
    for (int i = 1; i <= (1 << h); ++i) {
      CHECK(std::abs(cb.vector({h, i}).norm() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("noiseless profile basics") {
  const auto& cb = reference_codebook();
  const double theta = pointing_angle(7, 64, kRange);
  auto profile = noiseless_profile(cb, single_path(theta), 1.0);
  CHECK(profile.best_index(7) == 64);

  // Degenerate channel: zero-power path, zero noise.
  PathSet dead;
  dead.paths.push_back({1.0, 0.0, {1.0, 0.0}});
  auto zero = noiseless_profile(cb, dead, 0.0);
  for (int h = 1; h <= 7; ++h) {
    for (int i = 1; i <= (1 << h); ++i) {
      CHECK(zero.value({h, i}) == doctest::Approx(0.0));
      CHECK(zero.gap({h, i}) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("profile maxima match an exhaustive inner-product scan") {
  auto cb = build_codebook(4, kRange, ArrayConfig{64, 0.5, false});
  Rng rng(17);
  std::uniform_real_distribution<double> aoa(kRange.lo, kRange.hi);
  for (int rep = 0; rep < 10; ++rep) {
    const PathSet paths = single_path(aoa(rng));
    const auto profile = noiseless_profile(cb, paths, 0.3);
    const Eigen::VectorXcd h_vec = channel_vector(paths, cb.array_cfg());
    for (int h = 1; h <= 4; ++h) {
      int best = 1;
      double best_val = -1.0;
      double best_seen = -1.0, second_seen = -1.0;
      for (int i = 1; i <= (1 << h); ++i) {
        const double val = std::norm(cb.vector({h, i}).dot(h_vec)) + 0.3;
        CHECK(profile.value({h, i}) == doctest::Approx(val).epsilon(1e-12));
        if (val > best_val) {
          best_val = val;
          best = i;
        }
        if (val > best_seen) {
          second_seen = best_seen;
          best_seen = val;
        } else if (val > second_seen) {
          second_seen = val;
        }
      }
      CHECK(profile.best_index(h) == best);
      CHECK(profile.gap({h, best}) == doctest::Approx(best_seen - second_seen).epsilon(1e-9));
    }
  }
}

TEST_CASE("gap properties") {
  const auto& cb = reference_codebook();
  const PathSet paths = single_path(1.1);
  const auto profile = noiseless_profile(cb, paths, 1.0);
  for (int h = 1; h <= 7; ++h) {
    for (int i = 1; i <= (1 << h); ++i) CHECK(profile.gap({h, i}) >= 0.0);
  }

  // Scaling all powers leaves argmaxes unchanged when sigma2 = 0.
  PathSet scaled = paths;
  scaled.paths[0].power = 7.5;
  const auto a = noiseless_profile(cb, paths, 0.0);
  const auto b = noiseless_profile(cb, scaled, 0.0);
  for (int h = 1; h <= 7; ++h) CHECK(a.best_index(h) == b.best_index(h));
}

TEST_CASE("check_assumptions on a line-of-sight profile") {
  const auto& cb = reference_codebook();
  const auto profile = noiseless_profile(cb, single_path(pointing_angle(7, 40, kRange)), 1.0);
  const auto rep = check_assumptions(profile, kGain2dB);
  CHECK(rep.unimodal_chain);
  CHECK(rep.unique_argmax);
  CHECK(rep.strictly_monotone);
  CHECK(rep.gain_ratios.size() == 6);
  for (double r : rep.gain_ratios) CHECK(r > 1.0);
}

TEST_CASE("check_assumptions flags a crafted tie") {
  std::vector<std::vector<double>> values = {{2.0, 2.0}, {3.0, 1.0, 3.0, 0.5}};
  RewardProfile crafted(values, 0.0);
  const auto rep = check_assumptions(crafted, 1.5);
  CHECK_FALSE(rep.unique_argmax);
}

TEST_CASE("unimodality holds for most single-path draws") {
  const auto& cb = reference_codebook();
  Rng rng(23);
  std::uniform_real_distribution<double> aoa(kRange.lo, kRange.hi);
  int ok = 0;
  const int draws = 300;
  for (int k = 0; k < draws; ++k) {
    const auto profile = noiseless_profile(cb, single_path(aoa(rng)), 1.0);
    if (check_assumptions(profile, kGain2dB).unimodal_chain) ++ok;
  }
  CHECK(static_cast<double>(ok) / draws >= 0.95);
}

TEST_CASE("epsilon_optimal_set") {
  const auto& cb = reference_codebook();
  const auto profile = noiseless_profile(cb, single_path(pointing_angle(7, 64, kRange)), 1.0);
  auto exact = epsilon_optimal_set(profile, 0.0);
  CHECK(exact == std::vector<int>{64});

  const double spread =
      profile.best_value(7) - *std::min_element(profile.level_values(7).begin(),
                                                profile.level_values(7).end());
  auto all = epsilon_optimal_set(profile, spread + 1.0);
  CHECK(all.size() == 128);

  // AoA midway between two pointing angles puts both straddling leaves in
  // the epsilon-7 set.
  const double mid = 0.5 * (pointing_angle(7, 64, kRange) + pointing_angle(7, 65, kRange));
  const auto straddle = noiseless_profile(cb, single_path(mid), 1.0);
  auto set7 = epsilon_optimal_set(straddle, 7.0);
  CHECK(std::count(set7.begin(), set7.end(), 64) == 1);
  CHECK(std::count(set7.begin(), set7.end(), 65) == 1);

  CHECK_THROWS_AS(epsilon_optimal_set(profile, -1.0), std::invalid_argument);
}

TEST_CASE("average_rss quadrature") {
  const auto& cb = reference_codebook();
  const Vertex leaf{7, 64};
  const double coarse = average_rss(cb, leaf, 1024);
  const double fine = average_rss(cb, leaf, 2048);
  CHECK(coarse == doctest::Approx(fine).epsilon(0.005));

  const Vertex parent{1, 1};
  const double p = average_rss(cb, parent, 2048);
  const double peak = std::norm(
      cb.vector(leaf).dot(steering_vector(cb.pointing(leaf), cb.array_cfg())));
  CHECK(fine < peak);

  // Quadrature additivity: the parent-beam average over its region equals the
  // mean of the same beam averaged over the two child subregions.
  auto beam_avg_over = [&](Vertex beam, Interval span, int grid) {
    double acc = 0.0;
    for (int g = 0; g < grid; ++g) {
      const double theta = span.lo + (g + 0.5) * span.width() / grid;
      acc += std::norm(cb.vector(beam).dot(steering_vector(theta, cb.array_cfg())));
    }
    return acc / grid;
  };
  const double c1 = beam_avg_over(parent, cb.region(parent.left_child()), 1024);
  const double c2 = beam_avg_over(parent, cb.region(parent.right_child()), 1024);
  CHECK(p == doctest::Approx(0.5 * (c1 + c2)).epsilon(0.02));

  CHECK_THROWS_AS(average_rss(cb, leaf, 8), std::invalid_argument);
}

TEST_CASE("spectral efficiency curve") {
  const auto& cb = reference_codebook();
  // Locate the level-7 beam with the best average RSS.
  int best = 1;
  double best_avg = -1.0;
  for (int i = 1; i <= 128; ++i) {
    const double v = average_rss(cb, {7, i}, 256);
    if (v > best_avg) {
      best_avg = v;
      best = i;
    }
  }
  auto at_zero = spectral_efficiency_curve(cb, 7, best, {0.0}, 1.0);
  CHECK(at_zero[0] == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> eps;
  for (int k = 0; k <= 40; ++k) eps.push_back(k * 2.0);
  auto curve = spectral_efficiency_curve(cb, 7, best, eps, 1.0);
  for (size_t k = 1; k < curve.size(); ++k) CHECK(curve[k] <= curve[k - 1] + 1e-12);
  CHECK(curve.back() >= 0.0);  // clamped, never negative

  // 95%-efficiency operating point of this codebook design. The averaged
  // steering construction keeps most beam power inside the region, so the
  // knee sits well above the single-digit range of lossier designs.
  std::vector<double> ladder;
  for (double e = 0.0; e < 60.0; e += 0.05) ladder.push_back(e);
  auto knee = spectral_efficiency_curve(cb, 7, best, ladder, 1.0);
  double eps_star = -1.0;
  for (size_t k = 0; k < knee.size(); ++k) {
    if (knee[k] <= 0.95) {
      eps_star = ladder[k];
      break;
    }
  }
  CHECK(eps_star > 4.0);
  CHECK(eps_star == doctest::Approx(25.0).epsilon(0.25));
}
