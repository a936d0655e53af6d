#pragma once

#include <optional>
#include <vector>

#include "beamsweep/codebook.hpp"
#include "beamsweep/common.hpp"
#include "beamsweep/sse.hpp"

namespace beamsweep {

// Effective gap: max{(Delta + eps_h)/4, eps_h/2}, or max{Delta, eps_h/2} in
// the legacy Hoeffding-mode definition.
double delta_eps(double delta_gap, double eps_h, bool legacy = false);

// Principal branch W_0 on [-1/e, inf).
double lambert_w0(double x);
// Lower branch W_{-1} on [-1/e, 0).
double lambert_wm1(double x);

struct ArmHardness {
  Vertex vertex;
  double delta_eps = 0.0;
  double variance = 0.0;  // nu^2 = sigma^4 + 2 sigma^2 zeta
  double term = 0.0;      // per-arm sample-bound coefficient
};

struct LevelHardness {
  int level = 0;
  double h_eps = 0.0;  // sum of per-arm terms over the contender set
  std::vector<ArmHardness> arms;
};

struct HardnessTerms {
  std::vector<LevelHardness> per_level;
};

// Per-arm and per-level hardness for the given contender sets, using the
// profile's true means and gaps.
HardnessTerms hardness(const RewardProfile& profile,
                       const std::vector<std::pair<int, std::vector<Vertex>>>& contenders,
                       const SseConfig& cfg, bool legacy = false);

// Sample-count bound for one arm after T_h level samples: term * beta(T_h - 1)
// + 2.
double per_arm_bound(double term, long long t_h, double delta, int n_total);

struct PredictedSamples {
  bool bounded = false;
  long long value = 0;
};

// Closed-form level sample count: the largest T consistent with the per-level
// sum of per-arm bounds, via the lower Lambert branch.
PredictedSamples predicted_level_samples(double h_eps, int s_size, double delta, int n_total);

struct LevelPrediction {
  int level = 0;
  int s_size = 0;
  double h_eps = 0.0;
  long long t_bar = 0;
};

struct ComplexityPrediction {
  std::vector<LevelPrediction> per_level;
  double total = 0.0;
  double theorem2_total = 0.0;
  bool bounded = true;
};

// Prediction for one fixed scenario: contender sets follow the oracle descent
// of the profile's per-level maxima.
ComplexityPrediction predict_for_profile(const RewardProfile& profile, const SseConfig& cfg);

struct ExpectedComplexity {
  double mean_total = 0.0;
  double mean_theorem2 = 0.0;
  std::vector<LevelPrediction> per_level;  // t_bar/h_eps hold rounded means
  int samples = 0;
  int excluded = 0;
  bool exclusion_warning = false;
};

// Monte Carlo estimate of E_{theta1}[sum_h T_bar_h] over a uniform dominant
// AoA, single path.
ExpectedComplexity expected_total_complexity(const PruningVector& pruning,
                                             const HierarchicalCodebook& cb, const SseConfig& cfg,
                                             double sigma2, int theta_samples, Rng& rng);

struct PruningCandidate {
  int p_dec = 0;
  int n_arms = 0;
  double mean_total = 0.0;
  int excluded = 0;
};

struct PruningSweep {
  PruningVector best;
  std::vector<PruningCandidate> table;
};

// Exhaustive sweep over all 2^(H-1) pruning vectors with common random
// numbers; ties break toward smaller N_H, then smaller p_dec.
PruningSweep optimize_pruning(const HierarchicalCodebook& cb, const SseConfig& cfg,
                              double sigma2, int theta_samples, Rng& rng);

// Legacy efficiency metric: leaves eliminated per sample at level h.
double efficiency(int level, int h_levels, double t_bar);

}  // namespace beamsweep
