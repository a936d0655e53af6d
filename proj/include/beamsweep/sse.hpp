#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "beamsweep/codebook.hpp"
#include "beamsweep/common.hpp"

namespace beamsweep {

// Per-level play flags p_1..p_H; p_H is always 1. The decimal form reads
// p_1..p_{H-1} as a binary number, most-significant bit first.
class PruningVector {
 public:
  PruningVector() = default;

  static PruningVector from_dec(int p_dec, int h_levels);
  static PruningVector from_bits(const std::string& bits);  // e.g. "0001111"

  int h_levels() const { return static_cast<int>(bits_.size()); }
  bool plays(int level) const { return bits_.at(level - 1) != 0; }
  int dec() const;
  std::string bit_string() const;

 private:
  std::vector<std::uint8_t> bits_;
};

// Played levels and their contender-set sizes for a pruning vector;
// skipped levels double the set carried into the next played level.
std::vector<std::pair<int, int>> played_level_sizes(const PruningVector& p);
int total_arms(const PruningVector& p);  // N_H

enum class ConfidenceMode { kEmpiricalVariance, kFixedVariance };

struct SseConfig {
  PruningVector pruning;
  double b_param = 0.1;
  double c_param = 0.1;
  double epsilon = 7.0;
  double delta = 0.01;
  double gain = 1.5848931924611136;  // 2 dB per level
  int h_levels = 7;
  ConfidenceMode confidence_mode = ConfidenceMode::kEmpiricalVariance;
  double fv_alpha = 4.0;
  double fv_alpha1 = 1.25;
  long long max_level_samples = 1'000'000;
  bool check_invariants = true;
};

// Running statistics of one arm. Bounds are recomputed whenever the arm is
// updated, from the level time counter at that moment.
struct ArmStats {
  long long n = 0;
  double mean = 0.0;
  double var = 0.0;  // biased (1/N) sample variance
  double ucb = std::numeric_limits<double>::infinity();
  double lcb = -std::numeric_limits<double>::infinity();
  double radius = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  double m2 = 0.0;  // sum of squared deviations
};

struct LevelGame {
  int level = 0;
  std::vector<Vertex> contenders;
  std::vector<ArmStats> stats;
  long long t = 0;
  int gamma_idx = -1;  // position in contenders
  int u_idx = -1;
  double eps_level = 0.0;
  int n_total = 0;  // N_H of the enclosing run
};

struct LevelResult {
  int level = 0;
  long long samples = 0;
  Vertex winner;
  long long ops = 0;
};

struct SseOutcome {
  int chosen_leaf = 0;
  std::vector<LevelResult> per_level;
  long long total_samples = 0;
  bool budget_exhausted = false;
  long long op_count = 0;
  long long choice_invariant_violations = 0;
};

// Reward draw for a vertex currently in contention.
using RewardSource = std::function<double(Vertex)>;

// Called after every sample. running_choice is the active level's gamma once
// defined, otherwise the last committed winner; committed is the winner of
// the most recently terminated level.
struct StepInfo {
  long long global_t = 0;
  int level = 0;
  long long level_t = 0;
  Vertex sampled;
  double reward = 0.0;
  std::optional<Vertex> running_choice;
  std::optional<Vertex> committed;
  double mean = 0.0;
  double var = 0.0;
  double radius = 0.0;
  double ucb = 0.0;
  double lcb = 0.0;
  double gap_gamma = 0.0;
  int gamma_index = -1;  // codebook index, -1 before first selection
  int u_index = -1;
};
using StepObserver = std::function<void(const StepInfo&)>;

double epsilon_at_level(double epsilon, double gain, int h_levels, int level);

std::vector<Vertex> expand_contenders(const std::vector<Vertex>& prev_winners);

// beta(t, delta) = ln(15 N_H t^4 / (4 delta))
double exploration_rate(long long t, double delta, int n_total);

double confidence_radius(const ArmStats& stats, long long t, const SseConfig& cfg, int n_total,
                         OpCounter* ops = nullptr);

void update_arm(ArmStats& stats, double y, long long t, const SseConfig& cfg, int n_total,
                OpCounter* ops = nullptr);

// Computes every contender's gap and returns (gamma, u) positions.
std::pair<int, int> select_indices(LevelGame& game, const SseConfig& cfg,
                                   OpCounter* ops = nullptr);

// The one of {gamma, u} with the larger confidence radius; ties go to gamma.
int choose_arm(const LevelGame& game, OpCounter* ops = nullptr);

struct RunLevelResult {
  Vertex winner;
  long long samples = 0;
  bool budget_exhausted = false;
  long long choice_invariant_violations = 0;
};

RunLevelResult run_level(LevelGame& game, const RewardSource& source, const SseConfig& cfg,
                         OpCounter* ops = nullptr, const StepObserver* observer = nullptr,
                         long long global_t_offset = 0,
                         std::optional<Vertex> committed = std::nullopt);

SseOutcome run_sse(const SseConfig& cfg, const HierarchicalCodebook& cb,
                   const ChannelScenario& scenario, Rng& rng,
                   const StepObserver* observer = nullptr);

// Test/analysis entry point: rewards come from an arbitrary source instead of
// the channel model.
SseOutcome run_sse_with_source(const SseConfig& cfg, const RewardSource& source,
                               const StepObserver* observer = nullptr);

}  // namespace beamsweep
