#pragma once

#include <Eigen/Dense>
#include <vector>

#include "beamsweep/array_model.hpp"
#include "beamsweep/common.hpp"

namespace beamsweep {

// Steered direction of beam (h, i): the midpoint of its angular region.
double pointing_angle(int level, int index, Interval theta_range);

// Binary tree of 2(2^H - 1) unit-norm beamforming vectors. Each vector is
// the normalized sum of steering vectors over the design-grid angles that
// fall inside its region; regions come from recursive bisection of
// theta_range.
class HierarchicalCodebook {
 public:
  HierarchicalCodebook() = default;

  int h_levels() const { return h_levels_; }
  Interval theta_range() const { return theta_range_; }
  double gain() const { return gain_; }
  void set_gain(double g) { gain_ = g; }
  const ArrayConfig& array_cfg() const { return array_cfg_; }
  int leaf_count() const { return 1 << h_levels_; }
  int total_vectors() const { return 2 * ((1 << h_levels_) - 1); }

  const Eigen::VectorXcd& vector(Vertex v) const;
  Interval region(Vertex v) const;
  double pointing(Vertex v) const { return pointing_angle(v.level, v.index, theta_range_); }

  friend HierarchicalCodebook build_codebook(int h_levels, Interval theta_range,
                                             const ArrayConfig& array_cfg,
                                             int design_grid_points, double gain);

 private:
  int h_levels_ = 0;
  Interval theta_range_;
  double gain_ = 1.0;
  ArrayConfig array_cfg_;
  std::vector<std::vector<Eigen::VectorXcd>> vectors_;  // [h-1][i-1]
};

// design_grid_points = 0 picks max(1024, 4 * 2^H) midpoint angles over the
// full range. gain is the configured per-level gain g (> 1), carried for the
// algorithms; the realized gain of the construction is measured separately.
HierarchicalCodebook build_codebook(int h_levels, Interval theta_range,
                                    const ArrayConfig& array_cfg, int design_grid_points = 0,
                                    double gain = 1.5848931924611136);

// Noiseless mean rewards f = |w^H h|^2 + sigma2 for every vertex, with
// per-level argmaxes and gaps.
class RewardProfile {
 public:
  RewardProfile() = default;
  RewardProfile(std::vector<std::vector<double>> values, double sigma2);

  int h_levels() const { return static_cast<int>(values_.size()); }
  double sigma2() const { return sigma2_; }
  double value(Vertex v) const { return values_[v.level - 1][v.index - 1]; }
  double gap(Vertex v) const { return gaps_[v.level - 1][v.index - 1]; }
  int best_index(int level) const { return best_[level - 1]; }
  double best_value(int level) const { return values_[level - 1][best_[level - 1] - 1]; }
  const std::vector<double>& level_values(int level) const { return values_[level - 1]; }

 private:
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> gaps_;
  std::vector<int> best_;
  double sigma2_ = 0.0;
};

RewardProfile noiseless_profile(const HierarchicalCodebook& cb, const PathSet& paths,
                                double sigma2);

struct AssumptionReport {
  bool unique_argmax = true;       // per-level argmax unique within tolerance
  bool unimodal_chain = true;      // maxima form a root-to-leaf path
  bool strictly_monotone = true;   // f*_1 < ... < f*_H
  std::vector<double> gain_ratios; // f*_{h+1} / f*_h
  double max_gain_deviation = 0.0; // max |ratio - g| / g
  double tie_tolerance = 1e-9;
};

AssumptionReport check_assumptions(const RewardProfile& profile, double g_configured);

// Leaf indices whose mean reward is within epsilon of the best leaf.
std::vector<int> epsilon_optimal_set(const RewardProfile& profile, double epsilon);

// Midpoint-rule mean of |w^H a(theta)|^2 over the vertex's region.
double average_rss(const HierarchicalCodebook& cb, Vertex v, int grid_points = 1024);

// Relative spectral efficiency of beam (level, index) against the level's
// best average-RSS beam, for each epsilon. Negative numerator arguments are
// clamped at zero.
std::vector<double> spectral_efficiency_curve(const HierarchicalCodebook& cb, int level,
                                              int index, const std::vector<double>& epsilons,
                                              double sigma2);

}  // namespace beamsweep
