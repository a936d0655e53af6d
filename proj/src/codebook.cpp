#include "beamsweep/codebook.hpp"

#include <algorithm>
#include <cmath>

namespace beamsweep {

double pointing_angle(int level, int index, Interval theta_range) {
  if (level < 1) throw std::invalid_argument("pointing_angle: level must be >= 1");
  if (index < 1 || index > (1 << level)) {
    throw std::invalid_argument("pointing_angle: index out of range for level");
  }
  const double span = theta_range.width();
  return theta_range.lo + span * (2.0 * index - 1.0) / static_cast<double>(1 << (level + 1));
}

const Eigen::VectorXcd& HierarchicalCodebook::vector(Vertex v) const {
  return vectors_.at(v.level - 1).at(v.index - 1);
}

Interval HierarchicalCodebook::region(Vertex v) const {
  const double width = theta_range_.width() / static_cast<double>(1 << v.level);
  return {theta_range_.lo + (v.index - 1) * width, theta_range_.lo + v.index * width};
}

HierarchicalCodebook build_codebook(int h_levels, Interval theta_range,
                                    const ArrayConfig& array_cfg, int design_grid_points,
                                    double gain) {
  if (h_levels < 1) throw std::invalid_argument("build_codebook: h_levels must be >= 1");
  if (theta_range.width() <= 0.0) {
    throw std::invalid_argument("build_codebook: empty theta range");
  }
  const int leaves = 1 << h_levels;
  if (design_grid_points == 0) design_grid_points = std::max(1024, 4 * leaves);
  if (design_grid_points < 4 * leaves) {
    throw std::invalid_argument("build_codebook: design grid needs at least 4 * 2^H points");
  }

  HierarchicalCodebook cb;
  cb.h_levels_ = h_levels;
  cb.theta_range_ = theta_range;
  cb.gain_ = gain;
  cb.array_cfg_ = array_cfg;

  const double span = theta_range.width();
  std::vector<double> grid(design_grid_points);
  std::vector<Eigen::VectorXcd> responses(design_grid_points);
  for (int g = 0; g < design_grid_points; ++g) {
    grid[g] = theta_range.lo + (g + 0.5) * span / design_grid_points;
    responses[g] = steering_vector(grid[g], array_cfg);
  }

  cb.vectors_.resize(h_levels);
  for (int h = 1; h <= h_levels; ++h) {
    const int n = 1 << h;
    cb.vectors_[h - 1].resize(n);
    for (int i = 1; i <= n; ++i) {
      Interval region = cb.region({h, i});
      Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(array_cfg.m_antennas);
      int hits = 0;
      for (int g = 0; g < design_grid_points; ++g) {
        const bool inside =
            grid[g] >= region.lo && (grid[g] < region.hi || (i == n && grid[g] <= region.hi));
        if (inside) {
          sum += responses[g];
          ++hits;
        }
      }
      if (hits == 0) throw std::runtime_error("build_codebook: design grid too coarse");
      cb.vectors_[h - 1][i - 1] = sum / sum.norm();
    }
  }
  return cb;
}

RewardProfile::RewardProfile(std::vector<std::vector<double>> values, double sigma2)
    : values_(std::move(values)), sigma2_(sigma2) {
  gaps_.resize(values_.size());
  best_.resize(values_.size());
  for (size_t lv = 0; lv < values_.size(); ++lv) {
    const auto& f = values_[lv];
    int best = 0;
    for (size_t i = 1; i < f.size(); ++i) {
      if (f[i] > f[best]) best = static_cast<int>(i);
    }
    best_[lv] = best + 1;
    double second = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < f.size(); ++i) {
      if (static_cast<int>(i) != best) second = std::max(second, f[i]);
    }
    gaps_[lv].resize(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
      gaps_[lv][i] = (static_cast<int>(i) == best) ? f[best] - second : f[best] - f[i];
    }
    if (f.size() == 1) gaps_[lv][0] = 0.0;  // single-arm level has no rival
  }
}

RewardProfile noiseless_profile(const HierarchicalCodebook& cb, const PathSet& paths,
                                double sigma2) {
  Eigen::VectorXcd h = channel_vector(paths, cb.array_cfg());
  std::vector<std::vector<double>> values(cb.h_levels());
  for (int lv = 1; lv <= cb.h_levels(); ++lv) {
    const int n = 1 << lv;
    values[lv - 1].resize(n);
    for (int i = 1; i <= n; ++i) {
      values[lv - 1][i - 1] = std::norm(cb.vector({lv, i}).dot(h)) + sigma2;
    }
  }
  return RewardProfile(std::move(values), sigma2);
}

AssumptionReport check_assumptions(const RewardProfile& profile, double g_configured) {
  AssumptionReport rep;
  const int levels = profile.h_levels();
  for (int h = 1; h <= levels; ++h) {
    const auto& f = profile.level_values(h);
    const double fmax = profile.best_value(h);
    const double tol = rep.tie_tolerance * std::max(1.0, std::abs(fmax));
    int at_max = 0;
    for (double v : f) {
      if (fmax - v <= tol) ++at_max;
    }
    if (at_max > 1) rep.unique_argmax = false;
  }
  for (int h = 1; h < levels; ++h) {
    const int child_a = 2 * profile.best_index(h) - 1;
    const int child_b = 2 * profile.best_index(h);
    const int next = profile.best_index(h + 1);
    if (next != child_a && next != child_b) rep.unimodal_chain = false;
    if (profile.best_value(h + 1) <= profile.best_value(h)) rep.strictly_monotone = false;
    const double ratio = profile.best_value(h + 1) / profile.best_value(h);
    rep.gain_ratios.push_back(ratio);
    rep.max_gain_deviation =
        std::max(rep.max_gain_deviation, std::abs(ratio - g_configured) / g_configured);
  }
  return rep;
}

std::vector<int> epsilon_optimal_set(const RewardProfile& profile, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon_optimal_set: epsilon must be >= 0");
  const int h = profile.h_levels();
  const double cutoff = profile.best_value(h) - epsilon;
  std::vector<int> out;
  const auto& f = profile.level_values(h);
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] >= cutoff) out.push_back(static_cast<int>(i) + 1);
  }
  return out;
}

double average_rss(const HierarchicalCodebook& cb, Vertex v, int grid_points) {
  if (grid_points < 16) throw std::invalid_argument("average_rss: grid_points must be >= 16");
  const Interval region = cb.region(v);
  const Eigen::VectorXcd& w = cb.vector(v);
  double acc = 0.0;
  for (int g = 0; g < grid_points; ++g) {
    const double theta = region.lo + (g + 0.5) * region.width() / grid_points;
    acc += std::norm(w.dot(steering_vector(theta, cb.array_cfg())));
  }
  return acc / grid_points;
}

std::vector<double> spectral_efficiency_curve(const HierarchicalCodebook& cb, int level,
                                              int index, const std::vector<double>& epsilons,
                                              double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("spectral_efficiency_curve: sigma2 must be > 0");
  const int n = 1 << level;
  if (index < 1 || index > n) {
    throw std::invalid_argument("spectral_efficiency_curve: index out of range");
  }
  std::vector<double> avg(n);
  for (int i = 1; i <= n; ++i) avg[i - 1] = average_rss(cb, {level, i});
  const double best = *std::max_element(avg.begin(), avg.end());
  const double denom = std::log2(1.0 + best / sigma2);
  const double f_here = avg[index - 1];
  std::vector<double> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    const double num = std::max(f_here - eps, 0.0);
    out.push_back(std::log2(1.0 + num / sigma2) / denom);
  }
  return out;
}

}  // namespace beamsweep
