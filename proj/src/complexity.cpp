#include "beamsweep/complexity.hpp"

#include <algorithm>
#include <cmath>

namespace beamsweep {

double delta_eps(double delta_gap, double eps_h, bool legacy) {
  if (delta_gap < 0.0 || eps_h < 0.0) {
    throw std::invalid_argument("delta_eps: arguments must be nonnegative");
  }
  if (legacy) return std::max(delta_gap, eps_h / 2.0);
  return std::max((delta_gap + eps_h) / 4.0, eps_h / 2.0);
}

namespace {

constexpr double kBranchPoint = -0.36787944117144233;  // -1/e

double halley_refine(double w, double x) {
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    if (denom == 0.0) break;
    const double step = f / denom;
    const double next = w - step;
    if (!std::isfinite(next)) break;
    if (std::abs(next - w) <= 1e-16 * (1.0 + std::abs(next))) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

}  // namespace

double lambert_w0(double x) {
  if (!(x >= kBranchPoint)) throw std::domain_error("lambert_w0: x must be >= -1/e");
  if (x == 0.0) return 0.0;
  double w;
  if (x < -0.32) {
    // Series around the branch point.
    const double p = std::sqrt(2.0 * (M_E * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 2.0 * M_E) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  if (w <= -1.0) w = -1.0 + 1e-12;
  return halley_refine(w, x);
}

double lambert_wm1(double x) {
  if (!(x >= kBranchPoint) || !(x < 0.0)) {
    throw std::domain_error("lambert_wm1: x must be in [-1/e, 0)");
  }
  double w;
  if (x < -0.25) {
    const double p = -std::sqrt(2.0 * (M_E * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    const double l2 = std::log(-l1);
    w = l1 - l2 + l2 / l1;
  }
  if (w >= -1.0) w = -1.0 - 1e-12;
  return halley_refine(w, x);
}

HardnessTerms hardness(const RewardProfile& profile,
                       const std::vector<std::pair<int, std::vector<Vertex>>>& contenders,
                       const SseConfig& cfg, bool legacy) {
  const double s2 = profile.sigma2();
  const double b = cfg.b_param;
  const double c = cfg.c_param;
  HardnessTerms out;
  for (const auto& [level, arms] : contenders) {
    LevelHardness lh;
    lh.level = level;
    const double eps_h = epsilon_at_level(cfg.epsilon, cfg.gain, cfg.h_levels, level);
    for (const Vertex& v : arms) {
      ArmHardness ah;
      ah.vertex = v;
      ah.delta_eps = delta_eps(profile.gap(v), eps_h, legacy);
      if (ah.delta_eps == 0.0) {
        throw std::domain_error("hardness: zero effective gap gives infinite hardness");
      }
      const double zeta = profile.value(v) - s2;
      ah.variance = s2 * s2 + 2.0 * s2 * zeta;
      const double de = ah.delta_eps;
      ah.term = (2.0 * b * ah.variance + 2.0 * std::sqrt(2.0 * b * c) * de +
                 std::sqrt(4.0 * b * b * ah.variance * ah.variance +
                           2.0 * std::sqrt(2.0 * c) * std::pow(b, 1.5) * ah.variance * de)) /
                (de * de);
      lh.h_eps += ah.term;
      lh.arms.push_back(ah);
    }
    out.per_level.push_back(std::move(lh));
  }
  return out;
}

double per_arm_bound(double term, long long t_h, double delta, int n_total) {
  if (t_h < 2) throw std::invalid_argument("per_arm_bound: t_h must be >= 2");
  return term * exploration_rate(t_h - 1, delta, n_total) + 2.0;
}

namespace {

// Solves w + ln(-w) = q for w <= -1, i.e. W_{-1}(-exp(q)) without forming
// exp(q); the left side is increasing on (-inf, -1], so the root is unique
// for q <= -1.
double lambert_wm1_log_arg(double q) {
  if (q > -1.0) throw std::domain_error("lambert_wm1_log_arg: q must be <= -1");
  double w;
  if (q > -2.0) {
    w = -1.0 - std::sqrt(std::max(0.0, -2.0 * (q + 1.0)));
  } else {
    w = q - std::log(-q);
  }
  if (w > -1.0) w = -1.0 - 1e-12;
  for (int it = 0; it < 64; ++it) {
    const double g = w + std::log(-w) - q;
    const double dg = (w + 1.0) / w;
    if (dg == 0.0) break;
    double next = w - g / dg;
    if (next > -1.0) next = 0.5 * (w - 1.0);
    if (std::abs(next - w) <= 1e-15 * std::abs(next)) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

}  // namespace

PredictedSamples predicted_level_samples(double h_eps, int s_size, double delta, int n_total) {
  if (h_eps <= 0.0 || s_size < 1) {
    throw std::invalid_argument("predicted_level_samples: bad arguments");
  }
  const double c = std::pow(15.0 * n_total / (4.0 * delta), 0.25);
  // Lambert argument is -exp(q); staying in log space avoids underflow for
  // tiny hardness.
  const double q = -(2.0 * s_size - 1.0) / (4.0 * h_eps) - std::log(4.0 * h_eps * c);
  if (q > -1.0) return {false, 0};
  const double w = lambert_wm1_log_arg(q);
  const double t = -4.0 * h_eps * w;
  if (!std::isfinite(t) || t > 9e18) return {false, 0};
  return {true, static_cast<long long>(std::ceil(t)) + 1};
}

namespace {

// Contender sets along the oracle descent: the true per-level best survives
// each played game; skipped levels double the carried set.
std::vector<std::pair<int, std::vector<Vertex>>> oracle_contenders(const RewardProfile& profile,
                                                                   const PruningVector& pruning) {
  std::vector<std::pair<int, std::vector<Vertex>>> out;
  std::vector<Vertex> survivors = {Vertex{0, 1}};
  for (int h = 1; h <= pruning.h_levels(); ++h) {
    survivors = expand_contenders(survivors);
    if (!pruning.plays(h)) continue;
    out.emplace_back(h, survivors);
    Vertex best = survivors.front();
    for (const Vertex& v : survivors) {
      if (profile.value(v) > profile.value(best)) best = v;
    }
    survivors = {best};
  }
  return out;
}

}  // namespace

ComplexityPrediction predict_for_profile(const RewardProfile& profile, const SseConfig& cfg) {
  const auto contenders = oracle_contenders(profile, cfg.pruning);
  const HardnessTerms terms = hardness(profile, contenders, cfg);
  const int n_total = total_arms(cfg.pruning);
  ComplexityPrediction pred;
  for (size_t k = 0; k < terms.per_level.size(); ++k) {
    const auto& lh = terms.per_level[k];
    const int s_size = static_cast<int>(contenders[k].second.size());
    const PredictedSamples ps = predicted_level_samples(lh.h_eps, s_size, cfg.delta, n_total);
    if (!ps.bounded) pred.bounded = false;
    pred.per_level.push_back({lh.level, s_size, lh.h_eps, ps.value});
    pred.total += static_cast<double>(ps.value);
    pred.theorem2_total += 30.0 * lh.h_eps * std::log(lh.h_eps / cfg.delta);
  }
  pred.theorem2_total += 2.0 * n_total;
  return pred;
}

ExpectedComplexity expected_total_complexity(const PruningVector& pruning,
                                             const HierarchicalCodebook& cb, const SseConfig& cfg,
                                             double sigma2, int theta_samples, Rng& rng) {
  if (theta_samples < 100) {
    throw std::invalid_argument("expected_total_complexity: need at least 100 samples");
  }
  SseConfig local = cfg;
  local.pruning = pruning;
  const Interval range = cb.theta_range();
  std::uniform_real_distribution<double> draw(range.lo, range.hi);
  ExpectedComplexity out;
  out.samples = theta_samples;
  std::vector<double> level_totals;
  std::vector<LevelPrediction> shape;
  for (int s = 0; s < theta_samples; ++s) {
    const double theta = range.width() > 0.0 ? draw(rng) : range.lo;
    PathSet paths;
    paths.paths.push_back({theta, 1.0, {1.0, 0.0}});
    const RewardProfile profile = noiseless_profile(cb, paths, sigma2);
    const ComplexityPrediction pred = predict_for_profile(profile, local);
    if (!pred.bounded) {
      out.excluded += 1;
      continue;
    }
    if (shape.empty()) {
      shape = pred.per_level;
      level_totals.assign(pred.per_level.size() + 2, 0.0);
      for (auto& lp : shape) {
        lp.t_bar = 0;
        lp.h_eps = 0.0;
      }
    }
    for (size_t k = 0; k < pred.per_level.size(); ++k) {
      level_totals[k] += static_cast<double>(pred.per_level[k].t_bar);
      shape[k].h_eps += pred.per_level[k].h_eps;
    }
    level_totals[pred.per_level.size()] += pred.total;
    level_totals[pred.per_level.size() + 1] += pred.theorem2_total;
  }
  const int used = theta_samples - out.excluded;
  if (used > 0) {
    for (size_t k = 0; k < shape.size(); ++k) {
      shape[k].h_eps /= used;
      shape[k].t_bar = static_cast<long long>(std::llround(level_totals[k] / used));
    }
    out.per_level = shape;
    out.mean_total = level_totals[shape.size()] / used;
    out.mean_theorem2 = level_totals[shape.size() + 1] / used;
  }
  out.exclusion_warning = out.excluded * 10 > theta_samples;
  return out;
}

PruningSweep optimize_pruning(const HierarchicalCodebook& cb, const SseConfig& cfg,
                              double sigma2, int theta_samples, Rng& rng) {
  const int h = cb.h_levels();
  if (h > 12) throw std::invalid_argument("optimize_pruning: exhaustive sweep limited to H <= 12");
  // Common random numbers: one shared AoA panel for every candidate.
  const Interval range = cb.theta_range();
  std::uniform_real_distribution<double> draw(range.lo, range.hi);
  std::vector<RewardProfile> profiles;
  profiles.reserve(theta_samples);
  for (int s = 0; s < theta_samples; ++s) {
    PathSet paths;
    paths.paths.push_back({draw(rng), 1.0, {1.0, 0.0}});
    profiles.push_back(noiseless_profile(cb, paths, sigma2));
  }

  PruningSweep sweep;
  const int candidates = 1 << (h - 1);
  for (int p_dec = 0; p_dec < candidates; ++p_dec) {
    SseConfig local = cfg;
    local.pruning = PruningVector::from_dec(p_dec, h);
    PruningCandidate cand;
    cand.p_dec = p_dec;
    cand.n_arms = total_arms(local.pruning);
    double acc = 0.0;
    int used = 0;
    for (const auto& profile : profiles) {
      const ComplexityPrediction pred = predict_for_profile(profile, local);
      if (!pred.bounded) {
        cand.excluded += 1;
        continue;
      }
      acc += pred.total;
      ++used;
    }
    cand.mean_total = used > 0 ? acc / used : std::numeric_limits<double>::infinity();
    sweep.table.push_back(cand);
  }
  const auto better = [](const PruningCandidate& a, const PruningCandidate& b) {
    if (a.mean_total != b.mean_total) return a.mean_total < b.mean_total;
    if (a.n_arms != b.n_arms) return a.n_arms < b.n_arms;
    return a.p_dec < b.p_dec;
  };
  const PruningCandidate* best = &sweep.table.front();
  for (const auto& cand : sweep.table) {
    if (better(cand, *best)) best = &cand;
  }
  sweep.best = PruningVector::from_dec(best->p_dec, h);
  return sweep;
}

double efficiency(int level, int h_levels, double t_bar) {
  if (t_bar <= 0.0) throw std::invalid_argument("efficiency: t_bar must be positive");
  return static_cast<double>(1LL << (h_levels - level)) / t_bar;
}

}  // namespace beamsweep
