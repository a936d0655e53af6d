#include "beamsweep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

namespace beamsweep {

double inverse_normal_cdf(double p) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("inverse_normal_cdf: p in (0,1)");
  // Acklam's rational approximation, then one Halley step on erfc.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / M_SQRT2) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

WilsonInterval wilson_interval_z(double p_hat, long long l_sims, double z) {
  if (l_sims < 1) throw std::invalid_argument("wilson_interval: l_sims must be >= 1");
  if (p_hat < 0.0 || p_hat > 1.0) throw std::invalid_argument("wilson_interval: p_hat in [0,1]");
  const double n = static_cast<double>(l_sims);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p_hat + z2 / (2.0 * n);
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
  return {(center - half) / denom, (center + half) / denom};
}

WilsonInterval wilson_interval(double p_hat, long long l_sims, double confidence) {
  const double z = inverse_normal_cdf(0.5 * (1.0 + confidence));
  return wilson_interval_z(p_hat, l_sims, z);
}

int oracle_best_leaf(const HierarchicalCodebook& cb, const ChannelScenario& scenario,
                     bool oracle_multipath) {
  const int h_levels = cb.h_levels();
  Eigen::VectorXcd h;
  if (oracle_multipath) {
    h = channel_vector(scenario.paths, cb.array_cfg());
  } else {
    const Path& dominant = scenario.paths.paths.at(scenario.paths.dominant_index);
    h = steering_vector(dominant.aoa, cb.array_cfg());
  }
  int best = 1;
  double best_val = -1.0;
  for (int i = 1; i <= cb.leaf_count(); ++i) {
    const double val = std::norm(cb.vector({h_levels, i}).dot(h));
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

namespace {

struct SimMetrics {
  SimRecord record;
  std::vector<std::uint8_t> indicator;  // per time step, frozen after finish
  std::vector<double> xi;
  long long invariant_violations = 0;
};

double beam_xi(const HierarchicalCodebook& cb, Vertex v, const Eigen::VectorXcd& h, double sigma2,
               double denom) {
  const double zeta = std::norm(cb.vector(v).dot(h));
  return std::log2(1.0 + zeta / sigma2) / denom;
}

SimMetrics run_one_sim(const CampaignConfig& cfg, const HierarchicalCodebook& cb,
                       std::uint64_t seed, int horizon) {
  Rng rng(seed);
  const double sigma2 = NoiseModel::from_snr_db(cfg.snr_db).sigma2;
  ChannelScenario scenario;
  scenario.paths =
      sample_paths(rng, cfg.k_paths, cb.theta_range(), cfg.attenuation_db, cfg.fading);
  scenario.sigma2 = sigma2;
  scenario.fading = cfg.fading;

  SimMetrics m;
  m.record.seed = seed;
  m.record.i_star = oracle_best_leaf(cb, scenario, cfg.oracle_multipath);
  const RewardProfile profile = noiseless_profile(cb, scenario.paths, sigma2);
  const std::vector<int> eps_set = epsilon_optimal_set(profile, cfg.sse.epsilon);

  // Leaves that count as a correct terminal choice.
  std::vector<int> targets;
  for (int leaf : eps_set) {
    if (std::abs(leaf - m.record.i_star) <= 1) targets.push_back(leaf);
  }
  const int h_levels = cb.h_levels();
  auto subtree_hits_target = [&](Vertex v) {
    const int lo = v.first_leaf(h_levels);
    const int hi = v.last_leaf(h_levels);
    for (int leaf : targets) {
      if (leaf >= lo && leaf <= hi) return true;
    }
    return false;
  };

  m.indicator.assign(horizon, 0);
  m.xi.assign(horizon, 0.0);

  // The channel state lives here so the metrics can read h(t); static fading
  // keeps one vector for the whole run.
  PathSet state = scenario.paths;
  Eigen::VectorXcd h_vec = channel_vector(state, cb.array_cfg());
  const bool time_varying = scenario.fading.mode != FadingMode::kStatic;
  const Vertex best_leaf{h_levels, m.record.i_star};
  auto xi_of = [&](Vertex v) {
    const double denom = std::log2(1.0 + std::norm(cb.vector(best_leaf).dot(h_vec)) / sigma2);
    return beam_xi(cb, v, h_vec, sigma2, denom);
  };

  // Cache for static fading: the committed beam changes only at level
  // terminations.
  Vertex cached_xi_vertex{0, 0};
  double cached_xi = 0.0;
  StepObserver observer = [&](const StepInfo& info) {
    if (info.global_t > horizon) return;
    const int idx = static_cast<int>(info.global_t) - 1;
    if (info.running_choice) {
      m.indicator[idx] = subtree_hits_target(*info.running_choice) ? 1 : 0;
    }
    if (info.committed) {
      if (time_varying) {
        m.xi[idx] = xi_of(*info.committed);
      } else {
        if (!(*info.committed == cached_xi_vertex)) {
          cached_xi_vertex = *info.committed;
          cached_xi = xi_of(cached_xi_vertex);
        }
        m.xi[idx] = cached_xi;
      }
    }
  };

  RewardSource source = [&](Vertex v) {
    if (time_varying) {
      state = advance_fading(std::move(state), scenario.fading, rng);
      h_vec = channel_vector(state, cb.array_cfg());
    }
    return observe_reward(cb.vector(v), h_vec, sigma2, rng);
  };
  SseOutcome outcome = run_sse_with_source(cfg.sse, source, &observer);
  m.record.chosen = outcome.chosen_leaf;
  m.record.samples_total = outcome.total_samples;
  m.record.op_count = outcome.op_count;
  m.record.budget_exhausted = outcome.budget_exhausted;
  m.record.samples_per_level.assign(h_levels, 0);
  for (const auto& lr : outcome.per_level) m.record.samples_per_level[lr.level - 1] = lr.samples;
  const bool eps_optimal =
      std::find(eps_set.begin(), eps_set.end(), outcome.chosen_leaf) != eps_set.end();
  m.record.correct = eps_optimal && std::abs(m.record.i_star - outcome.chosen_leaf) <= 1 &&
                     !outcome.budget_exhausted;
  // Final efficiency at the final fading state (identical for static runs).
  m.record.xi_final = xi_of({h_levels, outcome.chosen_leaf});

  // Freeze the terminal state over the rest of the horizon.
  const long long done = std::min<long long>(outcome.total_samples, horizon);
  for (long long t = done; t < horizon; ++t) {
    m.indicator[t] = m.record.correct ? 1 : 0;
    m.xi[t] = m.record.xi_final;
  }
  m.invariant_violations = outcome.choice_invariant_violations;
  return m;
}

}  // namespace

CampaignReport run_campaign(const CampaignConfig& cfg, const HierarchicalCodebook& cb) {
  if (cfg.min_sims < 1 || cfg.max_sims < 1) {
    throw std::invalid_argument("run_campaign: simulation limits must be positive");
  }
  if (cfg.sse.h_levels != cb.h_levels()) {
    throw std::invalid_argument("run_campaign: codebook depth must match the bandit config");
  }
  const int horizon = cfg.metric_horizon;
  int n_threads = cfg.threads;
  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;

  CampaignReport report;
  report.wilson_conf = cfg.wilson_conf;
  std::vector<double> correct_sum(horizon, 0.0);
  std::vector<double> xi_sum(horizon, 0.0);
  long long n_correct = 0;

  long long next_index = 0;
  while (report.l_sims < cfg.max_sims) {
    const long long batch =
        std::min<long long>(cfg.batch_sims, cfg.max_sims - report.l_sims);
    std::vector<SimMetrics> slots(batch);
    std::atomic<long long> cursor{0};
    auto worker = [&]() {
      while (true) {
        const long long k = cursor.fetch_add(1);
        if (k >= batch) break;
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(next_index + k) + 1;
        slots[k] = run_one_sim(cfg, cb, seed, horizon);
      }
    };
    if (n_threads == 1 || batch == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      const int use = static_cast<int>(std::min<long long>(n_threads, batch));
      pool.reserve(use);
      for (int i = 0; i < use; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    // Aggregation in simulation order keeps the report independent of thread
    // scheduling.
    for (long long k = 0; k < batch; ++k) {
      SimMetrics& m = slots[k];
      if (m.record.correct) ++n_correct;
      if (m.record.budget_exhausted) ++report.budget_exhausted_runs;
      report.choice_invariant_violations += m.invariant_violations;
      for (int t = 0; t < horizon; ++t) {
        correct_sum[t] += m.indicator[t];
        xi_sum[t] += m.xi[t];
      }
      report.records.push_back(std::move(m.record));
    }
    next_index += batch;
    report.l_sims = next_index;

    report.p_hat = static_cast<double>(n_correct) / static_cast<double>(report.l_sims);
    report.wilson = wilson_interval(report.p_hat, report.l_sims, cfg.wilson_conf);
    if (report.l_sims >= cfg.min_sims && report.wilson.width() < cfg.wilson_width) {
      report.converged = true;
      break;
    }
  }

  const double n = static_cast<double>(report.l_sims);
  report.p_hat_series.resize(horizon);
  report.xi_series.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    report.p_hat_series[t] = correct_sum[t] / n;
    report.xi_series[t] = xi_sum[t] / n;
  }
  double total_acc = 0.0;
  std::vector<long long> op_counts;
  op_counts.reserve(report.records.size());
  for (const auto& r : report.records) {
    total_acc += static_cast<double>(r.samples_total);
    op_counts.push_back(r.op_count);
  }
  report.t_hat = total_acc / n;
  std::sort(op_counts.begin(), op_counts.end());
  double op_acc = 0.0;
  for (long long v : op_counts) op_acc += static_cast<double>(v);
  report.op_stats.mean = op_acc / n;
  report.op_stats.p50 = op_counts[op_counts.size() / 2];
  report.op_stats.p90 = op_counts[(op_counts.size() * 9) / 10];
  report.op_stats.max = op_counts.back();
  return report;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

void write_records_csv(const CampaignReport& report, int h_levels, std::ostream& os) {
  os << "seed,i_star,chosen,correct,samples_total,ops,xi_final";
  for (int h = 1; h <= h_levels; ++h) os << ",t_h" << h;
  os << "\n";
  for (const auto& r : report.records) {
    os << r.seed << ',' << r.i_star << ',' << r.chosen << ',' << (r.correct ? 1 : 0) << ','
       << r.samples_total << ',' << r.op_count << ',' << format_double(r.xi_final);
    for (int h = 1; h <= h_levels; ++h) {
      os << ',' << (h <= static_cast<int>(r.samples_per_level.size())
                        ? r.samples_per_level[h - 1]
                        : 0);
    }
    os << "\n";
  }
}

void write_timeseries_csv(const CampaignReport& report, std::ostream& os) {
  os << "t,p_hat,w_minus,w_plus,xi\n";
  for (size_t t = 0; t < report.p_hat_series.size(); ++t) {
    const double p = report.p_hat_series[t];
    const WilsonInterval w = wilson_interval(p, report.l_sims, report.wilson_conf);
    os << (t + 1) << ',' << format_double(p) << ',' << format_double(w.lo) << ','
       << format_double(w.hi) << ',' << format_double(report.xi_series[t]) << "\n";
  }
}

}  // namespace beamsweep
