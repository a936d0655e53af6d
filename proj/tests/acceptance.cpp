// Acceptance suite: one checkable criterion per function, each printing a
// single PASS/FAIL line. Run with no arguments for the full suite or with a
// criterion number to run one.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "beamsweep/complexity.hpp"
#include "beamsweep/config.hpp"
#include "beamsweep/harness.hpp"

using namespace beamsweep;

namespace {

const Interval kRange{M_PI / 6.0, 5.0 * M_PI / 6.0};
const double kGain = std::pow(10.0, 0.2);

const HierarchicalCodebook& codebook() {
  static const HierarchicalCodebook cb =
      build_codebook(7, kRange, ArrayConfig{128, 0.5, false}, 0, kGain);
  return cb;
}

SseConfig base_sse(int p_dec, double epsilon, double delta, double b, double c) {
  SseConfig cfg;
  cfg.pruning = PruningVector::from_dec(p_dec, 7);
  cfg.h_levels = 7;
  cfg.epsilon = epsilon;
  cfg.delta = delta;
  cfg.b_param = b;
  cfg.c_param = c;
  cfg.gain = kGain;
  return cfg;
}

struct Criterion {
  const char* name;
  std::function<bool(std::string&)> run;
};

// 1. Arm-count exactness for the studied pruning vectors.
bool criterion_arm_counts(std::string& detail) {
  const std::map<int, int> expected = {{0, 128}, {3, 36}, {4, 24}, {7, 22}, {8, 24}};
  bool ok = true;
  std::ostringstream os;
  for (const auto& [p_dec, n_h] : expected) {
    const int got = total_arms(PruningVector::from_dec(p_dec, 7));
    if (got != n_h) ok = false;
    os << "p" << p_dec << "->" << got << " ";
  }
  std::vector<int> levels;
  for (auto [h, s] : played_level_sizes(PruningVector::from_dec(3, 7))) levels.push_back(h);
  const bool levels_ok = levels == std::vector<int>{5, 6, 7};
  if (!levels_ok) ok = false;
  os << "| p3 plays {5,6,7}: " << (levels_ok ? "yes" : "no");
  detail = os.str();
  return ok;
}

// 2. Reward mean/variance against the noncentral chi-square moments.
bool criterion_reward_moments(std::string& detail) {
  ArrayConfig cfg{128, 0.5, false};
  auto a = steering_vector(1.0, cfg);
  Eigen::VectorXcd w = a / a.norm();
  const double zeta = std::norm(w.dot(a));  // 128 by matched filtering
  const double sigma2 = 1.0;
  Rng rng(20240601);
  const long long n = 1'000'000;
  double acc = 0.0, acc2 = 0.0;
  for (long long k = 0; k < n; ++k) {
    const double y = observe_reward(w, a, sigma2, rng);
    acc += y;
    acc2 += y * y;
  }
  const double mean = acc / n;
  const double var = acc2 / n - mean * mean;
  const double want_mean = zeta + sigma2;
  const double want_var = sigma2 * sigma2 + 2.0 * sigma2 * zeta;
  const double mean_err = std::abs(mean - want_mean) / want_mean;
  const double var_err = std::abs(var - want_var) / want_var;
  std::ostringstream os;
  os << "mean " << mean << " vs " << want_mean << " (" << 100.0 * mean_err << "%), var " << var
     << " vs " << want_var << " (" << 100.0 * var_err << "%)";
  detail = os.str();
  return mean_err < 0.01 && var_err < 0.02;
}

// 3. End-to-end delta-PAC at SNR 0 with the Wilson stopping rule.
bool criterion_delta_pac(std::string& detail) {
  CampaignConfig cfg;
  cfg.base_seed = 1;
  cfg.snr_db = 0.0;
  cfg.k_paths = 1;
  cfg.wilson_width = 0.02;
  cfg.min_sims = 100;
  cfg.max_sims = 20000;
  cfg.metric_horizon = 16;  // metrics series not under test here
  cfg.threads = 0;
  cfg.sse = base_sse(7, 7.0, 0.05, 0.1, 0.1);
  const auto report = run_campaign(cfg, codebook());
  const double half_width = 0.5 * report.wilson.width();
  const double target = 1.0 - cfg.sse.delta - half_width;
  std::ostringstream os;
  os << "P_c " << report.p_hat << " >= " << target << " with width " << report.wilson.width()
     << " over " << report.l_sims << " sims";
  detail = os.str();
  return report.converged && report.wilson.width() < 0.02 && report.p_hat >= target;
}

// 4. Per-step sampling-choice implications across mixed scenarios.
bool criterion_choice_invariants(std::string& detail) {
  long long steps = 0, violations = 0;
  int rep = 0;
  const double snrs[] = {-5.0, 0.0, 10.0, 20.0};
  const int pruning[] = {7, 63, 0, 8};
  while (steps < 100000) {
    Rng rng(42000 + rep);
    ChannelScenario scenario;
    scenario.paths = sample_paths(rng, rep % 3 == 0 ? 5 : 1, kRange, 10.0);
    scenario.sigma2 = NoiseModel::from_snr_db(snrs[rep % 4]).sigma2;
    SseConfig cfg = base_sse(pruning[rep % 4], 7.0, 0.05, 0.1, 0.1);
    cfg.check_invariants = true;
    const auto outcome = run_sse(cfg, codebook(), scenario, rng);
    steps += outcome.total_samples;
    violations += outcome.choice_invariant_violations;
    ++rep;
  }
  std::ostringstream os;
  os << violations << " violations over " << steps << " steps (" << rep << " runs)";
  detail = os.str();
  return violations == 0;
}

// 5. Anytime confidence coverage for a single arm, B = C = 1.
bool criterion_coverage(std::string& detail) {
  const double zeta = 128.0, sigma2 = 1.0;
  const double f_true = zeta + sigma2;
  std::ostringstream os;
  bool ok = true;
  for (double delta : {0.05, 0.1}) {
    SseConfig cfg = base_sse(63, 7.0, delta, 1.0, 1.0);
    Rng rng(31337);
    std::normal_distribution<double> noise(0.0, std::sqrt(sigma2 / 2.0));
    const int runs = 10000, steps = 1000;
    int bad_runs = 0;
    for (int r = 0; r < runs; ++r) {
      ArmStats stats;
      bool bad = false;
      for (long long t = 1; t <= steps; ++t) {
        const double re = std::sqrt(zeta) + noise(rng);
        const double im = noise(rng);
        update_arm(stats, re * re + im * im, t, cfg, 1);
        if (stats.n >= 2 && std::abs(stats.mean - f_true) >= stats.radius) {
          bad = true;
          break;
        }
      }
      if (bad) ++bad_runs;
    }
    const double rate = static_cast<double>(bad_runs) / runs;
    os << "delta " << delta << ": violation rate " << rate << "; ";
    if (rate > delta) ok = false;
  }
  detail = os.str();
  return ok;
}

// 6. Lambert identity plus predictor round-trip.
bool criterion_lambert(std::string& detail) {
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double lo = -1.0 / M_E + 1e-9;
    const double x =
        k < 5000 ? lo + (1.0 - lo) * k / 4999.0
                 : std::pow(10.0, 6.0 * (k - 5000) / 4999.0);
    const double w = lambert_w0(x);
    worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
  }
  bool round_trip_ok = true;
  Rng rng(606);
  std::uniform_real_distribution<double> h_draw(0.05, 60.0);
  std::uniform_int_distribution<int> s_draw(2, 128);
  std::uniform_real_distribution<double> d_draw(0.001, 0.2);
  for (int rep = 0; rep < 100; ++rep) {
    const double h_eps = h_draw(rng);
    const int s = s_draw(rng);
    const double delta = d_draw(rng);
    std::uniform_int_distribution<int> n_draw(s, 300);
    const int n_total = n_draw(rng);
    const auto pred = predicted_level_samples(h_eps, s, delta, n_total);
    if (!pred.bounded) {
      round_trip_ok = false;
      continue;
    }
    auto bound = [&](long long t) {
      return h_eps * exploration_rate(t - 1, delta, n_total) + 2.0 * s;
    };
    long long oracle = 2LL * s + 1;
    while (static_cast<double>(oracle) < bound(oracle)) ++oracle;
    if (std::llabs(pred.value - oracle) > 1) round_trip_ok = false;
  }
  std::ostringstream os;
  os << "identity residual " << worst << ", 100 random round-trips "
     << (round_trip_ok ? "within one unit" : "FAILED");
  detail = os.str();
  return worst <= 1e-12 && round_trip_ok;
}

// 7. Per-arm sample bound at SNR 0.
bool criterion_arm_bound(std::string& detail) {
  const auto& cb = codebook();
  const double sigma2 = 1.0;
  const double delta = 0.05;
  SseConfig cfg = base_sse(7, 7.0, delta, 0.1, 0.1);
  const int n_total = total_arms(cfg.pruning);
  const int runs = 1000;
  int good = 0;
  for (int rep = 0; rep < runs; ++rep) {
    Rng rng(50000 + rep);
    ChannelScenario scenario;
    scenario.paths = sample_paths(rng, 1, kRange, 10.0);
    scenario.sigma2 = sigma2;
    const RewardProfile profile = noiseless_profile(cb, scenario.paths, sigma2);

    // Track per-arm counts per level alongside the run.
    std::map<int, std::map<int, long long>> counts;  // level -> index -> n
    StepObserver obs = [&](const StepInfo& info) {
      counts[info.level][info.sampled.index] += 1;
    };
    const auto outcome = run_sse(cfg, cb, scenario, rng, &obs);

    bool all_ok = true;
    for (const auto& lr : outcome.per_level) {
      const double eps_h = epsilon_at_level(cfg.epsilon, cfg.gain, cfg.h_levels, lr.level);
      for (const auto& [index, n_pulls] : counts[lr.level]) {
        const Vertex v{lr.level, index};
        const double de = delta_eps(profile.gap(v), eps_h);
        const double zeta = profile.value(v) - sigma2;
        const double nu2 = sigma2 * sigma2 + 2.0 * sigma2 * zeta;
        const double b = cfg.b_param, c = cfg.c_param;
        const double term =
            (2.0 * b * nu2 + 2.0 * std::sqrt(2.0 * b * c) * de +
             std::sqrt(4.0 * b * b * nu2 * nu2 +
                       2.0 * std::sqrt(2.0 * c) * std::pow(b, 1.5) * nu2 * de)) /
            (de * de);
        const double bound = per_arm_bound(term, lr.samples, delta, n_total);
        if (static_cast<double>(n_pulls) > std::ceil(bound)) all_ok = false;
      }
    }
    if (all_ok) ++good;
  }
  const double rate = static_cast<double>(good) / runs;
  std::ostringstream os;
  os << "bound held in " << 100.0 * rate << "% of " << runs << " runs (need >= "
     << 100.0 * (1.0 - delta) << "%)";
  detail = os.str();
  return rate >= 1.0 - delta;
}

// 8. High-SNR sample-complexity reproduction with B tuned to the known noise
// power.
bool criterion_high_snr(std::string& detail) {
  const double sigma2 = NoiseModel::from_snr_db(20.0).sigma2;
  auto campaign = [&](int p_dec) {
    CampaignConfig cfg;
    cfg.base_seed = 88;
    cfg.snr_db = 20.0;
    cfg.k_paths = 1;
    cfg.min_sims = 1000;
    cfg.max_sims = 1000;
    cfg.metric_horizon = 16;
    cfg.threads = 0;
    cfg.sse = base_sse(p_dec, 7.0, 0.01, sigma2, 0.1);
    return run_campaign(cfg, codebook());
  };
  const auto r7 = campaign(7);
  const auto r63 = campaign(63);
  const bool in7 = r7.t_hat >= 0.6 * 53.7 && r7.t_hat <= 1.4 * 53.7;
  const bool in63 = r63.t_hat >= 0.6 * 30.8 && r63.t_hat <= 1.4 * 30.8;
  const bool order = r63.t_hat < r7.t_hat;
  std::ostringstream os;
  os << "T(p7) " << r7.t_hat << " in [32.2, 75.2]: " << (in7 ? "yes" : "NO") << "; T(p63) "
     << r63.t_hat << " in [18.5, 43.1]: " << (in63 ? "yes" : "NO")
     << "; SSE63 < SSE7: " << (order ? "yes" : "NO");
  detail = os.str();
  return in7 && in63 && order;
}

// 9. Hierarchical pruning beats exhaustive search in the mid-SNR band.
bool criterion_crossover(std::string& detail) {
  auto mean_t = [&](double snr_db, int p_dec) {
    CampaignConfig cfg;
    cfg.base_seed = 5;
    cfg.snr_db = snr_db;
    cfg.k_paths = 1;
    cfg.min_sims = 400;
    cfg.max_sims = 400;
    cfg.metric_horizon = 16;
    cfg.threads = 0;
    cfg.sse = base_sse(p_dec, 7.0, 0.05, 0.1, 0.1);
    return run_campaign(cfg, codebook()).t_hat;
  };
  std::ostringstream os;
  bool ok = true;
  for (double snr : {0.0, 6.0}) {
    const double t7 = mean_t(snr, 7);
    const double t0 = mean_t(snr, 0);
    os << "SNR " << snr << ": T(p7) " << t7 << " vs T(p0) " << t0 << "; ";
    if (!(t7 < t0)) ok = false;
  }
  detail = os.str();
  return ok;
}

// 10. Assumption sweep: unimodality rate and realized gains.
bool criterion_assumptions(std::string& detail) {
  const auto& cb = codebook();
  Rng rng(9090);
  std::uniform_real_distribution<double> aoa(kRange.lo, kRange.hi);
  const int draws = 1000;
  int unimodal = 0;
  std::vector<double> ratio_acc(6, 0.0);
  for (int k = 0; k < draws; ++k) {
    PathSet paths;
    paths.paths.push_back({aoa(rng), 1.0, {1.0, 0.0}});
    const auto profile = noiseless_profile(cb, paths, 1.0);
    const auto rep = check_assumptions(profile, kGain);
    if (rep.unimodal_chain) ++unimodal;
    for (size_t j = 0; j < rep.gain_ratios.size(); ++j) ratio_acc[j] += rep.gain_ratios[j];
  }
  const double rate = static_cast<double>(unimodal) / draws;
  bool gains_positive = true;
  std::ostringstream os;
  os << "unimodality " << 100.0 * rate << "%; realized gain dB:";
  for (double acc : ratio_acc) {
    const double ratio = acc / draws;
    if (ratio <= 1.0) gains_positive = false;
    os << ' ' << linear_to_db(ratio);
  }
  detail = os.str();
  return rate >= 0.95 && gains_positive;
}

// 11. Byte-identical CSVs from identical manifests, multi-threaded.
bool criterion_determinism(std::string& detail) {
  auto render = [&](int threads) {
    CampaignConfig cfg;
    cfg.base_seed = 314;
    cfg.snr_db = 10.0;
    cfg.k_paths = 1;
    cfg.min_sims = 300;
    cfg.max_sims = 300;
    cfg.metric_horizon = 256;
    cfg.threads = threads;
    cfg.sse = base_sse(7, 7.0, 0.05, 0.1, 0.1);
    const auto report = run_campaign(cfg, codebook());
    std::ostringstream records, series;
    write_records_csv(report, 7, records);
    write_timeseries_csv(report, series);
    return records.str() + "\x1e" + series.str();
  };
  const std::string a = render(4);
  const std::string b = render(4);
  const std::string c = render(1);
  std::ostringstream os;
  os << "4-thread repeat identical: " << (a == b ? "yes" : "NO")
     << "; 4-thread vs 1-thread identical: " << (a == c ? "yes" : "NO");
  detail = os.str();
  return a == b && a == c;
}

const std::vector<Criterion> kCriteria = {
    {"arm-count exactness", criterion_arm_counts},
    {"reward-moment reproduction", criterion_reward_moments},
    {"delta-PAC campaign", criterion_delta_pac},
    {"sampling-choice invariants", criterion_choice_invariants},
    {"confidence coverage", criterion_coverage},
    {"lambert-w and predictor consistency", criterion_lambert},
    {"per-arm bound validity", criterion_arm_bound},
    {"high-SNR complexity reproduction", criterion_high_snr},
    {"exhaustive-vs-hierarchical crossover", criterion_crossover},
    {"assumption sweep", criterion_assumptions},
    {"campaign determinism", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool all_ok = true;
  for (size_t k = 0; k < kCriteria.size(); ++k) {
    const int number = static_cast<int>(k) + 1;
    if (only != 0 && number != only) continue;
    std::string detail;
    const bool ok = kCriteria[k].run(detail);
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", number, kCriteria[k].name,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) all_ok = false;
  }
  return all_ok ? 0 : 1;
}
