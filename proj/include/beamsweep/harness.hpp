#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "beamsweep/codebook.hpp"
#include "beamsweep/common.hpp"
#include "beamsweep/sse.hpp"

namespace beamsweep {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

// Inverse standard-normal CDF, accurate to ~1e-13.
double inverse_normal_cdf(double p);

// Wilson score interval at two-sided confidence b (b = 0.95 gives z = 1.96).
WilsonInterval wilson_interval(double p_hat, long long l_sims, double confidence);
WilsonInterval wilson_interval_z(double p_hat, long long l_sims, double z);

struct CampaignConfig {
  std::uint64_t base_seed = 1;
  double snr_db = 0.0;
  int k_paths = 1;
  double attenuation_db = 10.0;
  FadingModel fading;
  double wilson_width = 0.02;
  double wilson_conf = 0.95;
  int min_sims = 100;
  int max_sims = 20000;
  int batch_sims = 50;
  int metric_horizon = 2048;
  int threads = 1;  // 0 = hardware concurrency
  bool oracle_multipath = false;
  SseConfig sse;
};

struct SimRecord {
  std::uint64_t seed = 0;
  int i_star = 0;
  int chosen = 0;
  bool correct = false;
  long long samples_total = 0;
  std::vector<long long> samples_per_level;  // indexed by level 1..H, 0 when unplayed
  long long op_count = 0;
  double xi_final = 0.0;
  bool budget_exhausted = false;
};

struct OpStats {
  double mean = 0.0;
  long long p50 = 0;
  long long p90 = 0;
  long long max = 0;
};

struct CampaignReport {
  long long l_sims = 0;
  double p_hat = 0.0;  // final correctness proportion
  WilsonInterval wilson;
  bool converged = false;  // width target met before max_sims
  double t_hat = 0.0;      // mean total samples
  OpStats op_stats;
  std::vector<double> p_hat_series;  // P_c(t, L) for t = 1..metric_horizon
  std::vector<double> xi_series;     // xi(t, L)
  std::vector<SimRecord> records;
  long long choice_invariant_violations = 0;
  int budget_exhausted_runs = 0;
  double wilson_conf = 0.95;
};

// Best leaf for the scenario's dominant path: argmax_i |w_{H,i}^H a(theta_1)|^2.
// With oracle_multipath the argmax runs over the full multi-path channel.
int oracle_best_leaf(const HierarchicalCodebook& cb, const ChannelScenario& scenario,
                     bool oracle_multipath = false);

CampaignReport run_campaign(const CampaignConfig& cfg, const HierarchicalCodebook& cb);

// CSV emission; floats carry 9 significant digits.
void write_records_csv(const CampaignReport& report, int h_levels, std::ostream& os);
void write_timeseries_csv(const CampaignReport& report, std::ostream& os);
std::string format_double(double x);

}  // namespace beamsweep
