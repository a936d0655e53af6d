#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "beamsweep/complexity.hpp"
#include "beamsweep/config.hpp"
#include "beamsweep/harness.hpp"

namespace fs = std::filesystem;
using namespace beamsweep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitBudget = 4;

void usage(std::ostream& os) {
  os << "usage: beamsweep <codebook|simulate|predict|optimize-p|validate> [options]\n"
        "options:\n"
        "  --config PATH       load configuration file\n"
        "  --out DIR           output directory (default: out)\n"
        "  --threads N         campaign worker threads, 0 = auto (default: 1)\n"
        "  --<key>=<value>     override any configuration key, e.g. --sse.p_dec=7\n"
        "environment:\n"
        "  BEAMSWEEP_SEED      overrides campaign.base_seed\n";
}

struct CliArgs {
  std::string subcommand;
  std::string out_dir = "out";
  int threads = 1;
  Config config;
};

CliArgs parse_args(int argc, char** argv) {
  if (argc < 2) throw ConfigError("missing subcommand");
  CliArgs args;
  args.subcommand = argv[1];
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string config_path;
  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) throw ConfigError("unexpected argument: " + arg);
    arg = arg.substr(2);
    std::string value;
    const size_t eq = arg.find('=');
    if (eq != std::string::npos) {
      value = arg.substr(eq + 1);
      arg = arg.substr(0, eq);
    } else if (i + 1 < argc) {
      value = argv[++i];
    } else {
      throw ConfigError("flag --" + arg + " needs a value");
    }
    if (arg == "config") {
      config_path = value;
    } else if (arg == "out") {
      args.out_dir = value;
    } else if (arg == "threads") {
      args.threads = std::stoi(value);
    } else {
      overrides.emplace_back(arg, value);
    }
  }
  if (!config_path.empty()) args.config.load_file(config_path);
  if (const char* env_seed = std::getenv("BEAMSWEEP_SEED")) {
    args.config.apply_override("campaign.base_seed", env_seed);
  }
  for (const auto& [k, v] : overrides) args.config.apply_override(k, v);
  args.config.finalize();
  return args;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void emit_manifest(const CliArgs& args, const std::vector<std::string>& outputs) {
  RunManifest manifest;
  manifest.subcommand = args.subcommand;
  manifest.outputs = outputs;
  manifest.config = &args.config;
  auto os = open_output(fs::path(args.out_dir) / "manifest.cfg");
  write_manifest(manifest, os);
}

HierarchicalCodebook build_from_config(const Config& cfg) {
  return build_codebook(cfg.h_levels(), cfg.theta_range(), cfg.array_config(), cfg.design_grid(),
                        cfg.codebook_gain());
}

int cmd_codebook(const CliArgs& args) {
  const Config& cfg = args.config;
  HierarchicalCodebook cb = build_from_config(cfg);
  Rng rng(cfg.get_u64("campaign.base_seed"));
  PathSet paths = sample_paths(rng, cfg.get_int("channel.k_paths"), cb.theta_range(),
                               cfg.get_double("channel.attenuation_db"), cfg.fading_model());
  RewardProfile profile = noiseless_profile(cb, paths, cfg.sigma2());

  auto os = open_output(fs::path(args.out_dir) / "codebook.csv");
  os << "level,index,theta_point,region_lo,region_hi,f_value,delta\n";
  for (int h = 1; h <= cb.h_levels(); ++h) {
    for (int i = 1; i <= (1 << h); ++i) {
      const Vertex v{h, i};
      const Interval r = cb.region(v);
      os << h << ',' << i << ',' << format_double(cb.pointing(v)) << ','
         << format_double(r.lo) << ',' << format_double(r.hi) << ','
         << format_double(profile.value(v)) << ',' << format_double(profile.gap(v)) << "\n";
    }
  }
  emit_manifest(args, {"codebook.csv"});
  std::cout << "codebook: " << cb.total_vectors() << " vectors over ["
            << format_double(rad_to_deg(cb.theta_range().lo)) << ", "
            << format_double(rad_to_deg(cb.theta_range().hi)) << "] deg -> "
            << (fs::path(args.out_dir) / "codebook.csv").string() << "\n";
  return kExitOk;
}

int cmd_simulate(const CliArgs& args) {
  const Config& cfg = args.config;
  HierarchicalCodebook cb = build_from_config(cfg);
  CampaignConfig campaign = cfg.campaign_config();
  campaign.threads = args.threads;

  const std::string trace_path = cfg.get("campaign.trace");
  if (!trace_path.empty()) {
    // Per-step trace of the first simulation.
    Rng rng(campaign.base_seed + 1);
    ChannelScenario scenario;
    scenario.paths = sample_paths(rng, campaign.k_paths, cb.theta_range(),
                                  campaign.attenuation_db, campaign.fading);
    scenario.sigma2 = NoiseModel::from_snr_db(campaign.snr_db).sigma2;
    scenario.fading = campaign.fading;
    auto os = open_output(fs::path(args.out_dir) / trace_path);
    os << "t,h,arm,y,mean,var,D,U,L,G,gamma,u\n";
    StepObserver observer = [&](const StepInfo& s) {
      os << s.global_t << ',' << s.level << ',' << s.sampled.index << ','
         << format_double(s.reward) << ',' << format_double(s.mean) << ','
         << format_double(s.var) << ',' << format_double(s.radius) << ','
         << format_double(s.ucb) << ',' << format_double(s.lcb) << ','
         << format_double(s.gap_gamma) << ',' << s.gamma_index << ',' << s.u_index << "\n";
    };
    run_sse(campaign.sse, cb, scenario, rng, &observer);
  }

  CampaignReport report = run_campaign(campaign, cb);
  {
    auto os = open_output(fs::path(args.out_dir) / "records.csv");
    write_records_csv(report, cb.h_levels(), os);
  }
  {
    auto os = open_output(fs::path(args.out_dir) / "timeseries.csv");
    write_timeseries_csv(report, os);
  }
  std::vector<std::string> outputs = {"records.csv", "timeseries.csv"};
  if (!trace_path.empty()) outputs.push_back(trace_path);
  emit_manifest(args, outputs);

  std::cout << "simulations: " << report.l_sims << (report.converged ? "" : " (unconverged)")
            << "\nP_c = " << format_double(report.p_hat) << "  wilson = ["
            << format_double(report.wilson.lo) << ", " << format_double(report.wilson.hi)
            << "]  width = " << format_double(report.wilson.width()) << "\nT_hat = "
            << format_double(report.t_hat) << "  ops mean = " << format_double(report.op_stats.mean)
            << "\n";
  if (report.budget_exhausted_runs > 0) {
    std::cout << "budget-exhausted runs: " << report.budget_exhausted_runs << "\n";
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_predict(const CliArgs& args) {
  const Config& cfg = args.config;
  HierarchicalCodebook cb = build_from_config(cfg);
  SseConfig sse = cfg.sse_config();
  Rng rng(cfg.get_u64("campaign.base_seed"));
  ExpectedComplexity expected = expected_total_complexity(
      sse.pruning, cb, sse, cfg.sigma2(), cfg.get_int("predict.theta_samples"), rng);

  auto os = open_output(fs::path(args.out_dir) / "predict.csv");
  os << "p_dec,level,S_size,H_eps,T_bar,total,theorem2_total\n";
  for (const auto& lp : expected.per_level) {
    os << sse.pruning.dec() << ',' << lp.level << ',' << lp.s_size << ','
       << format_double(lp.h_eps) << ',' << lp.t_bar << ',' << format_double(expected.mean_total)
       << ',' << format_double(expected.mean_theorem2) << "\n";
  }
  emit_manifest(args, {"predict.csv"});
  std::cout << "p_dec " << sse.pruning.dec() << ": predicted mean total = "
            << format_double(expected.mean_total)
            << "  theorem2 = " << format_double(expected.mean_theorem2);
  if (expected.excluded > 0) {
    std::cout << "  (" << expected.excluded << "/" << expected.samples << " draws unbounded"
              << (expected.exclusion_warning ? ", >10% excluded" : "") << ")";
  }
  std::cout << "\n";
  return kExitOk;
}

int cmd_optimize_p(const CliArgs& args) {
  const Config& cfg = args.config;
  HierarchicalCodebook cb = build_from_config(cfg);
  SseConfig sse = cfg.sse_config();
  Rng rng(cfg.get_u64("campaign.base_seed"));
  PruningSweep sweep =
      optimize_pruning(cb, sse, cfg.sigma2(), cfg.get_int("optimize.theta_samples"), rng);

  auto os = open_output(fs::path(args.out_dir) / "optimize.csv");
  os << "p_dec,n_arms,mean_total,excluded\n";
  for (const auto& cand : sweep.table) {
    os << cand.p_dec << ',' << cand.n_arms << ',' << format_double(cand.mean_total) << ','
       << cand.excluded << "\n";
  }
  emit_manifest(args, {"optimize.csv"});
  std::cout << "p* = " << sweep.best.dec() << " (bits " << sweep.best.bit_string()
            << ", N_H = " << total_arms(sweep.best) << ")\n";
  return kExitOk;
}

int cmd_validate(const CliArgs& args) {
  const Config& cfg = args.config;
  HierarchicalCodebook cb = build_from_config(cfg);
  bool ok = true;
  auto check = [&ok](bool cond, const std::string& what) {
    std::cout << (cond ? "ok   " : "FAIL ") << what << "\n";
    if (!cond) ok = false;
  };

  // Structural self-tests.
  bool norms = true;
  for (int h = 1; h <= cb.h_levels(); ++h) {
    for (int i = 1; i <= (1 << h); ++i) {
      if (std::abs(cb.vector({h, i}).norm() - 1.0) > 1e-9) norms = false;
    }
  }
  check(norms, "all beamforming vectors unit norm");

  bool regions = true;
  for (int h = 1; h < cb.h_levels(); ++h) {
    for (int i = 1; i <= (1 << h); ++i) {
      const Vertex v{h, i};
      const Interval r = cb.region(v);
      const Interval a = cb.region(v.left_child());
      const Interval b = cb.region(v.right_child());
      if (r.lo != a.lo || a.hi != b.lo || b.hi != r.hi) regions = false;
    }
  }
  check(regions, "regions bisect exactly across levels");

  bool arms_ok = true;
  for (int p_dec = 0; p_dec < (1 << (cb.h_levels() - 1)); ++p_dec) {
    const PruningVector p = PruningVector::from_dec(p_dec, cb.h_levels());
    int acc = 0;
    for (auto [h, s] : played_level_sizes(p)) acc += s;
    if (acc != total_arms(p)) arms_ok = false;
  }
  check(arms_ok, "N_H accounting over all pruning vectors");

  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = -1.0 / M_E + 1e-9 + k * (10.0 + 1.0 / M_E) / 999.0;
    const double w = lambert_w0(x);
    worst = std::max(worst, std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x)));
  }
  check(worst <= 1e-12, "lambert_w0 identity on spot grid");

  // Assumption sweep over single-path AoAs.
  const int draws = cfg.get_int("validate.aoa_draws");
  Rng rng(cfg.get_u64("campaign.base_seed"));
  std::uniform_real_distribution<double> aoa(cb.theta_range().lo, cb.theta_range().hi);
  int unimodal = 0, unique = 0, monotone = 0;
  std::vector<double> mean_ratio(cb.h_levels() - 1, 0.0);
  for (int k = 0; k < draws; ++k) {
    PathSet paths;
    paths.paths.push_back({aoa(rng), 1.0, {1.0, 0.0}});
    const RewardProfile profile = noiseless_profile(cb, paths, cfg.sigma2());
    const AssumptionReport rep = check_assumptions(profile, cb.gain());
    if (rep.unimodal_chain) ++unimodal;
    if (rep.unique_argmax) ++unique;
    if (rep.strictly_monotone) ++monotone;
    for (size_t j = 0; j < rep.gain_ratios.size(); ++j) mean_ratio[j] += rep.gain_ratios[j];
  }
  const double unimodal_rate = static_cast<double>(unimodal) / draws;
  std::cout << "unimodality rate: " << format_double(100.0 * unimodal_rate) << "% over " << draws
            << " draws (unique argmax " << format_double(100.0 * unique / draws)
            << "%, monotone " << format_double(100.0 * monotone / draws) << "%)\n";
  std::cout << "realized per-level gain (dB):";
  for (double r : mean_ratio) std::cout << ' ' << format_double(linear_to_db(r / draws));
  std::cout << "  (configured " << format_double(linear_to_db(cb.gain())) << ")\n";
  check(unimodal_rate >= 0.95, "unimodality holds for >= 95% of AoAs");

  return ok ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    CliArgs args = parse_args(argc, argv);
    fs::create_directories(args.out_dir);
    if (args.subcommand == "codebook") return cmd_codebook(args);
    if (args.subcommand == "simulate") return cmd_simulate(args);
    if (args.subcommand == "predict") return cmd_predict(args);
    if (args.subcommand == "optimize-p") return cmd_optimize_p(args);
    if (args.subcommand == "validate") return cmd_validate(args);
    usage(std::cerr);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
