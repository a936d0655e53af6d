#include "beamsweep/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

namespace beamsweep {

const char* const kArtifactVersion = "beamsweep 1.0.0";

namespace {

const std::vector<std::pair<const char*, const char*>> kDefaults = {
    {"array.m", "128"},
    {"array.spacing_ratio", "0.5"},
    {"array.normalize_steering", "0"},
    {"codebook.h", "7"},
    {"codebook.theta_min_deg", "30"},
    {"codebook.theta_max_deg", "150"},
    {"codebook.gain_db", "2"},
    {"codebook.design_grid", "0"},  // 0 = auto
    {"codebook.rss_grid", "1024"},
    {"channel.snr_db", "0"},
    {"channel.k_paths", "1"},
    {"channel.attenuation_db", "10"},
    {"channel.fading.mode", "static"},
    {"channel.fading.rho", "0.995"},
    {"channel.fading.k_factor", "10"},
    {"sse.p_dec", "7"},
    {"sse.p_bits", ""},  // optional explicit form, overrides p_dec when set
    {"sse.epsilon", "7"},
    {"sse.delta", "0.01"},
    {"sse.b", "0.1"},
    {"sse.c", "0.1"},
    {"sse.confidence_mode", "empirical_variance"},
    {"sse.fv_alpha", "4"},
    {"sse.fv_alpha1", "1.25"},
    {"sse.max_level_samples", "1000000"},
    {"campaign.base_seed", "1"},
    {"campaign.wilson_width", "0.02"},
    {"campaign.wilson_conf", "0.95"},
    {"campaign.min_sims", "100"},
    {"campaign.max_sims", "20000"},
    {"campaign.batch_sims", "50"},
    {"campaign.metric_horizon", "2048"},
    {"campaign.oracle_multipath", "0"},
    {"campaign.trace", ""},
    {"predict.theta_samples", "1000"},
    {"optimize.theta_samples", "400"},
    {"validate.aoa_draws", "1000"},
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void unknown_key(const std::string& key) {
  std::ostringstream os;
  os << "unknown configuration key '" << key << "'; valid keys:";
  for (const auto& k : Config::known_keys()) os << "\n  " << k;
  throw ConfigError(os.str());
}

[[noreturn]] void bad_value(const std::string& key, const std::string& constraint) {
  throw ConfigError("invalid value for '" + key + "': " + constraint);
}

}  // namespace

Config::Config() {
  for (const auto& [k, v] : kDefaults) values_[k] = v;
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : kDefaults) out.push_back(k);
    return out;
  }();
  return keys;
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    apply_override(key, trim(line.substr(eq + 1)));
  }
}

void Config::apply_override(const std::string& key, const std::string& value) {
  if (values_.find(key) == values_.end()) unknown_key(key);
  values_[key] = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) unknown_key(key);
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_value(key, "expected a number, got '" + s + "'");
  }
}

int Config::get_int(const std::string& key) const {
  const std::string& s = get(key);
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    bad_value(key, "expected an integer, got '" + s + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad_value(key, "expected a nonnegative integer, got '" + s + "'");
  }
}

void Config::finalize() const {
  if (get_int("array.m") < 2) bad_value("array.m", "needs m >= 2");
  if (get_double("array.spacing_ratio") <= 0.0) bad_value("array.spacing_ratio", "needs d/lambda > 0");
  const int h = get_int("codebook.h");
  if (h < 1 || h > 16) bad_value("codebook.h", "needs 1 <= H <= 16");
  if (get_double("codebook.theta_min_deg") >= get_double("codebook.theta_max_deg")) {
    bad_value("codebook.theta_max_deg", "needs theta_min_deg < theta_max_deg");
  }
  const int grid = get_int("codebook.design_grid");
  if (grid != 0 && grid < 4 * (1 << h)) {
    bad_value("codebook.design_grid", "needs at least 4 * 2^H points (or 0 for auto)");
  }
  if (get_int("codebook.rss_grid") < 16) bad_value("codebook.rss_grid", "needs >= 16 points");
  if (get_int("channel.k_paths") < 1) bad_value("channel.k_paths", "needs k_paths >= 1");
  const std::string fading = get("channel.fading.mode");
  if (fading != "static" && fading != "rician_ar1") {
    bad_value("channel.fading.mode", "must be 'static' or 'rician_ar1'");
  }
  const double rho = get_double("channel.fading.rho");
  if (rho < 0.0 || rho > 1.0) bad_value("channel.fading.rho", "needs rho in [0,1]");
  if (get_double("channel.fading.k_factor") < 0.0) {
    bad_value("channel.fading.k_factor", "needs k_factor >= 0");
  }
  const std::string bits = get("sse.p_bits");
  if (!bits.empty()) {
    if (static_cast<int>(bits.size()) != h) bad_value("sse.p_bits", "needs exactly H bits");
    PruningVector::from_bits(bits);  // validates characters and p_H
  } else {
    const int p_dec = get_int("sse.p_dec");
    if (p_dec < 0 || p_dec >= (1 << (h - 1))) {
      bad_value("sse.p_dec", "needs 0 <= p_dec < 2^(H-1), i.e. the H-1 skip bits");
    }
  }
  if (get_double("sse.epsilon") < 0.0) bad_value("sse.epsilon", "needs epsilon >= 0");
  const double delta = get_double("sse.delta");
  if (delta <= 0.0 || delta >= 1.0) bad_value("sse.delta", "needs delta in (0,1)");
  if (get_double("sse.b") <= 0.0) bad_value("sse.b", "needs B > 0");
  if (get_double("sse.c") <= 0.0) bad_value("sse.c", "needs C > 0");
  const std::string mode = get("sse.confidence_mode");
  if (mode != "empirical_variance" && mode != "fixed_variance") {
    bad_value("sse.confidence_mode", "must be 'empirical_variance' or 'fixed_variance'");
  }
  if (get_int("sse.max_level_samples") < 10) bad_value("sse.max_level_samples", "needs >= 10");
  const double width = get_double("campaign.wilson_width");
  if (width <= 0.0 || width >= 1.0) bad_value("campaign.wilson_width", "needs width in (0,1)");
  const double conf = get_double("campaign.wilson_conf");
  if (conf <= 0.0 || conf >= 1.0) bad_value("campaign.wilson_conf", "needs confidence in (0,1)");
  const int min_sims = get_int("campaign.min_sims");
  if (min_sims < 30) bad_value("campaign.min_sims", "needs min_sims >= 30");
  if (get_int("campaign.max_sims") < 1) bad_value("campaign.max_sims", "needs max_sims >= 1");
  if (get_int("campaign.batch_sims") < 1) bad_value("campaign.batch_sims", "needs >= 1");
  if (get_int("campaign.metric_horizon") < 1) bad_value("campaign.metric_horizon", "needs >= 1");
  if (get_int("predict.theta_samples") < 1) bad_value("predict.theta_samples", "needs >= 1");
  if (get_int("optimize.theta_samples") < 1) bad_value("optimize.theta_samples", "needs >= 1");
  if (get_int("validate.aoa_draws") < 1) bad_value("validate.aoa_draws", "needs >= 1");
}

ArrayConfig Config::array_config() const {
  ArrayConfig a;
  a.m_antennas = get_int("array.m");
  a.spacing_ratio = get_double("array.spacing_ratio");
  a.normalize_steering = get_int("array.normalize_steering") != 0;
  return a;
}

Interval Config::theta_range() const {
  return {deg_to_rad(get_double("codebook.theta_min_deg")),
          deg_to_rad(get_double("codebook.theta_max_deg"))};
}

double Config::codebook_gain() const { return db_to_linear(get_double("codebook.gain_db")); }

int Config::h_levels() const { return get_int("codebook.h"); }

int Config::design_grid() const { return get_int("codebook.design_grid"); }

double Config::sigma2() const { return NoiseModel::from_snr_db(get_double("channel.snr_db")).sigma2; }

FadingModel Config::fading_model() const {
  FadingModel f;
  f.mode = get("channel.fading.mode") == "rician_ar1" ? FadingMode::kRicianAr1
                                                      : FadingMode::kStatic;
  f.ar_coefficient = get_double("channel.fading.rho");
  f.rician_k_factor = get_double("channel.fading.k_factor");
  return f;
}

SseConfig Config::sse_config() const {
  SseConfig s;
  const int h = h_levels();
  const std::string bits = get("sse.p_bits");
  s.pruning = bits.empty() ? PruningVector::from_dec(get_int("sse.p_dec"), h)
                           : PruningVector::from_bits(bits);
  s.b_param = get_double("sse.b");
  s.c_param = get_double("sse.c");
  s.epsilon = get_double("sse.epsilon");
  s.delta = get_double("sse.delta");
  s.gain = codebook_gain();
  s.h_levels = h;
  s.confidence_mode = get("sse.confidence_mode") == "fixed_variance"
                          ? ConfidenceMode::kFixedVariance
                          : ConfidenceMode::kEmpiricalVariance;
  s.fv_alpha = get_double("sse.fv_alpha");
  s.fv_alpha1 = get_double("sse.fv_alpha1");
  s.max_level_samples = get_int("sse.max_level_samples");
  return s;
}

CampaignConfig Config::campaign_config() const {
  CampaignConfig c;
  c.base_seed = get_u64("campaign.base_seed");
  c.snr_db = get_double("channel.snr_db");
  c.k_paths = get_int("channel.k_paths");
  c.attenuation_db = get_double("channel.attenuation_db");
  c.fading = fading_model();
  c.wilson_width = get_double("campaign.wilson_width");
  c.wilson_conf = get_double("campaign.wilson_conf");
  c.min_sims = get_int("campaign.min_sims");
  c.max_sims = get_int("campaign.max_sims");
  c.batch_sims = get_int("campaign.batch_sims");
  c.metric_horizon = get_int("campaign.metric_horizon");
  c.oracle_multipath = get_int("campaign.oracle_multipath") != 0;
  c.sse = sse_config();
  return c;
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  return {values_.begin(), values_.end()};
}

void write_manifest(const RunManifest& manifest, std::ostream& os) {
  os << "# " << kArtifactVersion << " run manifest\n";
  os << "# subcommand: " << manifest.subcommand << "\n";
  for (const auto& out : manifest.outputs) os << "# output: " << out << "\n";
  for (const auto& [k, v] : manifest.config->entries()) os << k << " = " << v << "\n";
}

}  // namespace beamsweep
