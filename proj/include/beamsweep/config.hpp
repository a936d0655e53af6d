#pragma once

#include <map>
#include <string>
#include <vector>

#include "beamsweep/harness.hpp"

namespace beamsweep {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat dotted-key configuration. Files use `key = value` lines, optionally
// grouped under `[section]` headers that prefix the keys that follow;
// command-line `--key=value` flags override file values.
class Config {
 public:
  Config();  // defaults

  void load_file(const std::string& path);
  void apply_override(const std::string& key, const std::string& value);  // validates key
  void finalize() const;  // cross-key range checks; throws ConfigError

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  ArrayConfig array_config() const;
  Interval theta_range() const;           // radians
  double codebook_gain() const;           // linear g
  int h_levels() const;
  int design_grid() const;
  double sigma2() const;
  FadingModel fading_model() const;
  SseConfig sse_config() const;
  CampaignConfig campaign_config() const;

  // Resolved key=value snapshot, stable ordering.
  std::vector<std::pair<std::string, std::string>> entries() const;
  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

// Serialized snapshot that reproduces a run: artifact version, the resolved
// configuration, and the output files it produced.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> outputs;
  const Config* config = nullptr;
};

void write_manifest(const RunManifest& manifest, std::ostream& os);

extern const char* const kArtifactVersion;

}  // namespace beamsweep
