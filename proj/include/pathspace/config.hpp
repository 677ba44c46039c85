#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathspace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Diagnostic {
  std::string field;
  std::string message;
};

// Flat key=value configuration. The schema is the fixed default key set;
// unknown keys are rejected both when reading files and when applying
// command-line overrides. Values are stored as strings and parsed on access.
class Config {
 public:
  // Full schema with default values.
  static Config defaults();

  // Parse `key = value` lines ('#' comments, blank lines allowed). Unknown
  // keys or malformed lines throw ConfigError. The result contains only the
  // keys present in the file (see merged_with_defaults).
  static Config from_file(const std::string& path);

  // Defaults overlaid with this config's explicit entries.
  Config merged_with_defaults() const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);  // unknown key throws

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_seed(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;  // comma-separated

  // Schema diagnostics: missing required keys, values failing their
  // constraints (positivity, enumerations). Never throws.
  std::vector<Diagnostic> validate() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  // Write the config as a parseable key=value file.
  void write(const std::string& path) const;

 private:
  std::map<std::string, std::string> values_;
};

// Worker count: explicit `threads` value if positive, else the
// PATHSPACE_THREADS environment variable, else 1.
int resolve_threads(const Config& cfg);

}  // namespace pathspace
