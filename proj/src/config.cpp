#include "pathspace/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pathspace/montecarlo.hpp"

namespace pathspace {

namespace {

struct KeySpec {
  const char* key;
  const char* def;
  // constraint: 'p' positive, 'n' nonnegative, 'i' positive integer,
  // 'j' nonnegative integer, 's' free string, 'm' manifold name, 'b' 0/1,
  // 'l' comma list of reals (possibly empty), 'u' unsigned integer
  char kind;
  bool required;
};

// The flat schema. Calibration constants carry their provenance here:
//   nu_lsi_constant: upper log-Sobolev constant for the uniform start measure
//     on the unit sphere; the sharp value is 1, any upper value is admissible
//     and 2 is kept as a safe default.
//   var_floor, slope_lo, slope_hi: pilot-run calibrations for the
//     nonergodicity witness (long-run pilot at horizon 64).
//   tail_c1, tail_curv_c, tail_alpha: constants of the curvature growth
//     envelope K1(r) = tail_curv_c * (1 + r^tail_alpha) and the quadratic
//     weight c1 entering the sup-distance tail bound.
constexpr KeySpec kSchema[] = {
    {"master_seed", "42", 'u', true},
    {"out", "out", 's', true},
    {"dt", "0.001", 'p', true},
    {"n_paths", "10000", 'i', true},
    {"horizon", "1.0", 'p', false},
    {"manifold", "sphere2", 'm', false},
    {"dim", "1", 'i', false},
    {"threads", "0", 'j', false},
    {"plots", "0", 'b', false},
    {"cutoff_m", "2.0", 'p', false},
    {"cutoff_T", "1.0", 'p', false},
    {"fd_step", "0.05", 'p', false},
    {"nu_radius", "6.0", 'p', false},
    {"nu_lsi_constant", "2.0", 'p', false},
    {"eps", "0.5", 'p', false},
    {"t_list", "", 'l', false},
    {"x_list", "0.5,1,2", 'l', false},
    {"times", "0.25,0.5,1", 'l', false},
    {"shift_s", "0.7", 'p', false},
    {"tail_c1", "0.25", 'p', false},
    {"tail_curv_c", "0.01", 'p', false},
    {"tail_alpha", "1.0", 'p', false},
    {"tail_dt_fine", "0.00025", 'p', false},
    {"spde_J", "64", 'i', false},
    {"spde_L", "4.0", 'p', false},
    {"exact_J", "256", 'i', false},
    {"exact_L", "8.0", 'p', false},
    {"evolve_t", "10.0", 'n', false},
    {"burn_in", "2.0", 'n', false},
    {"l_max", "60", 'i', false},
    {"t_floor", "0.01", 'p', false},
    {"var_floor", "0.005", 'p', false},
    {"slope_lo", "-2.4", 's', false},
    {"slope_hi", "-1.6", 's', false},
};

const KeySpec* find_key(const std::string& key) {
  for (const auto& ks : kSchema)
    if (key == ks.key) return &ks;
  return nullptr;
}

bool parse_double(const std::string& s, double& out) {
  std::istringstream in(s);
  in >> out;
  return bool(in) && in.eof();
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::defaults() {
  Config c;
  for (const auto& ks : kSchema) c.values_[ks.key] = ks.def;
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (!find_key(key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::merged_with_defaults() const {
  Config c = defaults();
  for (const auto& [k, v] : values_) c.values_[k] = v;
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!find_key(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  double v;
  if (!parse_double(get_string(key), v))
    throw ConfigError("config key '" + key + "' is not a number");
  return v;
}

int Config::get_int(const std::string& key) const {
  double v = get_double(key);
  int i = static_cast<int>(v);
  if (double(i) != v) throw ConfigError("config key '" + key + "' is not an integer");
  return i;
}

std::uint64_t Config::get_seed(const std::string& key) const {
  std::string s = get_string(key);
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw ConfigError("");
    return v;
  } catch (...) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer");
  }
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::string s = get_string(key);
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double v;
    if (!parse_double(item, v))
      throw ConfigError("config key '" + key + "' has a non-numeric entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<Diagnostic> Config::validate() const {
  std::vector<Diagnostic> diags;
  for (const auto& ks : kSchema) {
    auto it = values_.find(ks.key);
    if (it == values_.end()) {
      if (ks.required) diags.push_back({ks.key, "missing required field"});
      continue;
    }
    const std::string& v = it->second;
    double d = 0.0;
    switch (ks.kind) {
      case 'p':
        if (!parse_double(v, d))
          diags.push_back({ks.key, "not a number"});
        else if (d <= 0.0)
          diags.push_back({ks.key, "must be positive"});
        break;
      case 'n':
        if (!parse_double(v, d))
          diags.push_back({ks.key, "not a number"});
        else if (d < 0.0)
          diags.push_back({ks.key, "must be nonnegative"});
        break;
      case 'i':
        if (!parse_double(v, d) || double(int(d)) != d)
          diags.push_back({ks.key, "not an integer"});
        else if (d <= 0.0)
          diags.push_back({ks.key, "must be a positive integer"});
        break;
      case 'j':
        if (!parse_double(v, d) || double(int(d)) != d)
          diags.push_back({ks.key, "not an integer"});
        else if (d < 0.0)
          diags.push_back({ks.key, "must be a nonnegative integer"});
        break;
      case 'b':
        if (v != "0" && v != "1") diags.push_back({ks.key, "must be 0 or 1"});
        break;
      case 'm':
        if (v != "euclidean" && v != "sphere2" && v != "hyperbolic2" && v != "all")
          diags.push_back({ks.key, "must be euclidean, sphere2, hyperbolic2, or all"});
        break;
      case 'u':
        try {
          size_t pos = 0;
          (void)std::stoull(v, &pos);
          if (pos != v.size()) diags.push_back({ks.key, "not an unsigned integer"});
        } catch (...) {
          diags.push_back({ks.key, "not an unsigned integer"});
        }
        break;
      case 'l': {
        std::istringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;
          double x;
          if (!parse_double(item, x)) {
            diags.push_back({ks.key, "has a non-numeric entry '" + item + "'"});
            break;
          }
        }
        break;
      }
      case 's':
      default:
        break;
    }
  }
  for (const auto& [k, v] : values_)
    if (!find_key(k)) diags.push_back({k, "unknown key"});
  return diags;
}

void Config::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
  if (!out.good()) throw ConfigError("write failed for " + path);
}

int resolve_threads(const Config& cfg) {
  if (cfg.has("threads")) {
    int t = cfg.get_int("threads");
    if (t > 0) return t;
  }
  return thread_count_from_env();
}

}  // namespace pathspace
