// Experiment configuration: a plain key=value file plus overrides, resolved
// into a model description and an accelerator configuration.
#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrfsim/apps/applications.hpp"
#include "mrfsim/tile_sim.hpp"

namespace mrfsim {

enum class ConfigErrorKind { Syntax, UnknownKey, BadValue, LabelRange, MissingFile, GroundTruthMismatch };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ConfigErrorKind kind() const { return kind_; }

 private:
  ConfigErrorKind kind_;
};

struct RunConfig {
  std::string application = "motion";  // motion | stereo
  std::string preset;                   // fills alpha/beta/T/L/iterations when set
  std::string frame0, frame1;           // motion inputs
  std::string right, left;              // stereo inputs
  std::string ground_truth;             // .flo (motion) or disparity PGM (stereo)
  double gt_scale = 1.0;                // disparity GT: gray value / scale

  int labels = apps::kMotionLabels;
  unsigned alpha = 6;
  unsigned beta = 6;
  std::vector<double> temperature{1.0};
  std::string smoothness = "potts";  // potts | l1
  int truncation = 3;
  int stereo_dir = 1;

  AcceleratorConfig accel;
  std::string output_dir = "out";
  bool reference = false;  // also run the double-precision sampler

  /// Keys in the order they are written back.
  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{
        "application", "preset",       "frame0",        "frame1",         "right",       "left",
        "ground_truth", "gt_scale",    "labels",        "alpha",          "beta",        "temperature",
        "smoothness",  "truncation",   "stereo_dir",    "grid_d",         "spus_per_spe", "lmem_pairs",
        "fifo_depth",  "bandwidth_bits", "message_bits", "seed",          "iterations",  "collection_start",
        "flush_cycles", "workers",     "record_trace",  "trace_start",    "oracle",      "output_dir",
        "reference"};
    return k;
  }

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] std::string get(const std::string& key) const;

  /// Copies the named preset's parameters; unknown names are rejected.
  void apply_preset(const std::string& name) {
    const auto p = apps::preset(name);
    if (!p) throw ConfigError(ConfigErrorKind::BadValue, "unknown preset '" + name + "'");
    preset = name;
    alpha = p->alpha;
    beta = p->beta;
    temperature = {p->temperature};
    labels = p->labels;
    accel.iterations = p->iterations;
    application = (name == "dimetrodon" || name == "rubberwhale" || name == "venus") ? "motion" : "stereo";
  }

  void validate() const {
    if (application != "motion" && application != "stereo")
      throw ConfigError(ConfigErrorKind::BadValue, "application must be 'motion' or 'stereo'");
    if (labels < 2 || labels > kMaxLabels)
      throw ConfigError(ConfigErrorKind::LabelRange, "label count " + std::to_string(labels) + " outside [2, 64]");
    if (application == "motion" && labels != apps::kMotionLabels)
      throw ConfigError(ConfigErrorKind::LabelRange, "motion estimation uses exactly 49 labels");
    for (double t : temperature)
      if (!(t > 0)) throw ConfigError(ConfigErrorKind::BadValue, "temperature must be positive");
    if (smoothness != "potts" && smoothness != "l1") throw ConfigError(ConfigErrorKind::BadValue, "smoothness must be 'potts' or 'l1'");
    if (stereo_dir != 1 && stereo_dir != -1) throw ConfigError(ConfigErrorKind::BadValue, "stereo_dir must be 1 or -1");
    if (!(gt_scale > 0)) throw ConfigError(ConfigErrorKind::BadValue, "gt_scale must be positive");
    try {
      accel.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(ConfigErrorKind::BadValue, e.what());
    }
  }

  [[nodiscard]] Smoothness smoothness_term() const {
    return {smoothness == "l1" ? SmoothnessKind::TruncatedL1 : SmoothnessKind::Potts, truncation};
  }

  /// key=value text that parses back to this configuration.
  [[nodiscard]] std::string to_text() const {
    std::ostringstream out;
    for (const auto& k : keys()) out << k << " = " << get(k) << "\n";
    return out.str();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(ConfigErrorKind::BadValue, "invalid value '" + v + "' for key '" + key + "'");
  return out;
}

// libstdc++ 11 lacks floating-point from_chars for some targets; strtod is enough here.
inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size())
    throw ConfigError(ConfigErrorKind::BadValue, "invalid value '" + v + "' for key '" + key + "'");
  return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(ConfigErrorKind::BadValue, "invalid boolean '" + v + "' for key '" + key + "'");
}

inline std::string format_double(double d) {
  std::ostringstream s;
  s.precision(17);
  s << d;
  return s.str();
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = trim(raw);
  if (key == "application") application = v;
  else if (key == "preset") { if (!v.empty()) apply_preset(v); else preset.clear(); }
  else if (key == "frame0") frame0 = v;
  else if (key == "frame1") frame1 = v;
  else if (key == "right") right = v;
  else if (key == "left") left = v;
  else if (key == "ground_truth") ground_truth = v;
  else if (key == "gt_scale") gt_scale = parse_double(key, v);
  else if (key == "labels") labels = parse_number<int>(key, v);
  else if (key == "alpha") alpha = parse_number<unsigned>(key, v);
  else if (key == "beta") beta = parse_number<unsigned>(key, v);
  else if (key == "temperature") {
    temperature.clear();
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, ',');) temperature.push_back(parse_double(key, trim(item)));
    if (temperature.empty()) throw ConfigError(ConfigErrorKind::BadValue, "temperature needs at least one value");
  }
  else if (key == "smoothness") smoothness = v;
  else if (key == "truncation") truncation = parse_number<int>(key, v);
  else if (key == "stereo_dir") stereo_dir = parse_number<int>(key, v);
  else if (key == "grid_d") accel.grid_d = parse_number<int>(key, v);
  else if (key == "spus_per_spe") accel.spus_per_spe = parse_number<int>(key, v);
  else if (key == "lmem_pairs") accel.lmem_pairs = parse_number<int>(key, v);
  else if (key == "fifo_depth") accel.fifo_depth = parse_number<int>(key, v);
  else if (key == "bandwidth_bits") accel.bandwidth_bits_per_cycle = parse_number<int>(key, v);
  else if (key == "message_bits") accel.message_bits = parse_number<int>(key, v);
  else if (key == "seed") accel.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "iterations") accel.iterations = parse_number<int>(key, v);
  else if (key == "collection_start") accel.collection_start = parse_number<int>(key, v);
  else if (key == "flush_cycles") accel.flush_cycles = parse_number<int>(key, v);
  else if (key == "workers") accel.workers = parse_number<int>(key, v);
  else if (key == "record_trace") accel.record_trace = parse_bool(key, v);
  else if (key == "trace_start") accel.trace_start = parse_number<int>(key, v);
  else if (key == "oracle") accel.oracle = parse_bool(key, v);
  else if (key == "output_dir") output_dir = v;
  else if (key == "reference") reference = parse_bool(key, v);
  else throw ConfigError(ConfigErrorKind::UnknownKey, "unknown configuration key '" + key + "'");
}

inline std::string RunConfig::get(const std::string& key) const {
  using detail::format_double;
  if (key == "application") return application;
  if (key == "preset") return preset;
  if (key == "frame0") return frame0;
  if (key == "frame1") return frame1;
  if (key == "right") return right;
  if (key == "left") return left;
  if (key == "ground_truth") return ground_truth;
  if (key == "gt_scale") return format_double(gt_scale);
  if (key == "labels") return std::to_string(labels);
  if (key == "alpha") return std::to_string(alpha);
  if (key == "beta") return std::to_string(beta);
  if (key == "temperature") {
    std::string s;
    for (std::size_t i = 0; i < temperature.size(); ++i) s += (i ? "," : "") + format_double(temperature[i]);
    return s;
  }
  if (key == "smoothness") return smoothness;
  if (key == "truncation") return std::to_string(truncation);
  if (key == "stereo_dir") return std::to_string(stereo_dir);
  if (key == "grid_d") return std::to_string(accel.grid_d);
  if (key == "spus_per_spe") return std::to_string(accel.spus_per_spe);
  if (key == "lmem_pairs") return std::to_string(accel.lmem_pairs);
  if (key == "fifo_depth") return std::to_string(accel.fifo_depth);
  if (key == "bandwidth_bits") return std::to_string(accel.bandwidth_bits_per_cycle);
  if (key == "message_bits") return std::to_string(accel.message_bits);
  if (key == "seed") return std::to_string(accel.seed);
  if (key == "iterations") return std::to_string(accel.iterations);
  if (key == "collection_start") return std::to_string(accel.collection_start);
  if (key == "flush_cycles") return std::to_string(accel.flush_cycles);
  if (key == "workers") return std::to_string(accel.workers);
  if (key == "record_trace") return accel.record_trace ? "true" : "false";
  if (key == "trace_start") return std::to_string(accel.trace_start);
  if (key == "oracle") return accel.oracle ? "true" : "false";
  if (key == "output_dir") return output_dir;
  if (key == "reference") return reference ? "true" : "false";
  throw ConfigError(ConfigErrorKind::UnknownKey, "unknown configuration key '" + key + "'");
}

/// Applies one "key=value" assignment.
inline void apply_assignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(ConfigErrorKind::Syntax, "expected key=value, got '" + assignment + "'");
  cfg.set(detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

/// Parses key=value text; '#' starts a comment. A preset line is applied
/// first so that explicit keys override it regardless of order.
[[nodiscard]] inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<std::pair<int, std::string>> lines;
  std::istringstream in(text);
  int n = 0;
  for (std::string line; std::getline(in, line);) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos)
      throw ConfigError(ConfigErrorKind::Syntax, "line " + std::to_string(n) + ": expected key=value");
    if (detail::trim(line.substr(0, line.find('='))) == "preset") lines.insert(lines.begin(), {n, line});
    else lines.emplace_back(n, line);
  }
  for (const auto& [ln, line] : lines) {
    try {
      apply_assignment(cfg, line);
    } catch (const ConfigError& e) {
      throw ConfigError(e.kind(), "line " + std::to_string(ln) + ": " + e.what());
    }
  }
  return cfg;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(ConfigErrorKind::MissingFile, "configuration file not found: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mrfsim
