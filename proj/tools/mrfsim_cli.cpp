// mrfsim: experiment runner and log analysis front end.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mrfsim/mrfsim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mrfsim;
using namespace mrfsim::apps;

namespace {

// Exit codes. Config kinds map to 3..8 in enum order.
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBadFile = 9;

int exit_code(ConfigErrorKind k) { return 3 + static_cast<int>(k); }

const char* kind_name(ConfigErrorKind k) {
  switch (k) {
    case ConfigErrorKind::Syntax: return "syntax error";
    case ConfigErrorKind::UnknownKey: return "unknown key";
    case ConfigErrorKind::BadValue: return "bad value";
    case ConfigErrorKind::LabelRange: return "label count out of range";
    case ConfigErrorKind::MissingFile: return "missing file";
    case ConfigErrorKind::GroundTruthMismatch: return "ground truth mismatch";
  }
  return "error";
}

/// Thrown for malformed binary inputs (log or trace files).
struct BadFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(ConfigErrorKind::MissingFile, what + " path not set");
  if (!fs::is_regular_file(path)) throw ConfigError(ConfigErrorKind::MissingFile, what + " not found: " + path);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

/// A key=value file, or the "config" object of a run summary.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  require_file(path, "configuration file");
  RunConfig cfg;
  if (fs::path(path).extension() == ".json") {
    json j;
    try {
      j = json::parse(slurp(path));
    } catch (const json::exception& e) {
      throw ConfigError(ConfigErrorKind::Syntax, path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
      throw ConfigError(ConfigErrorKind::Syntax, path + ": no \"config\" object");
    std::string text;
    for (const auto& [k, v] : j["config"].items()) text += k + " = " + v.get<std::string>() + "\n";
    cfg = parse_config(text);
  } else {
    cfg = load_config(path);
  }
  for (const auto& o : overrides) {
    try {
      apply_assignment(cfg, o);
    } catch (const ConfigError& e) {
      throw ConfigError(e.kind(), "--set " + o + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

void write_histogram_csv(const fs::path& p, const Histogram& h) {
  std::ofstream f(p);
  f << "rv,label,count\n";
  for (const auto& b : h.bins()) f << b.rv << ',' << int{b.label} << ',' << b.count << '\n';
}

Histogram read_histogram_csv(const std::string& path) {
  require_file(path, "histogram");
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  std::vector<Histogram::Bin> bins;
  while (std::getline(f, line)) {
    unsigned rv = 0, label = 0;
    unsigned long long count = 0;
    if (std::sscanf(line.c_str(), "%u,%u,%llu", &rv, &label, &count) != 3) throw BadFile(path + ": malformed row '" + line + "'");
    bins.push_back({rv, static_cast<std::uint8_t>(label), count});
  }
  return Histogram(std::move(bins));
}

std::vector<EvictionRecord> read_log(const std::string& path) {
  require_file(path, "log file");
  try {
    return read_log_file(path);
  } catch (const std::exception& e) {
    throw BadFile(e.what());
  }
}

LabelTrace read_trace(const std::string& path) {
  require_file(path, "trace file");
  try {
    return read_trace_file(path);
  } catch (const std::exception& e) {
    throw BadFile(e.what());
  }
}

int labels_in(const Histogram& h) {
  int m = 1;
  for (const auto& b : h.bins()) m = std::max(m, int{b.label});
  return m + 1;
}

json counters_json(const SimCounters& c) {
  return {{"rv_updates", c.rv_updates},           {"cycles", c.cycles},
          {"lmem_checks", c.lmem_checks},         {"lmem_conflicts", c.lmem_conflicts},
          {"s2_checks", c.s2_checks},             {"s2_conflicts", c.s2_conflicts},
          {"capacity_evictions", c.capacity_evictions}, {"saturation_evictions", c.saturation_evictions}};
}

json storage_json(const perf::StorageComparison& s) {
  return {{"naive_bytes", s.naive_bytes},
          {"log_bytes", s.log_bytes},
          {"on_chip_bytes", s.on_chip_bytes},
          {"hybrid_bytes", s.hybrid_bytes()},
          {"savings", s.savings()}};
}

// ---------------------------------------------------------------------------
// run

struct Inputs {
  MrfModel model;
  std::optional<FlowGroundTruth> flow_gt;
  std::optional<DisparityGroundTruth> disp_gt;
};

Inputs load_inputs(const RunConfig& cfg) {
  Inputs in;
  const double t0 = cfg.temperature.front();
  if (cfg.application == "motion") {
    require_file(cfg.frame0, "frame0");
    require_file(cfg.frame1, "frame1");
    in.model = make_motion_model(read_pgm(cfg.frame0), read_pgm(cfg.frame1), cfg.alpha, cfg.beta, t0, cfg.smoothness_term());
    if (!cfg.ground_truth.empty()) {
      require_file(cfg.ground_truth, "ground truth");
      in.flow_gt = read_flo(cfg.ground_truth);
      if (in.flow_gt->width() != in.model.width || in.flow_gt->height() != in.model.height)
        throw ConfigError(ConfigErrorKind::GroundTruthMismatch,
                          "ground truth is " + std::to_string(in.flow_gt->width()) + "x" + std::to_string(in.flow_gt->height()) +
                              ", frames are " + std::to_string(in.model.width) + "x" + std::to_string(in.model.height));
    }
  } else {
    require_file(cfg.right, "right view");
    require_file(cfg.left, "left view");
    in.model = make_stereo_model(read_pgm(cfg.right), read_pgm(cfg.left), cfg.labels, cfg.alpha, cfg.beta, t0, cfg.stereo_dir,
                                 cfg.smoothness_term());
    if (!cfg.ground_truth.empty()) {
      require_file(cfg.ground_truth, "ground truth");
      in.disp_gt = decode_disparity_gt(read_pgm(cfg.ground_truth), cfg.gt_scale);
      const auto& d = in.disp_gt->disparity;
      if (d.width != in.model.width || d.height != in.model.height)
        throw ConfigError(ConfigErrorKind::GroundTruthMismatch,
                          "ground truth is " + std::to_string(d.width) + "x" + std::to_string(d.height) + ", views are " +
                              std::to_string(in.model.width) + "x" + std::to_string(in.model.height));
    }
  }
  in.model.temperature = TemperatureSchedule(cfg.temperature);
  return in;
}

/// Quality metrics of a mode map, when ground truth is available.
json metrics(const Inputs& in, const Grid<std::uint8_t>& mode) {
  json j = json::object();
  if (in.flow_gt) j["epe"] = epe(labels_to_flow(mode), *in.flow_gt);
  if (in.disp_gt) j["bad_pixel_percent"] = bad_pixel(mode, *in.disp_gt);
  return j;
}

void write_label_maps(const fs::path& dir, const std::string& stem, const RunConfig& cfg, const Grid<std::uint8_t>& mode) {
  write_pgm((dir / (stem + ".pgm")).string(), label_image(mode, cfg.labels));
  if (cfg.application == "motion") {
    const auto flow = labels_to_flow(mode);
    write_pgm((dir / (stem + "_flow_u.pgm")).string(), flow_component_image(flow, true));
    write_pgm((dir / (stem + "_flow_v.pgm")).string(), flow_component_image(flow, false));
  }
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& out_override) {
  auto cfg = load_run_config(config_path, overrides);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const auto in = load_inputs(cfg);
  const auto& m = in.model;
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);

  const auto start = std::chrono::steady_clock::now();
  TileSimulator sim(m, cfg.accel);
  sim.run();
  const auto res = sim.finish();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto records = res.log.records();
  write_log_file((dir / "uq.mrfl").string(), records);
  const auto hist = reconstruct_histogram(res.log);
  const auto mode = mode_output(hist, m.width, m.height, m.labels);
  write_label_maps(dir, "labels", cfg, mode);

  // per-iteration evictions and bandwidth utilization
  perf::PerfParams run_pp;
  run_pp.n_spus = sim.num_spus();
  run_pp.n_labels = m.labels;
  run_pp.message_bits = cfg.accel.message_bits;
  run_pp.bandwidth_bits_per_cycle = cfg.accel.bandwidth_bits_per_cycle;
  perf::PerfParams asic_pp = run_pp;
  asic_pp.n_spus = perf::kAsicSpus;
  double max_util = 0, max_util_asic = 0;
  {
    std::ofstream f(dir / "evictions.csv");
    f << "iteration,evictions,rate,utilization,utilization_asic\n";
    const auto& per = sim.evictions_per_iteration();
    for (std::size_t i = 0; i < per.size(); ++i) {
      run_pp.eviction_rate = asic_pp.eviction_rate = double(per[i]) / m.num_rvs();
      const double u = perf::bandwidth_utilization(run_pp), ua = perf::bandwidth_utilization(asic_pp);
      max_util = std::max(max_util, u);
      max_util_asic = std::max(max_util_asic, ua);
      f << i << ',' << per[i] << ',' << run_pp.eviction_rate << ',' << u << ',' << ua << '\n';
    }
  }

  // sliding window of 1000 modeled cycles over the eviction emission times
  constexpr std::uint64_t kCycleWindow = 1000;
  std::vector<std::uint64_t> times;
  for (const auto& r : sim.evictions()) times.push_back(r.cycle);
  std::sort(times.begin(), times.end());
  const auto& counters = sim.state().counters;
  const double updates_per_cycle = counters.cycles ? double(counters.rv_updates) / double(counters.cycles) : 0.0;
  const auto burst = perf::max_events_in_window(times, kCycleWindow);
  run_pp.eviction_rate = asic_pp.eviction_rate =
      updates_per_cycle > 0 ? double(burst) / (updates_per_cycle * kCycleWindow) : 0.0;
  const double burst_util = perf::bandwidth_utilization(run_pp), burst_util_asic = perf::bandwidth_utilization(asic_pp);

  const int window = cfg.accel.iterations - cfg.accel.resolved_collection_start();
  const auto storage = perf::storage_comparison(static_cast<std::uint64_t>(window), static_cast<std::uint64_t>(m.num_rvs()),
                                                res.log.lines().size(), cfg.accel.lmem_pairs, cfg.accel.message_bits);
  const auto plan = replication_plan(m, sim.tiles());
  const auto hops = check_one_hop(m, sim.tiles(), plan);
  std::size_t hop_label = 0, hop_s2 = 0;
  for (const auto& h : hops) (h.kind == AccessKind::NeighborLabel ? hop_label : hop_s2)++;

  json summary;
  json jc = json::object();
  for (const auto& k : RunConfig::keys()) jc[k] = cfg.get(k);
  summary["config"] = jc;
  summary["seed"] = cfg.accel.seed;
  summary["grid"] = {{"width", m.width},
                     {"height", m.height},
                     {"labels", m.labels},
                     {"tile_width", sim.tiles().tile_width},
                     {"tile_height", sim.tiles().tile_height},
                     {"padded_width", sim.tiles().padded_width},
                     {"padded_height", sim.tiles().padded_height},
                     {"spus", sim.num_spus()},
                     {"cycles_per_iteration", sim.cycles_per_iteration()}};
  summary["counters"] = counters_json(sim.state().counters);
  summary["banking"] = {{"period_rows", sim.banks().period_rows},
                        {"period_cols", sim.banks().period_cols},
                        {"verify_conflicts", verify_banking(sim.banks(), m.width, m.height)}};
  summary["one_hop"] = {{"replication_x", plan.copies_x},
                        {"replication_y", plan.copies_y},
                        {"neighbor_violations", hop_label},
                        {"singleton2_violations", hop_s2}};
  summary["log"] = {{"records", records.size()},
                    {"lines", res.log.lines().size()},
                    {"bytes", res.log.bytes()},
                    {"residual_records", sim.residual_records().size()},
                    {"backpressure_events", res.stats.backpressure_events},
                    {"max_fifo_occupancy", res.stats.max_occupancy_per_level}};
  summary["collection"] = {{"start", cfg.accel.resolved_collection_start()}, {"window", window}};
  summary["utilization"] = {{"max", max_util},
                            {"max_asic", max_util_asic},
                            {"max_1000_cycles", burst_util},
                            {"max_1000_cycles_asic", burst_util_asic},
                            {"max_evictions_1000_cycles", burst}};
  summary["storage"] = storage_json(storage);
  summary["metrics"] = metrics(in, mode);

  if (cfg.accel.record_trace) write_trace_file((dir / "trace.mrft").string(), sim.trace());
  if (cfg.accel.oracle) {
    const auto oracle = Histogram::from_dense(sim.oracle_counts(), m.labels);
    write_histogram_csv(dir / "oracle_histogram.csv", oracle);
    summary["oracle_match"] = oracle == hist;
  }
  if (cfg.reference) {
    ReferenceOptions opt{cfg.accel.iterations, cfg.accel.seed, cfg.accel.collection_start};
    const auto ref = reference_sampler(m, opt);
    const auto ref_mode = mode_output(std::span<const std::uint32_t>(ref.counts), m.width, m.height, m.labels);
    write_label_maps(dir, "reference", cfg, ref_mode);
    summary["reference_metrics"] = metrics(in, ref_mode);
  }

  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "resolved.cfg", cfg.to_text());

  std::cout << "run: " << m.width << "x" << m.height << " L=" << m.labels << ", " << cfg.accel.iterations << " iterations in "
            << seconds << " s\n";
  std::cout << "log: " << records.size() << " records, " << res.log.bytes() << " bytes; storage savings "
            << 100 * storage.savings() << "%\n";
  if (summary["metrics"].contains("epe")) std::cout << "EPE: " << summary["metrics"]["epe"].get<double>() << "\n";
  if (summary["metrics"].contains("bad_pixel_percent"))
    std::cout << "BP%: " << summary["metrics"]["bad_pixel_percent"].get<double>() << "\n";
  std::cout << "outputs in " << dir.string() << "\n";
  if (cfg.accel.oracle && !summary["oracle_match"].get<bool>()) {
    std::cerr << "error: reconstructed histogram differs from the oracle counters\n";
    return kExitFailure;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reconstruct / stats

int cmd_reconstruct(const std::string& log_path, const std::string& out, int labels, int width, int height,
                    const std::string& oracle_path) {
  const auto records = read_log(log_path);
  const auto hist = reconstruct_histogram(records);
  const int L = labels > 0 ? labels : labels_in(hist);
  const fs::path dir = out;
  fs::create_directories(dir);
  write_histogram_csv(dir / "histogram.csv", hist);

  std::ofstream f(dir / "uq_stats.csv");
  f << "rv,total,mode,top1,entropy\n";
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(L));
  std::vector<std::pair<std::uint32_t, double>> entropy;
  const auto& bins = hist.bins();
  for (std::size_t i = 0; i < bins.size();) {
    const auto rv = bins[i].rv;
    std::fill(counts.begin(), counts.end(), 0);
    std::uint64_t total = 0;
    for (; i < bins.size() && bins[i].rv == rv; ++i) {
      if (bins[i].label >= L) throw BadFile("label " + std::to_string(bins[i].label) + " outside --labels");
      counts[bins[i].label] = bins[i].count;
      total += bins[i].count;
    }
    const auto s = uq_stats(std::span<const std::uint64_t>(counts));
    f << rv << ',' << total << ',' << s.mode << ',' << s.top1 << ',' << s.entropy << '\n';
    entropy.emplace_back(rv, s.entropy);
  }
  if (width > 0 && height > 0) {
    Image8 img(width, height);
    for (auto [rv, h] : entropy)
      if (rv < img.size()) img.data[rv] = static_cast<std::uint8_t>(std::lround(255 * h));
    write_pgm((dir / "uncertainty.pgm").string(), img);
  }
  std::cout << "reconstruct: " << records.size() << " records, " << entropy.size() << " RVs, " << bins.size() << " bins\n";
  if (!oracle_path.empty()) {
    const bool same = read_histogram_csv(oracle_path) == hist;
    std::cout << "oracle: " << (same ? "match" : "MISMATCH") << "\n";
    if (!same) return kExitFailure;
  }
  return 0;
}

int cmd_stats(const std::string& log_path) {
  const auto records = read_log(log_path);
  const auto hist = reconstruct_histogram(records);
  std::uint64_t saturated = 0;
  for (const auto& r : records) saturated += r.count == kCounterMax;
  std::uint64_t rvs = 0, tmin = UINT64_MAX, tmax = 0, total = 0;
  const auto& bins = hist.bins();
  std::size_t multi = 0;
  for (std::size_t i = 0; i < bins.size();) {
    const auto rv = bins[i].rv;
    std::uint64_t t = 0;
    std::size_t n = 0;
    for (; i < bins.size() && bins[i].rv == rv; ++i, ++n) t += bins[i].count;
    ++rvs;
    multi += n > 2;
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
    total += t;
  }
  json j{{"records", records.size()},
         {"saturation_records", saturated},
         {"rvs", rvs},
         {"bins", bins.size()},
         {"labels_observed", bins.empty() ? 0 : labels_in(hist)},
         {"total_count", total},
         {"min_rv_total", rvs ? tmin : 0},
         {"max_rv_total", tmax},
         {"rvs_with_more_than_two_labels", multi}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// perf

struct PerfArgs {
  double spus = perf::kAsicSpus;
  double labels = 49;
  double message_bits = 32;
  double bandwidth = 512;
  double rate = -1;
  double clock = perf::kPrototypeClockHz;
  double clock_spus = perf::kPrototypeSpus;
  int max_d = 8;
  int s = 2;
  std::string summary;
};

int cmd_perf(const PerfArgs& a) {
  std::printf("throughput: %g SPUs x %g Hz = %.6g labels/s\n", a.clock_spus, a.clock, perf::throughput(a.clock_spus, a.clock, a.labels).labels_per_sec);
  const auto tp = perf::throughput(a.clock_spus, a.clock, a.labels);
  std::printf("speedup over prior FPGA sampler: %.4f\n",
              perf::speedup(tp.labels_per_sec, perf::kPriorFpgaLabelsPerSample, perf::kPriorFpgaSamplesPerSec));
  const auto asic = perf::throughput(perf::kAsicSpus, perf::kAsicClockHz, a.labels);
  std::printf("ASIC: %g SPUs x %g Hz = %.6g labels/s, %.6g RV updates/s at L=%g\n", perf::kAsicSpus, perf::kAsicClockHz,
              asic.labels_per_sec, asic.labels_per_sec / a.labels, a.labels);

  perf::PerfParams pp{a.spus, a.labels, a.message_bits, a.bandwidth, 0.0};
  const double coeff = perf::bandwidth_utilization({a.spus, a.labels, a.message_bits, a.bandwidth, 1.0});
  std::printf("bandwidth: utilization = %.6g x eviction rate (SPUs %g, L %g, %g-bit messages, %g bits/cycle)\n", coeff, a.spus,
              a.labels, a.message_bits, a.bandwidth);
  if (a.rate >= 0) {
    pp.eviction_rate = a.rate;
    std::printf("bandwidth: rate %g -> utilization %.6g\n", a.rate, perf::bandwidth_utilization(pp));
  }

  std::printf("topology (S=%d)\n%4s %10s %10s %10s %10s %10s %10s\n", a.s, "D", "nn_links", "nn_xbar", "nn_total", "noc_links",
              "noc_xbar", "noc_total");
  for (int d = 1; d <= a.max_d; ++d) {
    const auto t = perf::topology_cost(d, a.s);
    std::printf("%4d %10lld %10lld %10lld %10lld %10lld %10lld\n", d, t.nn_links, t.nn_xbar, t.nn_total(), t.noc_links, t.noc_xbar,
                t.noc_total());
  }

  if (!a.summary.empty()) {
    require_file(a.summary, "run summary");
    const auto j = json::parse(slurp(a.summary));
    const auto& s = j.at("storage");
    std::printf("storage: no log %llu bytes, histogram log %llu + on-chip %llu = %llu bytes, savings %.2f%%\n",
                s.at("naive_bytes").get<unsigned long long>(), s.at("log_bytes").get<unsigned long long>(),
                s.at("on_chip_bytes").get<unsigned long long>(), s.at("hybrid_bytes").get<unsigned long long>(),
                100 * s.at("savings").get<double>());
    const auto& u = j.at("utilization");
    std::printf("measured max utilization per iteration: %.6g (configured SPUs), %.6g (%g SPUs)\n", u.at("max").get<double>(),
                u.at("max_asic").get<double>(), perf::kAsicSpus);
    std::printf("measured max utilization per 1000 cycles: %.6g (configured SPUs), %.6g (%g SPUs)\n",
                u.at("max_1000_cycles").get<double>(), u.at("max_1000_cycles_asic").get<double>(), perf::kAsicSpus);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// trace analyses

int cmd_unique_labels(const std::string& trace_path, int begin, int end, const std::string& out) {
  const auto t = read_trace(trace_path);
  if (end < 0) end = t.num_frames();
  if (begin < 0) begin = t.num_frames() / 2;
  const auto cdf = unique_label_cdf(t, begin, end);
  std::ofstream f;
  if (!out.empty()) {
    f.open(out);
    if (!f) throw std::runtime_error("cannot write " + out);
  }
  std::ostream& o = out.empty() ? std::cout : f;
  o << "unique_labels,fraction_at_most\n";
  for (std::size_t k = 0; k < cdf.size(); ++k) o << k + 1 << ',' << cdf[k] << '\n';
  std::cerr << "frames " << begin << ".." << end << " of " << t.num_frames() << ": " << 100 * (1 - cdf[1])
            << "% of pixels take more than two labels\n";
  return 0;
}

int cmd_lmem_sweep(const std::string& trace_path, int max_pairs, double spus, double message_bits, double bandwidth,
                   const std::string& out, const std::string& per_frame) {
  const auto t = read_trace(trace_path);
  if (max_pairs < 1 || max_pairs > kMaxLmemPairs) throw ConfigError(ConfigErrorKind::BadValue, "--max-pairs must be in [1, 8]");
  std::ostringstream o, pf;
  o << "pairs,capacity_evictions,saturation_evictions,max_rate,max_utilization\n";
  pf << "frame";
  for (int p = 1; p <= max_pairs; ++p) pf << ",utilization_" << p;
  pf << '\n';
  std::vector<std::vector<double>> util;
  for (int p = 1; p <= max_pairs; ++p) {
    const auto pt = trace_lmem_sim(t, p);
    perf::PerfParams pp{spus, double(t.labels), message_bits, bandwidth, pt.max_rate};
    o << p << ',' << pt.capacity_evictions << ',' << pt.saturation_evictions << ',' << pt.max_rate << ','
      << perf::bandwidth_utilization(pp) << '\n';
    auto& u = util.emplace_back();
    for (auto ev : pt.evictions_per_frame) {
      pp.eviction_rate = double(ev) / t.num_rvs();
      u.push_back(perf::bandwidth_utilization(pp));
    }
  }
  for (int f = 0; f < t.num_frames(); ++f) {
    pf << t.first_iteration + f;
    for (const auto& u : util) pf << ',' << u[static_cast<std::size_t>(f)];
    pf << '\n';
  }
  if (out.empty()) std::cout << o.str();
  else write_text(out, o.str());
  if (!per_frame.empty()) write_text(per_frame, pf.str());
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& app, int width, int height, int labels, std::uint64_t seed, const std::string& out) {
  const fs::path dir = out;
  fs::create_directories(dir);
  std::ostringstream cfg;
  if (app == "motion") {
    const auto s = synth_motion(width, height, seed);
    write_pgm((dir / "frame0.pgm").string(), s.frame0);
    write_pgm((dir / "frame1.pgm").string(), s.frame1);
    write_flo((dir / "gt.flo").string(), s.gt);
    cfg << "preset = venus\nframe0 = " << (dir / "frame0.pgm").string() << "\nframe1 = " << (dir / "frame1.pgm").string()
        << "\nground_truth = " << (dir / "gt.flo").string() << "\n";
  } else if (app == "stereo") {
    if (labels < 2 || labels > kMaxLabels)
      throw ConfigError(ConfigErrorKind::LabelRange, "label count " + std::to_string(labels) + " outside [2, 64]");
    const auto s = synth_stereo(width, height, labels, seed);
    write_pgm((dir / "right.pgm").string(), s.right);
    write_pgm((dir / "left.pgm").string(), s.left);
    const double scale = 255.0 / labels;
    write_pgm((dir / "gt.pgm").string(), encode_disparity_gt(s.gt, scale));
    cfg << "preset = art\nlabels = " << labels << "\nright = " << (dir / "right.pgm").string() << "\nleft = "
        << (dir / "left.pgm").string() << "\nground_truth = " << (dir / "gt.pgm").string() << "\ngt_scale = " << scale << "\n";
  } else {
    throw ConfigError(ConfigErrorKind::BadValue, "application must be 'motion' or 'stereo'");
  }
  write_text(dir / "run.cfg", cfg.str());
  std::cout << "wrote " << (dir / "run.cfg").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mrfsim: tiled Gibbs-sampling MRF accelerator simulator"};
  app.require_subcommand(1);

  std::string config, out, rec_out = "reconstruct", synth_out = "synth", log_path, trace_path, oracle, per_frame;
  std::vector<std::string> sets;
  int labels = 0, width = 0, height = 0, synth_w = 105, synth_h = 95, synth_labels = 28, begin = -1, end = -1, max_pairs = kMaxLmemPairs;
  std::uint64_t seed = 11;
  std::string application;
  PerfArgs perf_args;
  double spus = perf::kAsicSpus, message_bits = 32, bandwidth = 512;

  auto* run = app.add_subcommand("run", "run the fixed-point simulator on a configuration");
  run->add_option("config", config, "key=value file or a summary.json from an earlier run")->required();
  run->add_option("--set", sets, "override one key (repeatable)");
  run->add_option("--out", out, "output directory (overrides output_dir)");

  auto* rec = app.add_subcommand("reconstruct", "rebuild histograms and uncertainty statistics from a log");
  rec->add_option("log", log_path)->required();
  rec->add_option("--out", rec_out, "output directory")->capture_default_str();
  rec->add_option("--labels", labels, "label count (default: inferred from the log)");
  rec->add_option("--width", width, "grid width, enables uncertainty.pgm");
  rec->add_option("--height", height, "grid height");
  rec->add_option("--oracle", oracle, "oracle_histogram.csv to compare against");

  auto* stats = app.add_subcommand("stats", "summarize a log file as JSON");
  stats->add_option("log", log_path)->required();

  auto* pf = app.add_subcommand("perf", "analytic performance report");
  pf->add_option("--spus", perf_args.spus, "SPUs in the bandwidth model")->capture_default_str();
  pf->add_option("--labels", perf_args.labels)->capture_default_str();
  pf->add_option("--message-bits", perf_args.message_bits)->capture_default_str();
  pf->add_option("--bandwidth", perf_args.bandwidth, "off-chip bits per cycle")->capture_default_str();
  pf->add_option("--rate", perf_args.rate, "evictions per RV update");
  pf->add_option("--clock", perf_args.clock, "clock for the throughput line (Hz)")->capture_default_str();
  pf->add_option("--clock-spus", perf_args.clock_spus, "SPUs for the throughput line")->capture_default_str();
  pf->add_option("--max-d", perf_args.max_d, "largest SPE grid in the topology table")->capture_default_str();
  pf->add_option("--s", perf_args.s, "SPUs per SPE in the topology table")->capture_default_str();
  pf->add_option("--summary", perf_args.summary, "summary.json of a run for the storage comparison");

  auto* ul = app.add_subcommand("trace-unique-labels", "unique-label CDF of a trace window");
  ul->add_option("trace", trace_path)->required();
  ul->add_option("--begin", begin, "first frame (default: half-way)");
  ul->add_option("--end", end, "one past the last frame (default: all)");
  ul->add_option("--out", out, "CSV path (default: stdout)");

  auto* sw = app.add_subcommand("lmem-sweep", "replay a trace with 1..N label-memory pairs");
  sw->add_option("trace", trace_path)->required();
  sw->add_option("--max-pairs", max_pairs)->capture_default_str();
  sw->add_option("--spus", spus)->capture_default_str();
  sw->add_option("--message-bits", message_bits)->capture_default_str();
  sw->add_option("--bandwidth", bandwidth)->capture_default_str();
  sw->add_option("--out", out, "CSV path (default: stdout)");
  sw->add_option("--per-frame", per_frame, "per-frame utilization CSV");

  auto* sy = app.add_subcommand("synth", "write a synthetic input set and a config for it");
  sy->add_option("application", application, "motion | stereo")->required();
  sy->add_option("--width", synth_w)->capture_default_str();
  sy->add_option("--height", synth_h)->capture_default_str();
  sy->add_option("--labels", synth_labels, "stereo label count")->capture_default_str();
  sy->add_option("--seed", seed)->capture_default_str();
  sy->add_option("--out", synth_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(config, sets, out);
    if (*rec) return cmd_reconstruct(log_path, rec_out, labels, width, height, oracle);
    if (*stats) return cmd_stats(log_path);
    if (*pf) return cmd_perf(perf_args);
    if (*ul) return cmd_unique_labels(trace_path, begin, end, out);
    if (*sw) return cmd_lmem_sweep(trace_path, max_pairs, spus, message_bits, bandwidth, out, per_frame);
    if (*sy) return cmd_synth(application, synth_w, synth_h, synth_labels, seed, synth_out);
  } catch (const ConfigError& e) {
    std::cerr << "error (" << kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const BadFile& e) {
    std::cerr << "error (bad input file): " << e.what() << "\n";
    return kExitBadFile;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
