// Acceptance gate: one PASS/FAIL line per criterion. Full-size scenes by
// default; --quick keeps only the downscaled proxies.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mrfsim/apps/applications.hpp"
#include "mrfsim/apps/reference_sampler.hpp"
#include "mrfsim/apps/synthetic.hpp"
#include "mrfsim/banking.hpp"
#include "mrfsim/perf_model.hpp"
#include "mrfsim/spu.hpp"
#include "mrfsim/tile_sim.hpp"
#include "mrfsim/uq_log.hpp"
#include "oracles.hpp"

using namespace mrfsim;
using namespace mrfsim::apps;

namespace {

// Pinned tolerances.
constexpr int kLogRuns = 50;
constexpr int kAlgRuns = 1000;
constexpr int kOrderModels = 20;
constexpr int kSamplerVectors = 1000;
constexpr double kUniqueProxyMax = 0.25;  // > 2 labels, 105x95 / 1000 iterations
constexpr double kUniqueFullMax = 0.20;   // > 2 labels, 210x190 / 3000 iterations
constexpr double kUtilMax = 1.0;
constexpr double kSavingsMin = 0.50;
constexpr double kSpeedupTol = 0.01;
constexpr double kEpeSlack = 0.5;
constexpr double kBpSlack = 5.0;
constexpr std::uint64_t kSeed = 20240601;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Scenes shared by several criteria.

struct SceneRun {
  std::string name;
  MrfModel model;
  AcceleratorConfig config;
  std::vector<std::uint32_t> counts;     // reconstructed from the log
  std::uint64_t log_lines = 0;
  SimCounters counters;
  LabelTrace trace;
  Grid<std::uint8_t> mode;
  std::optional<FlowGroundTruth> flow_gt;
  std::optional<DisparityGroundTruth> disp_gt;
  double seconds = 0;
};

SceneRun run_scene(std::string name, MrfModel m, AcceleratorConfig cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SceneRun out;
  out.name = std::move(name);
  TileSimulator sim(m, cfg);
  sim.run();
  const auto res = sim.finish();
  const auto hist = reconstruct_histogram(res.log);
  out.counts = hist.to_dense(m.num_rvs(), m.labels);
  out.log_lines = res.log.lines().size();
  out.counters = sim.state().counters;
  out.trace = sim.trace();
  out.mode = mode_output(std::span<const std::uint32_t>(out.counts), m.width, m.height, m.labels);
  out.model = std::move(m);
  out.config = cfg;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

AcceleratorConfig scene_config(int iterations, int collection_start, int trace_start) {
  AcceleratorConfig c;
  c.seed = kSeed;
  c.iterations = iterations;
  c.collection_start = collection_start;
  c.record_trace = true;
  c.trace_start = trace_start;
  return c;
}

SceneRun motion_scene(int w, int h, int iterations, int collection_start, int trace_start) {
  const auto p = *preset("venus");
  const auto s = synth_motion(w, h, 11);
  auto run = run_scene(fmt("venus %dx%d/%d", w, h, iterations),
                       make_motion_model(s.frame0, s.frame1, p.alpha, p.beta, p.temperature),
                       scene_config(iterations, collection_start, trace_start));
  run.flow_gt = s.gt;
  return run;
}

SceneRun stereo_scene(int w, int h, int crop, int iterations, int collection_start, int trace_start) {
  const auto p = *preset("art");
  auto s = synth_stereo(w, h, p.labels, 12);
  if (crop > 0) {
    // centered crop of the full scene
    const int r0 = (h - crop) / 2, c0 = (w - crop) / 2;
    auto cut = [&](const auto& g) {
      std::decay_t<decltype(g)> o(crop, crop);
      for (int r = 0; r < crop; ++r)
        for (int c = 0; c < crop; ++c) o.at(r, c) = g.at(r0 + r, c0 + c);
      return o;
    };
    s.right = cut(s.right);
    s.left = cut(s.left);
    s.gt.disparity = cut(s.gt.disparity);
    s.gt.valid = cut(s.gt.valid);
    w = h = crop;
  }
  auto run = run_scene(fmt("art %dx%d/%d", w, h, iterations),
                       make_stereo_model(s.right, s.left, p.labels, p.alpha, p.beta, p.temperature),
                       scene_config(iterations, collection_start, trace_start));
  run.disp_gt = s.gt;
  return run;
}

/// Frames [from, to) of a trace as a trace of their own.
LabelTrace slice(const LabelTrace& t, int from, int to) {
  LabelTrace s = t;
  s.first_iteration = t.first_iteration + from;
  s.frames.assign(t.frames.begin() + static_cast<std::ptrdiff_t>(from) * t.num_rvs(),
                  t.frames.begin() + static_cast<std::ptrdiff_t>(to) * t.num_rvs());
  return s;
}

/// The sweep trace starts at the collection window.
LabelTrace collection_trace(const SceneRun& s) {
  const int from = s.config.resolved_collection_start() - s.trace.first_iteration;
  return slice(s.trace, from, s.trace.num_frames());
}

// ---------------------------------------------------------------------------

Result log_exactness() {
  std::mt19937_64 rng(kSeed);
  const int label_choices[] = {4, 8, 16};
  int ok = 0;
  std::uint64_t records = 0, saturations = 0;
  for (int run = 0; run < kLogRuns; ++run) {
    const int L = label_choices[run % 3];
    const auto m = oracle::random_model(rng, 64, 64, L);
    AcceleratorConfig cfg;
    cfg.grid_d = 1 + static_cast<int>(rng() % 4);
    cfg.spus_per_spe = 1 + static_cast<int>(rng() % 2);
    cfg.lmem_pairs = 1 + static_cast<int>(rng() % kMaxLmemPairs);
    cfg.fifo_depth = 1 + static_cast<int>(rng() % 64);
    cfg.iterations = 200;
    cfg.collection_start = 100;
    cfg.seed = rng();
    TileSimulator sim(m, cfg);
    // naive per-iteration counters, kept outside the simulator
    std::vector<std::uint32_t> naive(static_cast<std::size_t>(m.num_rvs()) * L, 0);
    while (!sim.done()) {
      const int it = sim.state().iteration;
      sim.run_iteration();
      if (it >= cfg.collection_start)
        for (std::size_t i = 0; i < sim.state().labels.size(); ++i) ++naive[i * L + sim.state().labels.data[i]];
    }
    const auto res = sim.finish();
    // through the on-disk encoding as well
    const auto recs = decode_log(encode_log(res.log.records()));
    const auto h = reconstruct_histogram(recs);
    records += recs.size();
    saturations += sim.state().counters.saturation_evictions;
    if (h == Histogram::from_dense(naive, L) && reconstruct_histogram(res.log) == h) ++ok;
  }
  return {ok == kLogRuns, fmt("%d/%d runs exact (%llu records)", ok, kLogRuns, static_cast<unsigned long long>(records))};
}

Result algorithm_conformance() {
  std::mt19937_64 rng(kSeed + 1);
  int ok = 0, saturated = 0, empty_start = 0;
  for (int trial = 0; trial < kAlgRuns; ++trial) {
    oracle::PairEntry ref;
    LabelEntry e(2);
    if (trial % 2) {
      ref = {static_cast<int>(rng() % 64), static_cast<int>(rng() % 1024), static_cast<int>(rng() % 64), static_cast<int>(rng() % 1024)};
      if (ref.mrp_lbl == ref.lrp_lbl) ref.lrp_lbl = (ref.lrp_lbl + 1) % 64;
      if (trial % 7 == 1) ref.mrp_cnt = 1023;
      e = LabelEntry{{static_cast<std::uint8_t>(ref.mrp_lbl), static_cast<std::uint16_t>(ref.mrp_cnt)},
                     {static_cast<std::uint8_t>(ref.lrp_lbl), static_cast<std::uint16_t>(ref.lrp_cnt)}};
    } else {
      ++empty_start;
    }
    const int alphabet = 1 + static_cast<int>(rng() % 6);
    const int len = 1 + static_cast<int>(rng() % 5000);
    const unsigned stickiness = 1 + static_cast<unsigned>(rng() % 1000);
    std::vector<oracle::PairMsg> ref_out;
    std::vector<EvictionRecord> out;
    int label = static_cast<int>(rng() % static_cast<unsigned>(alphabet));
    for (int i = 0; i < len; ++i) {
      if (rng() % stickiness == 0) label = static_cast<int>(rng() % static_cast<unsigned>(alphabet));
      oracle::pair_memory_write(ref, 5, label, ref_out);
      if (auto w = lmem_update(e, 5, label); w.record) out.push_back(*w.record);
    }
    std::vector<EvictionRecord> expected;
    bool sat = false;
    for (const auto& msg : ref_out) {
      if (msg.cnt > 0) expected.push_back({msg.addr, static_cast<std::uint8_t>(msg.lbl), static_cast<std::uint16_t>(msg.cnt)});
      sat = sat || msg.cnt == 1023;
    }
    saturated += sat;
    const LabelEntry final_ref{{static_cast<std::uint8_t>(ref.mrp_lbl), static_cast<std::uint16_t>(ref.mrp_cnt)},
                               {static_cast<std::uint8_t>(ref.lrp_lbl), static_cast<std::uint16_t>(ref.lrp_cnt)}};
    if (out == expected && e == final_ref) ++ok;
  }
  return {ok == kAlgRuns && saturated > 0 && empty_start > 0,
          fmt("%d/%d sequences match (%d hit saturation, %d empty starts)", ok, kAlgRuns, saturated, empty_start)};
}

Result order_independence() {
  std::mt19937_64 rng(kSeed + 2);
  int ok = 0;
  for (int t = 0; t < kOrderModels; ++t) {
    const auto m = oracle::random_model(rng, 32, 32, 2 + static_cast<int>(rng() % 20));
    AcceleratorConfig cfg;
    cfg.grid_d = 1 + static_cast<int>(rng() % 4);
    cfg.spus_per_spe = 1 + static_cast<int>(rng() % 2);
    cfg.iterations = 3;
    cfg.seed = rng();
    TileSimulator sim(m, cfg);
    sim.run_iteration();  // start from a non-initial state
    bool same = true;
    const auto draws = sim.peek_iteration_draws();
    auto grid = sim.state().labels;
    for (Color phase : {Color::Black, Color::White}) {
      std::vector<std::pair<int, int>> cells;
      for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c)
          if (color_of(r, c) == phase) cells.emplace_back(r, c);
      auto apply = [&](const std::vector<std::pair<int, int>>& order) {
        auto g = grid;
        for (auto [r, c] : order) g.at(r, c) = static_cast<std::uint8_t>(sim.sample_cell(g, r, c, draws.rand12.at(r, c)));
        return g;
      };
      const auto raster = apply(cells);
      for (int k = 0; k < 4; ++k) {
        auto order = cells;
        if (k == 0) std::reverse(order.begin(), order.end());
        else std::shuffle(order.begin(), order.end(), rng);
        same = same && apply(order) == raster;
      }
      sim.step_phase();  // the fabric's own interleaving
      same = same && sim.state().labels == raster;
      grid = raster;
    }
    ok += same;
  }
  return {ok == kOrderModels, fmt("%d/%d models bit-identical across orders", ok, kOrderModels)};
}

Result sampler_exactness() {
  std::mt19937_64 rng(kSeed + 3);
  const int values[] = {0, 1, 2, 4, 8};
  int ok = 0;
  for (int t = 0; t < kSamplerVectors; ++t) {
    const int L = 2 + static_cast<int>(rng() % 63);
    std::vector<int> p(static_cast<std::size_t>(L));
    for (auto& v : p) v = values[rng() % 5];
    p[rng() % p.size()] = 8;
    std::vector<std::uint8_t> p8(p.begin(), p.end());
    std::vector<int> counts(p.size(), 0);
    for (int u = 0; u < 4096; ++u) ++counts[static_cast<std::size_t>(sample(p8, static_cast<std::uint16_t>(u)))];
    ok += counts == oracle::modulo_partition(p);
  }
  LfsrState s{1};
  std::uint32_t period = 0;
  do {
    s = lfsr_next(s);
    ++period;
  } while (s.state != 1 && period <= LfsrState::kPeriod);
  return {ok == kSamplerVectors && period == 524287u,
          fmt("%d/%d vectors match modulo partition; LFSR period %u", ok, kSamplerVectors, period)};
}

Result banking(int iterations) {
  const auto p = *preset("venus");
  const auto s = synth_motion(p.width, p.height, 11);
  AcceleratorConfig cfg;
  cfg.iterations = iterations;
  cfg.seed = kSeed;
  TileSimulator sim(make_motion_model(s.frame0, s.frame1, p.alpha, p.beta, p.temperature), cfg);
  sim.run();
  const auto& c = sim.state().counters;
  const long v = verify_banking(sim.banks(), p.width, p.height);
  return {c.lmem_conflicts == 0 && c.s2_conflicts == 0 && v == 0 && c.lmem_checks > 0 && c.s2_checks > 0,
          fmt("%dx%d, %d iterations: lmem %llu/%llu, s2 %llu/%llu conflicts; verify_banking %ld (map %dx%d)", p.width,
              p.height, iterations, static_cast<unsigned long long>(c.lmem_conflicts), static_cast<unsigned long long>(c.lmem_checks),
              static_cast<unsigned long long>(c.s2_conflicts), static_cast<unsigned long long>(c.s2_checks), v,
              sim.banks().period_rows, sim.banks().period_cols)};
}

double more_than_two(const SceneRun& s) {
  // second half of the run; the trace starts at the half-way iteration
  const int from = s.config.iterations / 2 - s.trace.first_iteration;
  const auto cdf = unique_label_cdf(s.trace, from, s.trace.num_frames());
  return 1.0 - cdf[1];
}

Result unique_labels(const SceneRun& proxy, const SceneRun* full) {
  const double fp = more_than_two(proxy);
  bool pass = fp <= kUniqueProxyMax;
  std::string d = fmt("%s: %.2f%% of pixels > 2 labels (<= %.0f%%)", proxy.name.c_str(), 100 * fp, 100 * kUniqueProxyMax);
  if (full) {
    const double ff = more_than_two(*full);
    pass = pass && ff <= kUniqueFullMax;
    d += fmt("; %s: %.2f%% (<= %.0f%%)", full->name.c_str(), 100 * ff, 100 * kUniqueFullMax);
  }
  return {pass, d};
}

Result bandwidth(const std::vector<const SceneRun*>& scenes) {
  bool pass = true;
  std::string d;
  for (const auto* s : scenes) {
    const auto t = collection_trace(*s);
    std::uint64_t prev = UINT64_MAX;
    bool monotone = true;
    double util2 = 0;
    std::string caps;
    for (int pairs = 1; pairs <= kMaxLmemPairs; ++pairs) {
      const auto pt = trace_lmem_sim(t, pairs);
      monotone = monotone && pt.capacity_evictions <= prev;
      prev = pt.capacity_evictions;
      caps += fmt("%s%llu", pairs > 1 ? "," : "", static_cast<unsigned long long>(pt.capacity_evictions));
      if (pairs == 2) {
        perf::PerfParams pp;
        pp.n_spus = perf::kAsicSpus;
        pp.n_labels = s->model.labels;
        pp.eviction_rate = pt.max_rate;
        util2 = perf::bandwidth_utilization(pp);
      }
    }
    pass = pass && monotone && util2 < kUtilMax;
    d += fmt("%s%s: max util %.4f at 2 pairs, capacity evictions 1..8 = [%s]%s", d.empty() ? "" : "; ", s->name.c_str(), util2,
             caps.c_str(), monotone ? "" : " NOT monotone");
  }
  return {pass, d};
}

Result storage(const std::vector<const SceneRun*>& scenes) {
  bool pass = true;
  std::string d;
  for (const auto* s : scenes) {
    const auto window = static_cast<std::uint64_t>(s->config.iterations - s->config.resolved_collection_start());
    const auto st = perf::storage_comparison(window, static_cast<std::uint64_t>(s->model.num_rvs()), s->log_lines, s->config.lmem_pairs);
    pass = pass && st.savings() >= kSavingsMin;
    d += fmt("%s%s: %.2f%% saved (%llu log + %llu on-chip vs %llu naive bytes)", d.empty() ? "" : "; ", s->name.c_str(),
             100 * st.savings(), static_cast<unsigned long long>(st.log_bytes), static_cast<unsigned long long>(st.on_chip_bytes),
             static_cast<unsigned long long>(st.naive_bytes));
  }
  return {pass, d};
}

Result identities() {
  const auto tp = perf::throughput(perf::kPrototypeSpus, perf::kPrototypeClockHz, 49);
  const double sp = perf::speedup(tp.labels_per_sec, perf::kPriorFpgaLabelsPerSample, perf::kPriorFpgaSamplesPerSec);
  const auto t8 = perf::topology_cost(8, 2);
  bool pass = tp.labels_per_sec == 4.672e9 && std::abs(sp - 26.37) <= kSpeedupTol && t8.nn_links == 1064 &&
              t8.nn_xbar == 10752 && t8.noc_links == 672 && t8.noc_xbar == 13824;
  for (int d : {2, 4, 8}) {
    const auto t = perf::topology_cost(d, 2);
    pass = pass && t.nn_total() < t.noc_total();
  }
  return {pass, fmt("throughput %.4g labels/s, speedup %.4f, D=8 S=2 nn %lld/%lld noc %lld/%lld", tp.labels_per_sec, sp,
                    t8.nn_links, t8.nn_xbar, t8.noc_links, t8.noc_xbar)};
}

Result quality(const SceneRun& motion, const SceneRun& stereo) {
  ReferenceOptions mo{motion.config.iterations, kSeed, motion.config.collection_start};
  const auto mref = reference_sampler(motion.model, mo);
  const auto mref_mode = mode_output(std::span<const std::uint32_t>(mref.counts), motion.model.width, motion.model.height, motion.model.labels);
  const double epe_fixed = epe(labels_to_flow(motion.mode), *motion.flow_gt);
  const double epe_ref = epe(labels_to_flow(mref_mode), *motion.flow_gt);

  ReferenceOptions so{stereo.config.iterations, kSeed, stereo.config.collection_start};
  const auto sref = reference_sampler(stereo.model, so);
  const auto sref_mode = mode_output(std::span<const std::uint32_t>(sref.counts), stereo.model.width, stereo.model.height, stereo.model.labels);
  const double bp_fixed = bad_pixel(stereo.mode, *stereo.disp_gt);
  const double bp_ref = bad_pixel(sref_mode, *stereo.disp_gt);

  return {epe_fixed <= epe_ref + kEpeSlack && bp_fixed <= bp_ref + kBpSlack,
          fmt("%s EPE fixed %.3f vs ref %.3f (slack %.1f); %s BP fixed %.2f%% vs ref %.2f%% (slack %.0f)", motion.name.c_str(),
              epe_fixed, epe_ref, kEpeSlack, stereo.name.c_str(), bp_fixed, bp_ref, kBpSlack)};
}

}  // namespace

int main(int argc, char** argv) {
  bool full = true;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) full = false;
    else {
      std::fprintf(stderr, "usage: %s [--quick]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Result()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-22s %s (%.1fs)\n", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(), s);
    std::fflush(stdout);
    failures += !r.pass;
  };

  report(1, "log-exactness", log_exactness);
  report(2, "lmem-update", algorithm_conformance);
  report(3, "order-independence", order_independence);
  report(4, "sampler-exactness", sampler_exactness);
  report(5, "banking", [&] { return banking(full ? 3000 : 200); });

  // Shared scene runs (timed inside the criteria that first need them).
  std::optional<SceneRun> venus_proxy, venus_full, art_crop, art_full, venus_quality;
  auto need_venus_proxy = [&]() -> const SceneRun& {
    if (!venus_proxy) venus_proxy = motion_scene(105, 95, 1000, 500, 500);
    return *venus_proxy;
  };
  auto need_venus_full = [&]() -> const SceneRun& {
    if (!venus_full) venus_full = motion_scene(210, 190, 3000, -1, 1500);
    return *venus_full;
  };
  auto need_art_crop = [&]() -> const SceneRun& {
    if (!art_crop) art_crop = stereo_scene(348, 278, 128, 3000, -1, -1);
    return *art_crop;
  };
  auto need_art_full = [&]() -> const SceneRun& {
    if (!art_full) art_full = stereo_scene(348, 278, 0, 3000, -1, -1);
    return *art_full;
  };
  auto need_venus_quality = [&]() -> const SceneRun& {
    if (full) return need_venus_full();
    if (!venus_quality) venus_quality = motion_scene(105, 95, 3000, -1, -1);
    return *venus_quality;
  };

  report(6, "unique-labels", [&] { return unique_labels(need_venus_proxy(), full ? &need_venus_full() : nullptr); });
  report(7, "bandwidth-model", [&] {
    return full ? bandwidth({&need_venus_full(), &need_art_full()}) : bandwidth({&need_venus_proxy(), &need_art_crop()});
  });
  report(8, "storage-savings", [&] {
    return full ? storage({&need_venus_full(), &need_art_full()}) : storage({&need_venus_proxy(), &need_art_crop()});
  });
  report(9, "analytic-identities", identities);
  report(10, "quality-vs-reference", [&] { return quality(need_venus_quality(), need_art_crop()); });

  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
