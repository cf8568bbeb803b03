// Fabric simulator: D x D SPEs with S SPUs each, checkerboard two-phase
// iterations, round-robin SPU assignment, banked-memory conflict accounting,
// one-hop access checking and the hybrid histogram log.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mrfsim/banking.hpp"
#include "mrfsim/core.hpp"
#include "mrfsim/spu.hpp"
#include "mrfsim/uq_log.hpp"

namespace mrfsim {

struct AcceleratorConfig {
  int grid_d = 4;
  int spus_per_spe = 2;
  int lmem_pairs = 2;
  int fifo_depth = 64;
  int bandwidth_bits_per_cycle = 512;
  int message_bits = 32;
  std::uint64_t seed = 1;
  int iterations = 3000;
  int collection_start = -1;  // < 0: last 1000 iterations
  int flush_cycles = 4;       // SPU pipeline depth
  int workers = 1;
  bool record_trace = false;
  int trace_start = -1;  // < 0: same as collection start
  bool oracle = false;   // keep naive per-iteration counters alongside the log

  [[nodiscard]] int resolved_collection_start() const {
    return collection_start >= 0 ? collection_start : std::max(0, iterations - 1000);
  }
  [[nodiscard]] int resolved_trace_start() const { return trace_start >= 0 ? trace_start : resolved_collection_start(); }
  /// The prototype uses at most two SPUs per SPE.
  [[nodiscard]] bool beyond_prototype() const { return spus_per_spe > 2; }

  void validate() const {
    if (grid_d < 1) throw std::invalid_argument("AcceleratorConfig: grid_d must be >= 1");
    if (spus_per_spe < 1) throw std::invalid_argument("AcceleratorConfig: spus_per_spe must be >= 1");
    if (lmem_pairs < 1 || lmem_pairs > kMaxLmemPairs) throw std::invalid_argument("AcceleratorConfig: lmem_pairs must be in [1, 8]");
    if (fifo_depth < 1) throw std::invalid_argument("AcceleratorConfig: fifo_depth must be >= 1");
    if (bandwidth_bits_per_cycle < 1 || message_bits < 1) throw std::invalid_argument("AcceleratorConfig: bandwidth and message size must be positive");
    if (iterations < 1) throw std::invalid_argument("AcceleratorConfig: iterations must be >= 1");
    if (collection_start > iterations) throw std::invalid_argument("AcceleratorConfig: collection_start beyond the run");
    if (flush_cycles < 0) throw std::invalid_argument("AcceleratorConfig: flush_cycles must be >= 0");
    if (workers < 1) throw std::invalid_argument("AcceleratorConfig: workers must be >= 1");
    if (spus_per_spe > 32) throw std::invalid_argument("AcceleratorConfig: at most 32 SPUs per SPE are modeled");
  }
};

struct SimCounters {
  std::uint64_t rv_updates = 0;
  std::uint64_t cycles = 0;
  std::uint64_t lmem_checks = 0;
  std::uint64_t lmem_conflicts = 0;
  std::uint64_t s2_checks = 0;
  std::uint64_t s2_conflicts = 0;
  std::uint64_t capacity_evictions = 0;
  std::uint64_t saturation_evictions = 0;
  bool operator==(const SimCounters&) const = default;
};

struct SimState {
  Grid<std::uint8_t> labels;
  std::vector<LfsrState> lfsrs;   // one per SPU, index spe * S + spu
  std::vector<LabelEntry> lmem;   // one per real RV, row-major
  int iteration = 0;
  Color next_phase = Color::Black;
  SimCounters counters;
};

/// Singleton-2 copies reachable within one hop, per direction. 0 means no
/// singleton-2 data outside the local tile is needed.
[[nodiscard]] constexpr int replication_factor(int tile_width, int s2_reach) {
  if (tile_width < 1) throw std::invalid_argument("replication_factor: tile width must be >= 1");
  return s2_reach <= 0 ? 0 : ceil_div(s2_reach, tile_width);
}

struct ReplicationPlan {
  int copies_x = 1;  // tiles of singleton-2 data reachable in one hop horizontally
  int copies_y = 1;
};

[[nodiscard]] inline ReplicationPlan replication_plan(const MrfModel& m, const TileMap& t) {
  const Offset reach = m.reach();
  return {std::max(1, replication_factor(t.tile_width, reach.dx)), std::max(1, replication_factor(t.tile_height, reach.dy))};
}

enum class AccessKind : std::uint8_t { NeighborLabel, Singleton2 };

struct HopViolation {
  int row = 0;
  int col = 0;
  AccessKind kind = AccessKind::Singleton2;
  int label = -1;
  int tile_dx = 0;
  int tile_dy = 0;
};

/// Every neighbor-label and singleton-2 access must land in the local SPE or
/// one of its eight nearest SPEs (or, for singleton 2, in a replicated copy).
/// Reports at most one violation per RV and access kind.
[[nodiscard]] inline std::vector<HopViolation> check_one_hop(const MrfModel& m, const TileMap& t, ReplicationPlan plan = {}) {
  std::vector<HopViolation> out;
  const int lim_x = std::max(1, plan.copies_x);
  const int lim_y = std::max(1, plan.copies_y);
  auto tile_delta = [&](int r, int c, int qr, int qc) {
    return std::pair{std::abs(qc / t.tile_width - c / t.tile_width), std::abs(qr / t.tile_height - r / t.tile_height)};
  };
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      for (auto [dr, dc] : detail::kNeighborSteps) {
        const int nr = r + dr, nc = c + dc;
        if (!m.singleton1.contains(nr, nc)) continue;
        auto [tx, ty] = tile_delta(r, c, nr, nc);
        if (tx > 1 || ty > 1) {
          out.push_back({r, c, AccessKind::NeighborLabel, -1, tx, ty});
          break;
        }
      }
      for (int l = 0; l < m.labels; ++l) {
        const Offset q = m.singleton2_position(r, c, l);
        auto [tx, ty] = tile_delta(r, c, q.dy, q.dx);
        if (tx > lim_x || ty > lim_y) {
          out.push_back({r, c, AccessKind::Singleton2, l, tx, ty});
          break;
        }
      }
    }
  }
  return out;
}

/// Uniform pseudo-random starting labels derived from the run seed.
[[nodiscard]] inline Grid<std::uint8_t> initial_labels(const MrfModel& m, std::uint64_t seed) {
  Grid<std::uint8_t> g(m.width, m.height);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto s = lfsr_seed(seed ^ 0xA5A5A5A5A5A5A5A5ull, i);
    g.data[i] = static_cast<std::uint8_t>(s.state % static_cast<std::uint32_t>(m.labels));
  }
  return g;
}

/// rand12 each real RV receives during one iteration, by cell.
struct IterationDraws {
  Grid<std::uint16_t> rand12;
};

class TileSimulator {
 public:
  TileSimulator(MrfModel model, AcceleratorConfig config)
      : model_(std::move(model)), config_(config) {
    model_.validate();
    config_.validate();
    tiles_ = pad_and_tile(model_.width, model_.height, config_.grid_d, config_.spus_per_spe);
    banks_ = find_lmem_banking();
    singleton_ = singleton_energy_table(model_);
    neighbor_ = neighborhood_table(model_);
    collection_start_ = config_.resolved_collection_start();
    build_schedules();

    const int L = model_.labels;
    state_.labels = initial_labels(model_, config_.seed);
    const int n_spus = tiles_.num_spes() * config_.spus_per_spe;
    for (int k = 0; k < n_spus; ++k) state_.lfsrs.push_back(lfsr_seed(config_.seed, static_cast<std::uint64_t>(k)));
    state_.lmem.assign(state_.labels.size(), LabelEntry(config_.lmem_pairs));
    for (std::size_t i = 0; i < state_.labels.size(); ++i) lmem_update(state_.lmem[i], 0, state_.labels.data[i], false);
    if (config_.oracle) oracle_.assign(state_.labels.size() * static_cast<std::size_t>(L), 0);
    if (config_.record_trace) {
      trace_.width = model_.width;
      trace_.height = model_.height;
      trace_.labels = L;
      trace_.first_iteration = config_.resolved_trace_start();
    }
    spe_buffers_.resize(static_cast<std::size_t>(tiles_.num_spes()));
    lut_ = build_prob_lut(model_.temperature.at(0));
  }

  [[nodiscard]] const MrfModel& model() const { return model_; }
  [[nodiscard]] const AcceleratorConfig& config() const { return config_; }
  [[nodiscard]] const TileMap& tiles() const { return tiles_; }
  [[nodiscard]] const BankMap& banks() const { return banks_; }
  [[nodiscard]] const SimState& state() const { return state_; }
  [[nodiscard]] int collection_start() const { return collection_start_; }
  [[nodiscard]] bool done() const { return state_.iteration >= config_.iterations; }

  /// Eviction messages emitted so far, in merge order (SPE, SPU, sequence per phase).
  [[nodiscard]] const std::vector<TaggedRecord>& evictions() const { return records_; }
  [[nodiscard]] const std::vector<std::uint32_t>& evictions_per_iteration() const { return evictions_per_iteration_; }
  [[nodiscard]] const std::vector<std::uint32_t>& oracle_counts() const { return oracle_; }
  [[nodiscard]] const LabelTrace& trace() const { return trace_; }
  [[nodiscard]] std::uint64_t cycles_per_iteration() const { return 2 * phase_cycles(); }
  [[nodiscard]] int num_spus() const { return tiles_.num_spes() * config_.spus_per_spe; }

  /// Fixed-point update of RV (r, c) reading neighbor labels from `labels`.
  [[nodiscard]] int sample_cell(const Grid<std::uint8_t>& labels, int r, int c, std::uint16_t rand12) const {
    std::array<std::uint8_t, kMaxLabels> raw{};
    std::array<std::uint8_t, kMaxLabels> ptr{};
    energies(labels, r, c, raw);
    const auto L = static_cast<std::size_t>(model_.labels);
    return sample_stage(std::span<const std::uint8_t>(raw.data(), L), lut_, rand12, ptr);
  }

  /// Draws the next full iteration would consume, without advancing any state.
  [[nodiscard]] IterationDraws peek_iteration_draws() const {
    if (state_.next_phase != Color::Black) throw std::logic_error("peek_iteration_draws: iteration in progress");
    IterationDraws d{Grid<std::uint16_t>(model_.width, model_.height, 0)};
    auto lfsrs = state_.lfsrs;
    for (Color phase : {Color::Black, Color::White}) {
      for (int e = 0; e < tiles_.num_spes(); ++e) {
        const auto& seq = schedule(phase, e);
        for (int k = 0; k < config_.spus_per_spe; ++k) {
          auto& lfsr = lfsrs[static_cast<std::size_t>(e * config_.spus_per_spe + k)];
          for (std::size_t j = static_cast<std::size_t>(k); j < seq.size(); j += static_cast<std::size_t>(config_.spus_per_spe)) {
            if (seq[j] < 0) continue;
            lfsr = lfsr_next(lfsr);
            d.rand12.data[static_cast<std::size_t>(seq[j])] = lfsr.rand12();
          }
        }
      }
    }
    return d;
  }

  /// Runs the next color phase; the White phase completes the iteration.
  void step_phase() {
    if (done()) throw std::logic_error("step_phase: run already complete");
    const Color phase = state_.next_phase;
    if (phase == Color::Black) begin_iteration();
    const bool collecting = state_.iteration >= collection_start_;
    const int n_spes = tiles_.num_spes();
    const int workers = std::min(config_.workers, n_spes);

    std::vector<SimCounters> local(static_cast<std::size_t>(n_spes));
    auto run_range = [&](int first, int last) {
      for (int e = first; e < last; ++e) process_spe(phase, e, collecting, local[static_cast<std::size_t>(e)]);
    };
    if (workers <= 1) {
      run_range(0, n_spes);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back(run_range, n_spes * w / workers, n_spes * (w + 1) / workers);
      for (auto& t : pool) t.join();
    }
    for (int e = 0; e < n_spes; ++e) {
      auto& buf = spe_buffers_[static_cast<std::size_t>(e)];
      records_.insert(records_.end(), buf.begin(), buf.end());
      iteration_evictions_ += static_cast<std::uint32_t>(buf.size());
      buf.clear();
      const auto& c = local[static_cast<std::size_t>(e)];
      auto& s = state_.counters;
      s.rv_updates += c.rv_updates;
      s.lmem_checks += c.lmem_checks;
      s.lmem_conflicts += c.lmem_conflicts;
      s.s2_checks += c.s2_checks;
      s.s2_conflicts += c.s2_conflicts;
      s.capacity_evictions += c.capacity_evictions;
      s.saturation_evictions += c.saturation_evictions;
    }
    cycle_ += phase_cycles();
    state_.counters.cycles = cycle_;

    if (phase == Color::White) {
      if (config_.oracle && collecting) {
        const auto L = static_cast<std::size_t>(model_.labels);
        for (std::size_t i = 0; i < state_.labels.size(); ++i) ++oracle_[i * L + state_.labels.data[i]];
      }
      if (config_.record_trace && state_.iteration >= trace_.first_iteration) trace_.append(state_.labels.data);
      evictions_per_iteration_.push_back(iteration_evictions_);
      iteration_evictions_ = 0;
      ++state_.iteration;
      state_.next_phase = Color::Black;
    } else {
      state_.next_phase = Color::White;
    }
  }

  void run_iteration() {
    step_phase();
    step_phase();
  }

  void run() {
    while (!done()) run_iteration();
  }

  /// Residual on-chip counters as messages tagged with their owning SPE.
  [[nodiscard]] std::vector<TaggedRecord> residual_records() const {
    std::vector<TaggedRecord> out;
    for (const auto& r : flush_residuals(state_.lmem)) {
      const int row = static_cast<int>(r.rv_address) / model_.width;
      const int col = static_cast<int>(r.rv_address) % model_.width;
      out.push_back({r, static_cast<std::uint32_t>(tiles_.spe_of(row, col)), cycle_});
    }
    return out;
  }

  /// Drains the on-chip memory and delivers every message through the hub tree.
  [[nodiscard]] TransportResult finish() const {
    auto all = records_;
    const auto residual = residual_records();
    all.insert(all.end(), residual.begin(), residual.end());
    return transport(all, config_.grid_d, config_.fifo_depth);
  }

 private:
  [[nodiscard]] const std::vector<std::int32_t>& schedule(Color phase, int spe) const {
    return schedules_[static_cast<std::size_t>(phase == Color::Black ? 0 : 1)][static_cast<std::size_t>(spe)];
  }

  [[nodiscard]] std::uint64_t phase_cycles() const {
    const auto slots = static_cast<std::uint64_t>(tiles_.tile_width) * tiles_.tile_height / 2 / config_.spus_per_spe;
    return slots * static_cast<std::uint64_t>(model_.labels) + static_cast<std::uint64_t>(config_.flush_cycles);
  }

  void build_schedules() {
    for (int p = 0; p < 2; ++p) {
      const Color phase = p == 0 ? Color::Black : Color::White;
      auto& per_spe = schedules_[static_cast<std::size_t>(p)];
      per_spe.resize(static_cast<std::size_t>(tiles_.num_spes()));
      for (int e = 0; e < tiles_.num_spes(); ++e) {
        const Region reg = tiles_.region(e);
        auto& seq = per_spe[static_cast<std::size_t>(e)];
        for (int r = reg.row0; r < reg.row0 + reg.rows; ++r)
          for (int c = reg.col0; c < reg.col0 + reg.cols; ++c)
            if (color_of(r, c) == phase)
              seq.push_back(tiles_.is_padding(r, c) ? -1 : static_cast<std::int32_t>(state_index(r, c)));
      }
    }
  }

  [[nodiscard]] std::size_t state_index(int r, int c) const { return static_cast<std::size_t>(r) * model_.width + c; }

  void begin_iteration() {
    const double t = model_.temperature.at(state_.iteration);
    if (t != lut_.temperature) lut_ = build_prob_lut(t);
  }

  void energies(const Grid<std::uint8_t>& labels, int r, int c, std::array<std::uint8_t, kMaxLabels>& raw) const {
    const int L = model_.labels;
    const std::uint8_t* s = singleton_.data() + state_index(r, c) * static_cast<std::size_t>(L);
    auto row = [&](int nr, int nc) {
      const int nl = labels.contains(nr, nc) ? labels.at(nr, nc) : L;
      return neighbor_.data() + static_cast<std::size_t>(nl) * L;
    };
    const std::uint8_t* up = row(r - 1, c);
    const std::uint8_t* dn = row(r + 1, c);
    const std::uint8_t* lf = row(r, c - 1);
    const std::uint8_t* rt = row(r, c + 1);
    const unsigned a = model_.alpha, b = model_.beta;
    for (int l = 0; l < L; ++l) {
      const unsigned e = a * s[l] + b * (unsigned{up[l]} + dn[l] + lf[l] + rt[l]);
      raw[static_cast<std::size_t>(l)] = static_cast<std::uint8_t>(std::min(e, 255u));
    }
  }

  void process_spe(Color phase, int e, bool collecting, SimCounters& ctr) {
    const auto& seq = schedule(phase, e);
    const int S = config_.spus_per_spe;
    const int L = model_.labels;
    auto& buf = spe_buffers_[static_cast<std::size_t>(e)];
    std::array<std::uint8_t, kMaxLabels> raw{};
    std::array<std::uint8_t, kMaxLabels> ptr{};

    for (int k = 0; k < S; ++k) {
      auto& lfsr = state_.lfsrs[static_cast<std::size_t>(e * S + k)];
      for (std::size_t j = static_cast<std::size_t>(k), t = 0; j < seq.size(); j += static_cast<std::size_t>(S), ++t) {
        if (seq[j] < 0) continue;
        const auto idx = static_cast<std::size_t>(seq[j]);
        const int r = static_cast<int>(idx) / model_.width;
        const int c = static_cast<int>(idx) % model_.width;

        energies(state_.labels, r, c, raw);
        lfsr = lfsr_next(lfsr);
        const int label = sample_stage(std::span<const std::uint8_t>(raw.data(), static_cast<std::size_t>(L)), lut_, lfsr.rand12(), ptr);
        state_.labels.data[idx] = static_cast<std::uint8_t>(label);
        ++ctr.rv_updates;

        const auto w = lmem_update(state_.lmem[idx], static_cast<std::uint32_t>(idx), label, collecting);
        if (w.record) {
          const std::uint64_t issue = cycle_ + (t + 1) * static_cast<std::uint64_t>(L);
          buf.push_back({*w.record, static_cast<std::uint32_t>(e), issue});
          if (w.kind == EvictionKind::Capacity) ++ctr.capacity_evictions;
          else ++ctr.saturation_evictions;
        }

        // Label memory: the four neighbor reads must hit distinct banks.
        unsigned mask = 0;
        bool conflict = false;
        for (auto [dr, dc] : detail::kNeighborSteps) {
          const int nr = r + dr, nc = c + dc;
          if (!state_.labels.contains(nr, nc)) continue;
          const unsigned bit = 1u << banks_.bank(nr, nc);
          conflict = conflict || (mask & bit) != 0;
          mask |= bit;
        }
        ++ctr.lmem_checks;
        if (conflict) ++ctr.lmem_conflicts;
      }
    }

    // Singleton 2: in every label cycle of a step the S SPUs read S distinct banks.
    if (S > 1) {
      for (std::size_t base = 0; base < seq.size(); base += static_cast<std::size_t>(S)) {
        for (int l = 0; l < L; ++l) {
          unsigned mask = 0;
          bool conflict = false;
          for (int k = 0; k < S; ++k) {
            const auto cell = seq[base + static_cast<std::size_t>(k)];
            if (cell < 0) continue;
            const int c = static_cast<int>(cell) % model_.width;
            const unsigned bit = 1u << s2_bank(c + model_.offsets[static_cast<std::size_t>(l)].dx, S);
            conflict = conflict || (mask & bit) != 0;
            mask |= bit;
          }
          ++ctr.s2_checks;
          if (conflict) ++ctr.s2_conflicts;
        }
      }
    }
  }

  MrfModel model_;
  AcceleratorConfig config_;
  TileMap tiles_;
  BankMap banks_;
  std::vector<std::uint8_t> singleton_;
  std::vector<std::uint8_t> neighbor_;
  std::array<std::vector<std::vector<std::int32_t>>, 2> schedules_;
  ProbLut lut_;
  int collection_start_ = 0;
  SimState state_;
  std::uint64_t cycle_ = 0;
  std::vector<std::vector<TaggedRecord>> spe_buffers_;
  std::vector<TaggedRecord> records_;
  std::uint32_t iteration_evictions_ = 0;
  std::vector<std::uint32_t> evictions_per_iteration_;
  std::vector<std::uint32_t> oracle_;
  LabelTrace trace_;
};

}  // namespace mrfsim
