// Hybrid on-chip/off-chip histogram memory for uncertainty quantification.
//
// Each RV keeps a few (label, counter) pairs on chip in most-recently-picked
// order. A write is a read-modify-write: hits bump the counter, misses evict
// the least-recently-picked pair to an off-chip log, and a saturated counter
// is flushed to the log and restarted. The log plus the residual on-chip pairs
// reconstruct the per-RV label histogram exactly.
#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrfsim/core.hpp"

namespace mrfsim {

inline constexpr std::uint16_t kCounterMax = 1023;  // 10-bit counters
inline constexpr int kMaxLmemPairs = 8;

struct LabelSlot {
  std::uint8_t label = 0;
  std::uint16_t count = 0;  // 0 marks an empty slot
  bool operator==(const LabelSlot&) const = default;
};

/// On-chip label-memory entry; slot 0 is the MRP pair, slot pairs-1 the LRP.
struct LabelEntry {
  std::array<LabelSlot, kMaxLmemPairs> slots{};
  std::uint8_t pairs = 2;

  LabelEntry() = default;
  explicit LabelEntry(int n) : pairs(static_cast<std::uint8_t>(n)) {
    if (n < 1 || n > kMaxLmemPairs) throw std::invalid_argument("LabelEntry: pairs must be in [1, 8]");
  }
  LabelEntry(std::initializer_list<LabelSlot> init) : pairs(static_cast<std::uint8_t>(init.size())) {
    if (init.size() < 1 || init.size() > kMaxLmemPairs) throw std::invalid_argument("LabelEntry: pairs must be in [1, 8]");
    std::copy(init.begin(), init.end(), slots.begin());
  }

  [[nodiscard]] std::span<const LabelSlot> used() const { return {slots.data(), pairs}; }
  [[nodiscard]] int current_label() const { return slots[0].label; }

  bool operator==(const LabelEntry& o) const {
    return pairs == o.pairs && std::equal(slots.begin(), slots.begin() + pairs, o.slots.begin());
  }
};

struct EvictionRecord {
  std::uint32_t rv_address = 0;
  std::uint8_t label = 0;
  std::uint16_t count = 0;
  bool operator==(const EvictionRecord&) const = default;
};

enum class EvictionKind : std::uint8_t { None, Capacity, Saturation };

struct LmemWrite {
  std::optional<EvictionRecord> record;
  EvictionKind kind = EvictionKind::None;
};

/// Read-modify-write of one label-memory entry. With `collecting` false
/// (before the collection window) slot 0 only tracks the current label.
inline LmemWrite lmem_update(LabelEntry& e, std::uint32_t addr, int new_label, bool collecting = true) {
  const auto label = static_cast<std::uint8_t>(new_label);
  if (!collecting) {
    e.slots[0] = {label, 0};
    return {};
  }
  LmemWrite out;
  const int n = e.pairs;
  int hit = -1;
  for (int i = 0; i < n; ++i)
    if (e.slots[static_cast<std::size_t>(i)].label == label) { hit = i; break; }

  LabelSlot front;
  int shift_end;  // slots [0, shift_end) move down by one
  if (hit >= 0) {
    LabelSlot s = e.slots[static_cast<std::size_t>(hit)];
    if (s.count == kCounterMax) {
      out.record = EvictionRecord{addr, label, kCounterMax};
      out.kind = EvictionKind::Saturation;
      s.count = 1;
    } else {
      ++s.count;
    }
    front = s;
    shift_end = hit;
  } else {
    const LabelSlot& victim = e.slots[static_cast<std::size_t>(n - 1)];
    if (victim.count > 0) {
      out.record = EvictionRecord{addr, victim.label, victim.count};
      out.kind = EvictionKind::Capacity;
    }
    front = {label, 1};
    shift_end = n - 1;
  }
  for (int i = shift_end; i > 0; --i) e.slots[static_cast<std::size_t>(i)] = e.slots[static_cast<std::size_t>(i - 1)];
  e.slots[0] = front;
  return out;
}

/// Drains every nonzero on-chip counter, by address then slot order.
[[nodiscard]] inline std::vector<EvictionRecord> flush_residuals(std::span<const LabelEntry> entries) {
  std::vector<EvictionRecord> out;
  for (std::size_t a = 0; a < entries.size(); ++a)
    for (const auto& s : entries[a].used())
      if (s.count > 0) out.push_back({static_cast<std::uint32_t>(a), s.label, s.count});
  return out;
}

/// Off-chip log: 512-bit lines of 16 modeled 32-bit messages plus a log index.
class DramLog {
 public:
  static constexpr int kLineBits = 512;
  static constexpr int kMessageBits = 32;
  static constexpr int kRecordsPerLine = kLineBits / kMessageBits;
  using Line = std::array<EvictionRecord, kRecordsPerLine>;

  DramLog() = default;
  DramLog(std::vector<Line> lines, std::uint64_t index) : lines_(std::move(lines)), index_(index) {}

  void append(const EvictionRecord& r) {
    const auto slot = static_cast<std::size_t>(index_ % kRecordsPerLine);
    if (slot == 0) lines_.emplace_back();
    lines_.back()[slot] = r;
    ++index_;
  }

  [[nodiscard]] std::uint64_t index() const { return index_; }
  [[nodiscard]] const std::vector<Line>& lines() const { return lines_; }
  [[nodiscard]] std::uint64_t bytes() const { return lines_.size() * (kLineBits / 8); }

  [[nodiscard]] std::vector<EvictionRecord> records() const {
    std::vector<EvictionRecord> out;
    out.reserve(index_);
    for (std::uint64_t i = 0; i < index_; ++i) out.push_back(lines_[i / kRecordsPerLine][i % kRecordsPerLine]);
    return out;
  }

 private:
  std::vector<Line> lines_;
  std::uint64_t index_ = 0;
};

struct TaggedRecord {
  EvictionRecord record;
  std::uint32_t spe = 0;
  std::uint64_t cycle = 0;
};

struct TransportStats {
  std::uint64_t records = 0;
  std::uint64_t lines = 0;
  std::vector<std::uint32_t> max_occupancy_per_level;  // level 0 = SPE FIFOs
  std::uint64_t backpressure_events = 0;                 // FIFO-cycles above depth
  std::uint64_t active_cycles = 0;
};

struct TransportResult {
  DramLog log;
  TransportStats stats;
};

namespace detail {

inline std::uint64_t morton(std::uint32_t y, std::uint32_t x) {
  std::uint64_t code = 0;
  for (int b = 0; b < 16; ++b) {
    code |= std::uint64_t((x >> b) & 1u) << (2 * b);
    code |= std::uint64_t((y >> b) & 1u) << (2 * b + 1);
  }
  return code;
}

}  // namespace detail

/// Moves eviction messages from the SPEs through the 4-ary DRAM hub tree to
/// the DRAM interface. SPEs are grouped into hubs in Z-order (2x2 regions).
/// An SPE link carries one message per cycle, a level-k hub forwards up to
/// min(4^k, 16) per cycle and the interface writes one 512-bit line per cycle.
/// Messages are never dropped; FIFOs above `fifo_depth` count as backpressure.
[[nodiscard]] inline TransportResult transport(std::span<const TaggedRecord> records, int grid_d, int fifo_depth) {
  if (grid_d < 1) throw std::invalid_argument("transport: grid dimension must be >= 1");
  const int n_spes = grid_d * grid_d;

  std::vector<int> leaf_of_spe(static_cast<std::size_t>(n_spes));
  {
    std::vector<int> order(static_cast<std::size_t>(n_spes));
    for (int i = 0; i < n_spes; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return detail::morton(a / grid_d, a % grid_d) < detail::morton(b / grid_d, b % grid_d);
    });
    for (int leaf = 0; leaf < n_spes; ++leaf) leaf_of_spe[static_cast<std::size_t>(order[static_cast<std::size_t>(leaf)])] = leaf;
  }

  // levels[0] = SPE FIFOs, last level has a single node (the DRAM interface).
  std::vector<int> level_size{n_spes};
  do level_size.push_back((level_size.back() + 3) / 4);
  while (level_size.back() > 1);
  const int n_levels = static_cast<int>(level_size.size());

  struct Fifo {
    std::vector<EvictionRecord> items;
    std::size_t head = 0;
    [[nodiscard]] std::size_t size() const { return items.size() - head; }
    void push(const EvictionRecord& r) { items.push_back(r); }
    EvictionRecord pop() {
      EvictionRecord r = items[head++];
      if (head == items.size()) { items.clear(); head = 0; }
      return r;
    }
  };
  std::vector<std::vector<Fifo>> fifos(static_cast<std::size_t>(n_levels));
  for (int k = 0; k < n_levels; ++k) fifos[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(level_size[static_cast<std::size_t>(k)]));

  auto capacity = [](int level) { return level >= 2 ? 16 : (level == 1 ? 4 : 1); };

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].cycle != records[b].cycle) return records[a].cycle < records[b].cycle;
    return records[a].spe < records[b].spe;
  });

  TransportResult out;
  out.stats.max_occupancy_per_level.assign(static_cast<std::size_t>(n_levels), 0);
  std::size_t next = 0;
  std::size_t in_flight = 0;
  std::uint64_t cycle = records.empty() ? 0 : records[order[0]].cycle;

  while (next < order.size() || in_flight > 0) {
    if (in_flight == 0 && next < order.size()) cycle = std::max(cycle, records[order[next]].cycle);
    while (next < order.size() && records[order[next]].cycle <= cycle) {
      const auto& t = records[order[next++]];
      if (t.spe >= static_cast<std::uint32_t>(n_spes)) throw std::invalid_argument("transport: record from unknown SPE");
      fifos[0][static_cast<std::size_t>(leaf_of_spe[t.spe])].push(t.record);
      ++in_flight;
    }
    // Top-down so that a message climbs at most one level per cycle.
    auto& root = fifos[static_cast<std::size_t>(n_levels - 1)][0];
    for (int m = 0; m < DramLog::kRecordsPerLine && root.size() > 0; ++m) {
      out.log.append(root.pop());
      --in_flight;
    }
    for (int k = n_levels - 1; k >= 1; --k) {
      auto& parents = fifos[static_cast<std::size_t>(k)];
      auto& children = fifos[static_cast<std::size_t>(k - 1)];
      const int cap = capacity(k - 1);
      for (std::size_t ch = 0; ch < children.size(); ++ch)
        for (int m = 0; m < cap && children[ch].size() > 0; ++m) parents[ch / 4].push(children[ch].pop());
    }
    for (int k = 0; k < n_levels; ++k) {
      auto& peak = out.stats.max_occupancy_per_level[static_cast<std::size_t>(k)];
      for (const auto& f : fifos[static_cast<std::size_t>(k)]) {
        peak = std::max<std::uint32_t>(peak, static_cast<std::uint32_t>(f.size()));
        if (static_cast<int>(f.size()) > fifo_depth) ++out.stats.backpressure_events;
      }
    }
    ++out.stats.active_cycles;
    ++cycle;
  }
  out.stats.records = out.log.index();
  out.stats.lines = out.log.lines().size();
  return out;
}

/// Exact per-(RV, label) counts, stored sparsely and sorted by (address, label).
class Histogram {
 public:
  struct Bin {
    std::uint32_t rv = 0;
    std::uint8_t label = 0;
    std::uint64_t count = 0;
    bool operator==(const Bin&) const = default;
  };

  Histogram() = default;
  explicit Histogram(std::vector<Bin> bins) : bins_(std::move(bins)) { normalize(); }

  [[nodiscard]] const std::vector<Bin>& bins() const { return bins_; }
  [[nodiscard]] bool empty() const { return bins_.empty(); }

  [[nodiscard]] std::uint64_t count(std::uint32_t rv, int label) const {
    auto it = std::lower_bound(bins_.begin(), bins_.end(), Bin{rv, static_cast<std::uint8_t>(label), 0}, less);
    return (it != bins_.end() && it->rv == rv && it->label == label) ? it->count : 0;
  }

  [[nodiscard]] std::uint64_t total(std::uint32_t rv) const {
    std::uint64_t t = 0;
    for (auto it = std::lower_bound(bins_.begin(), bins_.end(), Bin{rv, 0, 0}, less); it != bins_.end() && it->rv == rv; ++it)
      t += it->count;
    return t;
  }

  /// Dense num_rvs x labels counts.
  [[nodiscard]] std::vector<std::uint32_t> to_dense(int num_rvs, int labels) const {
    std::vector<std::uint32_t> d(static_cast<std::size_t>(num_rvs) * labels, 0);
    for (const auto& b : bins_) {
      if (b.rv >= static_cast<std::uint32_t>(num_rvs) || b.label >= labels)
        throw std::out_of_range("Histogram: bin outside the requested shape");
      d[static_cast<std::size_t>(b.rv) * labels + b.label] = static_cast<std::uint32_t>(b.count);
    }
    return d;
  }

  static Histogram from_dense(std::span<const std::uint32_t> dense, int labels) {
    std::vector<Bin> bins;
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] > 0)
        bins.push_back({static_cast<std::uint32_t>(i / labels), static_cast<std::uint8_t>(i % labels), dense[i]});
    return Histogram(std::move(bins));
  }

  bool operator==(const Histogram&) const = default;

 private:
  static bool less(const Bin& a, const Bin& b) { return a.rv != b.rv ? a.rv < b.rv : a.label < b.label; }

  void normalize() {
    std::sort(bins_.begin(), bins_.end(), less);
    std::vector<Bin> merged;
    for (const auto& b : bins_) {
      if (!merged.empty() && merged.back().rv == b.rv && merged.back().label == b.label)
        merged.back().count += b.count;
      else
        merged.push_back(b);
    }
    bins_ = std::move(merged);
  }

  std::vector<Bin> bins_;
};

[[nodiscard]] inline Histogram reconstruct_histogram(std::span<const EvictionRecord> records) {
  std::vector<Histogram::Bin> bins;
  bins.reserve(records.size());
  for (const auto& r : records) {
    if (r.count == 0 || r.count > kCounterMax || r.label >= kMaxLabels)
      throw std::runtime_error("reconstruct_histogram: malformed record");
    bins.push_back({r.rv_address, r.label, r.count});
  }
  return Histogram(std::move(bins));
}

[[nodiscard]] inline Histogram reconstruct_histogram(const DramLog& log) {
  const auto n_lines = log.lines().size();
  const auto idx = log.index();
  const bool consistent = n_lines == (idx + DramLog::kRecordsPerLine - 1) / DramLog::kRecordsPerLine;
  if (!consistent) throw std::runtime_error("reconstruct_histogram: log index does not match line count");
  const auto recs = log.records();
  return reconstruct_histogram(std::span<const EvictionRecord>(recs));
}

struct UqStats {
  int mode = 0;
  double top1 = 0.0;
  double entropy = 0.0;  // normalized by log(L)
};

/// Mode (lowest label on ties), top-1 frequency and normalized entropy of one
/// RV's histogram; `counts` has one entry per label.
template <typename Count>
[[nodiscard]] UqStats uq_stats(std::span<const Count> counts) {
  if (counts.size() < 2) throw std::invalid_argument("uq_stats: need at least two labels");
  double total = 0;
  std::size_t mode = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    total += double(counts[l]);
    if (counts[l] > counts[mode]) mode = l;
  }
  if (total <= 0) throw std::invalid_argument("uq_stats: empty histogram");
  double h = 0;
  for (auto c : counts)
    if (c > 0) {
      const double p = double(c) / total;
      h -= p * std::log(p);
    }
  return {static_cast<int>(mode), double(counts[mode]) / total, h / std::log(double(counts.size()))};
}

// ---------------------------------------------------------------------------
// Log file: "MRFL", u16 version, u64 record count, then little-endian u64
// records (bits 0..31 address, 32..37 label, 38..47 count, 48..63 zero).

inline constexpr std::uint16_t kLogVersion = 1;
inline constexpr std::size_t kLogHeaderBytes = 4 + 2 + 8;

[[nodiscard]] constexpr std::uint64_t pack_record(const EvictionRecord& r) noexcept {
  return std::uint64_t{r.rv_address} | (std::uint64_t{r.label} & 0x3Fu) << 32 | (std::uint64_t{r.count} & 0x3FFu) << 38;
}

[[nodiscard]] inline EvictionRecord unpack_record(std::uint64_t w) {
  if ((w >> 48) != 0) throw std::runtime_error("log file: reserved record bits set");
  return {static_cast<std::uint32_t>(w & 0xFFFFFFFFu), static_cast<std::uint8_t>((w >> 32) & 0x3Fu),
          static_cast<std::uint16_t>((w >> 38) & 0x3FFu)};
}

namespace detail {
inline void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[at + static_cast<std::size_t>(i)]} << (8 * i);
  return v;
}
}  // namespace detail

[[nodiscard]] inline std::vector<std::uint8_t> encode_log(std::span<const EvictionRecord> records) {
  std::vector<std::uint8_t> out{'M', 'R', 'F', 'L'};
  out.reserve(kLogHeaderBytes + 8 * records.size());
  detail::put_le(out, kLogVersion, 2);
  detail::put_le(out, records.size(), 8);
  for (const auto& r : records) detail::put_le(out, pack_record(r), 8);
  return out;
}

[[nodiscard]] inline std::vector<EvictionRecord> decode_log(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLogHeaderBytes || std::memcmp(bytes.data(), "MRFL", 4) != 0)
    throw std::runtime_error("log file: bad magic");
  if (detail::get_le(bytes, 4, 2) != kLogVersion) throw std::runtime_error("log file: unsupported version");
  const std::uint64_t n = detail::get_le(bytes, 6, 8);
  if ((bytes.size() - kLogHeaderBytes) / 8 < n || (bytes.size() - kLogHeaderBytes) != n * 8)
    throw std::runtime_error("log file: truncated or trailing data");
  std::vector<EvictionRecord> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(unpack_record(detail::get_le(bytes, kLogHeaderBytes + 8 * i, 8)));
  return out;
}

inline void write_log_file(const std::string& path, std::span<const EvictionRecord> records) {
  const auto bytes = encode_log(records);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

[[nodiscard]] inline std::vector<EvictionRecord> read_log_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open log file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_log(bytes);
}

// ---------------------------------------------------------------------------
// Trace-driven analyses.

/// Per-iteration label snapshots of every RV, starting at `first_iteration`.
struct LabelTrace {
  int width = 0;
  int height = 0;
  int labels = 0;
  int first_iteration = 0;
  std::vector<std::uint8_t> frames;

  [[nodiscard]] int num_rvs() const { return width * height; }
  [[nodiscard]] int num_frames() const { return num_rvs() == 0 ? 0 : static_cast<int>(frames.size() / static_cast<std::size_t>(num_rvs())); }
  [[nodiscard]] std::span<const std::uint8_t> frame(int i) const {
    return {frames.data() + static_cast<std::size_t>(i) * num_rvs(), static_cast<std::size_t>(num_rvs())};
  }
  void append(std::span<const std::uint8_t> labels_now) { frames.insert(frames.end(), labels_now.begin(), labels_now.end()); }
};

struct LmemSweepPoint {
  int pairs = 0;
  std::uint64_t capacity_evictions = 0;
  std::uint64_t saturation_evictions = 0;
  std::vector<std::uint32_t> evictions_per_frame;
  double max_rate = 0.0;  // max over frames of evictions per RV update
};

/// Replays the label-memory update over a trace whose first frame is the
/// start of the collection window.
[[nodiscard]] inline LmemSweepPoint trace_lmem_sim(const LabelTrace& trace, int pairs) {
  LmemSweepPoint p;
  p.pairs = pairs;
  const int n = trace.num_rvs();
  std::vector<LabelEntry> mem(static_cast<std::size_t>(n), LabelEntry(pairs));
  for (int f = 0; f < trace.num_frames(); ++f) {
    const auto frame = trace.frame(f);
    std::uint32_t ev = 0;
    for (int a = 0; a < n; ++a) {
      const auto w = lmem_update(mem[static_cast<std::size_t>(a)], static_cast<std::uint32_t>(a), frame[static_cast<std::size_t>(a)]);
      if (w.kind == EvictionKind::Capacity) ++p.capacity_evictions;
      if (w.kind == EvictionKind::Saturation) ++p.saturation_evictions;
      if (w.record) ++ev;
    }
    p.evictions_per_frame.push_back(ev);
    if (n > 0) p.max_rate = std::max(p.max_rate, double(ev) / n);
  }
  return p;
}

/// Entry k-1 is the fraction of RVs with at most k distinct labels over
/// frames [begin, end).
[[nodiscard]] inline std::vector<double> unique_label_cdf(const LabelTrace& trace, int begin, int end) {
  if (begin < 0 || end > trace.num_frames() || begin >= end) throw std::invalid_argument("unique_label_cdf: bad window");
  const int n = trace.num_rvs();
  std::vector<std::bitset<kMaxLabels>> seen(static_cast<std::size_t>(n));
  for (int f = begin; f < end; ++f) {
    const auto frame = trace.frame(f);
    for (int a = 0; a < n; ++a) seen[static_cast<std::size_t>(a)].set(frame[static_cast<std::size_t>(a)]);
  }
  std::vector<double> hist(static_cast<std::size_t>(trace.labels) + 1, 0.0);
  for (const auto& s : seen) hist[std::min<std::size_t>(s.count(), static_cast<std::size_t>(trace.labels))] += 1.0;
  std::vector<double> cdf(static_cast<std::size_t>(trace.labels), 0.0);
  double acc = 0;
  for (int k = 1; k <= trace.labels; ++k) {
    acc += hist[static_cast<std::size_t>(k)];
    cdf[static_cast<std::size_t>(k - 1)] = n > 0 ? acc / n : 0.0;
  }
  return cdf;
}

// Trace file: "MRFT", u16 version, u32 width, height, labels, first iteration, frames, then bytes.
inline void write_trace_file(const std::string& path, const LabelTrace& t) {
  std::vector<std::uint8_t> out{'M', 'R', 'F', 'T'};
  detail::put_le(out, 1, 2);
  for (int v : {t.width, t.height, t.labels, t.first_iteration, t.num_frames()}) detail::put_le(out, static_cast<std::uint32_t>(v), 4);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  f.write(reinterpret_cast<const char*>(t.frames.data()), static_cast<std::streamsize>(t.frames.size()));
}

[[nodiscard]] inline LabelTrace read_trace_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open trace file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  constexpr std::size_t header = 4 + 2 + 5 * 4;
  if (bytes.size() < header || std::memcmp(bytes.data(), "MRFT", 4) != 0) throw std::runtime_error("trace file: bad magic");
  LabelTrace t;
  t.width = static_cast<int>(detail::get_le(bytes, 6, 4));
  t.height = static_cast<int>(detail::get_le(bytes, 10, 4));
  t.labels = static_cast<int>(detail::get_le(bytes, 14, 4));
  t.first_iteration = static_cast<int>(detail::get_le(bytes, 18, 4));
  const auto frames = detail::get_le(bytes, 22, 4);
  if (bytes.size() - header != frames * static_cast<std::uint64_t>(t.num_rvs())) throw std::runtime_error("trace file: truncated");
  t.frames.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return t;
}

}  // namespace mrfsim
