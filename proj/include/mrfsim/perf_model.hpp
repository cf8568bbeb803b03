// Analytical models: off-chip bandwidth utilization of the histogram log,
// SPE-network vs. 2-D mesh resource estimates, throughput and storage.
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mrfsim::perf {

struct PerfParams {
  double n_spus = 2048;
  double n_labels = 49;
  double message_bits = 32;
  double bandwidth_bits_per_cycle = 512;
  double eviction_rate = 0.0;  // evictions per RV update
};

/// Fraction of the off-chip bandwidth consumed by eviction messages; the
/// design is feasible while this stays below 1.
[[nodiscard]] inline double bandwidth_utilization(const PerfParams& p) {
  if (p.n_spus <= 0 || p.n_labels <= 0 || p.message_bits <= 0 || p.bandwidth_bits_per_cycle <= 0 || p.eviction_rate < 0)
    throw std::invalid_argument("bandwidth_utilization: parameters must be positive");
  return (p.n_spus / p.n_labels) * p.eviction_rate * p.message_bits / p.bandwidth_bits_per_cycle;
}

struct TopologyCost {
  long long nn_links = 0;
  long long nn_xbar = 0;
  long long noc_links = 0;
  long long noc_xbar = 0;

  [[nodiscard]] long long nn_total() const { return nn_links + nn_xbar; }
  [[nodiscard]] long long noc_total() const { return noc_links + noc_xbar; }
};

/// Crossbar cost is inputs x outputs.
[[nodiscard]] constexpr long long xbar(long long in, long long out) { return in * out; }

[[nodiscard]] inline TopologyCost topology_cost(long long d, long long s) {
  if (d < 1 || s < 1) throw std::invalid_argument("topology_cost: D and S must be >= 1");
  TopologyCost t;
  t.nn_links = 2 * (2 * (d - 1) * d * (s + 1) + 2 * (d - 1) * (d - 1) * s);
  t.nn_xbar = d * d * (2 * xbar(4, 8) + xbar(s, 9 * s) + 8 * xbar(2, s) + xbar(9 * s, s));
  t.noc_links = 2 * (2 * (d - 1) * d * (s + 1));
  t.noc_xbar = d * d * (2 * xbar(4, 8) + xbar(s, 5 * s) + 8 * xbar(2, s) + xbar(5 * s, 5 * s));
  return t;
}

struct Throughput {
  double labels_per_sec = 0;
  double rv_updates_per_sec = 0;
};

/// Each SPU evaluates one label per cycle, hence one RV update per L cycles.
[[nodiscard]] inline Throughput throughput(double n_spus, double clock_hz, double labels) {
  if (n_spus <= 0 || clock_hz <= 0 || labels <= 0) throw std::invalid_argument("throughput: inputs must be positive");
  return {n_spus * clock_hz, n_spus * clock_hz / labels};
}

/// Speedup over a sampler producing `samples_per_sec` samples of
/// `labels_per_sample` labels each.
[[nodiscard]] inline double speedup(double labels_per_sec, double labels_per_sample, double samples_per_sec) {
  return labels_per_sec / (labels_per_sample * samples_per_sec);
}

/// Frames per second sustainable for an image of `rvs` pixels at the given
/// number of iterations per frame.
[[nodiscard]] inline double frames_per_second(const Throughput& t, double rvs, double iterations_per_frame) {
  return t.rv_updates_per_sec / (rvs * iterations_per_frame);
}

// Reference operating points.
inline constexpr double kPrototypeSpus = 32;
inline constexpr double kPrototypeClockHz = 146e6;
inline constexpr double kPriorFpgaSamplesPerSec = 88.588e6;
inline constexpr double kPriorFpgaLabelsPerSample = 2;
inline constexpr double kAsicSpus = 2048;
inline constexpr double kAsicClockHz = 3e9;

struct StorageComparison {
  std::uint64_t naive_bytes = 0;     // every label of every RV, every iteration of the window
  std::uint64_t log_bytes = 0;       // 512-bit lines written to DRAM
  std::uint64_t on_chip_bytes = 0;   // label + counter pairs
  [[nodiscard]] std::uint64_t hybrid_bytes() const { return log_bytes + on_chip_bytes; }
  [[nodiscard]] double savings() const {
    return naive_bytes == 0 ? 0.0 : 1.0 - double(hybrid_bytes()) / double(naive_bytes);
  }
};

/// On-chip pair = 6-bit label + 10-bit counter.
[[nodiscard]] inline StorageComparison storage_comparison(std::uint64_t window_iterations, std::uint64_t rvs,
                                                          std::uint64_t log_lines, int lmem_pairs, int message_bits = 32) {
  StorageComparison s;
  s.naive_bytes = window_iterations * rvs * static_cast<std::uint64_t>(message_bits) / 8;
  s.log_bytes = log_lines * 64;
  s.on_chip_bytes = rvs * static_cast<std::uint64_t>(lmem_pairs) * 16 / 8;
  return s;
}

/// Largest number of events inside any window [t, t + window) over sorted
/// event times.
[[nodiscard]] inline std::uint64_t max_events_in_window(std::span<const std::uint64_t> sorted_times, std::uint64_t window) {
  std::uint64_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < sorted_times.size(); ++hi) {
    while (sorted_times[hi] - sorted_times[lo] >= window) ++lo;
    best = std::max<std::uint64_t>(best, hi - lo + 1);
  }
  return best;
}

}  // namespace mrfsim::perf
