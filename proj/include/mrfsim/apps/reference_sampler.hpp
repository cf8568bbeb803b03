// Double-precision Gibbs sampler with the same chromatic schedule as the
// accelerator. Serves as the quality oracle for the fixed-point datapath.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mrfsim/core.hpp"
#include "mrfsim/tile_sim.hpp"
#include "mrfsim/uq_log.hpp"

namespace mrfsim::apps {

struct ReferenceOptions {
  int iterations = 3000;
  std::uint64_t seed = 1;
  int collection_start = -1;  // < 0: last 1000 iterations
  bool record_trace = false;
  int trace_start = -1;       // < 0: collection start
};

struct ReferenceResult {
  Grid<std::uint8_t> labels;
  std::vector<std::uint32_t> counts;  // num_rvs x L over the collection window
  LabelTrace trace;
};

/// Exact softmax Gibbs updates: p(l) proportional to exp(-(E(l) - E_min) / T)
/// with unsaturated energies, drawn by inverse transform on a 53-bit uniform.
[[nodiscard]] inline ReferenceResult reference_sampler(const MrfModel& m, const ReferenceOptions& opt) {
  m.validate();
  const int L = m.labels;
  const int collection_start = opt.collection_start >= 0 ? opt.collection_start : std::max(0, opt.iterations - 1000);
  const auto singleton = singleton_energy_table(m);
  const auto pair = neighborhood_table(m);

  ReferenceResult res;
  res.labels = initial_labels(m, opt.seed);
  res.counts.assign(static_cast<std::size_t>(m.num_rvs()) * L, 0);
  if (opt.record_trace) {
    res.trace.width = m.width;
    res.trace.height = m.height;
    res.trace.labels = L;
    res.trace.first_iteration = opt.trace_start >= 0 ? opt.trace_start : collection_start;
  }

  std::mt19937_64 rng(opt.seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };

  std::vector<double> energy(static_cast<std::size_t>(L));
  std::vector<double> weight(static_cast<std::size_t>(L));
  auto& g = res.labels;

  for (int it = 0; it < opt.iterations; ++it) {
    const double t = m.temperature.at(it);
    for (Color phase : {Color::Black, Color::White}) {
      for (int r = 0; r < m.height; ++r) {
        for (int c = (phase == Color::Black ? r & 1 : (r + 1) & 1); c < m.width; c += 2) {
          const std::uint8_t* s = singleton.data() + (static_cast<std::size_t>(r) * m.width + c) * L;
          auto row = [&](int nr, int nc) {
            const int nl = g.contains(nr, nc) ? g.at(nr, nc) : L;
            return pair.data() + static_cast<std::size_t>(nl) * L;
          };
          const std::uint8_t* up = row(r - 1, c);
          const std::uint8_t* dn = row(r + 1, c);
          const std::uint8_t* lf = row(r, c - 1);
          const std::uint8_t* rt = row(r, c + 1);
          double e_min = INFINITY;
          for (int l = 0; l < L; ++l) {
            const double e = double(m.alpha) * s[l] + double(m.beta) * (double(up[l]) + dn[l] + lf[l] + rt[l]);
            energy[static_cast<std::size_t>(l)] = e;
            e_min = std::min(e_min, e);
          }
          double total = 0;
          for (int l = 0; l < L; ++l) {
            weight[static_cast<std::size_t>(l)] = std::exp(-(energy[static_cast<std::size_t>(l)] - e_min) / t);
            total += weight[static_cast<std::size_t>(l)];
          }
          const double u = uniform() * total;
          double cum = 0;
          int pick = L - 1;
          for (int l = 0; l < L; ++l) {
            cum += weight[static_cast<std::size_t>(l)];
            if (u < cum) { pick = l; break; }
          }
          g.at(r, c) = static_cast<std::uint8_t>(pick);
        }
      }
    }
    if (it >= collection_start)
      for (std::size_t i = 0; i < g.size(); ++i) ++res.counts[i * static_cast<std::size_t>(L) + g.data[i]];
    if (opt.record_trace && it >= res.trace.first_iteration) res.trace.append(g.data);
  }
  return res;
}

}  // namespace mrfsim::apps
