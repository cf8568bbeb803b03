// Bit-accurate model of the Stochastic Processing Unit: energy computation,
// dynamic scaling, energy -> truncated probability LUT and LFSR-driven
// inverse-transform sampling.
#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mrfsim {

inline constexpr int kEnergyMax = 255;
inline constexpr int kProbBits = 4;

/// alpha * E_singleton + beta * sum(neighborhood), saturated to 8 bits.
[[nodiscard]] constexpr std::uint8_t compute_energy(unsigned singleton, std::span<const unsigned, 4> neighbors,
                                                    unsigned alpha, unsigned beta) noexcept {
  std::uint64_t sum = 0;
  for (unsigned n : neighbors) sum += n;
  const std::uint64_t e = std::uint64_t{alpha} * singleton + std::uint64_t{beta} * sum;
  return static_cast<std::uint8_t>(std::min<std::uint64_t>(e, kEnergyMax));
}

struct EnergyVector {
  std::vector<std::uint8_t> raw;
  std::vector<std::uint8_t> scaled;
  std::uint8_t e_min = 0;
};

[[nodiscard]] inline EnergyVector scale_energies(std::span<const std::uint8_t> raw) {
  if (raw.size() < 2) throw std::invalid_argument("scale_energies: need at least two labels");
  EnergyVector v;
  v.raw.assign(raw.begin(), raw.end());
  v.e_min = *std::min_element(raw.begin(), raw.end());
  v.scaled.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) v.scaled[i] = static_cast<std::uint8_t>(raw[i] - v.e_min);
  return v;
}

/// Scaled energy -> truncated probability in {0, 1, 2, 4, 8}.
struct ProbLut {
  std::array<std::uint8_t, 256> table{};
  double temperature = 1.0;

  [[nodiscard]] std::uint8_t operator[](std::uint8_t scaled_energy) const { return table[scaled_energy]; }
};

[[nodiscard]] inline ProbLut build_prob_lut(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw std::invalid_argument("build_prob_lut: temperature must be positive");
  ProbLut lut;
  lut.temperature = temperature;
  const double scale = double((1 << kProbBits) - 1);
  for (int e = 0; e < 256; ++e) {
    const double ps = scale * std::exp(-double(e) / temperature);
    // floor(2^floor(log2 ps)); anything below 1 truncates to 0.
    std::uint8_t p = 0;
    if (ps >= 1.0) {
      p = 1;
      while (p < 8 && double(p) * 2.0 <= ps) p = static_cast<std::uint8_t>(p * 2);
    }
    lut.table[static_cast<std::size_t>(e)] = p;
  }
  return lut;
}

/// 19-bit Fibonacci LFSR, taps 19/18/17/14 (x^19 + x^18 + x^17 + x^14 + 1).
struct LfsrState {
  std::uint32_t state = 1;

  static constexpr std::uint32_t kMask = (1u << 19) - 1;
  static constexpr std::uint32_t kPeriod = kMask;

  [[nodiscard]] std::uint16_t rand12() const noexcept { return static_cast<std::uint16_t>(state & 0xFFFu); }
  bool operator==(const LfsrState&) const = default;
};

[[nodiscard]] constexpr std::uint32_t lfsr_step(std::uint32_t s) noexcept {
  const std::uint32_t fb = ((s >> 18) ^ (s >> 17) ^ (s >> 16) ^ (s >> 13)) & 1u;
  return ((s << 1) | fb) & LfsrState::kMask;
}

[[nodiscard]] inline LfsrState lfsr_next(LfsrState s) {
  if ((s.state & LfsrState::kMask) == 0) throw std::invalid_argument("lfsr_next: zero state locks the register");
  return {lfsr_step(s.state)};
}

/// Derives a nonzero 19-bit seed from a 64-bit run seed and a stream index.
[[nodiscard]] constexpr LfsrState lfsr_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  auto s = static_cast<std::uint32_t>(z & LfsrState::kMask);
  return {s == 0 ? 1u : s};
}

/// Inverse-transform sample: u = rand12 mod total mass, first label whose
/// running sum exceeds u.
[[nodiscard]] inline int sample(std::span<const std::uint8_t> ptr, std::uint16_t rand12) {
  unsigned total = 0;
  for (auto p : ptr) total += p;
  if (total == 0) throw std::logic_error("sample: zero probability mass");
  const unsigned u = (rand12 & 0xFFFu) % total;
  unsigned cum = 0;
  for (std::size_t l = 0; l < ptr.size(); ++l) {
    cum += ptr[l];
    if (cum > u) return static_cast<int>(l);
  }
  return static_cast<int>(ptr.size()) - 1;  // unreachable
}

/// Inputs of one RV update: per-label singleton energies and the pairwise
/// energy rows of the four neighbors (top, down, left, right). A missing
/// neighbor is an empty span and contributes zero.
struct RvInputs {
  std::span<const std::uint8_t> singleton;
  std::array<std::span<const std::uint8_t>, 4> neighbor_rows;
  unsigned alpha = 0;
  unsigned beta = 0;
};

struct RvUpdate {
  int label = 0;
  LfsrState lfsr;
};

/// Fills `raw` with the 8-bit energies of every label.
inline void energy_stage(const RvInputs& in, std::span<std::uint8_t> raw) {
  const std::size_t L = in.singleton.size();
  assert(raw.size() >= L);
  for (std::size_t l = 0; l < L; ++l) {
    std::array<unsigned, 4> n{};
    for (std::size_t k = 0; k < 4; ++k)
      if (!in.neighbor_rows[k].empty()) n[k] = in.neighbor_rows[k][l];
    raw[l] = compute_energy(in.singleton[l], n, in.alpha, in.beta);
  }
}

/// Scaling, LUT and sampling on already computed raw energies; `ptr` is scratch.
[[nodiscard]] inline int sample_stage(std::span<const std::uint8_t> raw, const ProbLut& lut,
                                      std::uint16_t rand12, std::span<std::uint8_t> ptr) {
  const std::uint8_t e_min = *std::min_element(raw.begin(), raw.end());
  for (std::size_t l = 0; l < raw.size(); ++l) ptr[l] = lut[static_cast<std::uint8_t>(raw[l] - e_min)];
  return sample(ptr.first(raw.size()), rand12);
}

/// Full SPU pipeline for one RV: one LFSR advance, rand12 taken from the new state.
[[nodiscard]] inline RvUpdate update_rv(const RvInputs& in, const ProbLut& lut, LfsrState lfsr) {
  const std::size_t L = in.singleton.size();
  if (L < 2 || L > 64) throw std::invalid_argument("update_rv: label count outside [2, 64]");
  std::array<std::uint8_t, 64> raw{};
  std::array<std::uint8_t, 64> ptr{};
  energy_stage(in, std::span(raw).first(L));
  const LfsrState next = lfsr_next(lfsr);
  const int label = sample_stage(std::span<const std::uint8_t>(raw.data(), L), lut, next.rand12(), ptr);
  return {label, next};
}

}  // namespace mrfsim
