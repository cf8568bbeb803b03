// Memory banking for the SPE: singleton-2 column banking across SPUs and the
// periodic 4-bank label-memory pattern in which every RV's four neighbors sit
// in distinct banks.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "mrfsim/core.hpp"

namespace mrfsim {

inline constexpr int kLmemBanks = 4;

/// Every two columns of singleton 2 go to their own bank; S banks per SPE.
[[nodiscard]] constexpr int s2_bank(int col, int spus_per_spe) noexcept {
  // floor division so halo columns left of the image bank consistently
  const int pair = col >= 0 ? col / 2 : -((-col + 1) / 2);
  const int b = pair % spus_per_spe;
  return b < 0 ? b + spus_per_spe : b;
}

/// Periodic label-memory bank assignment.
struct BankMap {
  int period_rows = 1;
  int period_cols = 1;
  std::vector<std::uint8_t> tile;  // period_rows x period_cols bank ids

  [[nodiscard]] int bank(int r, int c) const {
    const int pr = ((r % period_rows) + period_rows) % period_rows;
    const int pc = ((c % period_cols) + period_cols) % period_cols;
    return tile[static_cast<std::size_t>(pr) * period_cols + pc];
  }

  static BankMap constant(int bank_id) { return {1, 1, {static_cast<std::uint8_t>(bank_id)}}; }
};

namespace detail {

inline constexpr std::array<std::array<int, 2>, 4> kNeighborSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// Backtracking search for a pr x pc toroidal tile with the four-distinct-neighbors property.
inline bool search_tile(int pr, int pc, std::vector<int>& tile) {
  const int n = pr * pc;
  tile.assign(static_cast<std::size_t>(n), -1);
  auto cell = [&](int r, int c) { return ((r % pr + pr) % pr) * pc + ((c % pc + pc) % pc); };
  // Neighbors of X must carry pairwise distinct banks among the assigned ones.
  auto consistent_around = [&](int x) {
    const int r = x / pc, c = x % pc;
    std::array<int, 4> seen{};
    int k = 0;
    for (auto [dr, dc] : kNeighborSteps) {
      const int b = tile[static_cast<std::size_t>(cell(r + dr, c + dc))];
      if (b < 0) continue;
      for (int j = 0; j < k; ++j)
        if (seen[static_cast<std::size_t>(j)] == b) return false;
      seen[static_cast<std::size_t>(k++)] = b;
    }
    return true;
  };
  std::function<bool(int)> assign = [&](int v) -> bool {
    if (v == n) return true;
    const int r = v / pc, c = v % pc;
    const int limit = v == 0 ? 1 : kLmemBanks;  // bank symmetry: first cell is bank 0
    for (int b = 0; b < limit; ++b) {
      tile[static_cast<std::size_t>(v)] = b;
      bool ok = true;
      for (auto [dr, dc] : kNeighborSteps)
        if (!consistent_around(cell(r + dr, c + dc))) { ok = false; break; }
      if (ok && assign(v + 1)) return true;
    }
    tile[static_cast<std::size_t>(v)] = -1;
    return false;
  };
  return assign(0);
}

inline BankMap search_lmem_banking() {
  for (int area = 4; area <= 64; ++area) {
    for (int pr = 2; pr <= 8; ++pr) {
      if (area % pr != 0) continue;
      const int pc = area / pr;
      if (pc < 2 || pc > 8) continue;
      std::vector<int> tile;
      if (search_tile(pr, pc, tile)) {
        BankMap m{pr, pc, {}};
        for (int b : tile) m.tile.push_back(static_cast<std::uint8_t>(b));
        return m;
      }
    }
  }
  throw std::logic_error("find_lmem_banking: no periodic 4-bank pattern found");
}

}  // namespace detail

/// First periodic tile (by area, then row period, periods 2..8) in which the
/// top/down/left/right neighbors of every RV map to four distinct banks.
/// The search runs once; the result is cached.
[[nodiscard]] inline const BankMap& find_lmem_banking() {
  static const BankMap map = detail::search_lmem_banking();
  return map;
}

/// Number of RVs whose existing neighbors do not map to pairwise distinct banks.
[[nodiscard]] inline long verify_banking(const BankMap& map, int width, int height) {
  long conflicts = 0;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::array<int, 4> banks{};
      int k = 0;
      bool bad = false;
      for (auto [dr, dc] : detail::kNeighborSteps) {
        const int nr = r + dr, nc = c + dc;
        if (nr < 0 || nc < 0 || nr >= height || nc >= width) continue;
        const int b = map.bank(nr, nc);
        for (int j = 0; j < k; ++j) bad = bad || banks[static_cast<std::size_t>(j)] == b;
        banks[static_cast<std::size_t>(k++)] = b;
      }
      if (bad) ++conflicts;
    }
  }
  return conflicts;
}

}  // namespace mrfsim
