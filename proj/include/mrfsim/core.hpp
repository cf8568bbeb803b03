// Problem-instance representation for first-order MRF inference: label grids,
// the checkerboard partition, tiling/padding over an SPE fabric, and the model
// description consumed by the simulator and the reference sampler.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrfsim {

inline constexpr int kMaxLabels = 64;
inline constexpr int kGrayMax = 63;  // 6-bit grayscale

template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("Grid: negative dimension");
  }

  [[nodiscard]] std::size_t size() const { return data.size(); }
  [[nodiscard]] std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * width + c; }
  [[nodiscard]] bool contains(int r, int c) const { return r >= 0 && c >= 0 && r < height && c < width; }
  T& at(int r, int c) { return data[index(r, c)]; }
  const T& at(int r, int c) const { return data[index(r, c)]; }

  bool operator==(const Grid&) const = default;
};

enum class Color : std::uint8_t { Black, White };

/// Checkerboard partition: (r + c) even is Black.
[[nodiscard]] constexpr Color color_of(int r, int c) noexcept {
  return ((r + c) & 1) == 0 ? Color::Black : Color::White;
}

[[nodiscard]] constexpr Color opposite(Color c) noexcept {
  return c == Color::Black ? Color::White : Color::Black;
}

struct Offset {
  int dy = 0;
  int dx = 0;
  bool operator==(const Offset&) const = default;
};

/// Rectangular region of the padded image owned by one SPE.
struct Region {
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;
};

/// Assignment of the (padded) label grid to a D x D fabric of SPEs with S SPUs each.
struct TileMap {
  int grid_d = 1;
  int spus_per_spe = 1;
  int width = 0;          // real image
  int height = 0;
  int tile_width = 0;     // per SPE
  int tile_height = 0;
  int padded_width = 0;
  int padded_height = 0;

  [[nodiscard]] int num_spes() const { return grid_d * grid_d; }
  [[nodiscard]] Region region(int spe) const {
    const int ty = spe / grid_d;
    const int tx = spe % grid_d;
    return {ty * tile_height, tx * tile_width, tile_height, tile_width};
  }
  [[nodiscard]] int spe_of(int r, int c) const { return (r / tile_height) * grid_d + c / tile_width; }
  [[nodiscard]] bool is_padding(int r, int c) const { return r >= height || c >= width; }
  [[nodiscard]] Grid<std::uint8_t> padding_mask() const {
    Grid<std::uint8_t> mask(padded_width, padded_height, 0);
    for (int r = 0; r < padded_height; ++r)
      for (int c = 0; c < padded_width; ++c) mask.at(r, c) = is_padding(r, c) ? 1 : 0;
    return mask;
  }
};

[[nodiscard]] constexpr int round_up(int value, int multiple) { return (value + multiple - 1) / multiple * multiple; }
[[nodiscard]] constexpr int ceil_div(int a, int b) { return (a + b - 1) / b; }

/// Smallest padding such that every SPE gets a congruent region whose width is
/// a multiple of 2*S and whose height is even.
[[nodiscard]] inline TileMap pad_and_tile(int width, int height, int grid_d, int spus_per_spe) {
  if (grid_d < 1 || spus_per_spe < 1) throw std::invalid_argument("pad_and_tile: D and S must be >= 1");
  if (width < 1 || height < 1) throw std::invalid_argument("pad_and_tile: empty image");
  TileMap t;
  t.grid_d = grid_d;
  t.spus_per_spe = spus_per_spe;
  t.width = width;
  t.height = height;
  t.tile_width = round_up(ceil_div(width, grid_d), 2 * spus_per_spe);
  t.tile_height = round_up(ceil_div(height, grid_d), 2);
  t.padded_width = t.tile_width * grid_d;
  t.padded_height = t.tile_height * grid_d;
  return t;
}

enum class SmoothnessKind : std::uint8_t { Potts, TruncatedL1 };

struct Smoothness {
  SmoothnessKind kind = SmoothnessKind::Potts;
  int truncation = 3;  // K for truncated L1
};

/// Per-label vectors used by the truncated-L1 smoothness term. For motion
/// these are the (dy, dx) displacements, for stereo (0, disparity).
[[nodiscard]] inline int neighborhood_energy(int a, int b, const Smoothness& s, const std::vector<Offset>& vectors) {
  if (a == b) return 0;
  if (s.kind == SmoothnessKind::Potts) return 1;
  const Offset& va = vectors.at(static_cast<std::size_t>(a));
  const Offset& vb = vectors.at(static_cast<std::size_t>(b));
  return std::min(std::abs(va.dy - vb.dy) + std::abs(va.dx - vb.dx), s.truncation);
}

/// Temperature per iteration. A single entry is a constant schedule; otherwise
/// iteration i uses entry min(i, size-1).
struct TemperatureSchedule {
  std::vector<double> values{1.0};

  TemperatureSchedule() = default;
  explicit TemperatureSchedule(double t) : values{t} {}
  explicit TemperatureSchedule(std::vector<double> v) : values(std::move(v)) {}

  [[nodiscard]] double at(int iteration) const {
    if (values.empty()) throw std::logic_error("empty temperature schedule");
    const auto i = static_cast<std::size_t>(std::max(iteration, 0));
    return values[std::min(i, values.size() - 1)];
  }
};

/// A first-order MRF instance as the accelerator sees it. Singleton 1 is the
/// per-RV gray value; singleton 2 is a gray-value image indexed at p + offset(l)
/// (clamped to the image), with one offset per label.
struct MrfModel {
  int width = 0;
  int height = 0;
  int labels = 2;
  unsigned alpha = 1;
  unsigned beta = 1;
  TemperatureSchedule temperature;
  Grid<std::uint8_t> singleton1;
  Grid<std::uint8_t> singleton2;
  std::vector<Offset> offsets;        // singleton-2 offset look-up table, size L
  std::vector<Offset> label_vectors;  // size L, smoothness geometry
  Smoothness smoothness;

  void validate() const {
    if (labels < 2 || labels > kMaxLabels)
      throw std::invalid_argument("MrfModel: label count " + std::to_string(labels) + " outside [2, 64]");
    if (width < 1 || height < 1) throw std::invalid_argument("MrfModel: empty grid");
    if (singleton1.width != width || singleton1.height != height)
      throw std::invalid_argument("MrfModel: singleton1 dimensions mismatch");
    if (singleton2.width != width || singleton2.height != height)
      throw std::invalid_argument("MrfModel: singleton2 dimensions mismatch");
    if (static_cast<int>(offsets.size()) != labels)
      throw std::invalid_argument("MrfModel: offset table must have exactly L entries");
    if (static_cast<int>(label_vectors.size()) != labels)
      throw std::invalid_argument("MrfModel: label vector table must have exactly L entries");
    for (auto v : singleton1.data)
      if (v > kGrayMax) throw std::invalid_argument("MrfModel: singleton1 value exceeds 6 bits");
    for (auto v : singleton2.data)
      if (v > kGrayMax) throw std::invalid_argument("MrfModel: singleton2 value exceeds 6 bits");
    for (double t : temperature.values)
      if (!(t > 0.0)) throw std::invalid_argument("MrfModel: temperature must be positive");
  }

  [[nodiscard]] int num_rvs() const { return width * height; }

  [[nodiscard]] Offset singleton2_position(int r, int c, int label) const {
    const Offset& o = offsets[static_cast<std::size_t>(label)];
    return {std::clamp(r + o.dy, 0, height - 1), std::clamp(c + o.dx, 0, width - 1)};
  }

  /// |s1(p) - s2(clamp(p + offset_l))|, at most 63.
  [[nodiscard]] int singleton_energy(int r, int c, int label) const {
    const Offset q = singleton2_position(r, c, label);
    return std::abs(int{singleton1.at(r, c)} - int{singleton2.at(q.dy, q.dx)});
  }

  /// Largest horizontal and vertical singleton-2 reach over the offset table.
  [[nodiscard]] Offset reach() const {
    Offset m;
    for (const auto& o : offsets) {
      m.dy = std::max(m.dy, std::abs(o.dy));
      m.dx = std::max(m.dx, std::abs(o.dx));
    }
    return m;
  }
};

/// Flat table of singleton energies, [rv * L + label].
[[nodiscard]] inline std::vector<std::uint8_t> singleton_energy_table(const MrfModel& m) {
  std::vector<std::uint8_t> table(static_cast<std::size_t>(m.num_rvs()) * m.labels);
  std::size_t k = 0;
  for (int r = 0; r < m.height; ++r)
    for (int c = 0; c < m.width; ++c)
      for (int l = 0; l < m.labels; ++l) table[k++] = static_cast<std::uint8_t>(m.singleton_energy(r, c, l));
  return table;
}

/// (L + 1) x L table of pairwise energies; row L is the all-zero row used for
/// missing boundary neighbors.
[[nodiscard]] inline std::vector<std::uint8_t> neighborhood_table(const MrfModel& m) {
  const int L = m.labels;
  std::vector<std::uint8_t> table(static_cast<std::size_t>(L + 1) * L, 0);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b)
      table[static_cast<std::size_t>(a) * L + b] = static_cast<std::uint8_t>(neighborhood_energy(a, b, m.smoothness, m.label_vectors));
  return table;
}

}  // namespace mrfsim
