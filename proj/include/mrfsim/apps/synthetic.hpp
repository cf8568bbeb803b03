// Deterministic layered scenes with exact ground truth, used as stand-ins for
// the Middlebury inputs: textured layers translate (motion) or sit at constant
// disparity (stereo), with occlusion by layer order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mrfsim/apps/image_io.hpp"
#include "mrfsim/core.hpp"

namespace mrfsim::apps {

namespace detail {

inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double lattice(std::uint64_t seed, int cell, long long x, long long y) {
  const auto h = mix(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(cell) * 0xD1B54A32D192ED03ull +
                     static_cast<std::uint64_t>(x) * 0x8CB92BA72F3D8DD7ull + static_cast<std::uint64_t>(y) * 0xABC98388FB8FAC03ull);
  return double(h >> 11) * 0x1.0p-53;
}

/// Multi-octave value noise in [0, 1], defined on the whole integer plane.
inline double value_noise(std::uint64_t seed, int x, int y) {
  static constexpr int kCells[] = {24, 10, 4};
  static constexpr double kWeights[] = {0.45, 0.35, 0.20};
  double v = 0;
  for (int o = 0; o < 3; ++o) {
    const int s = kCells[o];
    const long long gx = x >= 0 ? x / s : -((-x + s - 1) / s);
    const long long gy = y >= 0 ? y / s : -((-y + s - 1) / s);
    const double fx = double(x - gx * s) / s, fy = double(y - gy * s) / s;
    const double a = lattice(seed, o, gx, gy), b = lattice(seed, o, gx + 1, gy);
    const double c = lattice(seed, o, gx, gy + 1), d = lattice(seed, o, gx + 1, gy + 1);
    v += kWeights[o] * ((a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy);
  }
  return v;
}

inline std::uint8_t texture(std::uint64_t seed, int layer, int x, int y) {
  const double n = value_noise(seed + static_cast<std::uint64_t>(layer) * 7919u, x, y);
  return static_cast<std::uint8_t>(std::clamp(std::lround(128 + (n - 0.5) * 2.4 * 128), 0L, 255L));
}

inline std::uint8_t noisy(std::uint8_t v, std::uint64_t seed, int x, int y, int amplitude) {
  if (amplitude <= 0) return v;
  const auto h = mix(seed ^ (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y) ^ 0x5555);
  const int delta = static_cast<int>(h % static_cast<std::uint64_t>(2 * amplitude + 1)) - amplitude;
  return static_cast<std::uint8_t>(std::clamp(int{v} + delta, 0, 255));
}

/// Axis-aligned ellipse or rectangle in frame/right-view coordinates.
struct Shape {
  bool ellipse = false;
  double cy = 0, cx = 0, ry = 0, rx = 0;
  [[nodiscard]] bool contains(double y, double x) const {
    const double ny = (y - cy) / ry, nx = (x - cx) / rx;
    return ellipse ? ny * ny + nx * nx <= 1.0 : std::fabs(ny) <= 1.0 && std::fabs(nx) <= 1.0;
  }
};

inline std::vector<Shape> layout(int w, int h, std::uint64_t seed, int count) {
  std::vector<Shape> shapes;
  for (int k = 0; k < count; ++k) {
    Shape s;
    s.ellipse = (k % 2) == 1;
    s.cy = h * (0.2 + 0.6 * lattice(seed, 100 + k, 1, 0));
    s.cx = w * (0.2 + 0.6 * lattice(seed, 100 + k, 2, 0));
    s.ry = h * (0.12 + 0.12 * lattice(seed, 100 + k, 3, 0));
    s.rx = w * (0.12 + 0.12 * lattice(seed, 100 + k, 4, 0));
    shapes.push_back(s);
  }
  return shapes;
}

}  // namespace detail

struct SyntheticMotion {
  Image8 frame0;
  Image8 frame1;
  FlowGroundTruth gt;
};

/// Background plus three translating foreground layers; every displacement
/// lies in the 7x7 label window. Later layers occlude earlier ones.
[[nodiscard]] inline SyntheticMotion synth_motion(int width, int height, std::uint64_t seed, int noise = 1) {
  const std::vector<Offset> motion{{0, 1}, {1, -2}, {-2, 2}, {2, 3}};
  const auto shapes = detail::layout(width, height, seed, static_cast<int>(motion.size()) - 1);
  auto layer_at = [&](double y, double x) {
    int top = 0;
    for (std::size_t k = 0; k < shapes.size(); ++k)
      if (shapes[k].contains(y, x)) top = static_cast<int>(k) + 1;
    return top;
  };
  SyntheticMotion s{Image8(width, height), Image8(width, height), {Grid<float>(width, height), Grid<float>(width, height)}};
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int k0 = layer_at(r, c);
      s.frame0.at(r, c) = detail::noisy(detail::texture(seed, k0, c, r), seed, c, r, noise);
      s.gt.u.at(r, c) = static_cast<float>(motion[static_cast<std::size_t>(k0)].dx);
      s.gt.v.at(r, c) = static_cast<float>(motion[static_cast<std::size_t>(k0)].dy);
      // Frame t+1: topmost layer whose moved footprint covers (r, c).
      int k1 = 0;
      for (int k = static_cast<int>(motion.size()) - 1; k >= 1; --k) {
        const Offset v = motion[static_cast<std::size_t>(k)];
        if (shapes[static_cast<std::size_t>(k - 1)].contains(r - v.dy, c - v.dx)) { k1 = k; break; }
      }
      const Offset v1 = motion[static_cast<std::size_t>(k1)];
      s.frame1.at(r, c) = detail::noisy(detail::texture(seed, k1, c - v1.dx, r - v1.dy), seed + 1, c, r, noise);
    }
  }
  return s;
}

struct SyntheticStereo {
  Image8 right;
  Image8 left;
  DisparityGroundTruth gt;
};

/// Fronto-parallel layers at constant disparity (background 2, nearer layers
/// larger, all below `labels`); left(r, c - d * dir) = right(r, c).
[[nodiscard]] inline SyntheticStereo synth_stereo(int width, int height, int labels, std::uint64_t seed, int dir = 1, int noise = 1) {
  const int top = std::max(3, labels - 4);
  const std::vector<int> disparity{2, std::max(2, top * 2 / 5), std::max(2, top * 3 / 5), std::max(2, top * 4 / 5), top};
  const auto shapes = detail::layout(width, height, seed, static_cast<int>(disparity.size()) - 1);
  SyntheticStereo s{Image8(width, height), Image8(width, height),
                    {Grid<float>(width, height), Grid<std::uint8_t>(width, height, 1)}};
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      int k0 = 0;
      for (std::size_t k = 0; k < shapes.size(); ++k)
        if (shapes[k].contains(r, c)) k0 = static_cast<int>(k) + 1;
      s.right.at(r, c) = detail::noisy(detail::texture(seed, k0, c, r), seed, c, r, noise);
      s.gt.disparity.at(r, c) = static_cast<float>(disparity[static_cast<std::size_t>(k0)]);
      // Left view column x shows right-view column x + d * dir of the nearest layer covering it.
      int k1 = 0;
      for (int k = static_cast<int>(disparity.size()) - 1; k >= 1; --k)
        if (shapes[static_cast<std::size_t>(k - 1)].contains(r, c + disparity[static_cast<std::size_t>(k)] * dir)) { k1 = k; break; }
      s.left.at(r, c) = detail::noisy(detail::texture(seed, k1, c + disparity[static_cast<std::size_t>(k1)] * dir, r), seed + 1, c, r, noise);
    }
  }
  return s;
}

}  // namespace mrfsim::apps
