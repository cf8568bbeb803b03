// Motion estimation and stereo vision as first-order MRFs: label geometry,
// singleton energies, model construction, evaluation metrics and the mode
// output computed from label histograms.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrfsim/apps/image_io.hpp"
#include "mrfsim/core.hpp"
#include "mrfsim/uq_log.hpp"

namespace mrfsim::apps {

inline constexpr int kMotionRadius = 3;
inline constexpr int kMotionWindow = 2 * kMotionRadius + 1;
inline constexpr int kMotionLabels = kMotionWindow * kMotionWindow;

/// Motion labels enumerate the 7x7 window row-major: l = (dy + 3) * 7 + (dx + 3).
[[nodiscard]] constexpr Offset motion_vector(int label) {
  return {label / kMotionWindow - kMotionRadius, label % kMotionWindow - kMotionRadius};
}
[[nodiscard]] constexpr int motion_label(int dy, int dx) {
  return (dy + kMotionRadius) * kMotionWindow + (dx + kMotionRadius);
}

/// Per-pixel integer displacement, dy/dx in [-3, 3].
using FlowField = Grid<Offset>;
/// Per-pixel disparity level in [0, L).
using DisparityMap = Grid<std::uint8_t>;

[[nodiscard]] inline int me_singleton_energy(const Image8& frame_t, const Image8& frame_t1, int r, int c, int label) {
  const Offset v = motion_vector(label);
  const int qr = std::clamp(r + v.dy, 0, frame_t1.height - 1);
  const int qc = std::clamp(c + v.dx, 0, frame_t1.width - 1);
  return std::abs(int{frame_t.at(r, c)} - int{frame_t1.at(qr, qc)});
}

/// dir = +1 reaches to the left in the left view (c - l), -1 to the right.
[[nodiscard]] inline int sv_singleton_energy(const Image8& right, const Image8& left, int r, int c, int label, int dir = 1) {
  const int qc = std::clamp(c - label * dir, 0, left.width - 1);
  return std::abs(int{right.at(r, c)} - int{left.at(r, qc)});
}

struct AppParams {
  unsigned alpha = 6;
  unsigned beta = 6;
  double temperature = 1.0;
  int labels = kMotionLabels;
  int iterations = 3000;
  int width = 0;
  int height = 0;
};

/// Evaluation parameters per input set.
[[nodiscard]] inline std::optional<AppParams> preset(const std::string& name) {
  if (name == "dimetrodon" || name == "rubberwhale") return AppParams{6, 6, 1.0, 49, 3000, 584, 388};
  if (name == "venus") return AppParams{6, 6, 1.0, 49, 3000, 210, 190};
  if (name == "art") return AppParams{6, 7, 2.0, 28, 3000, 348, 278};
  if (name == "poster") return AppParams{6, 7, 2.0, 30, 1500, 435, 383};
  if (name == "teddy") return AppParams{6, 7, 2.0, 56, 3000, 450, 375};
  return std::nullopt;
}

/// Builds the motion MRF from two 8-bit frames (quantized to 6 bits here).
[[nodiscard]] inline MrfModel make_motion_model(const Image8& frame_t, const Image8& frame_t1, unsigned alpha, unsigned beta,
                                                double temperature, Smoothness smooth = {}) {
  if (frame_t.width != frame_t1.width || frame_t.height != frame_t1.height)
    throw std::invalid_argument("motion model: frame dimensions differ");
  MrfModel m;
  m.width = frame_t.width;
  m.height = frame_t.height;
  m.labels = kMotionLabels;
  m.alpha = alpha;
  m.beta = beta;
  m.temperature = TemperatureSchedule(temperature);
  m.singleton1 = quantize6(frame_t);
  m.singleton2 = quantize6(frame_t1);
  for (int l = 0; l < kMotionLabels; ++l) {
    m.offsets.push_back(motion_vector(l));
    m.label_vectors.push_back(motion_vector(l));
  }
  m.smoothness = smooth;
  m.validate();
  return m;
}

/// Builds the stereo MRF: singleton 1 from the right view, singleton 2 from
/// the L pixels preceding it in the left view.
[[nodiscard]] inline MrfModel make_stereo_model(const Image8& right, const Image8& left, int labels, unsigned alpha,
                                                unsigned beta, double temperature, int dir = 1, Smoothness smooth = {}) {
  if (right.width != left.width || right.height != left.height)
    throw std::invalid_argument("stereo model: view dimensions differ");
  if (dir != 1 && dir != -1) throw std::invalid_argument("stereo model: direction must be +1 or -1");
  MrfModel m;
  m.width = right.width;
  m.height = right.height;
  m.labels = labels;
  m.alpha = alpha;
  m.beta = beta;
  m.temperature = TemperatureSchedule(temperature);
  m.singleton1 = quantize6(right);
  m.singleton2 = quantize6(left);
  for (int l = 0; l < labels; ++l) {
    m.offsets.push_back({0, -l * dir});
    m.label_vectors.push_back({0, l});
  }
  m.smoothness = smooth;
  m.validate();
  return m;
}

[[nodiscard]] inline FlowField labels_to_flow(const Grid<std::uint8_t>& labels) {
  FlowField f(labels.width, labels.height);
  for (std::size_t i = 0; i < labels.size(); ++i) f.data[i] = motion_vector(labels.data[i]);
  return f;
}

/// Mean end-point error over pixels with valid ground truth.
[[nodiscard]] inline double epe(const FlowField& flow, const FlowGroundTruth& gt) {
  if (flow.width != gt.width() || flow.height != gt.height()) throw std::invalid_argument("epe: dimension mismatch");
  double sum = 0;
  long n = 0;
  for (int r = 0; r < flow.height; ++r)
    for (int c = 0; c < flow.width; ++c) {
      if (!gt.valid(r, c)) continue;
      const double du = flow.at(r, c).dx - gt.u.at(r, c);
      const double dv = flow.at(r, c).dy - gt.v.at(r, c);
      sum += std::sqrt(du * du + dv * dv);
      ++n;
    }
  return n == 0 ? 0.0 : sum / double(n);
}

/// Percentage of valid pixels whose disparity error exceeds `threshold`.
[[nodiscard]] inline double bad_pixel(const DisparityMap& disp, const DisparityGroundTruth& gt, double threshold = 1.0) {
  if (disp.width != gt.disparity.width || disp.height != gt.disparity.height)
    throw std::invalid_argument("bad_pixel: dimension mismatch");
  long bad = 0, n = 0;
  for (std::size_t i = 0; i < disp.size(); ++i) {
    if (!gt.valid.data[i]) continue;
    ++n;
    if (std::fabs(double(disp.data[i]) - gt.disparity.data[i]) > threshold) ++bad;
  }
  return n == 0 ? 0.0 : 100.0 * double(bad) / double(n);
}

/// Per-RV argmax over dense num_rvs x L counts (lowest label on ties).
[[nodiscard]] inline Grid<std::uint8_t> mode_output(std::span<const std::uint32_t> counts, int width, int height, int labels) {
  if (counts.size() != static_cast<std::size_t>(width) * height * labels) throw std::invalid_argument("mode_output: shape mismatch");
  Grid<std::uint8_t> out(width, height);
  for (std::size_t rv = 0; rv < out.size(); ++rv) {
    const auto row = counts.subspan(rv * static_cast<std::size_t>(labels), static_cast<std::size_t>(labels));
    std::size_t best = 0;
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < row.size(); ++l) {
      total += row[l];
      if (row[l] > row[best]) best = l;
    }
    if (total == 0) throw std::invalid_argument("mode_output: empty window for RV " + std::to_string(rv));
    out.data[rv] = static_cast<std::uint8_t>(best);
  }
  return out;
}

[[nodiscard]] inline Grid<std::uint8_t> mode_output(const Histogram& h, int width, int height, int labels) {
  const auto dense = h.to_dense(width * height, labels);
  return mode_output(std::span<const std::uint32_t>(dense), width, height, labels);
}

/// Mode over frames [begin, end) of a label trace.
[[nodiscard]] inline Grid<std::uint8_t> mode_output(const LabelTrace& trace, int begin, int end) {
  if (begin < 0 || end > trace.num_frames() || begin >= end) throw std::invalid_argument("mode_output: empty window");
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(trace.num_rvs()) * trace.labels, 0);
  for (int f = begin; f < end; ++f) {
    const auto frame = trace.frame(f);
    for (std::size_t a = 0; a < frame.size(); ++a) ++counts[a * static_cast<std::size_t>(trace.labels) + frame[a]];
  }
  return mode_output(std::span<const std::uint32_t>(counts), trace.width, trace.height, trace.labels);
}

/// Labels scaled to 0..255 for viewing.
[[nodiscard]] inline Image8 label_image(const Grid<std::uint8_t>& labels, int label_count) {
  Image8 img(labels.width, labels.height);
  const int denom = std::max(1, label_count - 1);
  for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = static_cast<std::uint8_t>(labels.data[i] * 255 / denom);
  return img;
}

/// One flow component in [-3, 3] mapped to 0..255 (128 = zero motion, rounded).
[[nodiscard]] inline Image8 flow_component_image(const FlowField& f, bool horizontal) {
  Image8 img(f.width, f.height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const int v = horizontal ? f.data[i].dx : f.data[i].dy;
    img.data[i] = static_cast<std::uint8_t>(std::clamp(128 + v * 42, 0, 255));
  }
  return img;
}

}  // namespace mrfsim::apps
