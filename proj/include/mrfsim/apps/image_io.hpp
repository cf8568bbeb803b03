// Binary PGM (P5) and Middlebury .flo readers/writers.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrfsim/core.hpp"

namespace mrfsim::apps {

using Image8 = Grid<std::uint8_t>;

namespace detail {
inline std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}
}  // namespace detail

[[nodiscard]] inline Image8 read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open image " + path);
  if (detail::pgm_token(f) != "P5") throw std::runtime_error(path + ": not a binary PGM (P5)");
  const int w = std::stoi(detail::pgm_token(f));
  const int h = std::stoi(detail::pgm_token(f));
  const int maxval = std::stoi(detail::pgm_token(f));
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) throw std::runtime_error(path + ": unsupported PGM header");
  Image8 img(w, h);
  f.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
  if (f.gcount() != static_cast<std::streamsize>(img.size())) throw std::runtime_error(path + ": truncated PGM");
  return img;
}

inline void write_pgm(const std::string& path, const Image8& img) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.size()));
}

/// 8-bit -> 6-bit by dropping the two least significant bits.
[[nodiscard]] inline Image8 quantize6(const Image8& img) {
  Image8 out(img.width, img.height);
  for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = static_cast<std::uint8_t>(img.data[i] >> 2);
  return out;
}

/// Flow ground truth; u is horizontal (dx), v vertical (dy).
struct FlowGroundTruth {
  Grid<float> u;
  Grid<float> v;

  [[nodiscard]] int width() const { return u.width; }
  [[nodiscard]] int height() const { return u.height; }
  [[nodiscard]] bool valid(int r, int c) const {
    const float a = u.at(r, c), b = v.at(r, c);
    return std::isfinite(a) && std::isfinite(b) && std::fabs(a) < 1e9f && std::fabs(b) < 1e9f;
  }
};

inline constexpr float kFloMagic = 202021.25f;

[[nodiscard]] inline FlowGroundTruth read_flo(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open flow file " + path);
  float magic = 0;
  std::int32_t w = 0, h = 0;
  f.read(reinterpret_cast<char*>(&magic), 4);
  f.read(reinterpret_cast<char*>(&w), 4);
  f.read(reinterpret_cast<char*>(&h), 4);
  if (!f || magic != kFloMagic) throw std::runtime_error(path + ": bad .flo magic");
  if (w < 1 || h < 1 || w > 100000 || h > 100000) throw std::runtime_error(path + ": bad .flo dimensions");
  FlowGroundTruth gt{Grid<float>(w, h), Grid<float>(w, h)};
  std::vector<float> buf(static_cast<std::size_t>(w) * h * 2);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
  if (f.gcount() != static_cast<std::streamsize>(buf.size() * 4)) throw std::runtime_error(path + ": truncated .flo");
  for (std::size_t i = 0; i < gt.u.size(); ++i) {
    gt.u.data[i] = buf[2 * i];
    gt.v.data[i] = buf[2 * i + 1];
  }
  return gt;
}

inline void write_flo(const std::string& path, const FlowGroundTruth& gt) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  const float magic = kFloMagic;
  const std::int32_t w = gt.width(), h = gt.height();
  f.write(reinterpret_cast<const char*>(&magic), 4);
  f.write(reinterpret_cast<const char*>(&w), 4);
  f.write(reinterpret_cast<const char*>(&h), 4);
  for (std::size_t i = 0; i < gt.u.size(); ++i) {
    f.write(reinterpret_cast<const char*>(&gt.u.data[i]), 4);
    f.write(reinterpret_cast<const char*>(&gt.v.data[i]), 4);
  }
}

/// Disparity ground truth decoded from a PGM: value / scale, 0 = unknown.
struct DisparityGroundTruth {
  Grid<float> disparity;
  Grid<std::uint8_t> valid;
};

[[nodiscard]] inline DisparityGroundTruth decode_disparity_gt(const Image8& img, double scale) {
  if (!(scale > 0)) throw std::invalid_argument("disparity scale must be positive");
  DisparityGroundTruth gt{Grid<float>(img.width, img.height), Grid<std::uint8_t>(img.width, img.height)};
  for (std::size_t i = 0; i < img.size(); ++i) {
    gt.disparity.data[i] = static_cast<float>(img.data[i] / scale);
    gt.valid.data[i] = img.data[i] != 0;
  }
  return gt;
}

[[nodiscard]] inline Image8 encode_disparity_gt(const DisparityGroundTruth& gt, double scale) {
  Image8 img(gt.disparity.width, gt.disparity.height);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data[i] = gt.valid.data[i] ? static_cast<std::uint8_t>(std::lround(std::clamp(gt.disparity.data[i] * scale, 0.0, 255.0))) : 0;
  return img;
}

}  // namespace mrfsim::apps
