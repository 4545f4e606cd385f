// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbpl/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "obbpl/error.hpp"

namespace obbpl {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kInvalidInput, "mask dimensions must be positive, got " +
                                              std::to_string(width) + "x" + std::to_string(height));
  }
}

// Summed-area table of set bits with a one-pixel zero border on the top/left.
class IntegralImage {
 public:
  explicit IntegralImage(const BinaryMask& mask)
      : width_(mask.width()), height_(mask.height()),
        sums_(static_cast<std::size_t>(width_ + 1) * (height_ + 1), 0) {
    for (int r = 0; r < height_; ++r) {
      std::uint32_t row_sum = 0;
      for (int c = 0; c < width_; ++c) {
        row_sum += mask.at(c, r) ? 1u : 0u;
        sums_[index(c + 1, r + 1)] = sums_[index(c + 1, r)] + row_sum;
      }
    }
  }

  // Set pixels in the window [c0, c1] x [r0, r1], clipped to the image.
  std::uint32_t window(int c0, int r0, int c1, int r1) const noexcept {
    c0 = std::max(c0, 0);
    r0 = std::max(r0, 0);
    c1 = std::min(c1, width_ - 1);
    r1 = std::min(r1, height_ - 1);
    if (c0 > c1 || r0 > r1) return 0;
    return sums_[index(c1 + 1, r1 + 1)] - sums_[index(c0, r1 + 1)] -
           sums_[index(c1 + 1, r0)] + sums_[index(c0, r0)];
  }

 private:
  std::size_t index(int c, int r) const noexcept {
    return static_cast<std::size_t>(r) * (width_ + 1) + c;
  }

  int width_;
  int height_;
  std::vector<std::uint32_t> sums_;
};

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_dims(width, height);
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::kInvalidInput, "mask bit count does not match its dimensions");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

bool BinaryMask::contains(Point2 p) const noexcept {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  const double col = std::floor(p.x);
  const double row = std::floor(p.y);
  if (col < 0 || row < 0 || col >= width_ || row >= height_) return false;
  return at(static_cast<int>(col), static_cast<int>(row));
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RleMask rle_encode(const BinaryMask& mask) {
  RleMask rle{mask.width(), mask.height(), {}};
  std::uint8_t current = 0;
  std::uint64_t run = 0;
  for (std::uint8_t bit : mask.bits()) {
    if (bit != current) {
      rle.counts.push_back(run);
      run = 0;
      current = bit;
    }
    ++run;
  }
  rle.counts.push_back(run);
  return rle;
}

void validate(const RleMask& rle) {
  if (rle.width <= 0 || rle.height <= 0) {
    throw Error(ErrorKind::kFormat, "rle dimensions must be positive");
  }
  const std::uint64_t total = static_cast<std::uint64_t>(rle.width) * rle.height;
  if (rle.counts.empty()) {
    throw Error(ErrorKind::kFormat, "rle counts are empty");
  }
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    if (i > 0 && rle.counts[i] == 0) {
      throw Error(ErrorKind::kFormat, "rle has a zero-length run at index " + std::to_string(i));
    }
    if (rle.counts[i] > total - sum) {
      throw Error(ErrorKind::kFormat, "rle counts exceed " + std::to_string(total) + " pixels");
    }
    sum += rle.counts[i];
  }
  if (sum != total) {
    throw Error(ErrorKind::kFormat, "rle counts sum to " + std::to_string(sum) + ", expected " +
                                        std::to_string(total));
  }
}

BinaryMask rle_decode(const RleMask& rle) {
  validate(rle);
  const std::uint64_t total = static_cast<std::uint64_t>(rle.width) * rle.height;
  std::vector<std::uint8_t> bits;
  bits.reserve(total);
  std::uint8_t value = 0;
  for (std::uint64_t run : rle.counts) {
    bits.insert(bits.end(), run, value);
    value ^= 1;
  }
  return BinaryMask(rle.width, rle.height, std::move(bits));
}

void require_non_empty(const BinaryMask& mask) {
  if (mask.size() == 0 || mask.empty()) {
    throw Error(ErrorKind::kEmptyMask, "mask has no set pixels");
  }
}

AxisAlignedBox mask_aabb(const BinaryMask& mask) {
  require_non_empty(mask);
  int cmin = mask.width(), cmax = -1, rmin = mask.height(), rmax = -1;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) continue;
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  return {cmin + 0.5, rmin + 0.5, cmax + 0.5, rmax + 0.5};
}

BinaryMask erode(const BinaryMask& mask, int radius) {
  if (radius < 0) throw Error(ErrorKind::kInvalidInput, "erosion radius must be >= 0");
  if (radius == 0) return mask;
  const IntegralImage integral(mask);
  const auto full = static_cast<std::uint32_t>((2 * radius + 1) * (2 * radius + 1));
  BinaryMask out(mask.width(), mask.height());
  for (int r = radius; r < mask.height() - radius; ++r) {
    for (int c = radius; c < mask.width() - radius; ++c) {
      if (mask.at(c, r) && integral.window(c - radius, r - radius, c + radius, r + radius) == full) {
        out.set(c, r);
      }
    }
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw Error(ErrorKind::kInvalidInput, "dilation radius must be >= 0");
  if (radius == 0) return mask;
  const IntegralImage integral(mask);
  BinaryMask out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (integral.window(c - radius, r - radius, c + radius, r + radius) > 0) out.set(c, r);
    }
  }
  return out;
}

BinaryMask inner_margin(const BinaryMask& mask, int width_px) {
  if (width_px < 1) throw Error(ErrorKind::kInvalidInput, "margin width must be >= 1");
  require_non_empty(mask);
  const BinaryMask core = erode(mask, width_px);
  BinaryMask out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.at(c, r) && !core.at(c, r)) out.set(c, r);
    }
  }
  return out;
}

std::vector<Point2> pixel_points(const BinaryMask& mask) {
  require_non_empty(mask);
  std::vector<Point2> points;
  points.reserve(mask.count());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask.at(c, r)) points.push_back({c + 0.5, r + 0.5});
    }
  }
  return points;
}

Point2 centroid(const BinaryMask& mask) {
  require_non_empty(mask);
  // Integer index sums stay exact for any realistic image size.
  std::int64_t sum_c = 0, sum_r = 0, n = 0;
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(c, r)) continue;
      sum_c += c;
      sum_r += r;
      ++n;
    }
  }
  return {static_cast<double>(sum_c) / n + 0.5, static_cast<double>(sum_r) / n + 0.5};
}

}  // namespace obbpl
