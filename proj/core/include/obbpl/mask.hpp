// Copyright 2026 The obbpl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "obbpl/geometry.hpp"

namespace obbpl {

/// Dense row-major binary mask. Pixel (col, row) has center (col + 0.5, row + 0.5).
class BinaryMask {
 public:
  BinaryMask() = default;
  /// All-zero mask. Throws kInvalidInput for non-positive dimensions.
  BinaryMask(int width, int height);
  /// Takes ownership of `bits` (0 or 1 per pixel, row-major).
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int col, int row) const noexcept {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(int col, int row, bool value = true) noexcept {
    bits_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }
  bool in_bounds(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  /// True when the pixel containing `p` is set; false outside the image.
  bool contains(Point2 p) const noexcept;

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Row-major run lengths, starting with a run of zeros (possibly empty).
struct RleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> counts;

  friend bool operator==(const RleMask&, const RleMask&) = default;
};

RleMask rle_encode(const BinaryMask& mask);
/// Throws kFormat unless the counts describe exactly width*height pixels with
/// no zero-length run after the first.
void validate(const RleMask& rle);
/// Throws kFormat on a count-sum mismatch or an interior zero-length run.
BinaryMask rle_decode(const RleMask& rle);

/// Throws kEmptyMask when no bit is set.
void require_non_empty(const BinaryMask& mask);

/// Tight box over set pixel centers.
AxisAlignedBox mask_aabb(const BinaryMask& mask);

/// Set pixels whose Chebyshev distance to an unset or out-of-image pixel is
/// at most `width_px`.
BinaryMask inner_margin(const BinaryMask& mask, int width_px = 1);

/// Square-structuring-element morphology (Chebyshev radius). Pixels outside
/// the image count as unset.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);

/// Pixel centers of set bits in row-major order.
std::vector<Point2> pixel_points(const BinaryMask& mask);

Point2 centroid(const BinaryMask& mask);

}  // namespace obbpl
