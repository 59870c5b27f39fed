#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "viewprop/error.hpp"

namespace viewprop {

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb8 &, const Rgb8 &) = default;
};

/// Row-major 2D grid of T. Shared container for color images, depth maps
/// and binary masks.
template <class T>
class Raster {
  public:
    Raster() = default;
    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height),
          values_(static_cast<size_t>(width) * static_cast<size_t>(height), fill) {
        require(width >= 1 && height >= 1, errc::invalid_argument,
                "Raster: dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return values_.empty(); }
    size_t size() const { return values_.size(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    T &at(int x, int y) { return values_[static_cast<size_t>(y) * width_ + x]; }
    const T &at(int x, int y) const { return values_[static_cast<size_t>(y) * width_ + x]; }

    std::vector<T> &values() { return values_; }
    const std::vector<T> &values() const { return values_; }

    template <class U>
    bool same_size(const Raster<U> &other) const {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster &, const Raster &) = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> values_;
};

using ColorImage = Raster<Rgb8>;

/// Per-pixel metric depth. Value <= 0 or non-finite means "no depth".
using DepthMap = Raster<float>;

/// Per-pixel {0, 1} labels; 1 = object / inpaint region.
using BinaryMask = Raster<std::uint8_t>;

inline bool depth_valid(float d) { return std::isfinite(d) && d > 0.0f; }

inline size_t count_ones(const BinaryMask &mask) {
    size_t n = 0;
    for (auto v : mask.values()) n += v ? 1 : 0;
    return n;
}

inline bool mask_empty(const BinaryMask &mask) { return count_ones(mask) == 0; }

/// Rounds to the nearest integer with *.5 ties toward the smaller index.
inline double round_half_down(double x) { return std::ceil(x - 0.5); }

} // namespace viewprop
