#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "viewprop/image.hpp"

namespace viewprop {

inline constexpr int kDistanceInf = std::numeric_limits<int>::max() / 2;

/// Exact chessboard (Chebyshev) distance to the nearest mask=1 pixel,
/// via the classic two-pass chamfer with unit weights. Pixels inside the
/// mask get 0; an empty mask yields kDistanceInf everywhere.
inline Raster<int> chebyshev_distance_to_mask(const BinaryMask &mask) {
    const int w = mask.width(), h = mask.height();
    Raster<int> dist(w, h, kDistanceInf);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y)) dist.at(x, y) = 0;

    auto relax = [&](int x, int y, int nx, int ny) {
        if (nx < 0 || nx >= w || ny < 0 || ny >= h) return;
        if (dist.at(nx, ny) + 1 < dist.at(x, y)) dist.at(x, y) = dist.at(nx, ny) + 1;
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            relax(x, y, x - 1, y);
            relax(x, y, x - 1, y - 1);
            relax(x, y, x, y - 1);
            relax(x, y, x + 1, y - 1);
        }
    for (int y = h - 1; y >= 0; --y)
        for (int x = w - 1; x >= 0; --x) {
            relax(x, y, x + 1, y);
            relax(x, y, x + 1, y + 1);
            relax(x, y, x, y + 1);
            relax(x, y, x - 1, y + 1);
        }
    return dist;
}

/// Offsets of a disc structuring element: dx^2 + dy^2 <= radius^2.
inline std::vector<std::pair<int, int>> disc_offsets(int radius) {
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    return offsets;
}

inline BinaryMask dilate(const BinaryMask &mask, const std::vector<std::pair<int, int>> &offsets) {
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (auto [dx, dy] : offsets)
                if (mask.in_bounds(x + dx, y + dy)) out.at(x + dx, y + dy) = 1;
        }
    return out;
}

/// Out-of-bounds neighbors count as set, so regions touching the image
/// border keep their border rows under erosion.
inline BinaryMask erode(const BinaryMask &mask, const std::vector<std::pair<int, int>> &offsets) {
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            bool keep = true;
            for (auto [dx, dy] : offsets) {
                int nx = x + dx, ny = y + dy;
                if (mask.in_bounds(nx, ny) && !mask.at(nx, ny)) {
                    keep = false;
                    break;
                }
            }
            out.at(x, y) = keep ? 1 : 0;
        }
    return out;
}

/// One morphological closing (dilate then erode) with a disc of the given
/// radius. Radius <= 0 is a no-op.
inline BinaryMask close_disc(const BinaryMask &mask, int radius) {
    if (radius <= 0) return mask;
    auto offsets = disc_offsets(radius);
    return erode(dilate(mask, offsets), offsets);
}

} // namespace viewprop
