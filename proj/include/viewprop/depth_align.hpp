#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "viewprop/error.hpp"
#include "viewprop/image.hpp"
#include "viewprop/morphology.hpp"

namespace viewprop {

/// Metric depth at a pixel, triangulated upstream (SfM feature track).
struct SparseDepthSample {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

/// Affine depth coefficients with residual statistics: fitted depth is
/// a * d_init + b.
struct AlignmentFit {
    double a = 1.0;
    double b = 0.0;
    int sample_count = 0;
    double rms_residual = 0.0;
    int skipped_count = 0; // samples dropped for invalid/out-of-bounds lookup
};

struct FitOptions {
    bool trim_outliers = false; // one 3-sigma trim-and-refit pass
};

/// Keeps samples outside the mask whose chessboard distance to the mask is
/// within band_radius pixels. An empty mask keeps everything.
inline std::vector<SparseDepthSample> select_alignment_samples(
    std::span<const SparseDepthSample> samples, const BinaryMask &mask, double band_radius) {
    require(band_radius > 0.0, errc::invalid_argument,
            "select_alignment_samples: band_radius must be positive");
    std::vector<SparseDepthSample> kept;
    if (mask_empty(mask)) {
        kept.assign(samples.begin(), samples.end());
        return kept;
    }
    Raster<int> dist = chebyshev_distance_to_mask(mask);
    for (const auto &s : samples) {
        int x = static_cast<int>(round_half_down(s.u));
        int y = static_cast<int>(round_half_down(s.v));
        if (!mask.in_bounds(x, y)) continue;
        if (mask.at(x, y)) continue;
        if (static_cast<double>(dist.at(x, y)) <= band_radius) kept.push_back(s);
    }
    return kept;
}

namespace detail {

struct UsedSample {
    double x; // d_init at the sample pixel
    double y; // sample depth
};

inline AlignmentFit solve_normal_equations(const std::vector<UsedSample> &used, int skipped) {
    const auto n = static_cast<double>(used.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto &s : used) {
        sx += s.x;
        sy += s.y;
        sxx += s.x * s.x;
        sxy += s.x * s.y;
    }
    double det = n * sxx - sx * sx;
    require(det > 1e-12 * std::max(1.0, n * sxx), errc::degenerate_fit,
            "fit_affine_depth: initial depths are identical at all sample pixels");
    AlignmentFit fit;
    fit.a = (n * sxy - sx * sy) / det;
    fit.b = (sy - fit.a * sx) / n;
    double ss = 0.0;
    for (const auto &s : used) {
        double r = s.y - (fit.a * s.x + fit.b);
        ss += r * r;
    }
    fit.sample_count = static_cast<int>(used.size());
    fit.rms_residual = std::sqrt(ss / n);
    fit.skipped_count = skipped;
    return fit;
}

} // namespace detail

/// Least-squares minimizer of sum_i (sample_i - (a * d_init_i + b))^2 via
/// the 2x2 normal equations. Samples at invalid d_init pixels are skipped
/// and counted.
inline AlignmentFit fit_affine_depth(const DepthMap &d_init,
                                     std::span<const SparseDepthSample> samples,
                                     FitOptions options = {}) {
    std::vector<detail::UsedSample> used;
    used.reserve(samples.size());
    int skipped = 0;
    for (const auto &s : samples) {
        int x = static_cast<int>(round_half_down(s.u));
        int y = static_cast<int>(round_half_down(s.v));
        if (!d_init.in_bounds(x, y) || !depth_valid(d_init.at(x, y)) || !(s.depth > 0.0)) {
            ++skipped;
            continue;
        }
        used.push_back({static_cast<double>(d_init.at(x, y)), s.depth});
    }
    require(used.size() >= 2, errc::degenerate_fit,
            "fit_affine_depth: need at least 2 usable samples, got " +
                std::to_string(used.size()));
    AlignmentFit fit = detail::solve_normal_equations(used, skipped);

    if (options.trim_outliers && fit.rms_residual > 0.0) {
        double sigma = fit.rms_residual;
        std::vector<detail::UsedSample> inliers;
        inliers.reserve(used.size());
        for (const auto &s : used)
            if (std::abs(s.y - (fit.a * s.x + fit.b)) <= 3.0 * sigma) inliers.push_back(s);
        if (inliers.size() >= 2 && inliers.size() < used.size()) {
            int trimmed = static_cast<int>(used.size() - inliers.size());
            fit = detail::solve_normal_equations(inliers, skipped + trimmed);
        }
    }
    return fit;
}

/// Per-pixel a * d + b on valid pixels; invalid pixels stay invalid and
/// non-positive results are invalidated (written as 0) and counted.
inline DepthMap apply_affine_depth(const DepthMap &d_init, const AlignmentFit &fit,
                                   int *invalidated_count = nullptr) {
    DepthMap out(d_init.width(), d_init.height(), 0.0f);
    int invalidated = 0;
    for (size_t i = 0; i < d_init.values().size(); ++i) {
        float d = d_init.values()[i];
        if (!depth_valid(d)) continue;
        double mapped = fit.a * static_cast<double>(d) + fit.b;
        if (mapped > 0.0) {
            out.values()[i] = static_cast<float>(mapped);
        } else {
            ++invalidated;
        }
    }
    if (invalidated_count) *invalidated_count = invalidated;
    return out;
}

} // namespace viewprop
