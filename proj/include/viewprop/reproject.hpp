#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "viewprop/depth_align.hpp"
#include "viewprop/error.hpp"
#include "viewprop/geometry.hpp"
#include "viewprop/image.hpp"
#include "viewprop/morphology.hpp"

namespace viewprop {

struct ProjectionConfig {
    double epsilon_rel = 0.02; // depth-prior relative tolerance
    double epsilon_abs = 0.0;  // scene-unit floor on the tolerance
    int splat_footprint = 1;   // 1 (nearest pixel) or 2 (2x2)
    bool use_depth_prior = true;
};

/// Write-attempt counters; with a 2x2 footprint a source pixel makes up to
/// four attempts, so totals can exceed the source pixel count.
struct ProjectionStats {
    long long source_valid = 0;
    long long behind_camera = 0;
    long long out_of_bounds = 0;
    long long prior_rejected = 0;
    long long zbuffer_rejected = 0;
    long long written = 0;
};

struct ProjectionResult {
    ColorImage color;
    BinaryMask coverage; // 1 exactly where zbuffer is valid
    DepthMap zbuffer;    // depth of the surviving pixel; 0 where uncovered
    ProjectionStats stats;
};

/// Reference image plus its per-target-view directional re-renderings.
struct VariantSet {
    ColorImage base;
    std::map<std::string, ColorImage> variants; // keyed by target view_id
};

/// View whose mean pose distance to all other views is minimal; ties go to
/// the lexicographically smallest view_id.
inline std::string select_reference(std::span<const CameraView> views, double lambda_t) {
    require(!views.empty(), errc::empty_input, "select_reference: no views");
    size_t best = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < views.size(); ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < views.size(); ++j)
            if (j != i) sum += pose_distance(views[i].pose, views[j].pose, lambda_t);
        double mean = views.size() > 1 ? sum / static_cast<double>(views.size() - 1) : 0.0;
        if (mean < best_mean ||
            (mean == best_mean && views[i].view_id < views[best].view_id)) {
            best = i;
            best_mean = mean;
        }
    }
    return views[best].view_id;
}

/// The directional variant stored for the target, or the base image when
/// none exists (fallbacks are counted, never fatal).
inline const ColorImage &render_variant_for_target(const VariantSet &set,
                                                   const std::string &target_id,
                                                   int *fallback_count = nullptr) {
    auto it = set.variants.find(target_id);
    if (it != set.variants.end()) return it->second;
    if (fallback_count && !set.variants.empty()) ++*fallback_count;
    return set.base;
}

namespace detail {

// One source pixel after backprojection + relative transform + projection.
struct WarpedPixel {
    int u = 0, v = 0;   // rounded target pixel (ties toward smaller index)
    float depth = 0.0f; // camera-frame Z in the target view
    bool usable = false;
};

inline void try_write(ProjectionResult &out, const DepthMap *prior,
                      const ProjectionConfig &cfg, int x, int y, float z, Rgb8 color) {
    if (!out.color.in_bounds(x, y)) {
        ++out.stats.out_of_bounds;
        return;
    }
    if (cfg.use_depth_prior && prior) {
        float p = prior->at(x, y);
        if (depth_valid(p)) {
            double eps = std::max(cfg.epsilon_abs, cfg.epsilon_rel * static_cast<double>(p));
            if (!(std::abs(static_cast<double>(p) - static_cast<double>(z)) < eps)) {
                ++out.stats.prior_rejected;
                return;
            }
        }
    }
    float &zb = out.zbuffer.at(x, y);
    if (z < zb) {
        zb = z;
        out.color.at(x, y) = color;
        ++out.stats.written;
    } else {
        ++out.stats.zbuffer_rejected;
    }
}

} // namespace detail

/// Depth-image-based forward warp of the source view into the target
/// camera, with a per-target-pixel Z-buffer and optional depth-prior
/// rejection of points that disagree with the target's own geometry.
///
/// Source pixels are processed in row-major order. With a 2x2 footprint the
/// rounded pixel and its right/down/diagonal neighbors all receive the same
/// test-and-write; nearest-pixel hits are swept first so that footprint
/// extensions only fill pixels they strictly win (an extension never
/// displaces an equal-depth nearest hit). Output is deterministic for fixed
/// inputs and config.
inline ProjectionResult forward_project(const ColorImage &source_color,
                                        const DepthMap &source_depth,
                                        const CameraView &source_cam,
                                        const CameraView &target_cam,
                                        const DepthMap *target_prior,
                                        const ProjectionConfig &cfg) {
    require(source_color.same_size(source_depth), errc::dimension_mismatch,
            "forward_project: source color and depth dimensions differ");
    const int tw = target_cam.intrinsics.width, th = target_cam.intrinsics.height;
    if (target_prior)
        require(target_prior->width() == tw && target_prior->height() == th,
                errc::dimension_mismatch, "forward_project: prior does not match target size");
    require(cfg.splat_footprint == 1 || cfg.splat_footprint == 2, errc::invalid_argument,
            "forward_project: splat footprint must be 1 or 2");
    require(cfg.epsilon_rel >= 0.0 && cfg.epsilon_abs >= 0.0, errc::invalid_argument,
            "forward_project: tolerances must be non-negative");

    ProjectionResult out;
    out.color = ColorImage(tw, th);
    out.coverage = BinaryMask(tw, th, 0);
    out.zbuffer = DepthMap(tw, th, std::numeric_limits<float>::infinity());

    const RigidPose rel = relative_pose(source_cam.pose, target_cam.pose);
    const CameraIntrinsics &ks = source_cam.intrinsics;
    const CameraIntrinsics &kt = target_cam.intrinsics;
    const int sw = source_color.width(), sh = source_color.height();

    std::vector<detail::WarpedPixel> warped(static_cast<size_t>(sw) * sh);
    for (int v = 0; v < sh; ++v)
        for (int u = 0; u < sw; ++u) {
            float d = source_depth.at(u, v);
            if (!depth_valid(d)) continue;
            ++out.stats.source_valid;
            Point3 p{(u - ks.cx) / ks.fx * d, (v - ks.cy) / ks.fy * d, d};
            Point3 q = rel.rotation * p + rel.translation;
            if (q.z() <= 0.0) {
                ++out.stats.behind_camera;
                continue;
            }
            double su = kt.fx * q.x() / q.z() + kt.cx;
            double sv = kt.fy * q.y() / q.z() + kt.cy;
            double ru = round_half_down(su);
            double rv = round_half_down(sv);
            // Cast guard; far-out positions fail the bounds test anyway.
            if (ru < -2.0 || ru > tw + 1.0 || rv < -2.0 || rv > th + 1.0) {
                out.stats.out_of_bounds += cfg.splat_footprint == 2 ? 4 : 1;
                continue;
            }
            auto &w = warped[static_cast<size_t>(v) * sw + u];
            w.u = static_cast<int>(ru);
            w.v = static_cast<int>(rv);
            w.depth = static_cast<float>(q.z());
            w.usable = true;
        }

    for (int v = 0; v < sh; ++v)
        for (int u = 0; u < sw; ++u) {
            const auto &w = warped[static_cast<size_t>(v) * sw + u];
            if (!w.usable) continue;
            detail::try_write(out, target_prior, cfg, w.u, w.v, w.depth, source_color.at(u, v));
        }
    if (cfg.splat_footprint == 2) {
        for (int v = 0; v < sh; ++v)
            for (int u = 0; u < sw; ++u) {
                const auto &w = warped[static_cast<size_t>(v) * sw + u];
                if (!w.usable) continue;
                Rgb8 c = source_color.at(u, v);
                detail::try_write(out, target_prior, cfg, w.u + 1, w.v, w.depth, c);
                detail::try_write(out, target_prior, cfg, w.u, w.v + 1, w.depth, c);
                detail::try_write(out, target_prior, cfg, w.u + 1, w.v + 1, w.depth, c);
            }
    }

    for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) {
            float &z = out.zbuffer.at(x, y);
            if (std::isfinite(z)) {
                out.coverage.at(x, y) = 1;
            } else {
                z = 0.0f;
            }
        }
    return out;
}

struct CompositeResult {
    ColorImage image;
    BinaryMask gap_mask; // masked pixels no surviving projection reached
};

/// Replaces the target's masked pixels with projected color where coverage
/// exists; everything outside the mask is left byte-identical.
inline CompositeResult composite_into_mask(const ColorImage &target_original,
                                           const BinaryMask &target_mask,
                                           const ProjectionResult &proj) {
    require(target_original.same_size(target_mask) && target_original.same_size(proj.color),
            errc::dimension_mismatch, "composite_into_mask: dimensions differ");
    CompositeResult out{target_original, BinaryMask(target_mask.width(), target_mask.height(), 0)};
    for (int y = 0; y < target_mask.height(); ++y)
        for (int x = 0; x < target_mask.width(); ++x) {
            if (!target_mask.at(x, y)) continue;
            if (proj.coverage.at(x, y)) {
                out.image.at(x, y) = proj.color.at(x, y);
            } else {
                out.gap_mask.at(x, y) = 1;
            }
        }
    return out;
}

/// Iterative nearest-valid-neighbor dilation fill: each round assigns every
/// gap pixel with at least one already-valid 4-neighbor the rounded mean of
/// those neighbors, synchronously, until no gap remains.
inline ColorImage fill_gaps_naive(const ColorImage &image, const BinaryMask &gap_mask) {
    require(image.same_size(gap_mask), errc::dimension_mismatch,
            "fill_gaps_naive: dimensions differ");
    size_t gaps = count_ones(gap_mask);
    require(gaps < gap_mask.size(), errc::invalid_argument,
            "fill_gaps_naive: gap mask covers the entire image");
    if (gaps == 0) return image;

    const int w = image.width(), h = image.height();
    ColorImage out = image;
    BinaryMask open = gap_mask;
    std::vector<std::pair<int, int>> pending;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (open.at(x, y)) pending.emplace_back(x, y);

    const int dx[4] = {0, -1, 1, 0};
    const int dy[4] = {-1, 0, 0, 1};
    while (!pending.empty()) {
        std::vector<std::pair<int, int>> filled;
        std::vector<Rgb8> colors;
        for (auto [x, y] : pending) {
            int n = 0;
            long sr = 0, sg = 0, sb = 0;
            for (int k = 0; k < 4; ++k) {
                int nx = x + dx[k], ny = y + dy[k];
                if (!open.in_bounds(nx, ny) || open.at(nx, ny)) continue;
                const Rgb8 &c = out.at(nx, ny);
                sr += c.r;
                sg += c.g;
                sb += c.b;
                ++n;
            }
            if (n == 0) continue;
            auto avg = [n](long s) {
                return static_cast<std::uint8_t>(
                    std::lround(static_cast<double>(s) / static_cast<double>(n)));
            };
            filled.emplace_back(x, y);
            colors.push_back(Rgb8{avg(sr), avg(sg), avg(sb)});
        }
        for (size_t i = 0; i < filled.size(); ++i) {
            out.at(filled[i].first, filled[i].second) = colors[i];
            open.at(filled[i].first, filled[i].second) = 0;
        }
        std::vector<std::pair<int, int>> next;
        for (auto [x, y] : pending)
            if (open.at(x, y)) next.emplace_back(x, y);
        pending = std::move(next);
    }
    return out;
}

/// Projects the source mask into the target view (2x2 footprint, no prior),
/// thresholds the surviving values, and seals rasterization pinholes with
/// one disc closing.
inline BinaryMask propagate_mask(const BinaryMask &source_mask, const DepthMap &source_depth,
                                 const CameraView &source_cam, const CameraView &target_cam,
                                 int close_radius, ProjectionStats *stats = nullptr) {
    require(source_mask.same_size(source_depth), errc::dimension_mismatch,
            "propagate_mask: mask and depth dimensions differ");
    ColorImage mask_img(source_mask.width(), source_mask.height());
    for (size_t i = 0; i < source_mask.values().size(); ++i) {
        std::uint8_t v = source_mask.values()[i] ? 255 : 0;
        mask_img.values()[i] = Rgb8{v, v, v};
    }
    ProjectionConfig cfg;
    cfg.splat_footprint = 2;
    cfg.use_depth_prior = false;
    ProjectionResult proj =
        forward_project(mask_img, source_depth, source_cam, target_cam, nullptr, cfg);
    if (stats) *stats = proj.stats;

    BinaryMask out(proj.color.width(), proj.color.height(), 0);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            if (proj.coverage.at(x, y) && proj.color.at(x, y).r >= 128) out.at(x, y) = 1;
    return close_disc(out, close_radius);
}

struct SeedPoint {
    Point3 position; // world frame
    Rgb8 color;
};

/// World-frame colored points from every masked, valid-depth pixel on the
/// stride grid; used to seed explicit radiance-field primitives inside the
/// masked region.
inline std::vector<SeedPoint> export_seed_points(const DepthMap &depth, const BinaryMask &mask,
                                                 const ColorImage &color, const CameraView &cam,
                                                 int stride) {
    require(depth.same_size(mask) && depth.same_size(color), errc::dimension_mismatch,
            "export_seed_points: dimensions differ");
    require(stride >= 1, errc::invalid_argument, "export_seed_points: stride must be >= 1");
    const RigidPose cam_to_world = cam.pose.inverse();
    std::vector<SeedPoint> points;
    for (int v = 0; v < depth.height(); v += stride)
        for (int u = 0; u < depth.width(); u += stride) {
            if (!mask.at(u, v)) continue;
            float d = depth.at(u, v);
            if (!depth_valid(d)) continue;
            Point3 p = backproject_pixel(u, v, d, cam.intrinsics);
            points.push_back({transform_point(cam_to_world, p), color.at(u, v)});
        }
    return points;
}

/// Median of the valid depths; 0 when none exist.
inline double median_valid_depth(const DepthMap &depth) {
    std::vector<float> vals;
    vals.reserve(depth.size());
    for (float d : depth.values())
        if (depth_valid(d)) vals.push_back(d);
    if (vals.empty()) return 0.0;
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    return static_cast<double>(vals[vals.size() / 2]);
}

/// Default absolute tolerance floor for prior rejection: 0.001 x median
/// valid prior depth.
inline double resolve_epsilon_abs(const DepthMap &prior) {
    return 0.001 * median_valid_depth(prior);
}

} // namespace viewprop
