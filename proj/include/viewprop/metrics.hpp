#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewprop/error.hpp"
#include "viewprop/image.hpp"

namespace viewprop {

/// Region-overlap scores, all in [0, 1]. dice == 2*iou/(1+iou) by identity.
struct MaskScore {
    double accuracy = 0.0;
    double iou = 0.0;
    double dice = 0.0;
};

/// 10*log10(255^2 / MSE) with MSE pooled over all three channels; returns
/// +infinity for identical inputs. An optional region restricts the pixels.
inline double psnr(const ColorImage &a, const ColorImage &b, const BinaryMask *region = nullptr) {
    require(a.same_size(b), errc::dimension_mismatch, "psnr: image dimensions differ");
    if (region)
        require(region->same_size(a), errc::dimension_mismatch, "psnr: region dimensions differ");
    double sum_sq = 0.0;
    size_t count = 0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            if (region && !region->at(x, y)) continue;
            const Rgb8 &pa = a.at(x, y);
            const Rgb8 &pb = b.at(x, y);
            double dr = double(pa.r) - double(pb.r);
            double dg = double(pa.g) - double(pb.g);
            double db = double(pa.b) - double(pb.b);
            sum_sq += dr * dr + dg * dg + db * db;
            ++count;
        }
    require(count > 0, errc::empty_input, "psnr: region is empty");
    double mse = sum_sq / (3.0 * static_cast<double>(count));
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

/// Accuracy, IoU and Dice of a predicted mask against ground truth.
/// Two empty masks score iou = dice = 1.
inline MaskScore mask_score(const BinaryMask &pred, const BinaryMask &gt) {
    require(pred.same_size(gt), errc::dimension_mismatch, "mask_score: dimensions differ");
    size_t inter = 0, pred_n = 0, gt_n = 0, match = 0;
    for (size_t i = 0; i < pred.values().size(); ++i) {
        bool p = pred.values()[i] != 0;
        bool g = gt.values()[i] != 0;
        inter += (p && g) ? 1 : 0;
        pred_n += p ? 1 : 0;
        gt_n += g ? 1 : 0;
        match += (p == g) ? 1 : 0;
    }
    MaskScore score;
    score.accuracy = static_cast<double>(match) / static_cast<double>(pred.size());
    size_t uni = pred_n + gt_n - inter;
    score.iou = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    score.dice = (pred_n + gt_n) == 0
                     ? 1.0
                     : 2.0 * static_cast<double>(inter) / static_cast<double>(pred_n + gt_n);
    return score;
}

/// Per-view metric bundle; absent entries mean the metric could not be
/// computed for that view (e.g. no ground-truth mask).
struct MetricSample {
    std::string view_id;
    std::optional<double> psnr_full;
    std::optional<double> psnr_mask;
    std::optional<MaskScore> mask;
};

struct MetricMean {
    std::optional<double> mean; // over finite values only
    int finite_count = 0;
    int infinite_count = 0;
};

struct ReportSummary {
    MetricMean psnr_full;
    MetricMean psnr_mask;
    std::optional<double> accuracy_mean;
    std::optional<double> iou_mean;
    std::optional<double> dice_mean;
    int mask_count = 0;
};

namespace detail {

inline MetricMean mean_excluding_infinite(std::span<const MetricSample> samples,
                                          std::optional<double> MetricSample::*field) {
    MetricMean out;
    double sum = 0.0;
    for (const auto &s : samples) {
        const auto &v = s.*field;
        if (!v) continue;
        if (std::isinf(*v)) {
            ++out.infinite_count;
        } else {
            sum += *v;
            ++out.finite_count;
        }
    }
    if (out.finite_count > 0) out.mean = sum / out.finite_count;
    return out;
}

} // namespace detail

/// Arithmetic means per metric. Infinite PSNR views are excluded from the
/// mean and counted separately.
inline ReportSummary aggregate_report(std::span<const MetricSample> samples) {
    require(!samples.empty(), errc::empty_input, "aggregate_report: no per-view scores");
    ReportSummary summary;
    summary.psnr_full = detail::mean_excluding_infinite(samples, &MetricSample::psnr_full);
    summary.psnr_mask = detail::mean_excluding_infinite(samples, &MetricSample::psnr_mask);
    double acc = 0.0, iou = 0.0, dice = 0.0;
    for (const auto &s : samples) {
        if (!s.mask) continue;
        acc += s.mask->accuracy;
        iou += s.mask->iou;
        dice += s.mask->dice;
        ++summary.mask_count;
    }
    if (summary.mask_count > 0) {
        summary.accuracy_mean = acc / summary.mask_count;
        summary.iou_mean = iou / summary.mask_count;
        summary.dice_mean = dice / summary.mask_count;
    }
    return summary;
}

} // namespace viewprop
