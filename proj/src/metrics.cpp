#include "adsamp/metrics.hpp"

#include "adsamp/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace adsamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_same_grid(const LabelMap& pred, const LabelMap& gt) {
    if (!(pred.grid() == gt.grid())) throw Error(ErrorCode::shape, "prediction and ground truth differ in size");
}

// Rows then columns: out[p] = 1 iff some mask pixel lies within the
// (2k+1) x (2k+1) square centred at p.
std::vector<std::uint8_t> square_dilate(const std::vector<std::uint8_t>& mask, int h, int w, int k) {
    std::vector<std::uint8_t> rows(mask.size(), 0), out(mask.size(), 0);
    std::vector<int> prefix(std::max(h, w) + 1);
    for (int r = 0; r < h; ++r) {
        prefix[0] = 0;
        for (int c = 0; c < w; ++c) prefix[c + 1] = prefix[c] + mask[static_cast<std::size_t>(r) * w + c];
        for (int c = 0; c < w; ++c) {
            const int lo = std::max(0, c - k);
            const int hi = std::min(w - 1, c + k);
            rows[static_cast<std::size_t>(r) * w + c] = prefix[hi + 1] - prefix[lo] > 0;
        }
    }
    for (int c = 0; c < w; ++c) {
        prefix[0] = 0;
        for (int r = 0; r < h; ++r) prefix[r + 1] = prefix[r] + rows[static_cast<std::size_t>(r) * w + c];
        for (int r = 0; r < h; ++r) {
            const int lo = std::max(0, r - k);
            const int hi = std::min(h - 1, r + k);
            out[static_cast<std::size_t>(r) * w + c] = prefix[hi + 1] - prefix[lo] > 0;
        }
    }
    return out;
}

} // namespace

void ConfusionCounts::add(const LabelMap& pred, const LabelMap& gt) {
    check_same_grid(pred, gt);
    const auto& p = pred.labels();
    const auto& g = gt.labels();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (gt.is_ignored(g[k])) continue;
        ++total_;
        if (p[k] == g[k]) {
            ++correct_;
            ++per_class_[g[k]].tp;
            continue;
        }
        ++per_class_[g[k]].fn;
        if (!gt.is_ignored(p[k]) && !pred.is_ignored(p[k])) ++per_class_[p[k]].fp;
    }
}

void ConfusionCounts::merge(const ConfusionCounts& other) {
    for (const auto& [id, c] : other.per_class_) {
        PerClass& mine = per_class_[id];
        mine.tp += c.tp;
        mine.fp += c.fp;
        mine.fn += c.fn;
    }
    correct_ += other.correct_;
    total_ += other.total_;
}

std::int64_t ConfusionCounts::intersection(ClassId id) const {
    const auto it = per_class_.find(id);
    return it == per_class_.end() ? 0 : it->second.tp;
}

std::int64_t ConfusionCounts::union_count(ClassId id) const {
    const auto it = per_class_.find(id);
    return it == per_class_.end() ? 0 : it->second.tp + it->second.fp + it->second.fn;
}

std::vector<ClassId> ConfusionCounts::classes() const {
    std::vector<ClassId> ids;
    for (const auto& [id, c] : per_class_) ids.push_back(id);
    return ids;
}

IoUReport iou_report(const ConfusionCounts& counts, const TargetClassSet& targets) {
    IoUReport report;
    double sum_all = 0.0, sum_target = 0.0;
    int n_all = 0, n_target = 0;
    for (ClassId id : counts.classes()) {
        const std::int64_t u = counts.union_count(id);
        if (u == 0) continue;
        const double v = static_cast<double>(counts.intersection(id)) / static_cast<double>(u);
        report.per_class[id] = v;
        sum_all += v;
        ++n_all;
        if (targets.contains(id)) {
            sum_target += v;
            ++n_target;
        }
    }
    report.mean_all = n_all ? sum_all / n_all : kNaN;
    report.mean_target = n_target ? sum_target / n_target : kNaN;
    report.pixel_accuracy = counts.total() ? static_cast<double>(counts.correct()) / static_cast<double>(counts.total()) : kNaN;
    return report;
}

IoUReport iou(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets) {
    ConfusionCounts counts;
    counts.add(pred, gt);
    return iou_report(counts, targets);
}

void TrimapCounts::merge(const TrimapCounts& other) {
    if (widths.empty()) {
        *this = other;
        return;
    }
    if (widths != other.widths) throw Error(ErrorCode::shape, "trimap counts use different widths");
    for (std::size_t k = 0; k < widths.size(); ++k) {
        correct[k] += other.correct[k];
        total[k] += other.total[k];
    }
}

TrimapCounts trimap_counts(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                           const std::vector<int>& widths) {
    check_same_grid(pred, gt);
    const BoundaryMap boundary = extract_boundary(gt, targets);
    const int h = gt.height();
    const int w = gt.width();
    TrimapCounts counts;
    counts.widths = widths;
    for (int k : widths) {
        if (k < 1) throw Error(ErrorCode::config, "trimap widths must be positive");
        const auto band = square_dilate(boundary.mask(), h, w, k);
        std::int64_t correct = 0, total = 0;
        for (std::size_t f = 0; f < band.size(); ++f) {
            if (!band[f] || gt.is_ignored(gt.labels()[f])) continue;
            ++total;
            correct += pred.labels()[f] == gt.labels()[f];
        }
        counts.correct.push_back(correct);
        counts.total.push_back(total);
    }
    return counts;
}

TrimapCurve trimap_curve(const TrimapCounts& counts) {
    TrimapCurve curve;
    curve.widths = counts.widths;
    for (std::size_t k = 0; k < counts.widths.size(); ++k) {
        if (counts.total[k] == 0) curve.accuracy.push_back(std::nullopt);
        else curve.accuracy.push_back(static_cast<double>(counts.correct[k]) / static_cast<double>(counts.total[k]));
    }
    return curve;
}

TrimapCurve trimap_accuracy(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                            const std::vector<int>& widths) {
    return trimap_curve(trimap_counts(pred, gt, targets, widths));
}

double global_accuracy(const LabelMap& pred, const LabelMap& gt) {
    check_same_grid(pred, gt);
    std::int64_t correct = 0, total = 0;
    for (std::size_t f = 0; f < gt.labels().size(); ++f) {
        if (gt.is_ignored(gt.labels()[f])) continue;
        ++total;
        correct += pred.labels()[f] == gt.labels()[f];
    }
    return total ? static_cast<double>(correct) / static_cast<double>(total) : kNaN;
}

std::vector<ObjectRecord> collect_objects(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                                          const LabelMap* instances) {
    check_same_grid(pred, gt);
    if (instances) check_same_grid(*instances, gt);
    const int h = gt.height();
    const int w = gt.width();
    std::vector<std::uint8_t> seen(gt.grid().size(), 0);
    std::vector<ObjectRecord> objects;
    std::vector<int> stack;
    for (int r0 = 0; r0 < h; ++r0)
        for (int c0 = 0; c0 < w; ++c0) {
            const std::size_t f0 = static_cast<std::size_t>(r0) * w + c0;
            const ClassId cls = gt.labels()[f0];
            if (seen[f0] || gt.is_ignored(cls) || !targets.contains(cls)) continue;
            const ClassId inst = instances ? instances->labels()[f0] : 0;
            ObjectRecord obj;
            obj.class_id = cls;
            seen[f0] = 1;
            stack.assign(1, static_cast<int>(f0));
            while (!stack.empty()) {
                const int f = stack.back();
                stack.pop_back();
                ++obj.area;
                obj.correct += pred.labels()[f] == cls;
                const int r = f / w;
                const int c = f % w;
                const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
                for (const auto& n : nbr) {
                    if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w) continue;
                    const std::size_t g = static_cast<std::size_t>(n[0]) * w + n[1];
                    if (seen[g] || gt.labels()[g] != cls) continue;
                    if (instances && instances->labels()[g] != inst) continue;
                    seen[g] = 1;
                    stack.push_back(static_cast<int>(g));
                }
            }
            objects.push_back(obj);
        }
    return objects;
}

ObjectRecallReport bin_objects(const std::vector<ObjectRecord>& objects, int num_bins) {
    if (num_bins < 1) throw Error(ErrorCode::config, "object recall needs at least one bin");
    ObjectRecallReport report;
    const int n = static_cast<int>(objects.size());
    int bins = num_bins;
    if (n < bins) {
        report.warnings.push_back("only " + std::to_string(n) + " object(s) for " + std::to_string(num_bins) +
                                  " bins; bin count reduced");
        bins = n;
    }
    report.bins = bins;
    if (bins == 0) return report;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return objects[a].area < objects[b].area; });

    std::map<ClassId, std::vector<std::pair<double, int>>> class_sums;
    for (int b = 0; b < bins; ++b) {
        const int lo = static_cast<int>(static_cast<std::int64_t>(b) * n / bins);
        const int hi = static_cast<int>(static_cast<std::int64_t>(b + 1) * n / bins);
        double sum = 0.0;
        std::int64_t max_area = 0;
        for (int k = lo; k < hi; ++k) {
            const ObjectRecord& obj = objects[order[k]];
            sum += obj.recall();
            max_area = std::max(max_area, obj.area);
            auto& per = class_sums[obj.class_id];
            if (per.empty()) per.assign(bins, {0.0, 0});
            per[b].first += obj.recall();
            ++per[b].second;
        }
        report.per_bin.push_back(sum / (hi - lo));
        report.bin_counts.push_back(hi - lo);
        report.bin_max_area.push_back(max_area);
    }
    for (const auto& [cls, per] : class_sums) {
        auto& row = report.per_class_per_bin[cls];
        for (const auto& [s, count] : per) {
            row.push_back(count ? std::optional<double>(s / count) : std::nullopt);
        }
    }
    return report;
}

void attach_relative(ObjectRecallReport& report, const ObjectRecallReport& baseline) {
    if (report.bins != baseline.bins) throw Error(ErrorCode::shape, "baseline report has a different bin count");
    report.relative.clear();
    for (int b = 0; b < report.bins; ++b) {
        report.relative.push_back(baseline.per_bin[b] == 0.0 ? kNaN : report.per_bin[b] / baseline.per_bin[b]);
    }
}

ObjectRecallReport object_recall(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                                 int num_bins) {
    return bin_objects(collect_objects(pred, gt, targets), num_bins);
}

} // namespace adsamp
