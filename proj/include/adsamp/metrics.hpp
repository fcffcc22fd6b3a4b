#pragma once

#include "adsamp/core.hpp"

#include <map>
#include <optional>
#include <vector>

namespace adsamp {

// Pixel confusion counts. Reports over several images are formed by merging
// counts first and taking ratios once.
class ConfusionCounts {
public:
    void add(const LabelMap& pred, const LabelMap& gt);
    void merge(const ConfusionCounts& other);

    std::int64_t intersection(ClassId id) const;
    std::int64_t union_count(ClassId id) const;
    std::int64_t correct() const noexcept { return correct_; }
    std::int64_t total() const noexcept { return total_; }
    std::vector<ClassId> classes() const;

private:
    struct PerClass {
        std::int64_t tp = 0;
        std::int64_t fp = 0;
        std::int64_t fn = 0;
    };
    std::map<ClassId, PerClass> per_class_;
    std::int64_t correct_ = 0;
    std::int64_t total_ = 0;
};

struct IoUReport {
    std::map<ClassId, double> per_class;  // classes with non-zero union only
    double mean_all = 0.0;                // NaN when no class has a union
    double mean_target = 0.0;             // NaN when no target class has a union
    double pixel_accuracy = 0.0;
};

IoUReport iou_report(const ConfusionCounts& counts, const TargetClassSet& targets);
IoUReport iou(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets);

// Correct / total pixel counts inside the band around the ground-truth
// boundary, per band width. Mergeable across images like ConfusionCounts.
struct TrimapCounts {
    std::vector<int> widths;
    std::vector<std::int64_t> correct;
    std::vector<std::int64_t> total;

    void merge(const TrimapCounts& other);
};

struct TrimapCurve {
    std::vector<int> widths;
    std::vector<std::optional<double>> accuracy;  // nullopt where the band is empty
};

// Band of width k: pixels within Chebyshev distance k of a boundary pixel of
// extract_boundary(gt, targets). Ignored ground-truth pixels are excluded.
TrimapCounts trimap_counts(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                           const std::vector<int>& widths);
TrimapCurve trimap_curve(const TrimapCounts& counts);
TrimapCurve trimap_accuracy(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                            const std::vector<int>& widths);

// Accuracy over all non-ignored ground-truth pixels.
double global_accuracy(const LabelMap& pred, const LabelMap& gt);

struct ObjectRecord {
    ClassId class_id = 0;
    std::int64_t area = 0;
    std::int64_t correct = 0;
    double recall() const { return area == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(area); }
};

// Objects are 4-connected components of equal-label target pixels in gt,
// unless an instance map is given (same id and same class = one object).
// Records appear in raster order of each object's first pixel.
std::vector<ObjectRecord> collect_objects(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                                          const LabelMap* instances = nullptr);

struct ObjectRecallReport {
    int bins = 0;
    std::vector<double> per_bin;              // mean recall, smallest objects first
    std::vector<std::int64_t> bin_counts;
    std::vector<std::int64_t> bin_max_area;
    std::map<ClassId, std::vector<std::optional<double>>> per_class_per_bin;
    std::vector<double> relative;             // per_bin / baseline per_bin, when a baseline is given
    std::vector<std::string> warnings;
};

// Objects sorted by area (stable) and split into num_bins equal-count bins.
// With fewer objects than bins the bin count drops to the object count.
ObjectRecallReport bin_objects(const std::vector<ObjectRecord>& objects, int num_bins);

// Adds per-bin ratios against a baseline report built from the same objects.
void attach_relative(ObjectRecallReport& report, const ObjectRecallReport& baseline);

ObjectRecallReport object_recall(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets,
                                 int num_bins);

} // namespace adsamp
