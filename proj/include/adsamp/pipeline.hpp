#pragma once

#include "adsamp/core.hpp"
#include "adsamp/metrics.hpp"
#include "adsamp/scene.hpp"
#include "adsamp/tensor_solver.hpp"
#include "adsamp/upsampler.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace adsamp {

struct DatasetItem {
    std::string image;    // may be empty: label-only dataset
    std::string labels;
};

// JSON layout:
//   { "root": ".", "items": [{"image": "...", "labels": "..."}],
//     "classes": {"0": "background", ...}, "targets": [1, 2], "ignore_id": 255 }
// Item paths are relative to root; root itself is relative to the manifest's
// directory. "ignore_id": null disables the ignore label.
struct DatasetManifest {
    std::string root;
    std::vector<DatasetItem> items;
    std::map<ClassId, std::string> classes;
    std::vector<ClassId> targets;
    std::optional<ClassId> ignore_id = 255;

    static DatasetManifest load(const std::string& path);
    std::string to_json() const;
    std::string resolve(const std::string& relative) const;
    int num_classes() const;  // largest class id + 1
};

enum class OracleMode { ground_truth, noisy };

struct OracleConfig {
    OracleMode mode = OracleMode::ground_truth;
    double flip_probability = 0.0;

    // "gt" or "noisy:<p>" with p in [0, 1].
    static OracleConfig parse(const std::string& text);
    std::string to_string() const;
};

struct PipelineConfig {
    double lambda = 1.0;
    int tensor_h = 8;
    int tensor_w = 8;
    int res_h = 32;
    int res_w = 32;
    std::vector<int> trimap_widths = {1, 2, 4, 8, 16, 32, 64};
    int object_bins = 5;
    OracleConfig oracle;
    std::uint64_t seed = 0;
    int threads = 0;                 // 0: one per hardware thread
    bool center_crop_square = false;
    bool timing = false;             // adds wall-clock columns to per-image output
    bool save_outputs = false;       // per-image PNG/SMPT outputs
    std::string tensor_cache_dir;    // empty: no cache

    void validate() const;
};

// One-hot scores from the labels at the sampling locations. Ignored samples
// get 1/K for every class. In noisy mode each non-ignored sample switches,
// with the configured probability, to a different class drawn uniformly.
ScoreMap oracle_classify(const LabelMap& labels, const SamplingTensor& phi, int num_classes,
                         const OracleConfig& oracle = {}, std::mt19937_64* rng = nullptr);

struct ArmResult {
    ConfusionCounts confusion;
    TrimapCounts trimap;
    std::vector<ObjectRecord> objects;
    IoUReport iou;
    SolveStats solve;                // untouched in the uniform arm
    bool solver_called = false;
    std::int64_t pixels_tested = 0;
    std::int64_t fallback_pixels = 0;
    int inverted_triangles = 0;
    double seconds = 0.0;
};

struct ImageResult {
    std::string name;
    bool ok = false;
    std::string error;
    ArmResult adaptive;
    ArmResult uniform;
};

struct ArmReport {
    ConfusionCounts confusion;
    IoUReport iou;
    TrimapCounts trimap;
    ObjectRecallReport objects;
    double flops = 0.0;
    std::int64_t solver_iterations = 0;
    std::int64_t pixels_tested = 0;
    int solver_calls = 0;
};

struct PipelineReport {
    std::vector<ImageResult> images;
    ArmReport adaptive;
    ArmReport uniform;
    int processed = 0;
    int failed = 0;
    int adaptive_wins = 0;           // images where adaptive target mIoU is strictly higher
};

// Loads one image. Throwing marks that image as failed; the run continues.
struct ImageSource {
    std::string name;
    std::function<std::pair<std::optional<ImageBuffer>, LabelMap>()> load;
};

struct PipelineSetup {
    TargetClassSet targets;
    int num_classes;
    std::map<ClassId, std::string> class_names;   // optional; used for validation when non-empty
};

PipelineReport run_pipeline(const std::vector<ImageSource>& sources, const PipelineSetup& setup,
                            const PipelineConfig& config, const std::string& out_dir = {});
PipelineReport run_pipeline(const DatasetManifest& manifest, const PipelineConfig& config,
                            const std::string& out_dir = {});

// Seed of scene k in a seeded scene set.
std::uint64_t scene_seed(std::uint64_t base_seed, int index);
std::vector<ImageSource> synthetic_sources(const SyntheticScene& base, int count);
PipelineSetup synthetic_setup(const SyntheticScene& base);

// Writes images/, labels/ and manifest.json for a seeded scene set.
DatasetManifest write_scene_dataset(const SyntheticScene& base, int count, const std::string& out_dir);

// CSV emitters. Each arm is a (name, data) pair; rows follow arm order.
std::string iou_csv(const std::vector<std::pair<std::string, const ConfusionCounts*>>& arms,
                    const TargetClassSet& targets, const std::map<ClassId, std::string>& names = {});
std::string summary_csv(const std::vector<std::pair<std::string, const ConfusionCounts*>>& arms,
                        const TargetClassSet& targets);
std::string trimap_csv(const std::vector<std::pair<std::string, const TrimapCounts*>>& arms);
std::string object_recall_csv(const std::vector<std::pair<std::string, const ObjectRecallReport*>>& arms);
std::string per_image_csv(const PipelineReport& report, bool timing);

// Writes iou.csv, summary.csv, trimap.csv, object_recall.csv, per_image.csv
// and run.json (configuration, seeds, summary and SHA-256 of every file
// written plus the inputs listed in `inputs`).
void write_pipeline_reports(const PipelineReport& report, const PipelineSetup& setup, const PipelineConfig& config,
                            const std::string& out_dir, const std::vector<std::string>& inputs,
                            const std::string& source_description);

} // namespace adsamp
