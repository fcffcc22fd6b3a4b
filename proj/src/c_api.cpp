#include "adsamp/adsamp.h"

#include "adsamp/approx_bounds.hpp"
#include "adsamp/boundary.hpp"
#include "adsamp/io.hpp"
#include "adsamp/pipeline.hpp"
#include "adsamp/resampler.hpp"
#include "adsamp/scene.hpp"
#include "adsamp/upsampler.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct adsamp_image {
    adsamp::ImageBuffer value;
};

struct adsamp_labels {
    adsamp::LabelMap value;
};

struct adsamp_tensor {
    adsamp::SamplingTensor value;
};

namespace {

using namespace adsamp;

thread_local std::string g_last_error;

adsamp_status status_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::index: return ADSAMP_ERR_INDEX;
    case ErrorCode::domain: return ADSAMP_ERR_DOMAIN;
    case ErrorCode::config: return ADSAMP_ERR_CONFIG;
    case ErrorCode::shape: return ADSAMP_ERR_SHAPE;
    case ErrorCode::size: return ADSAMP_ERR_SIZE;
    case ErrorCode::convergence: return ADSAMP_ERR_CONVERGENCE;
    case ErrorCode::io: return ADSAMP_ERR_IO;
    case ErrorCode::format: return ADSAMP_ERR_FORMAT;
    case ErrorCode::internal: return ADSAMP_ERR_INTERNAL;
    }
    return ADSAMP_ERR_INTERNAL;
}

struct InvalidArgument {
    std::string message;
};

void require(bool ok, const char* message) {
    if (!ok) throw InvalidArgument{message};
}

template <typename F>
adsamp_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return ADSAMP_OK;
    } catch (const InvalidArgument& e) {
        g_last_error = e.message;
        return ADSAMP_ERR_INVALID_ARGUMENT;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return ADSAMP_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return ADSAMP_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ADSAMP_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return ADSAMP_ERR_INTERNAL;
    }
}

std::optional<ClassId> ignore_of(int has_ignore, int32_t ignore_id) {
    return has_ignore ? std::optional<ClassId>(ignore_id) : std::nullopt;
}

TargetClassSet targets_of(const int32_t* targets, size_t n, const LabelMap& labels) {
    require(targets != nullptr || n == 0, "targets is NULL");
    return TargetClassSet(std::vector<ClassId>(targets, targets + n), labels.ignore_id());
}

template <typename T>
void copy_out(const std::vector<T>& src, T* dst, size_t capacity) {
    require(dst != nullptr, "output buffer is NULL");
    if (capacity < src.size()) throw Error(ErrorCode::size, "output buffer too small: need " + std::to_string(src.size()));
    std::copy(src.begin(), src.end(), dst);
}

void fill_info(adsamp_solve_info* info, const SolveStats& stats) {
    if (!info) return;
    info->method = static_cast<int>(stats.method);
    info->iterations = stats.iterations;
    info->residual = stats.residual;
    info->flops = stats.flops;
}

PipelineConfig pipeline_config_of(const adsamp_pipeline_config* c) {
    require(c != nullptr, "pipeline config is NULL");
    PipelineConfig p;
    p.lambda = c->lambda;
    p.tensor_h = c->tensor_h;
    p.tensor_w = c->tensor_w;
    p.res_h = c->res_h;
    p.res_w = c->res_w;
    if (c->trimap_widths) p.trimap_widths.assign(c->trimap_widths, c->trimap_widths + c->num_trimap_widths);
    p.object_bins = c->object_bins;
    p.oracle = OracleConfig::parse(c->oracle ? c->oracle : "gt");
    p.seed = c->seed;
    p.threads = c->threads;
    p.center_crop_square = c->center_crop_square != 0;
    p.timing = c->timing != 0;
    p.save_outputs = c->save_outputs != 0;
    if (c->tensor_cache_dir) p.tensor_cache_dir = c->tensor_cache_dir;
    p.validate();
    return p;
}

SyntheticScene scene_of(const adsamp_scene_config* c) {
    require(c != nullptr, "scene config is NULL");
    SyntheticScene s;
    s.seed = c->seed;
    s.height = c->height;
    s.width = c->width;
    s.min_objects = c->min_objects;
    s.max_objects = c->max_objects;
    s.min_radius = c->min_radius;
    s.max_radius = c->max_radius;
    s.num_object_classes = c->num_object_classes;
    s.polygon_fraction = c->polygon_fraction;
    s.noise_amplitude = c->noise_amplitude;
    return s;
}

void fill_summary(adsamp_pipeline_summary* out, const PipelineReport& r) {
    if (!out) return;
    out->images = static_cast<int>(r.images.size());
    out->processed = r.processed;
    out->failed = r.failed;
    out->adaptive_wins = r.adaptive_wins;
    out->adaptive_mean_target_iou = r.adaptive.iou.mean_target;
    out->uniform_mean_target_iou = r.uniform.iou.mean_target;
    out->uniform_solver_calls = r.uniform.solver_calls;
}

std::string scene_description(const SyntheticScene& s, int count) {
    std::ostringstream out;
    out << "synthetic:count=" << count << ",seed=" << s.seed << ",size=" << s.height << 'x' << s.width
        << ",objects=" << s.min_objects << '-' << s.max_objects << ",radius=" << s.min_radius << '-' << s.max_radius
        << ",classes=" << s.num_object_classes << ",polygons=" << s.polygon_fraction;
    return out.str();
}

ScoreMap one_hot(const LabelMap& sampled, int num_classes) {
    require(num_classes > sampled.max_class(), "num_classes must exceed the largest label id");
    ScoreMap scores(sampled.height(), sampled.width(), num_classes);
    for (int i = 0; i < sampled.height(); ++i)
        for (int j = 0; j < sampled.width(); ++j) {
            const ClassId id = sampled.at(i, j);
            if (sampled.is_ignored(id)) {
                for (int k = 0; k < num_classes; ++k) scores.at(k, i, j) = 1.0 / num_classes;
            } else {
                scores.at(id, i, j) = 1.0;
            }
        }
    return scores;
}

} // namespace

extern "C" {

const char* adsamp_version(void) { return "1.0.0"; }

const char* adsamp_status_name(adsamp_status status) {
    switch (status) {
    case ADSAMP_OK: return "ok";
    case ADSAMP_ERR_INDEX: return "index error";
    case ADSAMP_ERR_DOMAIN: return "domain error";
    case ADSAMP_ERR_CONFIG: return "config error";
    case ADSAMP_ERR_SHAPE: return "shape error";
    case ADSAMP_ERR_SIZE: return "size error";
    case ADSAMP_ERR_CONVERGENCE: return "convergence error";
    case ADSAMP_ERR_IO: return "I/O error";
    case ADSAMP_ERR_FORMAT: return "format error";
    case ADSAMP_ERR_INTERNAL: return "internal error";
    case ADSAMP_ERR_INVALID_ARGUMENT: return "invalid argument";
    }
    return "unknown status";
}

const char* adsamp_last_error(void) { return g_last_error.c_str(); }

// ---- images

adsamp_status adsamp_image_create(int height, int width, int channels, const double* values, adsamp_image** out) {
    return guarded([&] {
        require(out != nullptr, "out is NULL");
        require(channels >= 1, "channels must be positive");
        const PixelGrid grid(height, width);
        if (values) {
            std::vector<double> v(values, values + grid.size() * channels);
            *out = new adsamp_image{ImageBuffer(grid, channels, std::move(v))};
        } else {
            *out = new adsamp_image{ImageBuffer(grid, channels)};
        }
    });
}

adsamp_status adsamp_image_read_png(const char* path, adsamp_image** out) {
    return guarded([&] {
        require(path && out, "NULL argument");
        *out = new adsamp_image{read_image_png(path)};
    });
}

adsamp_status adsamp_image_write_png(const adsamp_image* image, const char* path) {
    return guarded([&] {
        require(image && path, "NULL argument");
        write_image_png(path, image->value);
    });
}

adsamp_status adsamp_image_shape(const adsamp_image* image, int* height, int* width, int* channels) {
    return guarded([&] {
        require(image != nullptr, "image is NULL");
        if (height) *height = image->value.grid().height();
        if (width) *width = image->value.grid().width();
        if (channels) *channels = image->value.channels();
    });
}

adsamp_status adsamp_image_values(const adsamp_image* image, double* values, size_t capacity) {
    return guarded([&] {
        require(image != nullptr, "image is NULL");
        copy_out(image->value.values(), values, capacity);
    });
}

void adsamp_image_free(adsamp_image* image) { delete image; }

adsamp_status adsamp_image_center_crop(const adsamp_image* image, adsamp_image** out) {
    return guarded([&] {
        require(image && out, "NULL argument");
        *out = new adsamp_image{center_crop_square(image->value)};
    });
}

// ---- labels

adsamp_status adsamp_labels_create(int height, int width, const int32_t* ids, int has_ignore, int32_t ignore_id,
                                   adsamp_labels** out) {
    return guarded([&] {
        require(out != nullptr, "out is NULL");
        const PixelGrid grid(height, width);
        if (ids) {
            *out = new adsamp_labels{LabelMap(grid, std::vector<ClassId>(ids, ids + grid.size()), ignore_of(has_ignore, ignore_id))};
        } else {
            *out = new adsamp_labels{LabelMap(grid, 0, ignore_of(has_ignore, ignore_id))};
        }
    });
}

adsamp_status adsamp_labels_read_png(const char* path, int has_ignore, int32_t ignore_id, adsamp_labels** out) {
    return guarded([&] {
        require(path && out, "NULL argument");
        *out = new adsamp_labels{read_label_png(path, ignore_of(has_ignore, ignore_id))};
    });
}

adsamp_status adsamp_labels_write_png(const adsamp_labels* labels, const char* path) {
    return guarded([&] {
        require(labels && path, "NULL argument");
        write_label_png(path, labels->value);
    });
}

adsamp_status adsamp_labels_shape(const adsamp_labels* labels, int* height, int* width) {
    return guarded([&] {
        require(labels != nullptr, "labels is NULL");
        if (height) *height = labels->value.height();
        if (width) *width = labels->value.width();
    });
}

adsamp_status adsamp_labels_values(const adsamp_labels* labels, int32_t* ids, size_t capacity) {
    return guarded([&] {
        require(labels != nullptr, "labels is NULL");
        copy_out(labels->value.labels(), ids, capacity);
    });
}

adsamp_status adsamp_labels_center_crop(const adsamp_labels* labels, adsamp_labels** out) {
    return guarded([&] {
        require(labels && out, "NULL argument");
        *out = new adsamp_labels{center_crop_square(labels->value)};
    });
}

adsamp_status adsamp_labels_write_boundary_png(const adsamp_labels* labels, const int32_t* targets, size_t num_targets,
                                               const char* path) {
    return guarded([&] {
        require(labels && path, "NULL argument");
        write_boundary_png(path, extract_boundary(labels->value, targets_of(targets, num_targets, labels->value)));
    });
}

void adsamp_labels_free(adsamp_labels* labels) { delete labels; }

// ---- tensors

adsamp_status adsamp_tensor_uniform(int height, int width, adsamp_tensor** out) {
    return guarded([&] {
        require(out != nullptr, "out is NULL");
        *out = new adsamp_tensor{SamplingTensor::uniform(height, width)};
    });
}

adsamp_status adsamp_tensor_create(int height, int width, const double* values, adsamp_tensor** out) {
    return guarded([&] {
        require(values && out, "NULL argument");
        require(height >= 2 && width >= 2, "tensor must be at least 2x2");
        const std::size_t n = 2 * static_cast<std::size_t>(height) * width;
        *out = new adsamp_tensor{SamplingTensor::from_values(height, width, std::vector<double>(values, values + n))};
    });
}

adsamp_status adsamp_tensor_project(int height, int width, const double* raw, adsamp_tensor** out) {
    return guarded([&] {
        require(raw && out, "NULL argument");
        require(height >= 2 && width >= 2, "tensor must be at least 2x2");
        const std::size_t n = 2 * static_cast<std::size_t>(height) * width;
        *out = new adsamp_tensor{project_constraints(height, width, std::span<const double>(raw, n))};
    });
}

adsamp_status adsamp_tensor_solve(const adsamp_labels* labels, const int32_t* targets, size_t num_targets, int height,
                                  int width, double lambda, adsamp_tensor** out, adsamp_solve_info* info) {
    return guarded([&] {
        require(labels && out, "NULL argument");
        const BoundaryMap boundary = extract_boundary(labels->value, targets_of(targets, num_targets, labels->value));
        const NearestBoundaryField b = nearest_boundary_field(boundary, height, width);
        SolveStats stats;
        SamplingTensor phi = solve_sampling_tensor(b, EnergyParams{lambda}, {}, &stats);
        fill_info(info, stats);
        *out = new adsamp_tensor{std::move(phi)};
    });
}

adsamp_status adsamp_tensor_solve_field(int height, int width, const double* b, double lambda, adsamp_tensor** out,
                                        adsamp_solve_info* info) {
    return guarded([&] {
        require(b && out, "NULL argument");
        NearestBoundaryField field(height, width);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < height; ++i)
                for (int j = 0; j < width; ++j) field.at(c, i, j) = b[(static_cast<std::size_t>(c) * height + i) * width + j];
        SolveStats stats;
        SamplingTensor phi = solve_sampling_tensor(field, EnergyParams{lambda}, {}, &stats);
        fill_info(info, stats);
        *out = new adsamp_tensor{std::move(phi)};
    });
}

adsamp_status adsamp_tensor_resize(const adsamp_tensor* tensor, int height, int width, adsamp_tensor** out) {
    return guarded([&] {
        require(tensor && out, "NULL argument");
        *out = new adsamp_tensor{resize_tensor(tensor->value, height, width)};
    });
}

adsamp_status adsamp_tensor_read(const char* path, adsamp_tensor** out) {
    return guarded([&] {
        require(path && out, "NULL argument");
        *out = new adsamp_tensor{read_tensor_smpt(path)};
    });
}

adsamp_status adsamp_tensor_write(const adsamp_tensor* tensor, const char* path) {
    return guarded([&] {
        require(tensor && path, "NULL argument");
        write_tensor_smpt(path, tensor->value);
    });
}

adsamp_status adsamp_tensor_shape(const adsamp_tensor* tensor, int* height, int* width) {
    return guarded([&] {
        require(tensor != nullptr, "tensor is NULL");
        if (height) *height = tensor->value.grid_h();
        if (width) *width = tensor->value.grid_w();
    });
}

adsamp_status adsamp_tensor_values(const adsamp_tensor* tensor, double* values, size_t capacity) {
    return guarded([&] {
        require(tensor != nullptr, "tensor is NULL");
        copy_out(tensor->value.values(), values, capacity);
    });
}

void adsamp_tensor_free(adsamp_tensor* tensor) { delete tensor; }

// ---- sampling

adsamp_status adsamp_sample_image(const adsamp_image* image, const adsamp_tensor* tensor, adsamp_image** out) {
    return guarded([&] {
        require(image && tensor && out, "NULL argument");
        *out = new adsamp_image{sample_image(image->value, tensor->value).values};
    });
}

adsamp_status adsamp_sample_labels(const adsamp_labels* labels, const adsamp_tensor* tensor, adsamp_labels** out) {
    return guarded([&] {
        require(labels && tensor && out, "NULL argument");
        *out = new adsamp_labels{sample_labels(labels->value, tensor->value)};
    });
}

adsamp_status adsamp_upsample_labels(const adsamp_labels* sampled, const adsamp_tensor* tensor, int num_classes,
                                     int height, int width, adsamp_labels** out) {
    return guarded([&] {
        require(sampled && tensor && out, "NULL argument");
        const ScoreMap scores = one_hot(sampled->value, num_classes);
        const RasterCoverage coverage = build_coverage(tensor->value, PixelGrid(height, width));
        *out = new adsamp_labels{upsample_labels(scores, coverage, sampled->value.ignore_id())};
    });
}

adsamp_status adsamp_upsample_scores(const double* scores, int num_classes, const adsamp_tensor* tensor, int height,
                                     int width, adsamp_labels** out) {
    return guarded([&] {
        require(scores && tensor && out, "NULL argument");
        require(num_classes >= 1, "num_classes must be positive");
        const int h = tensor->value.grid_h();
        const int w = tensor->value.grid_w();
        ScoreMap map(h, w, num_classes);
        for (int k = 0; k < num_classes; ++k)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) map.at(k, i, j) = scores[(static_cast<std::size_t>(k) * h + i) * w + j];
        *out = new adsamp_labels{upsample_labels(map, build_coverage(tensor->value, PixelGrid(height, width)))};
    });
}

adsamp_status adsamp_upsample_image(const adsamp_image* sampled, const adsamp_tensor* tensor, int height, int width,
                                    adsamp_image** out) {
    return guarded([&] {
        require(sampled && tensor && out, "NULL argument");
        const ImageBuffer& src = sampled->value;
        const int h = tensor->value.grid_h();
        const int w = tensor->value.grid_w();
        if (src.grid().height() != h || src.grid().width() != w) {
            throw Error(ErrorCode::shape, "sampled image does not match the tensor grid");
        }
        ScoreMap map(h, w, src.channels());
        for (int k = 0; k < src.channels(); ++k)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) map.at(k, i, j) = src.at(k, i, j);
        const PixelGrid grid(height, width);
        *out = new adsamp_image{ImageBuffer(grid, src.channels(), upsample_scores(map, build_coverage(tensor->value, grid)))};
    });
}

// ---- metrics

adsamp_status adsamp_iou(const adsamp_labels* pred, const adsamp_labels* gt, const int32_t* targets,
                         size_t num_targets, adsamp_iou_summary* out) {
    return guarded([&] {
        require(pred && gt && out, "NULL argument");
        const IoUReport r = iou(pred->value, gt->value, targets_of(targets, num_targets, gt->value));
        out->mean_target = r.mean_target;
        out->mean_all = r.mean_all;
        out->pixel_accuracy = r.pixel_accuracy;
    });
}

adsamp_status adsamp_write_iou_csv(const adsamp_labels* pred, const adsamp_labels* gt, const int32_t* targets,
                                   size_t num_targets, const char* path) {
    return guarded([&] {
        require(pred && gt && path, "NULL argument");
        ConfusionCounts counts;
        counts.add(pred->value, gt->value);
        write_text_file(path, iou_csv({{"prediction", &counts}}, targets_of(targets, num_targets, gt->value)));
    });
}

adsamp_status adsamp_write_trimap_csv(const adsamp_labels* pred, const adsamp_labels* gt, const int32_t* targets,
                                      size_t num_targets, const int* widths, size_t num_widths, const char* path) {
    return guarded([&] {
        require(pred && gt && path && widths, "NULL argument");
        const TrimapCounts counts = trimap_counts(pred->value, gt->value, targets_of(targets, num_targets, gt->value),
                                                  std::vector<int>(widths, widths + num_widths));
        write_text_file(path, trimap_csv({{"prediction", &counts}}));
    });
}

adsamp_status adsamp_write_object_recall_csv(const adsamp_labels* pred, const adsamp_labels* gt,
                                             const int32_t* targets, size_t num_targets, int bins, const char* path) {
    return guarded([&] {
        require(pred && gt && path, "NULL argument");
        const ObjectRecallReport r =
            object_recall(pred->value, gt->value, targets_of(targets, num_targets, gt->value), bins);
        write_text_file(path, object_recall_csv({{"prediction", &r}}));
    });
}

// ---- experiments

adsamp_status adsamp_bound_experiment_csv(adsamp_curve_kind kind, double p0, double p1, const int* segment_counts,
                                          size_t count, int samples_per_segment, const char* path) {
    return guarded([&] {
        require(segment_counts && path, "NULL argument");
        CurveSpec curve;
        switch (kind) {
        case ADSAMP_CURVE_CIRCLE: curve = make_circle(p0); break;
        case ADSAMP_CURVE_ELLIPSE: curve = make_ellipse(p0, p1); break;
        case ADSAMP_CURVE_LINE: curve = make_line({0.0, 0.0}, {p0, p1}); break;
        default: throw InvalidArgument{"unknown curve kind"};
        }
        ApproxErrorOptions options;
        if (samples_per_segment > 0) options.samples_per_segment = samples_per_segment;
        const auto rows = bound_experiment(curve, std::vector<int>(segment_counts, segment_counts + count), options);
        std::ostringstream out;
        out.precision(17);
        out << "M,N,epsilon,small_angle_bound,arc_bound,arc_bound_double,epsilon_m2,ratio_to_previous,chain_step\n";
        for (const BoundRow& r : rows) {
            out << r.segments << ',' << r.sample_points << ',' << r.epsilon << ',' << r.small_angle_bound << ','
                << r.arc_bound << ',' << r.arc_bound_double << ',' << r.epsilon_m2 << ',' << r.ratio_to_previous << ','
                << r.chain_step << '\n';
        }
        write_text_file(path, out.str());
    });
}

adsamp_status adsamp_boundary_error_csv(int size, const int* n_values, size_t count, double lambda, const char* path,
                                        double slopes[2]) {
    return guarded([&] {
        require(n_values && path, "NULL argument");
        const LabelMap disk = make_disk_shape(size, size / 4.0, (size - 1) / 2.0, (size - 1) / 2.0);
        const std::optional<double> adaptive = lambda >= 0.0 ? std::optional<double>(lambda) : std::nullopt;
        const BoundaryErrorTable table =
            uniform_grid_boundary_error(disk, TargetClassSet({1}), std::vector<int>(n_values, n_values + count), adaptive);
        std::ostringstream out;
        out.precision(17);
        out << "requested_n,n,side,adjusted,uniform_error,adaptive_error\n";
        for (const BoundaryErrorRow& r : table.rows) {
            out << r.requested_n << ',' << r.n << ',' << r.side << ',' << (r.adjusted ? 1 : 0) << ',' << r.uniform_error
                << ',' << r.adaptive_error << '\n';
        }
        out << "# slope,uniform," << table.uniform_slope << ",adaptive," << table.adaptive_slope << '\n';
        write_text_file(path, out.str());
        if (slopes) {
            slopes[0] = table.uniform_slope;
            slopes[1] = table.adaptive_slope;
        }
    });
}

// ---- scenes

void adsamp_scene_config_default(adsamp_scene_config* config) {
    if (!config) return;
    const SyntheticScene s;
    *config = {s.seed,       s.height,     s.width,       s.min_objects,        s.max_objects,
               s.min_radius, s.max_radius, s.num_object_classes, s.polygon_fraction, s.noise_amplitude};
}

adsamp_status adsamp_generate_scene(const adsamp_scene_config* config, adsamp_image** image, adsamp_labels** labels) {
    return guarded([&] {
        require(image && labels, "NULL argument");
        GeneratedScene scene = generate_scene(scene_of(config));
        auto img = std::make_unique<adsamp_image>(adsamp_image{std::move(scene.image)});
        *labels = new adsamp_labels{std::move(scene.labels)};
        *image = img.release();
    });
}

adsamp_status adsamp_write_scene_dataset(const adsamp_scene_config* config, int count, const char* out_dir) {
    return guarded([&] {
        require(out_dir != nullptr, "out_dir is NULL");
        write_scene_dataset(scene_of(config), count, out_dir);
    });
}

// ---- pipeline

void adsamp_pipeline_config_default(adsamp_pipeline_config* config) {
    if (!config) return;
    const PipelineConfig p;
    *config = {};
    config->lambda = p.lambda;
    config->tensor_h = p.tensor_h;
    config->tensor_w = p.tensor_w;
    config->res_h = p.res_h;
    config->res_w = p.res_w;
    config->trimap_widths = nullptr;
    config->num_trimap_widths = 0;
    config->object_bins = p.object_bins;
    config->oracle = "gt";
    config->seed = p.seed;
    config->threads = p.threads;
}

adsamp_status adsamp_run_pipeline_manifest(const char* manifest_path, const adsamp_pipeline_config* config,
                                           const char* out_dir, adsamp_pipeline_summary* summary) {
    return guarded([&] {
        require(manifest_path && out_dir, "NULL argument");
        const PipelineConfig cfg = pipeline_config_of(config);
        DatasetManifest manifest = DatasetManifest::load(manifest_path);
        if (config->targets) manifest.targets.assign(config->targets, config->targets + config->num_targets);
        const PipelineReport report = run_pipeline(manifest, cfg, out_dir);
        std::vector<std::string> inputs{manifest_path};
        for (const DatasetItem& item : manifest.items) {
            if (!item.image.empty()) inputs.push_back(manifest.resolve(item.image));
            inputs.push_back(manifest.resolve(item.labels));
        }
        const PipelineSetup setup{TargetClassSet(manifest.targets, manifest.ignore_id), manifest.num_classes(),
                                  manifest.classes};
        write_pipeline_reports(report, setup, cfg, out_dir, inputs, std::string("manifest:") + manifest_path);
        fill_summary(summary, report);
    });
}

adsamp_status adsamp_run_pipeline_synthetic(const adsamp_scene_config* scenes, int count,
                                            const adsamp_pipeline_config* config, const char* out_dir,
                                            adsamp_pipeline_summary* summary) {
    return guarded([&] {
        const SyntheticScene base = scene_of(scenes);
        const PipelineConfig cfg = pipeline_config_of(config);
        PipelineSetup setup = synthetic_setup(base);
        if (config->targets) {
            setup.targets = TargetClassSet(std::vector<ClassId>(config->targets, config->targets + config->num_targets),
                                           kDefaultIgnoreId);
        }
        const PipelineReport report = run_pipeline(synthetic_sources(base, count), setup, cfg, out_dir ? out_dir : "");
        if (out_dir) write_pipeline_reports(report, setup, cfg, out_dir, {}, scene_description(base, count));
        fill_summary(summary, report);
    });
}

} // extern "C"
