/*
 * C interface to the adaptive sampling library.
 *
 * Every function returns an adsamp_status. On failure the thread-local
 * message from adsamp_last_error() describes the problem; output handles
 * are left untouched. Handles are opaque and must be released with the
 * matching *_free function (passing NULL is allowed).
 *
 * Indices are 0-based. Arrays are row-major; multi-channel data is
 * channel-major (channel, row, column).
 */
#ifndef ADSAMP_H
#define ADSAMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(ADSAMP_BUILDING_LIBRARY)
#define ADSAMP_API __attribute__((visibility("default")))
#else
#define ADSAMP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adsamp_status {
    ADSAMP_OK = 0,
    ADSAMP_ERR_INDEX = 1,
    ADSAMP_ERR_DOMAIN = 2,
    ADSAMP_ERR_CONFIG = 3,
    ADSAMP_ERR_SHAPE = 4,
    ADSAMP_ERR_SIZE = 5,
    ADSAMP_ERR_CONVERGENCE = 6,
    ADSAMP_ERR_IO = 7,
    ADSAMP_ERR_FORMAT = 8,
    ADSAMP_ERR_INTERNAL = 9,
    ADSAMP_ERR_INVALID_ARGUMENT = 10
} adsamp_status;

ADSAMP_API const char* adsamp_version(void);
ADSAMP_API const char* adsamp_status_name(adsamp_status status);
/* Message of the last failed call on this thread ("" after a success). */
ADSAMP_API const char* adsamp_last_error(void);

typedef struct adsamp_image adsamp_image;
typedef struct adsamp_labels adsamp_labels;
typedef struct adsamp_tensor adsamp_tensor;

/* ---- images: C x H x W doubles ---- */
ADSAMP_API adsamp_status adsamp_image_create(int height, int width, int channels, const double* values,
                                             adsamp_image** out);
ADSAMP_API adsamp_status adsamp_image_read_png(const char* path, adsamp_image** out);
ADSAMP_API adsamp_status adsamp_image_write_png(const adsamp_image* image, const char* path);
ADSAMP_API adsamp_status adsamp_image_shape(const adsamp_image* image, int* height, int* width, int* channels);
/* Copies C*H*W values into `values`, which holds `capacity` doubles. */
ADSAMP_API adsamp_status adsamp_image_values(const adsamp_image* image, double* values, size_t capacity);
ADSAMP_API void adsamp_image_free(adsamp_image* image);

/* ---- label maps ---- */
/* has_ignore = 0 disables the ignore id. */
ADSAMP_API adsamp_status adsamp_labels_create(int height, int width, const int32_t* ids, int has_ignore,
                                              int32_t ignore_id, adsamp_labels** out);
ADSAMP_API adsamp_status adsamp_labels_read_png(const char* path, int has_ignore, int32_t ignore_id,
                                                adsamp_labels** out);
ADSAMP_API adsamp_status adsamp_labels_write_png(const adsamp_labels* labels, const char* path);
ADSAMP_API adsamp_status adsamp_labels_shape(const adsamp_labels* labels, int* height, int* width);
ADSAMP_API adsamp_status adsamp_labels_values(const adsamp_labels* labels, int32_t* ids, size_t capacity);
ADSAMP_API adsamp_status adsamp_labels_center_crop(const adsamp_labels* labels, adsamp_labels** out);
/* 1-bit PNG of the target-class boundary pixels. */
ADSAMP_API adsamp_status adsamp_labels_write_boundary_png(const adsamp_labels* labels, const int32_t* targets,
                                                          size_t num_targets, const char* path);
ADSAMP_API void adsamp_labels_free(adsamp_labels* labels);

ADSAMP_API adsamp_status adsamp_image_center_crop(const adsamp_image* image, adsamp_image** out);

/* ---- sampling tensors: 2 x h x w ---- */
typedef struct adsamp_solve_info {
    int method;        /* 0 trivial, 1 dense, 2 conjugate gradient */
    int iterations;
    double residual;
    double flops;
} adsamp_solve_info;

ADSAMP_API adsamp_status adsamp_tensor_uniform(int height, int width, adsamp_tensor** out);
/* Values must already satisfy the covering constraints. */
ADSAMP_API adsamp_status adsamp_tensor_create(int height, int width, const double* values, adsamp_tensor** out);
/* Clamp to [0,1] and overwrite the constrained border lines. */
ADSAMP_API adsamp_status adsamp_tensor_project(int height, int width, const double* raw, adsamp_tensor** out);
/* Boundary of `targets` in `labels` -> nearest-boundary field at h x w ->
 * energy minimiser. lambda may be +inf. `info` may be NULL. */
ADSAMP_API adsamp_status adsamp_tensor_solve(const adsamp_labels* labels, const int32_t* targets, size_t num_targets,
                                             int height, int width, double lambda, adsamp_tensor** out,
                                             adsamp_solve_info* info);
/* Same, from an explicit 2 x h x w field b. */
ADSAMP_API adsamp_status adsamp_tensor_solve_field(int height, int width, const double* b, double lambda,
                                                   adsamp_tensor** out, adsamp_solve_info* info);
ADSAMP_API adsamp_status adsamp_tensor_resize(const adsamp_tensor* tensor, int height, int width,
                                              adsamp_tensor** out);
ADSAMP_API adsamp_status adsamp_tensor_read(const char* path, adsamp_tensor** out);
ADSAMP_API adsamp_status adsamp_tensor_write(const adsamp_tensor* tensor, const char* path);
ADSAMP_API adsamp_status adsamp_tensor_shape(const adsamp_tensor* tensor, int* height, int* width);
ADSAMP_API adsamp_status adsamp_tensor_values(const adsamp_tensor* tensor, double* values, size_t capacity);
ADSAMP_API void adsamp_tensor_free(adsamp_tensor* tensor);

/* ---- sampling and its inverse ---- */
ADSAMP_API adsamp_status adsamp_sample_image(const adsamp_image* image, const adsamp_tensor* tensor,
                                             adsamp_image** out);
ADSAMP_API adsamp_status adsamp_sample_labels(const adsamp_labels* labels, const adsamp_tensor* tensor,
                                              adsamp_labels** out);
/* One-hot scores from the h x w sampled labels (ignored samples: 1/K each),
 * rasterised back to height x width. */
ADSAMP_API adsamp_status adsamp_upsample_labels(const adsamp_labels* sampled, const adsamp_tensor* tensor,
                                                int num_classes, int height, int width, adsamp_labels** out);
/* K x h x w scores -> argmax labels at height x width. */
ADSAMP_API adsamp_status adsamp_upsample_scores(const double* scores, int num_classes, const adsamp_tensor* tensor,
                                                int height, int width, adsamp_labels** out);
/* Barycentric blend of every channel of a C x h x w image. */
ADSAMP_API adsamp_status adsamp_upsample_image(const adsamp_image* sampled, const adsamp_tensor* tensor, int height,
                                               int width, adsamp_image** out);

/* ---- metrics ---- */
typedef struct adsamp_iou_summary {
    double mean_target;
    double mean_all;
    double pixel_accuracy;
} adsamp_iou_summary;

ADSAMP_API adsamp_status adsamp_iou(const adsamp_labels* pred, const adsamp_labels* gt, const int32_t* targets,
                                    size_t num_targets, adsamp_iou_summary* out);
/* CSV files with a header row; see the README for the columns. */
ADSAMP_API adsamp_status adsamp_write_iou_csv(const adsamp_labels* pred, const adsamp_labels* gt,
                                              const int32_t* targets, size_t num_targets, const char* path);
ADSAMP_API adsamp_status adsamp_write_trimap_csv(const adsamp_labels* pred, const adsamp_labels* gt,
                                                 const int32_t* targets, size_t num_targets, const int* widths,
                                                 size_t num_widths, const char* path);
ADSAMP_API adsamp_status adsamp_write_object_recall_csv(const adsamp_labels* pred, const adsamp_labels* gt,
                                                        const int32_t* targets, size_t num_targets, int bins,
                                                        const char* path);

/* ---- curve approximation experiments ---- */
typedef enum adsamp_curve_kind {
    ADSAMP_CURVE_CIRCLE = 0,   /* p0 = radius */
    ADSAMP_CURVE_ELLIPSE = 1,  /* p0, p1 = semi-axes */
    ADSAMP_CURVE_LINE = 2      /* segment (0,0)-(p0,p1) */
} adsamp_curve_kind;

/* Columns: M,N,epsilon,small_angle_bound,arc_bound,arc_bound_double,epsilon_m2,ratio_to_previous,chain_step */
ADSAMP_API adsamp_status adsamp_bound_experiment_csv(adsamp_curve_kind kind, double p0, double p1,
                                                     const int* segment_counts, size_t count,
                                                     int samples_per_segment, const char* path);
/* Disk of radius size/4 on a size x size canvas. lambda < 0 skips the
 * adaptive arm. Slopes are written to `slopes` (uniform, adaptive) when
 * non-NULL. */
ADSAMP_API adsamp_status adsamp_boundary_error_csv(int size, const int* n_values, size_t count, double lambda,
                                                   const char* path, double slopes[2]);

/* ---- synthetic scenes ---- */
typedef struct adsamp_scene_config {
    uint64_t seed;
    int height;
    int width;
    int min_objects;
    int max_objects;
    double min_radius;
    double max_radius;
    int num_object_classes;
    double polygon_fraction;
    double noise_amplitude;
} adsamp_scene_config;

ADSAMP_API void adsamp_scene_config_default(adsamp_scene_config* config);
ADSAMP_API adsamp_status adsamp_generate_scene(const adsamp_scene_config* config, adsamp_image** image,
                                               adsamp_labels** labels);
/* Writes images/, labels/ and manifest.json under out_dir. Scene k uses a
 * seed derived from config->seed and k. */
ADSAMP_API adsamp_status adsamp_write_scene_dataset(const adsamp_scene_config* config, int count,
                                                    const char* out_dir);

/* ---- end-to-end pipeline ---- */
typedef struct adsamp_pipeline_config {
    double lambda;
    int tensor_h;
    int tensor_w;
    int res_h;
    int res_w;
    const int* trimap_widths;   /* NULL: defaults 1,2,4,...,64 */
    size_t num_trimap_widths;
    int object_bins;
    const char* oracle;         /* "gt" or "noisy:<p>"; NULL means "gt" */
    uint64_t seed;
    int threads;                /* 0: hardware concurrency */
    int center_crop_square;
    int timing;
    int save_outputs;
    const char* tensor_cache_dir; /* NULL or "" disables the cache */
    const int32_t* targets;     /* NULL: targets from the manifest or scene set */
    size_t num_targets;
} adsamp_pipeline_config;

typedef struct adsamp_pipeline_summary {
    int images;
    int processed;
    int failed;
    int adaptive_wins;
    double adaptive_mean_target_iou;
    double uniform_mean_target_iou;
    int uniform_solver_calls;
} adsamp_pipeline_summary;

ADSAMP_API void adsamp_pipeline_config_default(adsamp_pipeline_config* config);
/* Runs over a JSON dataset manifest and writes reports into out_dir. */
ADSAMP_API adsamp_status adsamp_run_pipeline_manifest(const char* manifest_path, const adsamp_pipeline_config* config,
                                                      const char* out_dir, adsamp_pipeline_summary* summary);
/* Runs over `count` generated scenes without touching the disk for inputs. */
ADSAMP_API adsamp_status adsamp_run_pipeline_synthetic(const adsamp_scene_config* scenes, int count,
                                                       const adsamp_pipeline_config* config, const char* out_dir,
                                                       adsamp_pipeline_summary* summary);

#ifdef __cplusplus
}
#endif

#endif
