// Command-line front end. Talks to the library exclusively through the C API.
#include "adsamp/adsamp.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Failure {
    adsamp_status status;
    std::string context;
};

void check(adsamp_status status, const std::string& context) {
    if (status != ADSAMP_OK) throw Failure{status, context};
}

struct ImageDel {
    void operator()(adsamp_image* p) const { adsamp_image_free(p); }
};
struct LabelsDel {
    void operator()(adsamp_labels* p) const { adsamp_labels_free(p); }
};
struct TensorDel {
    void operator()(adsamp_tensor* p) const { adsamp_tensor_free(p); }
};
using Image = std::unique_ptr<adsamp_image, ImageDel>;
using Labels = std::unique_ptr<adsamp_labels, LabelsDel>;
using Tensor = std::unique_ptr<adsamp_tensor, TensorDel>;

Image read_image(const std::string& path) {
    adsamp_image* p = nullptr;
    check(adsamp_image_read_png(path.c_str(), &p), "reading " + path);
    return Image(p);
}

Labels read_labels(const std::string& path, int ignore) {
    adsamp_labels* p = nullptr;
    check(adsamp_labels_read_png(path.c_str(), ignore >= 0, ignore, &p), "reading " + path);
    return Labels(p);
}

Tensor read_tensor(const std::string& path) {
    adsamp_tensor* p = nullptr;
    check(adsamp_tensor_read(path.c_str(), &p), "reading " + path);
    return Tensor(p);
}

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

// Flags shared by several subcommands.
struct Common {
    double lambda = 1.0;
    std::vector<int> tensor_size{8, 8};
    std::vector<int> resolution;
    std::vector<int32_t> targets;
    std::string oracle = "gt";
    std::uint64_t seed = 0;
    std::string out = ".";
    bool center_crop = false;
    int ignore = 255;
};

void add_lambda(CLI::App* app, Common& c) {
    app->add_option("--lambda", c.lambda, "Smoothness weight (inf for the uniform tensor)")->capture_default_str();
}
void add_tensor_size(CLI::App* app, Common& c) {
    app->add_option("--tensor-size", c.tensor_size, "Solved tensor size h w")->expected(2)->capture_default_str();
}
void add_resolution(CLI::App* app, Common& c, bool required) {
    auto* opt = app->add_option("--resolution", c.resolution, "Downsample resolution h w")->expected(2);
    if (required) opt->required();
}
void add_targets(CLI::App* app, Common& c, bool required) {
    auto* opt = app->add_option("--targets", c.targets, "Target class ids, comma separated")->delimiter(',');
    if (required) opt->required();
}
void add_out(CLI::App* app, Common& c) {
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
}
void add_ignore(CLI::App* app, Common& c) {
    app->add_option("--ignore-id", c.ignore, "Ignore label id (-1 for none)")->capture_default_str();
}
void add_crop(CLI::App* app, Common& c) {
    app->add_flag("--center-crop-square", c.center_crop, "Crop inputs to their central largest square");
}

Labels maybe_crop(Labels labels, bool crop) {
    if (!crop) return labels;
    adsamp_labels* p = nullptr;
    check(adsamp_labels_center_crop(labels.get(), &p), "cropping labels");
    return Labels(p);
}

Image maybe_crop(Image image, bool crop) {
    if (!crop) return image;
    adsamp_image* p = nullptr;
    check(adsamp_image_center_crop(image.get(), &p), "cropping image");
    return Image(p);
}

Tensor solve(const adsamp_labels* labels, const Common& c, adsamp_solve_info* info) {
    adsamp_tensor* p = nullptr;
    check(adsamp_tensor_solve(labels, c.targets.data(), c.targets.size(), c.tensor_size[0], c.tensor_size[1], c.lambda,
                              &p, info),
          "solving the sampling tensor");
    return Tensor(p);
}

Tensor resize(const adsamp_tensor* t, const std::vector<int>& size) {
    adsamp_tensor* p = nullptr;
    check(adsamp_tensor_resize(t, size[0], size[1], &p), "resizing the tensor");
    return Tensor(p);
}

void print_iou(const adsamp_iou_summary& s) {
    std::printf("mean_target_iou %.6f\nmean_all_iou %.6f\npixel_accuracy %.6f\n", s.mean_target, s.mean_all,
                s.pixel_accuracy);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-driven adaptive downsampling toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(adsamp_version()));
    Common c;

    // solve-tensor
    std::string solve_labels;
    std::string boundary_png;
    auto* cmd_solve = app.add_subcommand("solve-tensor", "Solve a sampling tensor from a label map");
    cmd_solve->add_option("--labels", solve_labels, "Label PNG")->required();
    cmd_solve->add_option("--boundary-png", boundary_png, "Also write the boundary mask as a 1-bit PNG");
    add_lambda(cmd_solve, c);
    add_tensor_size(cmd_solve, c);
    add_resolution(cmd_solve, c, false);
    add_targets(cmd_solve, c, true);
    add_out(cmd_solve, c);
    add_ignore(cmd_solve, c);
    add_crop(cmd_solve, c);

    // downsample
    std::string down_image, down_labels, down_tensor;
    auto* cmd_down = app.add_subcommand("downsample", "Sample an image and/or label map with a tensor");
    cmd_down->add_option("--image", down_image, "Image PNG");
    cmd_down->add_option("--labels", down_labels, "Label PNG (also drives the solver when no tensor is given)");
    cmd_down->add_option("--tensor", down_tensor, "SMPT tensor; solved from --labels when absent");
    add_lambda(cmd_down, c);
    add_tensor_size(cmd_down, c);
    add_resolution(cmd_down, c, true);
    add_targets(cmd_down, c, false);
    add_out(cmd_down, c);
    add_ignore(cmd_down, c);
    add_crop(cmd_down, c);

    // upsample
    std::string up_labels, up_image, up_tensor;
    std::vector<int> up_size;
    int up_classes = 0;
    auto* cmd_up = app.add_subcommand("upsample", "Rasterise sampled labels or values back to full resolution");
    cmd_up->add_option("--sampled-labels", up_labels, "Label PNG at the tensor resolution");
    cmd_up->add_option("--sampled-image", up_image, "Image PNG at the tensor resolution");
    cmd_up->add_option("--tensor", up_tensor, "SMPT tensor")->required();
    cmd_up->add_option("--size", up_size, "Output size H W")->expected(2)->required();
    cmd_up->add_option("--num-classes", up_classes, "Class count K (default: largest id + 1)");
    add_out(cmd_up, c);
    add_ignore(cmd_up, c);

    // evaluate / trimap / object-recall
    std::string pred_path, gt_path;
    std::vector<int> widths{1, 2, 4, 8, 16, 32, 64};
    int bins = 5;
    auto add_pair = [&](CLI::App* cmd) {
        cmd->add_option("--pred", pred_path, "Predicted label PNG")->required();
        cmd->add_option("--gt", gt_path, "Ground-truth label PNG")->required();
        add_targets(cmd, c, true);
        add_out(cmd, c);
        add_ignore(cmd, c);
    };
    auto* cmd_eval = app.add_subcommand("evaluate", "Per-class IoU and mean IoU");
    add_pair(cmd_eval);
    auto* cmd_trimap = app.add_subcommand("trimap", "Accuracy in bands around ground-truth boundaries");
    add_pair(cmd_trimap);
    cmd_trimap->add_option("--widths", widths, "Band widths in pixels")->delimiter(',')->capture_default_str();
    auto* cmd_recall = app.add_subcommand("object-recall", "Recall binned by object size");
    add_pair(cmd_recall);
    cmd_recall->add_option("--bins", bins, "Number of equal-count size bins")->capture_default_str();

    // bound-experiment
    std::string curve = "circle";
    double radius = 1.0, semi_a = 2.0, semi_b = 1.0;
    std::vector<int> segments{4, 8, 16, 32, 64, 128, 256, 512};
    int samples_per_segment = 64;
    int disk_size = 0;
    std::vector<int> n_list{64, 256, 1024, 4096};
    auto* cmd_bound = app.add_subcommand("bound-experiment", "Curve approximation error and sampling-rate tables");
    cmd_bound->add_option("--curve", curve, "circle, ellipse or line")
        ->check(CLI::IsMember({"circle", "ellipse", "line"}))
        ->capture_default_str();
    cmd_bound->add_option("--radius", radius, "Circle radius")->capture_default_str();
    cmd_bound->add_option("--a", semi_a, "Ellipse semi-axis a, or line end x")->capture_default_str();
    cmd_bound->add_option("--b", semi_b, "Ellipse semi-axis b, or line end y")->capture_default_str();
    cmd_bound->add_option("--segments", segments, "Segment counts M")->delimiter(',')->capture_default_str();
    cmd_bound->add_option("--samples-per-segment", samples_per_segment, "Chain densification")->capture_default_str();
    cmd_bound->add_option("--disk-size", disk_size, "Also run the disk boundary-error table on this canvas size");
    cmd_bound->add_option("--n-list", n_list, "Sample counts N for the disk table")->delimiter(',')->capture_default_str();
    add_lambda(cmd_bound, c);
    add_out(cmd_bound, c);

    // gen-scenes
    adsamp_scene_config scene;
    adsamp_scene_config_default(&scene);
    int scene_count = 10;
    int canvas = scene.height;
    auto add_scene_options = [&](CLI::App* cmd) {
        cmd->add_option("--size", canvas, "Canvas side in pixels")->capture_default_str();
        cmd->add_option("--min-objects", scene.min_objects)->capture_default_str();
        cmd->add_option("--max-objects", scene.max_objects)->capture_default_str();
        cmd->add_option("--min-radius", scene.min_radius)->capture_default_str();
        cmd->add_option("--max-radius", scene.max_radius)->capture_default_str();
        cmd->add_option("--classes", scene.num_object_classes, "Object classes")->capture_default_str();
        cmd->add_option("--polygon-fraction", scene.polygon_fraction)->capture_default_str();
    };
    auto* cmd_gen = app.add_subcommand("gen-scenes", "Write a seeded synthetic dataset");
    cmd_gen->add_option("--count", scene_count, "Number of scenes")->capture_default_str();
    cmd_gen->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    add_scene_options(cmd_gen);
    add_out(cmd_gen, c);

    // pipeline
    std::string manifest;
    int synthetic = 0;
    int threads = 0;
    bool timing = false, save_outputs = false;
    std::string cache_dir;
    auto* cmd_pipe = app.add_subcommand("pipeline", "Adaptive vs uniform end-to-end run with reports");
    auto* opt_manifest = cmd_pipe->add_option("--manifest", manifest, "Dataset manifest JSON");
    auto* opt_synth = cmd_pipe->add_option("--synthetic", synthetic, "Run on this many generated scenes instead");
    opt_manifest->excludes(opt_synth);
    add_lambda(cmd_pipe, c);
    add_tensor_size(cmd_pipe, c);
    add_resolution(cmd_pipe, c, false);
    add_targets(cmd_pipe, c, false);
    cmd_pipe->add_option("--oracle", c.oracle, "gt or noisy:<p>")->capture_default_str();
    cmd_pipe->add_option("--seed", c.seed, "Seed for oracle noise and generated scenes")->capture_default_str();
    cmd_pipe->add_option("--widths", widths, "Trimap band widths")->delimiter(',')->capture_default_str();
    cmd_pipe->add_option("--bins", bins, "Object size bins")->capture_default_str();
    cmd_pipe->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
    cmd_pipe->add_option("--tensor-cache", cache_dir, "Directory for cached SMPT tensors");
    cmd_pipe->add_flag("--timing", timing, "Add wall-clock columns to per_image.csv");
    cmd_pipe->add_flag("--save-outputs", save_outputs, "Write per-image predictions and tensors");
    add_scene_options(cmd_pipe);
    add_out(cmd_pipe, c);
    add_crop(cmd_pipe, c);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_solve->parsed()) {
            Labels labels = maybe_crop(read_labels(solve_labels, c.ignore), c.center_crop);
            adsamp_solve_info info{};
            Tensor phi = solve(labels.get(), c, &info);
            check(adsamp_tensor_write(phi.get(), out_path(c.out, "tensor.smpt").c_str()), "writing tensor");
            if (!c.resolution.empty()) {
                Tensor resized = resize(phi.get(), c.resolution);
                check(adsamp_tensor_write(resized.get(), out_path(c.out, "tensor_resized.smpt").c_str()),
                      "writing tensor");
            }
            if (!boundary_png.empty()) {
                check(adsamp_labels_write_boundary_png(labels.get(), c.targets.data(), c.targets.size(),
                                                       boundary_png.c_str()),
                      "writing boundary PNG");
            }
            static const char* kMethods[] = {"trivial", "dense", "conjugate_gradient"};
            std::printf("method %s\niterations %d\nresidual %.3e\nflops %.0f\n", kMethods[info.method], info.iterations,
                        info.residual, info.flops);
        } else if (cmd_down->parsed()) {
            if (down_image.empty() && down_labels.empty()) throw CLI::ValidationError("--image or --labels is required");
            Labels labels;
            if (!down_labels.empty()) labels = maybe_crop(read_labels(down_labels, c.ignore), c.center_crop);
            Tensor phi;
            if (!down_tensor.empty()) {
                phi = read_tensor(down_tensor);
            } else {
                if (!labels || c.targets.empty()) {
                    throw CLI::ValidationError("without --tensor, --labels and --targets are needed to solve one");
                }
                phi = solve(labels.get(), c, nullptr);
            }
            Tensor sampling = resize(phi.get(), c.resolution);
            check(adsamp_tensor_write(sampling.get(), out_path(c.out, "tensor.smpt").c_str()), "writing tensor");
            if (!down_image.empty()) {
                Image image = maybe_crop(read_image(down_image), c.center_crop);
                adsamp_image* small = nullptr;
                check(adsamp_sample_image(image.get(), sampling.get(), &small), "sampling image");
                Image owned(small);
                check(adsamp_image_write_png(owned.get(), out_path(c.out, "downsampled.png").c_str()), "writing image");
            }
            if (labels) {
                adsamp_labels* small = nullptr;
                check(adsamp_sample_labels(labels.get(), sampling.get(), &small), "sampling labels");
                Labels owned(small);
                check(adsamp_labels_write_png(owned.get(), out_path(c.out, "sampled_labels.png").c_str()),
                      "writing labels");
            }
        } else if (cmd_up->parsed()) {
            if (up_labels.empty() && up_image.empty()) {
                throw CLI::ValidationError("--sampled-labels or --sampled-image is required");
            }
            Tensor phi = read_tensor(up_tensor);
            if (!up_labels.empty()) {
                Labels sampled = read_labels(up_labels, c.ignore);
                int k = up_classes;
                if (k <= 0) {
                    int h = 0, w = 0;
                    check(adsamp_labels_shape(sampled.get(), &h, &w), "reading labels");
                    std::vector<int32_t> ids(static_cast<std::size_t>(h) * w);
                    check(adsamp_labels_values(sampled.get(), ids.data(), ids.size()), "reading labels");
                    for (int32_t id : ids)
                        if (id != c.ignore) k = std::max(k, id + 1);
                    k = std::max(k, 1);
                }
                adsamp_labels* full = nullptr;
                check(adsamp_upsample_labels(sampled.get(), phi.get(), k, up_size[0], up_size[1], &full), "upsampling");
                Labels owned(full);
                check(adsamp_labels_write_png(owned.get(), out_path(c.out, "upsampled_labels.png").c_str()),
                      "writing labels");
            }
            if (!up_image.empty()) {
                Image sampled = read_image(up_image);
                adsamp_image* full = nullptr;
                check(adsamp_upsample_image(sampled.get(), phi.get(), up_size[0], up_size[1], &full), "upsampling");
                Image owned(full);
                check(adsamp_image_write_png(owned.get(), out_path(c.out, "upsampled_image.png").c_str()),
                      "writing image");
            }
        } else if (cmd_eval->parsed() || cmd_trimap->parsed() || cmd_recall->parsed()) {
            Labels pred = read_labels(pred_path, c.ignore);
            Labels gt = read_labels(gt_path, c.ignore);
            const int32_t* t = c.targets.data();
            const std::size_t nt = c.targets.size();
            if (cmd_eval->parsed()) {
                adsamp_iou_summary s{};
                check(adsamp_iou(pred.get(), gt.get(), t, nt, &s), "computing IoU");
                check(adsamp_write_iou_csv(pred.get(), gt.get(), t, nt, out_path(c.out, "iou.csv").c_str()),
                      "writing iou.csv");
                print_iou(s);
            } else if (cmd_trimap->parsed()) {
                check(adsamp_write_trimap_csv(pred.get(), gt.get(), t, nt, widths.data(), widths.size(),
                                              out_path(c.out, "trimap.csv").c_str()),
                      "writing trimap.csv");
            } else {
                check(adsamp_write_object_recall_csv(pred.get(), gt.get(), t, nt, bins,
                                                     out_path(c.out, "object_recall.csv").c_str()),
                      "writing object_recall.csv");
            }
        } else if (cmd_bound->parsed()) {
            adsamp_curve_kind kind = ADSAMP_CURVE_CIRCLE;
            double p0 = radius, p1 = 0.0;
            if (curve == "ellipse") {
                kind = ADSAMP_CURVE_ELLIPSE;
                p0 = semi_a;
                p1 = semi_b;
            } else if (curve == "line") {
                kind = ADSAMP_CURVE_LINE;
                p0 = semi_a;
                p1 = semi_b;
            }
            check(adsamp_bound_experiment_csv(kind, p0, p1, segments.data(), segments.size(), samples_per_segment,
                                              out_path(c.out, "bound.csv").c_str()),
                  "running the bound experiment");
            if (disk_size > 0) {
                double slopes[2];
                check(adsamp_boundary_error_csv(disk_size, n_list.data(), n_list.size(), c.lambda,
                                                out_path(c.out, "boundary_error.csv").c_str(), slopes),
                      "running the boundary-error experiment");
                std::printf("uniform_slope %.4f\nadaptive_slope %.4f\n", slopes[0], slopes[1]);
            }
        } else if (cmd_gen->parsed()) {
            scene.seed = c.seed;
            scene.height = scene.width = canvas;
            check(adsamp_write_scene_dataset(&scene, scene_count, c.out.c_str()), "generating scenes");
        } else if (cmd_pipe->parsed()) {
            if (manifest.empty() && synthetic <= 0) throw CLI::ValidationError("--manifest or --synthetic is required");
            adsamp_pipeline_config cfg;
            adsamp_pipeline_config_default(&cfg);
            cfg.lambda = c.lambda;
            cfg.tensor_h = c.tensor_size[0];
            cfg.tensor_w = c.tensor_size[1];
            if (!c.resolution.empty()) {
                cfg.res_h = c.resolution[0];
                cfg.res_w = c.resolution[1];
            }
            cfg.trimap_widths = widths.data();
            cfg.num_trimap_widths = widths.size();
            cfg.object_bins = bins;
            cfg.oracle = c.oracle.c_str();
            cfg.seed = c.seed;
            cfg.threads = threads;
            cfg.center_crop_square = c.center_crop;
            cfg.timing = timing;
            cfg.save_outputs = save_outputs;
            cfg.tensor_cache_dir = cache_dir.empty() ? nullptr : cache_dir.c_str();
            if (!c.targets.empty()) {
                cfg.targets = c.targets.data();
                cfg.num_targets = c.targets.size();
            }
            adsamp_pipeline_summary summary{};
            if (!manifest.empty()) {
                check(adsamp_run_pipeline_manifest(manifest.c_str(), &cfg, c.out.c_str(), &summary), "pipeline");
            } else {
                scene.seed = c.seed;
                scene.height = scene.width = canvas;
                check(adsamp_run_pipeline_synthetic(&scene, synthetic, &cfg, c.out.c_str(), &summary), "pipeline");
            }
            std::printf("images %d\nprocessed %d\nfailed %d\nadaptive_wins %d\nadaptive_mean_target_iou %.6f\n"
                        "uniform_mean_target_iou %.6f\n",
                        summary.images, summary.processed, summary.failed, summary.adaptive_wins,
                        summary.adaptive_mean_target_iou, summary.uniform_mean_target_iou);
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "error: %s: %s: %s\n", f.context.c_str(), adsamp_status_name(f.status), adsamp_last_error());
        return 1;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
