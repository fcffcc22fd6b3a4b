// Exercises the shared library through its C header only.
#include "adsamp/adsamp.h"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "scratch_c_api";
    fs::create_directories(p);
    return (p / name).string();
}

adsamp_labels* disk_labels(int n, double radius) {
    std::vector<int32_t> ids(static_cast<size_t>(n) * n, 0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double dr = r - (n - 1) / 2.0;
            const double dc = c - (n - 1) / 2.0;
            if (dr * dr + dc * dc <= radius * radius) ids[static_cast<size_t>(r) * n + c] = 1;
        }
    adsamp_labels* out = nullptr;
    REQUIRE(adsamp_labels_create(n, n, ids.data(), 1, 255, &out) == ADSAMP_OK);
    return out;
}

} // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(adsamp_version()) == "1.0.0");
    CHECK(std::string(adsamp_status_name(ADSAMP_OK)) == "ok");
    CHECK(std::strlen(adsamp_status_name(ADSAMP_ERR_CONVERGENCE)) > 0);
}

TEST_CASE("errors come back as status codes with a message") {
    adsamp_tensor* t = nullptr;
    CHECK(adsamp_tensor_uniform(1, 4, &t) == ADSAMP_ERR_SIZE);
    CHECK(t == nullptr);
    CHECK(std::strlen(adsamp_last_error()) > 0);
    CHECK(adsamp_tensor_uniform(4, 4, nullptr) == ADSAMP_ERR_INVALID_ARGUMENT);
    CHECK(adsamp_tensor_read(scratch("missing.smpt").c_str(), &t) == ADSAMP_ERR_IO);
    const double bad[8] = {0, 0, 1, 0.5, 0, 1, 0, 1};
    CHECK(adsamp_tensor_create(2, 2, bad, &t) == ADSAMP_ERR_DOMAIN);
    CHECK(adsamp_tensor_uniform(3, 3, &t) == ADSAMP_OK);
    CHECK(std::string(adsamp_last_error()).empty());
    double vals[4];
    CHECK(adsamp_tensor_values(t, vals, 4) != ADSAMP_OK);
    adsamp_tensor_free(t);
    adsamp_tensor_free(nullptr);
}

TEST_CASE("solve, sample, upsample and score through the C interface") {
    adsamp_labels* gt = disk_labels(64, 13.0);
    const int32_t targets[1] = {1};
    adsamp_tensor* phi = nullptr;
    adsamp_solve_info info{};
    REQUIRE(adsamp_tensor_solve(gt, targets, 1, 8, 8, 1.0, &phi, &info) == ADSAMP_OK);
    CHECK(info.method == 1);
    int h = 0, w = 0;
    CHECK(adsamp_tensor_shape(phi, &h, &w) == ADSAMP_OK);
    CHECK(h == 8);
    CHECK(w == 8);

    adsamp_tensor* big = nullptr;
    REQUIRE(adsamp_tensor_resize(phi, 16, 16, &big) == ADSAMP_OK);
    adsamp_labels* sampled = nullptr;
    REQUIRE(adsamp_sample_labels(gt, big, &sampled) == ADSAMP_OK);
    adsamp_labels* pred = nullptr;
    REQUIRE(adsamp_upsample_labels(sampled, big, 2, 64, 64, &pred) == ADSAMP_OK);
    adsamp_iou_summary s{};
    REQUIRE(adsamp_iou(pred, gt, targets, 1, &s) == ADSAMP_OK);
    CHECK(s.mean_target > 0.7);
    CHECK(s.pixel_accuracy > 0.9);

    const std::string path = scratch("phi.smpt");
    REQUIRE(adsamp_tensor_write(big, path.c_str()) == ADSAMP_OK);
    adsamp_tensor* back = nullptr;
    REQUIRE(adsamp_tensor_read(path.c_str(), &back) == ADSAMP_OK);
    std::vector<double> a(2 * 16 * 16), b(2 * 16 * 16);
    adsamp_tensor_values(big, a.data(), a.size());
    adsamp_tensor_values(back, b.data(), b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);

    CHECK(adsamp_write_iou_csv(pred, gt, targets, 1, scratch("iou.csv").c_str()) == ADSAMP_OK);
    const int widths[3] = {1, 4, 128};
    CHECK(adsamp_write_trimap_csv(pred, gt, targets, 1, widths, 3, scratch("trimap.csv").c_str()) == ADSAMP_OK);
    CHECK(adsamp_write_object_recall_csv(pred, gt, targets, 1, 3, scratch("recall.csv").c_str()) == ADSAMP_OK);
    CHECK(fs::exists(scratch("trimap.csv")));

    for (auto* p : {phi, big, back}) adsamp_tensor_free(p);
    for (auto* p : {gt, sampled, pred}) adsamp_labels_free(p);
}

TEST_CASE("constant image survives downsampling and upsampling") {
    std::vector<double> v(3 * 50 * 40, 93.0);
    adsamp_image* im = nullptr;
    REQUIRE(adsamp_image_create(50, 40, 3, v.data(), &im) == ADSAMP_OK);
    adsamp_labels* gt = disk_labels(50, 9.0);
    adsamp_labels* cropped = nullptr;
    REQUIRE(adsamp_labels_center_crop(gt, &cropped) == ADSAMP_OK);
    adsamp_labels_free(gt);
    const int32_t targets[1] = {1};
    adsamp_tensor* phi = nullptr;
    REQUIRE(adsamp_tensor_solve(cropped, targets, 1, 6, 6, 0.5, &phi, nullptr) == ADSAMP_OK);
    adsamp_image* small = nullptr;
    REQUIRE(adsamp_sample_image(im, phi, &small) == ADSAMP_OK);
    adsamp_image* up = nullptr;
    REQUIRE(adsamp_upsample_image(small, phi, 50, 40, &up) == ADSAMP_OK);
    std::vector<double> out(v.size());
    REQUIRE(adsamp_image_values(up, out.data(), out.size()) == ADSAMP_OK);
    CHECK(out == v);
    adsamp_image_free(im);
    adsamp_image_free(small);
    adsamp_image_free(up);
    adsamp_labels_free(cropped);
    adsamp_tensor_free(phi);
}

TEST_CASE("synthetic pipeline through the C interface") {
    adsamp_scene_config scenes;
    adsamp_scene_config_default(&scenes);
    scenes.height = 96;
    scenes.width = 96;
    scenes.max_radius = 24;
    adsamp_pipeline_config cfg;
    adsamp_pipeline_config_default(&cfg);
    cfg.threads = 1;
    cfg.res_h = cfg.res_w = 24;
    adsamp_pipeline_summary sum{};
    REQUIRE(adsamp_run_pipeline_synthetic(&scenes, 6, &cfg, nullptr, &sum) == ADSAMP_OK);
    CHECK(sum.images == 6);
    CHECK(sum.processed == 6);
    CHECK(sum.uniform_solver_calls == 0);
    CHECK(sum.adaptive_mean_target_iou > 0.0);

    cfg.lambda = -1.0;
    CHECK(adsamp_run_pipeline_synthetic(&scenes, 2, &cfg, nullptr, &sum) == ADSAMP_ERR_CONFIG);
}

TEST_CASE("bound experiment tables") {
    const int ms[3] = {4, 8, 16};
    const std::string path = scratch("bound.csv");
    REQUIRE(adsamp_bound_experiment_csv(ADSAMP_CURVE_CIRCLE, 1.0, 0.0, ms, 3, 64, path.c_str()) == ADSAMP_OK);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "M,N,epsilon,small_angle_bound,arc_bound,arc_bound_double,epsilon_m2,ratio_to_previous,chain_step");
    const int ns[2] = {64, 256};
    double slopes[2] = {0, 0};
    REQUIRE(adsamp_boundary_error_csv(128, ns, 2, 0.0, scratch("err.csv").c_str(), slopes) == ADSAMP_OK);
    CHECK(slopes[0] < 0.0);
}
