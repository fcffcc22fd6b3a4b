#include "adsamp/resampler.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace adsamp;
using namespace testing_support;

namespace {

ImageBuffer random_image(int H, int W, int C, std::mt19937_64& rng) {
    ImageBuffer im(PixelGrid(H, W), C);
    for (int c = 0; c < C; ++c)
        for (int r = 0; r < H; ++r)
            for (int col = 0; col < W; ++col) im.at(c, r, col) = std::floor(uniform01(rng) * 256);
    return im;
}

// Nearest source index for sample k of n over m pixels, ties to the lower
// index, in exact integer arithmetic.
int nearest_index(int k, int n, int m) {
    const long num = static_cast<long>(k) * (m - 1);
    const long den = n - 1;
    const long q = num / den;
    return static_cast<int>(2 * (num % den) > den ? q + 1 : q);
}

} // namespace

TEST_CASE("full-resolution uniform sampling is the identity") {
    std::mt19937_64 rng(1);
    const ImageBuffer im = random_image(13, 9, 3, rng);
    const SampledImage s = sample_image(im, SamplingTensor::uniform(13, 9));
    CHECK(s.values.values() == im.values());
    CHECK(s.source_tensor == SamplingTensor::uniform(13, 9));
}

TEST_CASE("constant image samples to a constant") {
    std::mt19937_64 rng(2);
    const ImageBuffer im(PixelGrid(20, 30), 2, std::vector<double>(2 * 20 * 30, 42.5));
    const SampledImage s = sample_image(im, random_fold_free_tensor(6, 5, rng, 0.45));
    for (double v : s.values.values()) CHECK(v == 42.5);
}

TEST_CASE("row ramp with a 2x2 tensor picks the corner rows") {
    ImageBuffer im(PixelGrid(4, 4), 1);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) im.at(0, r, c) = r;
    const SampledImage s = sample_image(im, SamplingTensor::uniform(2, 2));
    CHECK(s.values.values() == std::vector<double>{0, 0, 3, 3});
}

TEST_CASE("uniform sampling equals nearest-neighbour downsampling") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 20; ++n) {
        const int H = uniform_int(rng, 2, 80);
        const int W = uniform_int(rng, 2, 80);
        const int h = uniform_int(rng, 2, 40);
        const int w = uniform_int(rng, 2, 40);
        const ImageBuffer im = random_image(H, W, 1, rng);
        const SampledImage s = sample_image(im, SamplingTensor::uniform(h, w));
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) CHECK(s.values.at(0, i, j) == im.at(0, nearest_index(i, h, H), nearest_index(j, w, W)));
    }
}

TEST_CASE("lambda zero samples land on boundary pixels") {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 10; ++n) {
        const LabelMap labels = random_blob_labels(64, 64, 3, rng, 3);
        const TargetClassSet targets({1, 2});
        const BoundaryMap bmap = extract_boundary(labels, targets);
        if (bmap.empty()) continue;
        const SamplingTensor phi = solve_sampling_tensor(nearest_boundary_field(bmap, 8, 8), {0.0});
        for (int i = 1; i < 7; ++i)
            for (int j = 1; j < 7; ++j) {
                const PixelIndex p = labels.grid().nearest_pixel(phi.point(i, j));
                CHECK(bmap.at(p.row, p.col));
            }
    }
}

TEST_CASE("label sampling never blends and keeps the ignore id") {
    LabelMap m(PixelGrid(5, 5), 3, 255);
    m.at(0, 0) = 255;
    const LabelMap s = sample_labels(m, SamplingTensor::uniform(3, 3));
    CHECK(s.ignore_id() == std::optional<ClassId>(255));
    CHECK(s.at(0, 0) == 255);
    CHECK(s.at(1, 1) == 3);
}

TEST_CASE("resize to the same size is the identity") {
    std::mt19937_64 rng(5);
    const SamplingTensor phi = random_fold_free_tensor(7, 9, rng);
    CHECK(resize_tensor(phi, 7, 9) == phi);
}

TEST_CASE("resize keeps uniform tensors uniform and borders exact") {
    const SamplingTensor u = resize_tensor(SamplingTensor::uniform(8, 8), 32, 40);
    const SamplingTensor ref = SamplingTensor::uniform(32, 40);
    for (std::size_t k = 0; k < u.values().size(); ++k) CHECK(u.values()[k] == doctest::Approx(ref.values()[k]).epsilon(1e-14));
    std::mt19937_64 rng(6);
    const SamplingTensor r = resize_tensor(random_fold_free_tensor(5, 6, rng), 17, 23);
    for (int j = 0; j < 23; ++j) {
        CHECK(r.at(0, 0, j) == 0.0);
        CHECK(r.at(0, 16, j) == 1.0);
    }
    for (int i = 0; i < 17; ++i) {
        CHECK(r.at(1, i, 0) == 0.0);
        CHECK(r.at(1, i, 22) == 1.0);
    }
}

TEST_CASE("resize matches a bilinear oracle") {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 10; ++n) {
        const SamplingTensor phi = random_fold_free_tensor(uniform_int(rng, 2, 10), uniform_int(rng, 2, 10), rng);
        const int H = uniform_int(rng, 2, 50);
        const int W = uniform_int(rng, 2, 50);
        const SamplingTensor r = resize_tensor(phi, H, W);
        for (int c = 0; c < 2; ++c)
            for (int i = 0; i < H; ++i)
                for (int j = 0; j < W; ++j) CHECK(r.at(c, i, j) == doctest::Approx(bilinear_oracle(phi, c, H, W, i, j)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(resize_tensor(SamplingTensor::uniform(3, 3), 1, 4), Error);
}
