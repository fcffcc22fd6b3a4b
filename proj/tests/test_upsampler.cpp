#include "adsamp/upsampler.hpp"

#include "adsamp/resampler.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace adsamp;
using namespace testing_support;

TEST_CASE("full-resolution uniform coverage puts all weight on one vertex") {
    const int H = 9;
    const int W = 6;
    const RasterCoverage cov = build_coverage(SamplingTensor::uniform(H, W), PixelGrid(H, W));
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const auto w = cov.weights_at(r, c);
            const auto v = cov.triangle_vertices(cov.triangle_at(r, c));
            int ones = 0;
            for (int k = 0; k < 3; ++k) {
                CHECK((w[k] == 0.0 || w[k] == 1.0));
                if (w[k] == 1.0) {
                    ++ones;
                    CHECK(v[k] == PixelIndex{r, c});
                }
            }
            CHECK(ones == 1);
        }
    CHECK(cov.diagnostics().fallback_pixels == 0);
}

TEST_CASE("triangle vertex order") {
    const RasterCoverage cov(PixelGrid(4, 4), 3, 4);
    CHECK(cov.triangle_count() == 12);
    const auto t0 = cov.triangle_vertices(0);
    CHECK(t0[0] == PixelIndex{0, 0});
    CHECK(t0[1] == PixelIndex{1, 0});
    CHECK(t0[2] == PixelIndex{0, 1});
    const auto t7 = cov.triangle_vertices(7);
    CHECK(t7[0] == PixelIndex{2, 0});
    CHECK(t7[1] == PixelIndex{1, 1});
    CHECK(t7[2] == PixelIndex{2, 1});
    CHECK_THROWS_AS(cov.triangle_vertices(12), Error);
}

TEST_CASE("scan conversion is bit-identical to exhaustive point-in-triangle tests") {
    std::mt19937_64 rng(1);
    for (int n = 0; n < 60; ++n) {
        const int h = uniform_int(rng, 2, 8);
        const int w = uniform_int(rng, 2, 8);
        const int H = uniform_int(rng, 2, 128);
        const int W = uniform_int(rng, 2, 128);
        const SamplingTensor phi = n < 5 ? SamplingTensor::uniform(h, w) : random_fold_free_tensor(h, w, rng);
        const RasterCoverage cov = build_coverage(phi, PixelGrid(H, W));
        const BruteCoverage oracle = brute_coverage(phi, H, W);
        CHECK(cov.diagnostics().inverted_triangles == 0);
        CHECK(cov.diagnostics().fallback_pixels == 0);
        CHECK(cov.diagnostics().overlapping_claims == 0);
        int mismatches = 0;
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < W; ++c) {
                const std::size_t f = static_cast<std::size_t>(r) * W + c;
                mismatches += oracle.claims[f] != 1 || oracle.triangle[f] != cov.triangle_at(r, c) ||
                              oracle.weights[f] != cov.weights_at(r, c);
            }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("resized random tensors cover every pixel exactly once") {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 100; ++n) {
        const SamplingTensor phi = resize_tensor(random_fold_free_tensor(8, 8, rng), 16, 16);
        const BruteCoverage oracle = brute_coverage(phi, 64, 64);
        int bad = 0;
        for (int k : oracle.claims) bad += k != 1;
        CHECK(bad == 0);
    }
}

TEST_CASE("weights are convex and reproduce affine fields") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 20; ++n) {
        const int h = uniform_int(rng, 2, 12);
        const int w = uniform_int(rng, 2, 12);
        const int H = uniform_int(rng, 20, 90);
        const int W = uniform_int(rng, 20, 90);
        const SamplingTensor phi = random_fold_free_tensor(h, w, rng);
        const double a = uniform01(rng) * 10 - 5;
        const double bx = uniform01(rng) * 4 - 2;
        const double by = uniform01(rng) * 4 - 2;
        ScoreMap s(h, w, 1);
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) s.at(0, i, j) = a + bx * phi.at(1, i, j) * (W - 1) + by * phi.at(0, i, j) * (H - 1);
        const RasterCoverage cov = build_coverage(phi, PixelGrid(H, W));
        const std::vector<double> up = upsample_scores(s, cov);
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < W; ++c) {
                const auto wt = cov.weights_at(r, c);
                CHECK(std::abs(wt[0] + wt[1] + wt[2] - 1.0) <= 1e-9);
                for (double x : wt) CHECK((x >= 0.0 && x <= 1.0));
                CHECK(std::abs(up[static_cast<std::size_t>(r) * W + c] - (a + bx * c + by * r)) <= 1e-6);
            }
    }
}

TEST_CASE("constant scores upsample to a constant label") {
    std::mt19937_64 rng(4);
    ScoreMap s(5, 5, 4);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) s.at(3, i, j) = 1.0;
    const LabelMap up = upsample_labels(s, build_coverage(random_fold_free_tensor(5, 5, rng), PixelGrid(40, 30)));
    for (ClassId id : up.labels()) CHECK(id == 3);
}

TEST_CASE("half and half scores split down the middle") {
    ScoreMap s(2, 3, 2);
    for (int i = 0; i < 2; ++i) {
        s.at(0, i, 0) = 1.0;
        s.at(1, i, 2) = 1.0;
        s.at(0, i, 1) = 0.5;
        s.at(1, i, 1) = 0.5;
    }
    const LabelMap up = upsample_labels(s, build_coverage(SamplingTensor::uniform(2, 3), PixelGrid(8, 9)));
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 9; ++c) CHECK(up.at(r, c) == (c <= 4 ? 0 : 1));
}

TEST_CASE("folded grids are still fully assigned") {
    std::vector<double> raw = SamplingTensor::uniform(4, 4).values();
    raw[1 * 4 + 1] = 0.9;   // pull an interior vertex across its neighbours
    raw[16 + 1 * 4 + 1] = 0.9;
    const SamplingTensor phi = project_constraints(4, 4, raw);
    const RasterCoverage cov = build_coverage(phi, PixelGrid(30, 30));
    CHECK(cov.diagnostics().inverted_triangles > 0);
    CHECK_FALSE(cov.diagnostics().warnings.empty());
    for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 30; ++c) {
            CHECK(cov.triangle_at(r, c) >= 0);
            const auto w = cov.weights_at(r, c);
            CHECK(std::abs(w[0] + w[1] + w[2] - 1.0) <= 1e-9);
        }
}
