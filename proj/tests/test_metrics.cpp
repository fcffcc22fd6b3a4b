#include "adsamp/metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace adsamp;
using namespace testing_support;

namespace {

LabelMap half_half(int H, int W) {
    LabelMap m(PixelGrid(H, W), 0);
    for (int r = 0; r < H; ++r)
        for (int c = W / 2; c < W; ++c) m.at(r, c) = 1;
    return m;
}

LabelMap noisy_copy(const LabelMap& gt, double p, int K, std::mt19937_64& rng) {
    LabelMap pred(gt.grid(), gt.labels());
    for (auto& v : pred.labels())
        if (uniform01(rng) < p) v = uniform_int(rng, 0, K - 1);
    return pred;
}

} // namespace

TEST_CASE("perfect prediction scores one") {
    std::mt19937_64 rng(1);
    const LabelMap gt = random_blob_labels(32, 32, 3, rng);
    const IoUReport r = iou(gt, gt, TargetClassSet({1, 2}));
    for (const auto& [id, v] : r.per_class) CHECK(v == 1.0);
    CHECK(r.mean_all == 1.0);
    CHECK(r.pixel_accuracy == 1.0);
    const TrimapCurve t = trimap_accuracy(gt, gt, TargetClassSet({1, 2}), {1, 3, 10});
    for (const auto& a : t.accuracy)
        if (a) CHECK(*a == 1.0);
    const ObjectRecallReport o = object_recall(gt, gt, TargetClassSet({1, 2}), 3);
    for (double v : o.per_bin) CHECK(v == 1.0);
}

TEST_CASE("constant prediction against half/half ground truth") {
    const LabelMap gt = half_half(4, 4);
    const LabelMap pred(PixelGrid(4, 4), 0);
    const IoUReport r = iou(pred, gt, TargetClassSet({1}));
    CHECK(r.per_class.at(0) == 0.5);
    CHECK(r.per_class.at(1) == 0.0);
    CHECK(r.mean_all == 0.25);
    CHECK(r.mean_target == 0.0);
    CHECK(r.pixel_accuracy == 0.5);
}

TEST_CASE("classes absent from both maps are excluded") {
    const LabelMap m(PixelGrid(3, 3), 2);
    const IoUReport r = iou(m, m, TargetClassSet({1}));
    CHECK(r.per_class.size() == 1);
    CHECK(std::isnan(r.mean_target));
}

TEST_CASE("confusion counts match brute force and merge before dividing") {
    std::mt19937_64 rng(2);
    ConfusionCounts merged;
    std::vector<std::int64_t> inter(4, 0), uni(4, 0);
    for (int n = 0; n < 10; ++n) {
        LabelMap gt = random_blob_labels(uniform_int(rng, 4, 30), uniform_int(rng, 4, 30), 4, rng);
        gt = LabelMap(gt.grid(), gt.labels(), 255);
        gt.at(0, 0) = 255;
        const LabelMap pred = noisy_copy(gt, 0.3, 4, rng);
        ConfusionCounts c;
        c.add(pred, gt);
        const BruteIoU o = brute_iou(pred, gt, 4);
        for (int k = 0; k < 4; ++k) {
            CHECK(c.intersection(k) == o.inter[k]);
            CHECK(c.union_count(k) == o.uni[k]);
            inter[k] += o.inter[k];
            uni[k] += o.uni[k];
        }
        merged.merge(c);
    }
    const IoUReport r = iou_report(merged, TargetClassSet({1, 2, 3}));
    for (int k = 0; k < 4; ++k)
        if (uni[k] > 0) CHECK(r.per_class.at(k) == static_cast<double>(inter[k]) / static_cast<double>(uni[k]));
}

TEST_CASE("iou is symmetric under a class permutation") {
    std::mt19937_64 rng(3);
    const LabelMap gt = random_blob_labels(40, 40, 4, rng);
    const LabelMap pred = noisy_copy(gt, 0.2, 4, rng);
    const std::vector<ClassId> perm{2, 0, 3, 1};
    auto permute = [&](const LabelMap& m) {
        LabelMap out(m.grid(), m.labels());
        for (auto& v : out.labels()) v = perm[v];
        return out;
    };
    const IoUReport a = iou(pred, gt, TargetClassSet({1, 2}));
    const IoUReport b = iou(permute(pred), permute(gt), TargetClassSet({perm[1], perm[2]}));
    for (const auto& [id, v] : a.per_class) CHECK(b.per_class.at(perm[id]) == v);
    CHECK(a.mean_all == doctest::Approx(b.mean_all).epsilon(1e-15));
    CHECK(a.mean_target == doctest::Approx(b.mean_target).epsilon(1e-15));
}

TEST_CASE("trimap counts agree with exhaustive band membership") {
    std::mt19937_64 rng(4);
    // Two-region map with a one-pixel erosion error along the boundary.
    LabelMap gt = half_half(8, 8);
    LabelMap pred = gt;
    for (int r = 0; r < 8; ++r) pred.at(r, 4) = 0;
    const TargetClassSet one({1});
    const auto boundary = brute_boundary(gt, one);
    const TrimapCounts t = trimap_counts(pred, gt, one, {1});
    const auto [correct, total] = brute_band(pred, gt, boundary, 1);
    CHECK(t.correct[0] == correct);
    CHECK(t.total[0] == total);
    CHECK(total == 32);
    CHECK(correct == 24);

    for (int n = 0; n < 15; ++n) {
        LabelMap g = random_blob_labels(uniform_int(rng, 5, 30), uniform_int(rng, 5, 30), 3, rng);
        g = LabelMap(g.grid(), g.labels(), 255);
        g.at(1, 1) = 255;
        const LabelMap p = noisy_copy(g, 0.25, 3, rng);
        const TargetClassSet targets({1, 2}, 255);
        const std::vector<int> widths{1, 2, 5, 9};
        const TrimapCounts tc = trimap_counts(p, g, targets, widths);
        const auto bnd = brute_boundary(g, targets);
        for (std::size_t k = 0; k < widths.size(); ++k) {
            const auto [c, tot] = brute_band(p, g, bnd, widths[k]);
            CHECK(tc.correct[k] == c);
            CHECK(tc.total[k] == tot);
        }
    }
}

TEST_CASE("trimap at width H+W equals global accuracy") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 10; ++n) {
        const int H = uniform_int(rng, 6, 50);
        const int W = uniform_int(rng, 6, 50);
        LabelMap gt = half_half(H, W);
        const LabelMap pred = noisy_copy(gt, 0.3, 2, rng);
        const TrimapCurve t = trimap_accuracy(pred, gt, TargetClassSet({1}), {H + W});
        REQUIRE(t.accuracy[0].has_value());
        CHECK(*t.accuracy[0] == global_accuracy(pred, gt));
    }
}

TEST_CASE("trimap without boundaries is undefined rather than zero") {
    const LabelMap m(PixelGrid(6, 6), 0);
    const TrimapCurve t = trimap_accuracy(m, m, TargetClassSet({1}), {1, 4});
    CHECK_FALSE(t.accuracy[0].has_value());
    CHECK_FALSE(t.accuracy[1].has_value());
    CHECK_THROWS_AS(trimap_accuracy(m, m, TargetClassSet({1}), {0}), Error);
}

TEST_CASE("object recall of a partly correct object") {
    LabelMap gt(PixelGrid(6, 6), 0);
    for (int c = 0; c < 5; ++c) {
        gt.at(1, c) = 1;
        gt.at(2, c) = 1;
    }
    LabelMap pred = gt;
    pred.at(1, 0) = 0;
    pred.at(2, 0) = 0;
    pred.at(2, 1) = 2;
    const ObjectRecallReport r = object_recall(pred, gt, TargetClassSet({1}), 1);
    REQUIRE(r.per_bin.size() == 1);
    CHECK(r.per_bin[0] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("object records match a union-find oracle") {
    std::mt19937_64 rng(6);
    for (int n = 0; n < 15; ++n) {
        const LabelMap gt = random_blob_labels(uniform_int(rng, 10, 60), uniform_int(rng, 10, 60), 4, rng, 8);
        const LabelMap pred = noisy_copy(gt, 0.2, 4, rng);
        const TargetClassSet targets({1, 3});
        std::vector<BruteObject> mine;
        for (const ObjectRecord& o : collect_objects(pred, gt, targets)) mine.push_back({o.class_id, o.area, o.correct});
        std::sort(mine.begin(), mine.end());
        CHECK(mine == brute_objects(pred, gt, targets));
    }
}

TEST_CASE("equal-count bins and bin reduction") {
    std::vector<ObjectRecord> objs;
    for (int k = 0; k < 7; ++k) objs.push_back({1, 10 + (k * 37) % 7 * 5, 5});
    const ObjectRecallReport r = bin_objects(objs, 3);
    CHECK(r.bins == 3);
    CHECK(r.bin_counts == std::vector<std::int64_t>{2, 2, 3});
    CHECK(r.bin_max_area[0] <= r.bin_max_area[1]);
    CHECK(r.bin_max_area[1] <= r.bin_max_area[2]);
    CHECK(r.warnings.empty());
    const ObjectRecallReport few = bin_objects({objs[0], objs[1]}, 5);
    CHECK(few.bins == 2);
    CHECK(few.warnings.size() == 1);
}

TEST_CASE("recall ignores predictions outside the objects") {
    std::mt19937_64 rng(7);
    const LabelMap gt = random_blob_labels(40, 40, 3, rng, 5);
    LabelMap pred = noisy_copy(gt, 0.3, 3, rng);
    const TargetClassSet targets({1, 2});
    const ObjectRecallReport a = object_recall(pred, gt, targets, 2);
    for (std::size_t k = 0; k < gt.labels().size(); ++k)
        if (!targets.contains(gt.labels()[k])) pred.labels()[k] = uniform_int(rng, 0, 2);
    const ObjectRecallReport b = object_recall(pred, gt, targets, 2);
    CHECK(a.per_bin == b.per_bin);
}

TEST_CASE("relative recall divides by the baseline") {
    std::vector<ObjectRecord> better{{1, 4, 4}, {1, 100, 90}};
    std::vector<ObjectRecord> base{{1, 4, 2}, {1, 100, 90}};
    ObjectRecallReport a = bin_objects(better, 2);
    attach_relative(a, bin_objects(base, 2));
    CHECK(a.relative == std::vector<double>{2.0, 1.0});
}
