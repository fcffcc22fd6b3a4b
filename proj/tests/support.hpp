#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Everything here is brute force on purpose and shares no code with
// the library beyond the public data types.

#include "adsamp/boundary.hpp"
#include "adsamp/core.hpp"
#include "adsamp/metrics.hpp"
#include "adsamp/tensor_solver.hpp"
#include "adsamp/upsampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace testing_support {

using namespace adsamp;

inline double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Label map made of a few random axis-aligned rectangles and discs painted
// over class 0.
inline LabelMap random_blob_labels(int H, int W, int num_classes, std::mt19937_64& rng, int shapes = 4) {
    LabelMap labels(PixelGrid(H, W), 0);
    for (int s = 0; s < shapes; ++s) {
        const ClassId cls = uniform_int(rng, 1, num_classes - 1);
        const double cr = uniform01(rng) * (H - 1);
        const double cc = uniform01(rng) * (W - 1);
        const double radius = 1.0 + uniform01(rng) * std::max(H, W) / 3.0;
        const bool disc = uniform01(rng) < 0.5;
        for (int r = 0; r < H; ++r)
            for (int c = 0; c < W; ++c) {
                const double dr = r - cr;
                const double dc = c - cc;
                const bool in = disc ? dr * dr + dc * dc <= radius * radius
                                     : std::abs(dr) <= radius && std::abs(dc) <= radius * 0.7;
                if (in) labels.at(r, c) = cls;
            }
    }
    return labels;
}

// Per-pixel restatement of the boundary rule.
inline std::vector<std::uint8_t> brute_boundary(const LabelMap& labels, const TargetClassSet& targets) {
    const int H = labels.height();
    const int W = labels.width();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(H) * W, 0);
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const ClassId a = labels.at(r, c);
            if (labels.is_ignored(a)) continue;
            for (int k = 0; k < 4; ++k) {
                const int rr = r + dr[k];
                const int cc = c + dc[k];
                if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
                const ClassId b = labels.at(rr, cc);
                if (b == a || labels.is_ignored(b)) continue;
                if (targets.contains(a) || targets.contains(b)) mask[static_cast<std::size_t>(r) * W + c] = 1;
            }
        }
    return mask;
}

struct BruteNearest {
    std::vector<double> field;   // 2 x h x w, relative coordinates
    std::vector<double> dist2;   // h x w, relative units squared
};

// Exhaustive nearest boundary pixel for each uniform grid location; ties
// resolve to the smallest row, then column (scan order with strict <).
inline BruteNearest brute_nearest_field(const BoundaryMap& bmap, int h, int w) {
    const int H = bmap.grid().height();
    const int W = bmap.grid().width();
    BruteNearest out;
    out.field.assign(2 * static_cast<std::size_t>(h) * w, 0.0);
    out.dist2.assign(static_cast<std::size_t>(h) * w, std::numeric_limits<double>::infinity());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const double qr = static_cast<double>(i) / (h - 1);
            const double qc = static_cast<double>(j) / (w - 1);
            double best = std::numeric_limits<double>::infinity();
            double br = qr;
            double bc = qc;
            for (int r = 0; r < H; ++r)
                for (int c = 0; c < W; ++c) {
                    if (!bmap.at(r, c)) continue;
                    const double pr = static_cast<double>(r) / (H - 1);
                    const double pc = static_cast<double>(c) / (W - 1);
                    const double d = (qr - pr) * (qr - pr) + (qc - pc) * (qc - pc);
                    if (d < best) {
                        best = d;
                        br = pr;
                        bc = pc;
                    }
                }
            out.field[static_cast<std::size_t>(i) * w + j] = br;
            out.field[(static_cast<std::size_t>(h) + i) * w + j] = bc;
            out.dist2[static_cast<std::size_t>(i) * w + j] = best;
        }
    return out;
}

// Random field with entries in [0,1].
inline NearestBoundaryField random_field(int h, int w, std::mt19937_64& rng) {
    NearestBoundaryField b(h, w);
    for (int c = 0; c < 2; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j) b.at(c, i, j) = uniform01(rng);
    return b;
}

// Field derived from a random label map via the boundary extraction path.
inline NearestBoundaryField random_boundary_field(int h, int w, std::mt19937_64& rng) {
    const int H = uniform_int(rng, 8, 48);
    const int W = uniform_int(rng, 8, 48);
    const LabelMap labels = random_blob_labels(H, W, 3, rng, uniform_int(rng, 1, 4));
    return nearest_boundary_field(extract_boundary(labels, TargetClassSet({1, 2})), h, w);
}

// Uniform tensor plus a bounded random displacement of at most `fraction`
// grid spacings per axis. Both triangle kinds keep their orientation while
// (1 - 2f)^2 > 2f (1 + 2f), i.e. f below about 0.18.
inline SamplingTensor random_fold_free_tensor(int h, int w, std::mt19937_64& rng, double fraction = 0.12) {
    std::vector<double> raw(2 * static_cast<std::size_t>(h) * w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            raw[static_cast<std::size_t>(i) * w + j] =
                static_cast<double>(i) / (h - 1) + (2.0 * uniform01(rng) - 1.0) * fraction / (h - 1);
            raw[(static_cast<std::size_t>(h) + i) * w + j] =
                static_cast<double>(j) / (w - 1) + (2.0 * uniform01(rng) - 1.0) * fraction / (w - 1);
        }
    return project_constraints(h, w, raw);
}

// Align-corners bilinear interpolation written from scratch.
inline double bilinear_oracle(const SamplingTensor& phi, int c, int H, int W, int I, int J) {
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    const double y = H == 1 ? 0.0 : static_cast<double>(I) * (h - 1) / (H - 1);
    const double x = W == 1 ? 0.0 : static_cast<double>(J) * (w - 1) / (W - 1);
    const int y0 = std::min(static_cast<int>(std::floor(y)), h - 2);
    const int x0 = std::min(static_cast<int>(std::floor(x)), w - 2);
    const double ty = y - y0;
    const double tx = x - x0;
    const double a = phi.at(c, y0, x0);
    const double b = phi.at(c, y0, x0 + 1);
    const double d = phi.at(c, y0 + 1, x0);
    const double e = phi.at(c, y0 + 1, x0 + 1);
    return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * d + tx * e);
}

// ---------------------------------------------------------------------------
// Point-in-triangle coverage by exhaustive testing inside each triangle's
// bounding box, with symbolic perturbation for pixels on edges.

struct BruteCoverage {
    std::vector<int> claims;                       // proper triangles claiming each pixel
    std::vector<std::int32_t> triangle;            // last claiming triangle
    std::vector<std::array<double, 3>> weights;
};

namespace detail {

using I128 = __int128;

struct FixedPt {
    std::int64_t x;
    std::int64_t y;
};

inline FixedPt snap_vertex(const SamplingTensor& phi, int i, int j, int H, int W) {
    return {std::llround(std::ldexp(phi.at(1, i, j) * (W - 1), kSubpixelBits)),
            std::llround(std::ldexp(phi.at(0, i, j) * (H - 1), kSubpixelBits))};
}

inline I128 cross(const FixedPt& a, const FixedPt& b, const FixedPt& p) {
    return I128(b.x - a.x) * I128(p.y - a.y) - I128(b.y - a.y) * I128(p.x - a.x);
}

// Sign of cross(b - a, p + delta - a) with delta = (sx e, sy e^2), e -> 0+.
inline int perturbed_sign(const FixedPt& a, const FixedPt& b, const FixedPt& p, int sx, int sy) {
    const I128 t0 = cross(a, b, p);
    if (t0 != 0) return t0 > 0 ? 1 : -1;
    const std::int64_t t1 = -(b.y - a.y) * sx;
    if (t1 != 0) return t1 > 0 ? 1 : -1;
    const std::int64_t t2 = (b.x - a.x) * sy;
    return (t2 > 0) - (t2 < 0);
}

} // namespace detail

// Triangle t of cell (i, j), in the documented vertex order.
inline std::array<std::array<int, 2>, 3> cell_triangle(int t, int w) {
    const int cell = t / 2;
    const int i = cell / (w - 1);
    const int j = cell % (w - 1);
    if (t % 2 == 0) return {{{i, j}, {i + 1, j}, {i, j + 1}}};
    return {{{i + 1, j}, {i, j + 1}, {i + 1, j + 1}}};
}

inline BruteCoverage brute_coverage(const SamplingTensor& phi, int H, int W) {
    using namespace detail;
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    const std::int64_t one = std::int64_t{1} << kSubpixelBits;
    BruteCoverage out;
    out.claims.assign(static_cast<std::size_t>(H) * W, 0);
    out.triangle.assign(static_cast<std::size_t>(H) * W, -1);
    out.weights.assign(static_cast<std::size_t>(H) * W, {0.0, 0.0, 0.0});
    const int triangles = 2 * (h - 1) * (w - 1);
    for (int t = 0; t < triangles; ++t) {
        const auto idx = cell_triangle(t, w);
        FixedPt v[3];
        for (int k = 0; k < 3; ++k) v[k] = snap_vertex(phi, idx[k][0], idx[k][1], H, W);
        const I128 area = cross(v[0], v[1], v[2]);
        // Only triangles that wind like their uniform-grid counterpart.
        const int expected = t % 2 == 0 ? -1 : 1;
        if (area == 0 || (area > 0 ? 1 : -1) != expected) continue;
        std::int64_t min_x = std::min({v[0].x, v[1].x, v[2].x});
        std::int64_t max_x = std::max({v[0].x, v[1].x, v[2].x});
        std::int64_t min_y = std::min({v[0].y, v[1].y, v[2].y});
        std::int64_t max_y = std::max({v[0].y, v[1].y, v[2].y});
        const int c0 = std::max<std::int64_t>(0, min_x / one - 1);
        const int c1 = std::min<std::int64_t>(W - 1, max_x / one + 1);
        const int r0 = std::max<std::int64_t>(0, min_y / one - 1);
        const int r1 = std::min<std::int64_t>(H - 1, max_y / one + 1);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c) {
                const FixedPt p{static_cast<std::int64_t>(c) * one, static_cast<std::int64_t>(r) * one};
                const int sx = c == W - 1 ? -1 : 1;
                const int sy = r == H - 1 ? -1 : 1;
                bool in = true;
                for (int k = 0; k < 3 && in; ++k)
                    in = perturbed_sign(v[k], v[(k + 1) % 3], p, sx, sy) == expected;
                if (!in) continue;
                const std::size_t f = static_cast<std::size_t>(r) * W + c;
                ++out.claims[f];
                out.triangle[f] = t;
                const double a = static_cast<double>(area);
                out.weights[f] = {static_cast<double>(cross(v[1], v[2], p)) / a,
                                  static_cast<double>(cross(v[2], v[0], p)) / a,
                                  static_cast<double>(cross(v[0], v[1], p)) / a};
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics oracles.

struct BruteIoU {
    std::vector<std::int64_t> inter;
    std::vector<std::int64_t> uni;
};

inline BruteIoU brute_iou(const LabelMap& pred, const LabelMap& gt, int num_classes) {
    BruteIoU out{std::vector<std::int64_t>(num_classes, 0), std::vector<std::int64_t>(num_classes, 0)};
    for (int k = 0; k < num_classes; ++k)
        for (int r = 0; r < gt.height(); ++r)
            for (int c = 0; c < gt.width(); ++c) {
                if (gt.is_ignored(gt.at(r, c))) continue;
                const bool p = pred.at(r, c) == k;
                const bool g = gt.at(r, c) == k;
                out.inter[k] += p && g;
                out.uni[k] += p || g;
            }
    return out;
}

// Band membership by exhaustive search for a boundary pixel within
// Chebyshev distance k.
inline std::pair<std::int64_t, std::int64_t> brute_band(const LabelMap& pred, const LabelMap& gt,
                                                        const std::vector<std::uint8_t>& boundary, int k) {
    const int H = gt.height();
    const int W = gt.width();
    std::int64_t correct = 0;
    std::int64_t total = 0;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            if (gt.is_ignored(gt.at(r, c))) continue;
            bool near = false;
            for (int rr = 0; rr < H && !near; ++rr)
                for (int cc = 0; cc < W && !near; ++cc)
                    near = boundary[static_cast<std::size_t>(rr) * W + cc] && std::abs(rr - r) <= k &&
                           std::abs(cc - c) <= k;
            if (!near) continue;
            ++total;
            correct += pred.at(r, c) == gt.at(r, c);
        }
    return {correct, total};
}

// Connected components by union-find.
struct BruteObject {
    ClassId cls;
    std::int64_t area;
    std::int64_t correct;
    auto operator<=>(const BruteObject&) const = default;
};

inline std::vector<BruteObject> brute_objects(const LabelMap& pred, const LabelMap& gt, const TargetClassSet& targets) {
    const int H = gt.height();
    const int W = gt.width();
    std::vector<int> parent(static_cast<std::size_t>(H) * W);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto is_obj = [&](int r, int c) { return targets.contains(gt.at(r, c)) && !gt.is_ignored(gt.at(r, c)); };
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            if (!is_obj(r, c)) continue;
            if (c + 1 < W && is_obj(r, c + 1) && gt.at(r, c + 1) == gt.at(r, c))
                parent[find(r * W + c)] = find(r * W + c + 1);
            if (r + 1 < H && is_obj(r + 1, c) && gt.at(r + 1, c) == gt.at(r, c))
                parent[find(r * W + c)] = find((r + 1) * W + c);
        }
    std::vector<BruteObject> acc(static_cast<std::size_t>(H) * W, BruteObject{-1, 0, 0});
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            if (!is_obj(r, c)) continue;
            BruteObject& o = acc[find(r * W + c)];
            o.cls = gt.at(r, c);
            ++o.area;
            o.correct += pred.at(r, c) == gt.at(r, c);
        }
    std::vector<BruteObject> out;
    for (const auto& o : acc)
        if (o.area > 0) out.push_back(o);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace testing_support
