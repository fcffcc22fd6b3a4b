#include "adsamp/upsampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace adsamp {

namespace {

using Wide = __int128;

constexpr std::int64_t kOne = std::int64_t{1} << kSubpixelBits;

// Grid position in fixed point: x along columns, y along rows.
struct Fixed {
    std::int64_t x;
    std::int64_t y;
};

Fixed snap(Point p, const PixelGrid& g) {
    return {std::llround(std::ldexp(p.col * (g.width() - 1), kSubpixelBits)),
            std::llround(std::ldexp(p.row * (g.height() - 1), kSubpixelBits))};
}

// cross(b - a, p - a), exact.
Wide edge_function(const Fixed& a, const Fixed& b, const Fixed& p) {
    return Wide(b.x - a.x) * Wide(p.y - a.y) - Wide(b.y - a.y) * Wide(p.x - a.x);
}

int sign(Wide v) { return (v > 0) - (v < 0); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Orientation of triangle t in the uniform grid, in (x = column, y = row).
// The two triangles of a cell wind in opposite directions.
int expected_orientation(std::int32_t t) { return t % 2 == 0 ? -1 : 1; }

struct Triangle {
    std::array<Fixed, 3> v;
    std::array<int, 3> vertex;  // flat indices into the sampling grid
    Wide area2;
    int orientation;
};

// Nudge direction for points on an edge: +x then +y, flipped on the last
// column / row so the nudged point stays inside the image.
struct Nudge {
    int sx;
    int sy;
};

bool owns_zero_edge(std::int64_t dx, std::int64_t dy, Nudge n) {
    // sign of cross(d, (sx, sy * eps)) for infinitesimal eps
    if (dy != 0) return (dy > 0) == (n.sx < 0);
    return (dx > 0) == (n.sy > 0);
}

std::optional<std::array<double, 3>> inside(const Triangle& t, const Fixed& p, Nudge n) {
    const Wide e[3] = {edge_function(t.v[0], t.v[1], p), edge_function(t.v[1], t.v[2], p),
                       edge_function(t.v[2], t.v[0], p)};
    for (int k = 0; k < 3; ++k) {
        const Fixed& from = t.v[k];
        const Fixed& to = t.v[(k + 1) % 3];
        const Wide value = t.orientation > 0 ? e[k] : -e[k];
        if (value < 0) return std::nullopt;
        if (value == 0) {
            const std::int64_t dx = t.orientation > 0 ? to.x - from.x : from.x - to.x;
            const std::int64_t dy = t.orientation > 0 ? to.y - from.y : from.y - to.y;
            if (!owns_zero_edge(dx, dy, n)) return std::nullopt;
        }
    }
    const double area = static_cast<double>(t.area2);
    return std::array<double, 3>{static_cast<double>(e[1]) / area, static_cast<double>(e[2]) / area,
                                 static_cast<double>(e[0]) / area};
}

struct Vec {
    double x;
    double y;
};

Vec to_pixels(const Fixed& f) { return {std::ldexp(static_cast<double>(f.x), -kSubpixelBits),
                                        std::ldexp(static_cast<double>(f.y), -kSubpixelBits)}; }

// Closest point on segment ab to p, returned as parameter along ab.
double segment_param(Vec a, Vec b, Vec p) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return 0.0;
    return std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
}

double dist2(Vec a, Vec b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

struct NearestHit {
    double dist2 = std::numeric_limits<double>::infinity();
    std::array<double, 3> weights{};
};

NearestHit nearest_on_triangle(const Triangle& t, Vec p) {
    const Vec v[3] = {to_pixels(t.v[0]), to_pixels(t.v[1]), to_pixels(t.v[2])};
    NearestHit hit;
    if (t.area2 == 0) {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (dist2(v[k], p) < dist2(v[best], p)) best = k;
        hit.weights = {0.0, 0.0, 0.0};
        hit.weights[best] = 1.0;
        for (int k = 0; k < 3; ++k) {
            const Vec a = v[k];
            const Vec b = v[(k + 1) % 3];
            const double s = segment_param(a, b, p);
            hit.dist2 = std::min(hit.dist2, dist2({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}, p));
        }
        return hit;
    }
    for (int k = 0; k < 3; ++k) {
        const Vec a = v[k];
        const Vec b = v[(k + 1) % 3];
        const double s = segment_param(a, b, p);
        const double d = dist2({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}, p);
        if (d < hit.dist2) {
            hit.dist2 = d;
            hit.weights = {0.0, 0.0, 0.0};
            hit.weights[k] = 1.0 - s;
            hit.weights[(k + 1) % 3] = s;
        }
    }
    return hit;
}

} // namespace

RasterCoverage::RasterCoverage(PixelGrid grid, int source_h, int source_w)
    : grid_(grid), source_h_(source_h), source_w_(source_w), tri_index_(grid.size(), -1),
      bary_(grid.size(), std::array<double, 3>{0.0, 0.0, 0.0}) {
    if (source_h < 2 || source_w < 2) throw Error(ErrorCode::size, "sampling grid must be at least 2x2");
}

std::array<PixelIndex, 3> RasterCoverage::triangle_vertices(std::int32_t t) const {
    if (t < 0 || t >= triangle_count()) throw Error(ErrorCode::index, "triangle index out of range");
    const int cell = t / 2;
    const int i = cell / (source_w_ - 1);
    const int j = cell % (source_w_ - 1);
    if (t % 2 == 0) return {PixelIndex{i, j}, PixelIndex{i + 1, j}, PixelIndex{i, j + 1}};
    return {PixelIndex{i + 1, j}, PixelIndex{i, j + 1}, PixelIndex{i + 1, j + 1}};
}

RasterCoverage build_coverage(const SamplingTensor& phi, const PixelGrid& out_grid) {
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    const int H = out_grid.height();
    const int W = out_grid.width();
    RasterCoverage cov(out_grid, h, w);
    CoverageDiagnostics& diag = cov.diagnostics_;

    std::vector<Fixed> vertices(static_cast<std::size_t>(h) * w);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) vertices[static_cast<std::size_t>(i) * w + j] = snap(phi.point(i, j), out_grid);

    std::vector<Triangle> triangles(cov.triangle_count());
    for (int t = 0; t < cov.triangle_count(); ++t) {
        const auto corners = cov.triangle_vertices(t);
        Triangle& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            tri.vertex[k] = corners[k].row * w + corners[k].col;
            tri.v[k] = vertices[tri.vertex[k]];
        }
        tri.area2 = edge_function(tri.v[0], tri.v[1], tri.v[2]);
        tri.orientation = sign(tri.area2);
        if (tri.orientation == 0) ++diag.degenerate_triangles;
        else if (tri.orientation != expected_orientation(t)) ++diag.inverted_triangles;
    }

    auto nudge_for = [&](int row, int col) { return Nudge{col == W - 1 ? -1 : 1, row == H - 1 ? -1 : 1}; };

    auto scan = [&](std::int32_t t, bool fill_only) {
        const Triangle& tri = triangles[t];
        const std::int64_t y_min = std::min({tri.v[0].y, tri.v[1].y, tri.v[2].y});
        const std::int64_t y_max = std::max({tri.v[0].y, tri.v[1].y, tri.v[2].y});
        const int row_lo = static_cast<int>(std::max<std::int64_t>(0, ceil_div(y_min, kOne)));
        const int row_hi = static_cast<int>(std::min<std::int64_t>(H - 1, floor_div(y_max, kOne)));
        for (int r = row_lo; r <= row_hi; ++r) {
            const std::int64_t yr = static_cast<std::int64_t>(r) * kOne;
            double x_lo = std::numeric_limits<double>::infinity();
            double x_hi = -x_lo;
            for (int k = 0; k < 3; ++k) {
                const Fixed& a = tri.v[k];
                const Fixed& b = tri.v[(k + 1) % 3];
                if (yr < std::min(a.y, b.y) || yr > std::max(a.y, b.y)) continue;
                if (a.y == b.y) {
                    x_lo = std::min({x_lo, static_cast<double>(a.x), static_cast<double>(b.x)});
                    x_hi = std::max({x_hi, static_cast<double>(a.x), static_cast<double>(b.x)});
                    continue;
                }
                const double x = static_cast<double>(a.x) + static_cast<double>(yr - a.y) *
                                                                static_cast<double>(b.x - a.x) /
                                                                static_cast<double>(b.y - a.y);
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
            }
            if (x_lo > x_hi) continue;
            // One pixel of slack either side; the exact test decides.
            const int col_lo = std::max(0, static_cast<int>(std::floor(std::ldexp(x_lo, -kSubpixelBits))) - 1);
            const int col_hi = std::min(W - 1, static_cast<int>(std::ceil(std::ldexp(x_hi, -kSubpixelBits))) + 1);
            for (int c = col_lo; c <= col_hi; ++c) {
                ++diag.pixels_tested;
                const Fixed p{static_cast<std::int64_t>(c) * kOne, yr};
                const auto weights = inside(tri, p, nudge_for(r, c));
                if (!weights) continue;
                const std::size_t f = cov.flat(r, c);
                if (cov.tri_index_[f] >= 0) {
                    if (!fill_only) ++diag.overlapping_claims;
                    continue;
                }
                cov.tri_index_[f] = t;
                cov.bary_[f] = *weights;
                if (fill_only) ++diag.inverted_fill_pixels;
            }
        }
    };

    for (int t = 0; t < cov.triangle_count(); ++t)
        if (triangles[t].orientation == expected_orientation(t)) scan(t, false);
    if (diag.inverted_triangles > 0) {
        diag.warnings.push_back(std::to_string(diag.inverted_triangles) +
                                " inverted triangle(s); sampling grid folds over itself");
        for (int t = 0; t < cov.triangle_count(); ++t)
            if (triangles[t].orientation == -expected_orientation(t)) scan(t, true);
    }

    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const std::size_t f = cov.flat(r, c);
            if (cov.tri_index_[f] >= 0) continue;
            ++diag.fallback_pixels;
            const Vec p{static_cast<double>(c), static_cast<double>(r)};
            NearestHit best;
            std::int32_t best_t = -1;
            for (int t = 0; t < cov.triangle_count(); ++t) {
                const NearestHit hit = nearest_on_triangle(triangles[t], p);
                if (hit.dist2 < best.dist2) {
                    best = hit;
                    best_t = t;
                }
            }
            cov.tri_index_[f] = best_t;
            cov.bary_[f] = best.weights;
        }
    if (diag.fallback_pixels > 0) {
        diag.warnings.push_back(std::to_string(diag.fallback_pixels) + " pixel(s) assigned to nearest triangle");
    }
    return cov;
}

std::vector<double> upsample_scores(const ScoreMap& scores, const RasterCoverage& coverage) {
    if (scores.grid_h() != coverage.source_h() || scores.grid_w() != coverage.source_w()) {
        throw Error(ErrorCode::shape, "score map grid does not match the coverage's sampling grid");
    }
    const int H = coverage.grid().height();
    const int W = coverage.grid().width();
    const int K = scores.num_classes();
    std::vector<double> out(static_cast<std::size_t>(K) * H * W);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            const auto verts = coverage.triangle_vertices(coverage.triangle_at(r, c));
            const auto& wts = coverage.weights_at(r, c);
            // Written relative to the first vertex so that equal vertex
            // values come back unchanged, bit for bit.
            for (int k = 0; k < K; ++k) {
                const double v0 = scores.at(k, verts[0].row, verts[0].col);
                const double v1 = scores.at(k, verts[1].row, verts[1].col);
                const double v2 = scores.at(k, verts[2].row, verts[2].col);
                out[(static_cast<std::size_t>(k) * H + r) * W + c] = v0 + wts[1] * (v1 - v0) + wts[2] * (v2 - v0);
            }
        }
    return out;
}

LabelMap upsample_labels(const ScoreMap& scores, const RasterCoverage& coverage, std::optional<ClassId> ignore_id) {
    const std::vector<double> blended = upsample_scores(scores, coverage);
    const int H = coverage.grid().height();
    const int W = coverage.grid().width();
    const int K = scores.num_classes();
    LabelMap out(coverage.grid(), 0, ignore_id);
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    for (std::size_t f = 0; f < plane; ++f) {
        ClassId best = 0;
        double best_score = blended[f];
        for (int k = 1; k < K; ++k) {
            if (blended[k * plane + f] > best_score) {
                best_score = blended[k * plane + f];
                best = k;
            }
        }
        out.labels()[f] = best;
    }
    return out;
}

} // namespace adsamp
