#include "adsamp/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace adsamp {

BoundaryMap::BoundaryMap(PixelGrid grid, std::vector<std::uint8_t> mask)
    : grid_(grid), mask_(std::move(mask)) {
    if (mask_.size() != grid_.size()) throw Error(ErrorCode::shape, "boundary mask does not match grid");
}

std::size_t BoundaryMap::count() const {
    return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](std::uint8_t m) { return m != 0; }));
}

NearestBoundaryField::NearestBoundaryField(int grid_h, int grid_w) : grid_h_(grid_h), grid_w_(grid_w) {
    if (grid_h < 2 || grid_w < 2) throw Error(ErrorCode::size, "boundary field grid must be at least 2x2");
    b_.assign(2 * static_cast<std::size_t>(grid_h) * grid_w, 0.0);
}

NearestBoundaryField NearestBoundaryField::transposed() const {
    NearestBoundaryField t(grid_w_, grid_h_);
    for (int i = 0; i < grid_h_; ++i)
        for (int j = 0; j < grid_w_; ++j) {
            t.at(0, j, i) = at(1, i, j);
            t.at(1, j, i) = at(0, i, j);
        }
    return t;
}

namespace {

using TransitionPredicate = std::function<bool(ClassId, ClassId)>;

BoundaryMap mark_transitions(const LabelMap& labels, const TransitionPredicate& counts) {
    const int h = labels.height();
    const int w = labels.width();
    std::vector<std::uint8_t> mask(labels.grid().size(), 0);
    auto visit = [&](int r0, int c0, int r1, int c1) {
        const ClassId a = labels.at(r0, c0);
        const ClassId b = labels.at(r1, c1);
        if (a == b || labels.is_ignored(a) || labels.is_ignored(b) || !counts(a, b)) return;
        mask[static_cast<std::size_t>(r0) * w + c0] = 1;
        mask[static_cast<std::size_t>(r1) * w + c1] = 1;
    };
    // Each unordered neighbour pair once; both ends get marked.
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (c + 1 < w) visit(r, c, r, c + 1);
            if (r + 1 < h) visit(r, c, r + 1, c);
        }
    return BoundaryMap(labels.grid(), std::move(mask));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
    double dist2 = kInf;
    int row = -1;
    int col = -1;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
}

} // namespace

BoundaryMap extract_boundary(const LabelMap& labels, const TargetClassSet& targets) {
    if (labels.ignore_id()) {
        for (ClassId id : targets.ids()) {
            if (labels.is_ignored(id)) throw Error(ErrorCode::config, "target classes contain the ignore id");
        }
    }
    return mark_transitions(labels, [&](ClassId a, ClassId b) { return targets.contains(a) || targets.contains(b); });
}

BoundaryMap extract_all_class_boundary(const LabelMap& labels) {
    return mark_transitions(labels, [](ClassId, ClassId) { return true; });
}

NearestBoundaryField nearest_boundary_field(const BoundaryMap& bmap, int grid_h, int grid_w) {
    NearestBoundaryField field(grid_h, grid_w);
    const int H = bmap.grid().height();
    const int W = bmap.grid().width();

    std::vector<double> query_row(grid_h), query_col(grid_w);
    for (int i = 0; i < grid_h; ++i) query_row[i] = static_cast<double>(i) / (grid_h - 1);
    for (int j = 0; j < grid_w; ++j) query_col[j] = static_cast<double>(j) / (grid_w - 1);

    if (bmap.empty()) {
        for (int i = 0; i < grid_h; ++i)
            for (int j = 0; j < grid_w; ++j) {
                field.at(0, i, j) = query_row[i];
                field.at(1, i, j) = query_col[j];
            }
        return field;
    }

    std::vector<double> pixel_row(H), pixel_col(W);
    for (int r = 0; r < H; ++r) pixel_row[r] = static_cast<double>(r) / (H - 1);
    for (int c = 0; c < W; ++c) pixel_col[c] = static_cast<double>(c) / (W - 1);

    // Pass 1: per pixel column, nearest boundary row to every query row.
    // nearest_row[i * W + c] == -1 marks a column without boundary pixels.
    std::vector<int> nearest_row(static_cast<std::size_t>(grid_h) * W, -1);
    std::vector<int> rows_in_col;
    for (int c = 0; c < W; ++c) {
        rows_in_col.clear();
        for (int r = 0; r < H; ++r)
            if (bmap.at(r, c)) rows_in_col.push_back(r);
        if (rows_in_col.empty()) continue;
        std::size_t k = 0;
        for (int i = 0; i < grid_h; ++i) {
            const double q = query_row[i];
            while (k + 1 < rows_in_col.size() &&
                   std::abs(q - pixel_row[rows_in_col[k + 1]]) < std::abs(q - pixel_row[rows_in_col[k]])) {
                ++k;
            }
            nearest_row[static_cast<std::size_t>(i) * W + c] = rows_in_col[k];
        }
    }

    // Pass 2: per query row, lower envelope of the column parabolas
    // g_c + (x - x_c)^2, evaluated at the query columns.
    std::vector<int> env(W);
    std::vector<double> breaks(W + 1);
    std::vector<double> g(W);
    for (int i = 0; i < grid_h; ++i) {
        const double q = query_row[i];
        const int* rows = &nearest_row[static_cast<std::size_t>(i) * W];
        for (int c = 0; c < W; ++c) {
            const double d = rows[c] < 0 ? kInf : q - pixel_row[rows[c]];
            g[c] = rows[c] < 0 ? kInf : d * d;
        }

        int k = -1;
        for (int c = 0; c < W; ++c) {
            if (g[c] == kInf) continue;
            if (k < 0) {
                k = 0;
                env[0] = c;
                breaks[0] = -kInf;
                breaks[1] = kInf;
                continue;
            }
            double s = 0.0;
            while (true) {
                const int v = env[k];
                s = ((g[c] + pixel_col[c] * pixel_col[c]) - (g[v] + pixel_col[v] * pixel_col[v])) /
                    (2.0 * (pixel_col[c] - pixel_col[v]));
                if (s > breaks[k]) break;
                --k; // breaks[0] is -inf, so k never drops below 0
            }
            ++k;
            env[k] = c;
            breaks[k] = s;
            breaks[k + 1] = kInf;
        }
        const int env_size = k + 1;

        auto evaluate = [&](int slot, double x) {
            const int c = env[slot];
            const double dr = q - pixel_row[rows[c]];
            const double dc = x - pixel_col[c];
            return Candidate{dr * dr + dc * dc, rows[c], c};
        };

        int slot = 0;
        for (int j = 0; j < grid_w; ++j) {
            const double x = query_col[j];
            while (slot + 1 < env_size && breaks[slot + 1] < x) ++slot;
            Candidate best = evaluate(slot, x);
            if (slot > 0) {
                const Candidate left = evaluate(slot - 1, x);
                if (better(left, best)) best = left;
            }
            if (slot + 1 < env_size) {
                const Candidate right = evaluate(slot + 1, x);
                if (better(right, best)) best = right;
            }
            field.at(0, i, j) = pixel_row[best.row];
            field.at(1, i, j) = pixel_col[best.col];
        }
    }
    return field;
}

} // namespace adsamp

namespace adsamp {

namespace {

// 1D squared distance transform of f (0 on sites, +inf elsewhere), lower
// envelope of parabolas.
void distance_transform_1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v,
                           std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const int p = v[k];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    int slot = 0;
    for (int q = 0; q < n; ++q) {
        while (slot < k && z[slot + 1] < q) ++slot;
        const double d = q - v[slot];
        out[q] = d * d + f[v[slot]];
    }
}

} // namespace

std::vector<double> boundary_distance_pixels(const BoundaryMap& bmap) {
    const int H = bmap.grid().height();
    const int W = bmap.grid().width();
    std::vector<double> d2(static_cast<std::size_t>(H) * W, kInf);
    const int n = std::max(H, W);
    std::vector<double> f, out;
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    for (int c = 0; c < W; ++c) {
        f.assign(H, kInf);
        out.assign(H, kInf);
        for (int r = 0; r < H; ++r)
            if (bmap.at(r, c)) f[r] = 0.0;
        distance_transform_1d(f, out, v, z);
        for (int r = 0; r < H; ++r) d2[static_cast<std::size_t>(r) * W + c] = out[r];
    }
    for (int r = 0; r < H; ++r) {
        f.assign(d2.begin() + static_cast<std::ptrdiff_t>(r) * W, d2.begin() + static_cast<std::ptrdiff_t>(r + 1) * W);
        out.assign(W, kInf);
        distance_transform_1d(f, out, v, z);
        for (int c = 0; c < W; ++c) d2[static_cast<std::size_t>(r) * W + c] = std::sqrt(out[c]);
    }
    return d2;
}

} // namespace adsamp
