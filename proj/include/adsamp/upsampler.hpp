#pragma once

#include "adsamp/core.hpp"
#include "adsamp/tensor_solver.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace adsamp {

// Sub-pixel precision of the rasterizer. Vertex positions phi * (dim - 1)
// are snapped to multiples of 2^-kSubpixelBits pixels; all inside tests are
// then exact integer arithmetic.
inline constexpr int kSubpixelBits = 32;

struct CoverageDiagnostics {
    int inverted_triangles = 0;
    int degenerate_triangles = 0;
    std::int64_t overlapping_claims = 0;  // pixels claimed again by a later triangle
    std::int64_t inverted_fill_pixels = 0;
    std::int64_t fallback_pixels = 0;     // filled by nearest-triangle search
    std::int64_t pixels_tested = 0;       // inside tests performed by the scan converter
    std::vector<std::string> warnings;
};

// Maps every output pixel to the sampling-grid triangle that contains it and
// the barycentric weights of that pixel within the triangle.
//
// Cell (i, j) of the h x w sampling grid is split into triangle 2k with
// vertices (i,j), (i+1,j), (i,j+1) and triangle 2k+1 with vertices
// (i+1,j), (i,j+1), (i+1,j+1), where k = i * (w-1) + j.
class RasterCoverage {
public:
    RasterCoverage(PixelGrid grid, int source_h, int source_w);

    const PixelGrid& grid() const noexcept { return grid_; }
    int source_h() const noexcept { return source_h_; }
    int source_w() const noexcept { return source_w_; }
    int triangle_count() const noexcept { return 2 * (source_h_ - 1) * (source_w_ - 1); }

    std::int32_t triangle_at(int row, int col) const { return tri_index_[flat(row, col)]; }
    const std::array<double, 3>& weights_at(int row, int col) const { return bary_[flat(row, col)]; }

    // Sampling-grid vertices (i, j) of triangle t, in weight order.
    std::array<PixelIndex, 3> triangle_vertices(std::int32_t t) const;

    const CoverageDiagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    friend RasterCoverage build_coverage(const SamplingTensor&, const PixelGrid&);

    std::size_t flat(int row, int col) const { return static_cast<std::size_t>(row) * grid_.width() + col; }

    PixelGrid grid_;
    int source_h_;
    int source_w_;
    std::vector<std::int32_t> tri_index_;
    std::vector<std::array<double, 3>> bary_;
    CoverageDiagnostics diagnostics_;
};

// Scan-converts the sampling-grid triangles into out_grid.
//
// Ownership: a pixel lying exactly on an edge or vertex belongs to the one
// triangle that contains the pixel nudged by an infinitesimal step towards
// +column (then +row); on the last column/row the step direction flips so the
// nudged point stays inside the image. This is the top-left rule extended to
// the image border, and it assigns every pixel of a fold-free mesh exactly
// once. Triangles with reversed orientation only fill pixels nobody else
// claimed; anything still unclaimed goes to the nearest triangle. A
// zero-area nearest triangle puts weight 1 on its nearest vertex.
RasterCoverage build_coverage(const SamplingTensor& phi, const PixelGrid& out_grid);

// K x H x W barycentric blend of the vertex score vectors, evaluated as
// v0 + w1 (v1 - v0) + w2 (v2 - v0).
std::vector<double> upsample_scores(const ScoreMap& scores, const RasterCoverage& coverage);

// Argmax of upsample_scores; ties go to the lowest class id.
LabelMap upsample_labels(const ScoreMap& scores, const RasterCoverage& coverage,
                         std::optional<ClassId> ignore_id = std::nullopt);

} // namespace adsamp
