#pragma once

#include "adsamp/core.hpp"

#include <vector>

namespace adsamp {

class BoundaryMap {
public:
    BoundaryMap(PixelGrid grid, std::vector<std::uint8_t> mask);

    const PixelGrid& grid() const noexcept { return grid_; }
    bool at(int row, int col) const { return mask_[static_cast<std::size_t>(row) * grid_.width() + col] != 0; }
    const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

private:
    PixelGrid grid_;
    std::vector<std::uint8_t> mask_;
};

// b(u_ij): per low-res grid location, coordinates of the nearest boundary
// pixel. Stored channel-major (2 x h x w) like a sampling tensor.
class NearestBoundaryField {
public:
    NearestBoundaryField(int grid_h, int grid_w);

    int grid_h() const noexcept { return grid_h_; }
    int grid_w() const noexcept { return grid_w_; }
    double& at(int c, int i, int j) { return b_[(static_cast<std::size_t>(c) * grid_h_ + i) * grid_w_ + j]; }
    double at(int c, int i, int j) const { return b_[(static_cast<std::size_t>(c) * grid_h_ + i) * grid_w_ + j]; }
    Point point(int i, int j) const { return {at(0, i, j), at(1, i, j)}; }
    const std::vector<double>& values() const noexcept { return b_; }

    // Swap rows/columns and the two coordinate channels.
    NearestBoundaryField transposed() const;

private:
    int grid_h_;
    int grid_w_;
    std::vector<double> b_;
};

// A pixel is on the boundary iff one of its 4-neighbours carries a different
// label, at least one of the two labels is a target and neither is ignored.
// Both sides of a transition are marked.
BoundaryMap extract_boundary(const LabelMap& labels, const TargetClassSet& targets);

// Same rule with every non-ignored class treated as a target.
BoundaryMap extract_all_class_boundary(const LabelMap& labels);

// Exact Euclidean nearest boundary pixel for every location of the uniform
// h x w tensor, in relative coordinates. Ties go to the smallest row, then
// column. An empty mask yields b = u.
NearestBoundaryField nearest_boundary_field(const BoundaryMap& bmap, int grid_h, int grid_w);

// Euclidean distance in pixels from every pixel to the nearest boundary pixel
// (+inf everywhere for an empty mask). Row-major H x W.
std::vector<double> boundary_distance_pixels(const BoundaryMap& bmap);

} // namespace adsamp
