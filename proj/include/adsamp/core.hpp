#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adsamp {

enum class ErrorCode {
    index,
    domain,
    config,
    shape,
    size,
    convergence,
    io,
    format,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown by the iterative solver when the residual target is not reached.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : Error(ErrorCode::convergence, what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

using ClassId = std::int32_t;

// Relative spatial coordinates. Coordinate 0 runs along rows, coordinate 1
// along columns; both span [0,1] over the image.
struct Point {
    double row = 0.0;
    double col = 0.0;
};

// 0-based pixel index.
struct PixelIndex {
    int row = 0;
    int col = 0;
    friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

// H x W pixel lattice laid over the unit square. Pixel (r, c) (0-based) sits
// at (r / (H-1), c / (W-1)).
class PixelGrid {
public:
    PixelGrid(int height, int width);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(height_) * width_; }

    Point coord_of(int row, int col) const;

    // Pixel whose coordinates are closest to p. Equidistant candidates
    // resolve to the smaller row, then the smaller column.
    PixelIndex nearest_pixel(Point p) const;

    friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

private:
    int height_;
    int width_;
};

// Channel-major C x H x W real image.
class ImageBuffer {
public:
    ImageBuffer(PixelGrid grid, int channels);
    ImageBuffer(PixelGrid grid, int channels, std::vector<double> values);

    const PixelGrid& grid() const noexcept { return grid_; }
    int channels() const noexcept { return channels_; }
    double& at(int c, int row, int col) { return values_[index(c, row, col)]; }
    double at(int c, int row, int col) const { return values_[index(c, row, col)]; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::size_t index(int c, int row, int col) const {
        return (static_cast<std::size_t>(c) * grid_.height() + row) * grid_.width() + col;
    }

    PixelGrid grid_;
    int channels_;
    std::vector<double> values_;
};

class LabelMap {
public:
    LabelMap(PixelGrid grid, ClassId fill = 0, std::optional<ClassId> ignore_id = std::nullopt);
    LabelMap(PixelGrid grid, std::vector<ClassId> labels, std::optional<ClassId> ignore_id = std::nullopt);

    const PixelGrid& grid() const noexcept { return grid_; }
    int height() const noexcept { return grid_.height(); }
    int width() const noexcept { return grid_.width(); }
    ClassId& at(int row, int col) { return labels_[static_cast<std::size_t>(row) * grid_.width() + col]; }
    ClassId at(int row, int col) const { return labels_[static_cast<std::size_t>(row) * grid_.width() + col]; }
    const std::vector<ClassId>& labels() const noexcept { return labels_; }
    std::vector<ClassId>& labels() noexcept { return labels_; }
    std::optional<ClassId> ignore_id() const noexcept { return ignore_id_; }
    bool is_ignored(ClassId id) const noexcept { return ignore_id_ && *ignore_id_ == id; }

    // Largest non-ignored class id, or -1 when every pixel is ignored.
    ClassId max_class() const;

private:
    void validate() const;

    PixelGrid grid_;
    std::vector<ClassId> labels_;
    std::optional<ClassId> ignore_id_;
};

class TargetClassSet {
public:
    explicit TargetClassSet(std::vector<ClassId> ids, std::optional<ClassId> ignore_id = std::nullopt);

    bool contains(ClassId id) const noexcept;
    const std::vector<ClassId>& ids() const noexcept { return ids_; }

private:
    std::vector<ClassId> ids_;
};

// K x h x w per-class scores at the sampling locations.
class ScoreMap {
public:
    ScoreMap(int grid_h, int grid_w, int num_classes);

    int grid_h() const noexcept { return grid_h_; }
    int grid_w() const noexcept { return grid_w_; }
    int num_classes() const noexcept { return num_classes_; }
    double& at(int k, int i, int j) { return scores_[(static_cast<std::size_t>(k) * grid_h_ + i) * grid_w_ + j]; }
    double at(int k, int i, int j) const { return scores_[(static_cast<std::size_t>(k) * grid_h_ + i) * grid_w_ + j]; }
    const std::vector<double>& scores() const noexcept { return scores_; }

    // Highest-scoring class; ties go to the lowest class id.
    ClassId argmax(int i, int j) const;

private:
    int grid_h_;
    int grid_w_;
    int num_classes_;
    std::vector<double> scores_;
};

// Square crop centred in the image, side min(H, W).
LabelMap center_crop_square(const LabelMap& labels);
ImageBuffer center_crop_square(const ImageBuffer& image);

} // namespace adsamp
