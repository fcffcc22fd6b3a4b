#include "adsamp/core.hpp"

#include <algorithm>
#include <cmath>

namespace adsamp {

namespace {

int nearest_lattice_index(double u, int n) {
    // Relative coordinates such as i / (h - 1) are rarely exact, so a sample
    // halfway between two pixels can land a few ulps to either side.
    // Distances within 1e-9 pixel count as a tie and go to the lower index.
    const double scaled = u * (n - 1);
    int lo = static_cast<int>(std::floor(scaled));
    lo = std::clamp(lo, 0, n - 1);
    if (lo == n - 1) return lo;
    const double d_lo = std::abs(u - static_cast<double>(lo) / (n - 1));
    const double d_hi = std::abs(u - static_cast<double>(lo + 1) / (n - 1));
    constexpr double kTiePixels = 1e-9;
    return d_hi < d_lo - kTiePixels / (n - 1) ? lo + 1 : lo;
}

} // namespace

PixelGrid::PixelGrid(int height, int width) : height_(height), width_(width) {
    if (height < 2 || width < 2) {
        throw Error(ErrorCode::size, "pixel grid must be at least 2x2, got " + std::to_string(height) +
                                         "x" + std::to_string(width));
    }
}

Point PixelGrid::coord_of(int row, int col) const {
    if (row < 0 || row >= height_ || col < 0 || col >= width_) {
        throw Error(ErrorCode::index, "pixel (" + std::to_string(row) + "," + std::to_string(col) +
                                          ") outside " + std::to_string(height_) + "x" +
                                          std::to_string(width_) + " grid");
    }
    return {static_cast<double>(row) / (height_ - 1), static_cast<double>(col) / (width_ - 1)};
}

PixelIndex PixelGrid::nearest_pixel(Point p) const {
    if (std::isnan(p.row) || std::isnan(p.col)) {
        throw Error(ErrorCode::domain, "nearest_pixel: NaN coordinate");
    }
    // Squared distance separates per axis, so each axis is resolved on its own.
    return {nearest_lattice_index(std::clamp(p.row, 0.0, 1.0), height_),
            nearest_lattice_index(std::clamp(p.col, 0.0, 1.0), width_)};
}

ImageBuffer::ImageBuffer(PixelGrid grid, int channels)
    : grid_(grid), channels_(channels) {
    if (channels < 1) throw Error(ErrorCode::size, "image needs at least one channel");
    values_.assign(static_cast<std::size_t>(channels) * grid.size(), 0.0);
}

ImageBuffer::ImageBuffer(PixelGrid grid, int channels, std::vector<double> values)
    : grid_(grid), channels_(channels), values_(std::move(values)) {
    if (channels < 1) throw Error(ErrorCode::size, "image needs at least one channel");
    if (values_.size() != static_cast<std::size_t>(channels) * grid.size()) {
        throw Error(ErrorCode::shape, "image value count does not match C*H*W");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::domain, "image contains non-finite value");
    }
}

LabelMap::LabelMap(PixelGrid grid, ClassId fill, std::optional<ClassId> ignore_id)
    : grid_(grid), labels_(grid.size(), fill), ignore_id_(ignore_id) {
    validate();
}

LabelMap::LabelMap(PixelGrid grid, std::vector<ClassId> labels, std::optional<ClassId> ignore_id)
    : grid_(grid), labels_(std::move(labels)), ignore_id_(ignore_id) {
    if (labels_.size() != grid_.size()) {
        throw Error(ErrorCode::shape, "label count does not match H*W");
    }
    validate();
}

void LabelMap::validate() const {
    if (ignore_id_ && *ignore_id_ < 0) throw Error(ErrorCode::config, "ignore id must be non-negative");
    for (ClassId id : labels_) {
        if (id < 0) throw Error(ErrorCode::domain, "negative class id in label map");
    }
}

ClassId LabelMap::max_class() const {
    ClassId best = -1;
    for (ClassId id : labels_) {
        if (!is_ignored(id)) best = std::max(best, id);
    }
    return best;
}

TargetClassSet::TargetClassSet(std::vector<ClassId> ids, std::optional<ClassId> ignore_id)
    : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    if (ids_.empty()) throw Error(ErrorCode::config, "target class set is empty");
    for (ClassId id : ids_) {
        if (id < 0) throw Error(ErrorCode::config, "negative target class id");
        if (ignore_id && id == *ignore_id) {
            throw Error(ErrorCode::config, "target classes contain the ignore id");
        }
    }
}

bool TargetClassSet::contains(ClassId id) const noexcept {
    return std::binary_search(ids_.begin(), ids_.end(), id);
}

ScoreMap::ScoreMap(int grid_h, int grid_w, int num_classes)
    : grid_h_(grid_h), grid_w_(grid_w), num_classes_(num_classes) {
    if (grid_h < 1 || grid_w < 1 || num_classes < 1) {
        throw Error(ErrorCode::size, "score map dimensions must be positive");
    }
    scores_.assign(static_cast<std::size_t>(num_classes) * grid_h * grid_w, 0.0);
}

ClassId ScoreMap::argmax(int i, int j) const {
    ClassId best = 0;
    double best_score = at(0, i, j);
    for (int k = 1; k < num_classes_; ++k) {
        const double s = at(k, i, j);
        if (s > best_score) {
            best_score = s;
            best = k;
        }
    }
    return best;
}

LabelMap center_crop_square(const LabelMap& labels) {
    const int side = std::min(labels.height(), labels.width());
    const int r0 = (labels.height() - side) / 2;
    const int c0 = (labels.width() - side) / 2;
    LabelMap out(PixelGrid(side, side), 0, labels.ignore_id());
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) out.at(r, c) = labels.at(r0 + r, c0 + c);
    return out;
}

ImageBuffer center_crop_square(const ImageBuffer& image) {
    const int h = image.grid().height();
    const int w = image.grid().width();
    const int side = std::min(h, w);
    const int r0 = (h - side) / 2;
    const int c0 = (w - side) / 2;
    ImageBuffer out(PixelGrid(side, side), image.channels());
    for (int ch = 0; ch < image.channels(); ++ch)
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c) out.at(ch, r, c) = image.at(ch, r0 + r, c0 + c);
    return out;
}

} // namespace adsamp
