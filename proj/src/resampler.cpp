#include "adsamp/resampler.hpp"

#include <algorithm>
#include <cmath>

namespace adsamp {

namespace {

struct Tap {
    int lo;
    int hi;
    double t;
};

// Source position for output sample k of n over an input axis of m samples.
Tap align_corners_tap(int k, int n, int m) {
    const double pos = static_cast<double>(k) * (m - 1) / (n - 1);
    int lo = static_cast<int>(std::floor(pos));
    if (lo >= m - 1) return {m - 1, m - 1, 0.0};
    lo = std::max(lo, 0);
    return {lo, lo + 1, pos - lo};
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

} // namespace

SampledImage sample_image(const ImageBuffer& image, const SamplingTensor& phi) {
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    ImageBuffer out(PixelGrid(h, w), image.channels());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const PixelIndex p = image.grid().nearest_pixel(phi.point(i, j));
            for (int c = 0; c < image.channels(); ++c) out.at(c, i, j) = image.at(c, p.row, p.col);
        }
    return {std::move(out), phi};
}

LabelMap sample_labels(const LabelMap& labels, const SamplingTensor& phi) {
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    LabelMap out(PixelGrid(h, w), 0, labels.ignore_id());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            const PixelIndex p = labels.grid().nearest_pixel(phi.point(i, j));
            out.at(i, j) = labels.at(p.row, p.col);
        }
    return out;
}

SamplingTensor resize_tensor(const SamplingTensor& phi, int new_h, int new_w) {
    if (new_h < 2 || new_w < 2) {
        throw Error(ErrorCode::size, "resize target must be at least 2x2, got " + std::to_string(new_h) + "x" +
                                         std::to_string(new_w));
    }
    if (new_h == phi.grid_h() && new_w == phi.grid_w()) return phi;
    const int h = phi.grid_h();
    const int w = phi.grid_w();
    std::vector<double> out(2 * static_cast<std::size_t>(new_h) * new_w);
    for (int i = 0; i < new_h; ++i) {
        const Tap ty = align_corners_tap(i, new_h, h);
        for (int j = 0; j < new_w; ++j) {
            const Tap tx = align_corners_tap(j, new_w, w);
            for (int c = 0; c < 2; ++c) {
                const double top = lerp(phi.at(c, ty.lo, tx.lo), phi.at(c, ty.lo, tx.hi), tx.t);
                const double bottom = lerp(phi.at(c, ty.hi, tx.lo), phi.at(c, ty.hi, tx.hi), tx.t);
                out[(static_cast<std::size_t>(c) * new_h + i) * new_w + j] = std::clamp(lerp(top, bottom, ty.t), 0.0, 1.0);
            }
        }
    }
    return SamplingTensor::from_values(new_h, new_w, std::move(out));
}

} // namespace adsamp
