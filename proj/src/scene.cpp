#include "adsamp/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace adsamp {

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(rng() % span);
}

struct Shape {
    ClassId cls;
    double row;
    double col;
    double radius;
    int sides;      // 0 for a disc
    double phase;
};

bool inside(const Shape& s, double r, double c) {
    const double dr = r - s.row;
    const double dc = c - s.col;
    if (s.sides == 0) return dr * dr + dc * dc <= s.radius * s.radius;
    // Regular polygon: distance to centre against the apothem along the
    // direction of the nearest edge normal.
    const double theta = std::atan2(dr, dc) - s.phase;
    const double sector = 2.0 * std::numbers::pi / s.sides;
    const double local = theta - sector * std::floor(theta / sector) - 0.5 * sector;
    const double apothem = s.radius * std::cos(0.5 * sector);
    return std::hypot(dr, dc) * std::cos(local) <= apothem;
}

} // namespace

std::array<double, 3> class_color(ClassId id) {
    static constexpr std::array<std::array<double, 3>, 8> kColors = {{{40, 40, 40},
                                                                       {200, 60, 50},
                                                                       {60, 170, 80},
                                                                       {50, 90, 200},
                                                                       {220, 200, 60},
                                                                       {170, 70, 190},
                                                                       {60, 190, 200},
                                                                       {230, 140, 40}}};
    return kColors[static_cast<std::size_t>(id) % kColors.size()];
}

GeneratedScene generate_scene(const SyntheticScene& spec) {
    if (spec.height < 2 || spec.width < 2) throw Error(ErrorCode::size, "scene canvas must be at least 2x2");
    if (spec.min_objects < 0 || spec.max_objects < spec.min_objects) {
        throw Error(ErrorCode::config, "object count range is empty or negative");
    }
    if (!(spec.min_radius > 0.0) || !(spec.max_radius >= spec.min_radius)) {
        throw Error(ErrorCode::config, "radius range must be positive and ordered");
    }
    if (spec.num_object_classes < 1 || spec.num_object_classes > 254) {
        throw Error(ErrorCode::config, "object class count must be in 1..254");
    }
    if (!(spec.polygon_fraction >= 0.0 && spec.polygon_fraction <= 1.0)) {
        throw Error(ErrorCode::config, "polygon fraction must be in [0, 1]");
    }

    std::mt19937_64 rng(spec.seed);
    const int count = uniform_int(rng, spec.min_objects, spec.max_objects);
    const double log_lo = std::log(spec.min_radius);
    const double log_hi = std::log(spec.max_radius);
    std::vector<Shape> shapes;
    for (int k = 0; k < count; ++k) {
        Shape s;
        s.cls = 1 + uniform_int(rng, 0, spec.num_object_classes - 1);
        s.radius = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
        s.row = unit(rng) * (spec.height - 1);
        s.col = unit(rng) * (spec.width - 1);
        s.sides = unit(rng) < spec.polygon_fraction ? uniform_int(rng, 3, 8) : 0;
        s.phase = unit(rng) * 2.0 * std::numbers::pi;
        shapes.push_back(s);
    }

    LabelMap labels(PixelGrid(spec.height, spec.width), 0);
    for (const Shape& s : shapes) {
        const int r0 = std::max(0, static_cast<int>(std::floor(s.row - s.radius)));
        const int r1 = std::min(spec.height - 1, static_cast<int>(std::ceil(s.row + s.radius)));
        const int c0 = std::max(0, static_cast<int>(std::floor(s.col - s.radius)));
        const int c1 = std::min(spec.width - 1, static_cast<int>(std::ceil(s.col + s.radius)));
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                if (inside(s, r, c)) labels.at(r, c) = s.cls;
    }

    ImageBuffer image(labels.grid(), 3);
    for (int r = 0; r < spec.height; ++r)
        for (int c = 0; c < spec.width; ++c) {
            const auto base = class_color(labels.at(r, c));
            for (int ch = 0; ch < 3; ++ch) {
                const double noise = (2.0 * unit(rng) - 1.0) * spec.noise_amplitude;
                image.at(ch, r, c) = std::clamp(std::round(base[ch] + noise), 0.0, 255.0);
            }
        }
    return {std::move(image), std::move(labels)};
}

} // namespace adsamp
