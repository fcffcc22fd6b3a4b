#pragma once

#include "adsamp/core.hpp"

#include <array>
#include <cstdint>
#include <utility>

namespace adsamp {

// Seeded random scene of filled discs (and optionally regular polygons) on a
// background of class 0. Objects are drawn in generation order, so later
// objects cover earlier ones.
struct SyntheticScene {
    std::uint64_t seed = 0;
    int height = 256;
    int width = 256;
    int min_objects = 3;
    int max_objects = 6;
    double min_radius = 3.0;          // pixels; radii are log-uniform
    double max_radius = 64.0;
    int num_object_classes = 3;       // object classes are 1..num_object_classes
    double polygon_fraction = 0.0;    // probability an object is a regular polygon
    double noise_amplitude = 12.0;    // uniform noise added to the RGB rendering
};

struct GeneratedScene {
    ImageBuffer image;   // 3 x H x W, values 0..255
    LabelMap labels;
};

GeneratedScene generate_scene(const SyntheticScene& spec);

// Base RGB colour used to render a class.
std::array<double, 3> class_color(ClassId id);

} // namespace adsamp
