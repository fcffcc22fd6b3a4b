#pragma once

#include "adsamp/core.hpp"
#include "adsamp/tensor_solver.hpp"

namespace adsamp {

struct SampledImage {
    ImageBuffer values;       // C x h x w
    SamplingTensor source_tensor;
};

// J_ij = I[phi_ij]: nearest-pixel lookup at every sampling location.
SampledImage sample_image(const ImageBuffer& image, const SamplingTensor& phi);

// Nearest-pixel label lookup; class ids are never blended. The result keeps
// the source ignore id.
LabelMap sample_labels(const LabelMap& labels, const SamplingTensor& phi);

// Align-corners bilinear resize of both channels. Border lines map onto
// border lines, so the covering constraints survive exactly.
SamplingTensor resize_tensor(const SamplingTensor& phi, int new_h, int new_w);

} // namespace adsamp
