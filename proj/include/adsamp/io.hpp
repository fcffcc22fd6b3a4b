#pragma once

#include "adsamp/boundary.hpp"
#include "adsamp/core.hpp"
#include "adsamp/tensor_solver.hpp"

#include <cstdint>
#include <string>

namespace adsamp {

inline constexpr ClassId kDefaultIgnoreId = 255;

// 8-bit PNG. Gray files load as 1 channel, gray+alpha as 2, colour as 3 or 4.
// Values are kept on the 0..255 scale.
ImageBuffer read_image_png(const std::string& path);
// Channels 1..4; values are rounded and clamped to 0..255.
void write_image_png(const std::string& path, const ImageBuffer& image);

// Single-channel label PNG: palette or grey, pixel value = class id. Bit
// depths below 8 are unpacked; 16-bit grey is accepted as well.
LabelMap read_label_png(const std::string& path, std::optional<ClassId> ignore_id = kDefaultIgnoreId);
// Palette PNG; ids must lie in 0..255.
void write_label_png(const std::string& path, const LabelMap& labels);

// 1-bit grey PNG, white on boundary pixels.
void write_boundary_png(const std::string& path, const BoundaryMap& boundary);

// SMPT: "SMPT", u16 version, u32 h, u32 w, then 2*h*w float64, all
// little-endian, channel-major then row-major.
inline constexpr std::uint16_t kSmptVersion = 1;
void write_tensor_smpt(const std::string& path, const SamplingTensor& phi);
SamplingTensor read_tensor_smpt(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

} // namespace adsamp
