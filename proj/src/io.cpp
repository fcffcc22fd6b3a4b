#include "adsamp/io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace adsamp {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw Error(ErrorCode::io, "cannot open " + path + ": " + std::strerror(errno));
    return f;
}

// Raw decoded PNG rows (no colour transforms apart from bit-depth unpacking).
struct RawPng {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int color_type = 0;
    int bit_depth = 0;
    std::vector<std::uint8_t> bytes;  // rows packed contiguously
    std::size_t row_bytes = 0;
};

struct PngErrorState {
    char message[256] = {0};
};

extern "C" void png_error_handler(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof state->message, "%s", msg);
    png_longjmp(png, 1);
}

extern "C" void png_warning_handler(png_structp, png_const_charp) {}

// Returns an empty string on success, the libpng message otherwise. No
// object with a destructor lives in this frame across setjmp.
std::string decode_png(std::FILE* file, RawPng* out) {
    PngErrorState state;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
    if (!png) return "out of memory";
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return "out of memory";
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return state.message[0] ? state.message : "decode failure";
    }
    png_init_io(png, file);
    png_read_info(png, info);
    out->width = png_get_image_width(png, info);
    out->height = png_get_image_height(png, info);
    out->color_type = png_get_color_type(png, info);
    out->bit_depth = png_get_bit_depth(png, info);
    if (out->bit_depth < 8) png_set_packing(png);
    if (out->bit_depth == 16) png_set_swap(png);  // host little-endian samples
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    out->row_bytes = png_get_rowbytes(png, info);
    out->bytes.resize(out->row_bytes * out->height);
    for (std::uint32_t r = 0; r < out->height; ++r) {
        png_bytep row = out->bytes.data() + r * out->row_bytes;
        png_read_rows(png, &row, nullptr, 1);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return {};
}

RawPng load_png(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    std::array<unsigned char, 8> sig{};
    if (std::fread(sig.data(), 1, sig.size(), f.get()) != sig.size() || png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
        throw Error(ErrorCode::format, path + " is not a PNG file");
    }
    std::rewind(f.get());
    RawPng raw;
    const std::string err = decode_png(f.get(), &raw);
    if (!err.empty()) throw Error(ErrorCode::format, path + ": " + err);
    return raw;
}

struct PngRows {
    std::uint32_t width;
    std::uint32_t height;
    int color_type;
    int bit_depth;
    const std::vector<png_color>* palette;
    const std::vector<std::uint8_t>* bytes;
    std::size_t row_bytes;
};

std::string encode_png(std::FILE* file, const PngRows& rows) {
    PngErrorState state;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_handler, png_warning_handler);
    if (!png) return "out of memory";
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return "out of memory";
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return state.message[0] ? state.message : "encode failure";
    }
    png_init_io(png, file);
    png_set_IHDR(png, info, rows.width, rows.height, rows.bit_depth, rows.color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (rows.palette) png_set_PLTE(png, info, rows.palette->data(), static_cast<int>(rows.palette->size()));
    png_write_info(png, info);
    for (std::uint32_t r = 0; r < rows.height; ++r) {
        png_const_bytep row = rows.bytes->data() + r * rows.row_bytes;
        png_write_row(png, row);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return {};
}

void save_png(const std::string& path, const PngRows& rows) {
    FilePtr f = open_file(path, "wb");
    const std::string err = encode_png(f.get(), rows);
    if (!err.empty()) throw Error(ErrorCode::io, path + ": " + err);
    if (std::fflush(f.get()) != 0) throw Error(ErrorCode::io, "cannot write " + path);
}

std::vector<png_color> label_palette() {
    std::vector<png_color> palette(256);
    for (int id = 0; id < 256; ++id) {
        // Bit-reversed interleave, the usual segmentation colour map.
        int r = 0, g = 0, b = 0, c = id;
        for (int k = 0; k < 8; ++k) {
            r |= ((c >> 0) & 1) << (7 - k);
            g |= ((c >> 1) & 1) << (7 - k);
            b |= ((c >> 2) & 1) << (7 - k);
            c >>= 3;
        }
        palette[id] = {static_cast<png_byte>(r), static_cast<png_byte>(g), static_cast<png_byte>(b)};
    }
    palette[255] = {224, 224, 192};
    return palette;
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xFF));
}

std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
    std::uint64_t v = 0;
    for (int k = 0; k < bytes; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + k])) << (8 * k);
    return v;
}

} // namespace

ImageBuffer read_image_png(const std::string& path) {
    const RawPng raw = load_png(path);
    if (raw.width < 2 || raw.height < 2) throw Error(ErrorCode::size, path + ": image must be at least 2x2");
    if (raw.bit_depth == 16) throw Error(ErrorCode::format, path + ": only 8-bit images are supported");
    const int h = static_cast<int>(raw.height);
    const int w = static_cast<int>(raw.width);
    if (raw.color_type == PNG_COLOR_TYPE_PALETTE) {
        throw Error(ErrorCode::format, path + ": palette PNGs are label maps; read them with read_label_png");
    }
    int channels = 0;
    switch (raw.color_type) {
    case PNG_COLOR_TYPE_GRAY: channels = 1; break;
    case PNG_COLOR_TYPE_GRAY_ALPHA: channels = 2; break;
    case PNG_COLOR_TYPE_RGB: channels = 3; break;
    case PNG_COLOR_TYPE_RGB_ALPHA: channels = 4; break;
    default: throw Error(ErrorCode::format, path + ": unsupported colour type");
    }
    // Low bit-depth grey is stretched onto the 0..255 scale.
    const double scale = raw.bit_depth < 8 ? 255.0 / ((1 << raw.bit_depth) - 1) : 1.0;
    ImageBuffer image(PixelGrid(h, w), channels);
    for (int r = 0; r < h; ++r) {
        const std::uint8_t* row = raw.bytes.data() + r * raw.row_bytes;
        for (int c = 0; c < w; ++c)
            for (int k = 0; k < channels; ++k) image.at(k, r, c) = row[c * channels + k] * scale;
    }
    return image;
}

void write_image_png(const std::string& path, const ImageBuffer& image) {
    static constexpr int kTypes[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA, PNG_COLOR_TYPE_RGB,
                                     PNG_COLOR_TYPE_RGB_ALPHA};
    const int channels = image.channels();
    if (channels < 1 || channels > 4) throw Error(ErrorCode::config, "PNG images need 1 to 4 channels");
    const int h = image.grid().height();
    const int w = image.grid().width();
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(h) * w * channels);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int k = 0; k < channels; ++k) {
                const double v = image.at(k, r, c);
                if (std::isnan(v)) throw Error(ErrorCode::domain, "image contains NaN");
                bytes[(static_cast<std::size_t>(r) * w + c) * channels + k] =
                    static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
    save_png(path, {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h), kTypes[channels - 1], 8, nullptr,
                    &bytes, static_cast<std::size_t>(w) * channels});
}

LabelMap read_label_png(const std::string& path, std::optional<ClassId> ignore_id) {
    const RawPng raw = load_png(path);
    if (raw.width < 2 || raw.height < 2) throw Error(ErrorCode::size, path + ": label map must be at least 2x2");
    if (raw.color_type != PNG_COLOR_TYPE_PALETTE && raw.color_type != PNG_COLOR_TYPE_GRAY) {
        throw Error(ErrorCode::format, path + ": label PNGs must be single-channel (palette or grey)");
    }
    const int h = static_cast<int>(raw.height);
    const int w = static_cast<int>(raw.width);
    std::vector<ClassId> ids(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        const std::uint8_t* row = raw.bytes.data() + r * raw.row_bytes;
        for (int c = 0; c < w; ++c) {
            ClassId id = row[c];
            if (raw.bit_depth == 16) {
                std::uint16_t v;
                std::memcpy(&v, row + 2 * c, 2);
                id = v;
            }
            ids[static_cast<std::size_t>(r) * w + c] = id;
        }
    }
    return LabelMap(PixelGrid(h, w), std::move(ids), ignore_id);
}

void write_label_png(const std::string& path, const LabelMap& labels) {
    const int h = labels.height();
    const int w = labels.width();
    std::vector<std::uint8_t> bytes(labels.labels().size());
    for (std::size_t k = 0; k < bytes.size(); ++k) {
        const ClassId id = labels.labels()[k];
        if (id < 0 || id > 255) throw Error(ErrorCode::domain, "label id " + std::to_string(id) + " does not fit a PNG");
        bytes[k] = static_cast<std::uint8_t>(id);
    }
    static const std::vector<png_color> palette = label_palette();
    save_png(path, {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h), PNG_COLOR_TYPE_PALETTE, 8, &palette,
                    &bytes, static_cast<std::size_t>(w)});
}

void write_boundary_png(const std::string& path, const BoundaryMap& boundary) {
    const int h = boundary.grid().height();
    const int w = boundary.grid().width();
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    std::vector<std::uint8_t> bytes(row_bytes * h, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (boundary.at(r, c)) bytes[r * row_bytes + c / 8] |= static_cast<std::uint8_t>(0x80 >> (c % 8));
    save_png(path, {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h), PNG_COLOR_TYPE_GRAY, 1, nullptr,
                    &bytes, row_bytes});
}

void write_tensor_smpt(const std::string& path, const SamplingTensor& phi) {
    std::string out = "SMPT";
    put_u16(out, kSmptVersion);
    put_u32(out, static_cast<std::uint32_t>(phi.grid_h()));
    put_u32(out, static_cast<std::uint32_t>(phi.grid_w()));
    for (double v : phi.values()) put_f64(out, v);
    write_text_file(path, out);
}

SamplingTensor read_tensor_smpt(const std::string& path) {
    const std::string in = read_text_file(path);
    constexpr std::size_t kHeader = 4 + 2 + 4 + 4;
    if (in.size() < kHeader || in.compare(0, 4, "SMPT") != 0) throw Error(ErrorCode::format, path + ": not an SMPT file");
    const auto version = static_cast<std::uint16_t>(get_le(in, 4, 2));
    if (version != kSmptVersion) {
        throw Error(ErrorCode::format, path + ": unsupported SMPT version " + std::to_string(version));
    }
    const auto h = get_le(in, 6, 4);
    const auto w = get_le(in, 10, 4);
    if (h < 2 || w < 2 || h > (1u << 15) || w > (1u << 15)) throw Error(ErrorCode::format, path + ": bad tensor size");
    const std::size_t count = 2 * static_cast<std::size_t>(h) * w;
    if (in.size() != kHeader + 8 * count) throw Error(ErrorCode::format, path + ": truncated or oversized SMPT payload");
    std::vector<double> values(count);
    for (std::size_t k = 0; k < count; ++k) values[k] = std::bit_cast<double>(get_le(in, kHeader + 8 * k, 8));
    try {
        return SamplingTensor::from_values(static_cast<int>(h), static_cast<int>(w), std::move(values));
    } catch (const Error& e) {
        throw Error(ErrorCode::format, path + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::io, "cannot read " + path);
    return data;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::io, "cannot write " + path);
}

std::string sha256_file(const std::string& path) {
    const std::string data = read_text_file(path);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::internal, "SHA-256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int k = 0; k < len; ++k) {
        hex.push_back(kHex[digest[k] >> 4]);
        hex.push_back(kHex[digest[k] & 15]);
    }
    return hex;
}

} // namespace adsamp
