#include "meshint/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace meshint {

namespace {

constexpr double kGrazingNz = 1e-3;
constexpr double kZeroLength = 1e-6;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

// Applies the unit-length and camera-facing rules to a decoded normal,
// updating mask and report.
void finalize_normal(NormalMap& nm, std::size_t idx, Eigen::Vector3d n, LoadReport& report) {
    if (!nm.mask[idx]) {
        nm.normals[idx].setZero();
        return;
    }
    const double len = n.norm();
    if (!std::isfinite(len) || len < kZeroLength) {
        nm.mask[idx] = 0;
        nm.normals[idx].setZero();
        ++report.dropped_zero_length;
        return;
    }
    n /= len;
    if (n.z() <= kGrazingNz) {
        nm.mask[idx] = 0;
        nm.normals[idx].setZero();
        ++report.dropped_grazing;
        return;
    }
    nm.normals[idx] = n;
    ++report.foreground;
}

NormalMap load_normal_map_png16(const std::string& path, LoadReport& report) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        fail(path, "not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "PNG decode error");
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_png(png, info, PNG_TRANSFORM_SWAP_ENDIAN, nullptr);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported bit depth (expected 16-bit channels)");
    }
    const bool has_alpha = (color_type == PNG_COLOR_TYPE_RGB_ALPHA);
    if (color_type != PNG_COLOR_TYPE_RGB && !has_alpha) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported color type (expected RGB or RGBA)");
    }

    NormalMap nm(static_cast<int>(width), static_cast<int>(height));
    png_bytepp rows = png_get_rows(png, info);
    const int channels = has_alpha ? 4 : 3;

    for (png_uint_32 y = 0; y < height; ++y) {
        const auto* row = reinterpret_cast<const std::uint16_t*>(rows[y]);
        for (png_uint_32 x = 0; x < width; ++x) {
            const std::uint16_t r = row[x * channels + 0];
            const std::uint16_t g = row[x * channels + 1];
            const std::uint16_t b = row[x * channels + 2];
            const std::uint16_t a = has_alpha ? row[x * channels + 3] : std::uint16_t(65535);
            const std::size_t idx = nm.index(static_cast<int>(x), static_cast<int>(y));
            nm.mask[idx] = (a > 32767) ? 1 : 0;
            const Eigen::Vector3d n(2.0 * r / 65535.0 - 1.0, 2.0 * g / 65535.0 - 1.0,
                                    2.0 * b / 65535.0 - 1.0);
            finalize_normal(nm, idx, n, report);
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return nm;
}

// --- PFM ------------------------------------------------------------------
// Header: "PF" (3 channel) or "Pf" (1 channel), width, height, scale; a
// negative scale marks little-endian payload. Rows are stored bottom-to-top.

struct PfmHeader {
    int width = 0;
    int height = 0;
    int channels = 0;
    bool little_endian = true;
};

PfmHeader read_pfm_header(std::istream& in, const std::string& path) {
    PfmHeader h;
    std::string magic;
    in >> magic;
    if (magic == "PF")
        h.channels = 3;
    else if (magic == "Pf")
        h.channels = 1;
    else
        fail(path, "not a PFM file");
    double scale = 0.0;
    in >> h.width >> h.height >> scale;
    if (!in || h.width <= 0 || h.height <= 0 || scale == 0.0) fail(path, "malformed PFM header");
    h.little_endian = scale < 0.0;
    in.get(); // single whitespace before the binary payload
    return h;
}

std::vector<float> read_pfm_payload(std::istream& in, const PfmHeader& h, const std::string& path) {
    std::vector<float> data(static_cast<std::size_t>(h.width) * h.height * h.channels);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!in) fail(path, "truncated PFM payload");
    if (!h.little_endian) {
        for (float& f : data) {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            u = __builtin_bswap32(u);
            std::memcpy(&f, &u, 4);
        }
    }
    return data;
}

void write_pfm(const std::string& path, int width, int height, int channels,
               const std::vector<float>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << (channels == 3 ? "PF" : "Pf") << "\n" << width << " " << height << "\n-1.0\n";
    // bottom-to-top row order
    for (int y = height - 1; y >= 0; --y) {
        const float* row = data.data() + static_cast<std::size_t>(y) * width * channels;
        out.write(reinterpret_cast<const char*>(row),
                  static_cast<std::streamsize>(sizeof(float) * width * channels));
    }
    if (!out) fail(path, "write failed");
}

NormalMap load_normal_map_pfm(const std::string& path, LoadReport& report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const PfmHeader h = read_pfm_header(in, path);
    if (h.channels != 3) fail(path, "expected a 3-channel PFM normal map");
    const std::vector<float> data = read_pfm_payload(in, h, path);

    NormalMap nm(h.width, h.height);
    for (int y = 0; y < h.height; ++y) {
        const int file_row = h.height - 1 - y;
        for (int x = 0; x < h.width; ++x) {
            const float* px = data.data() + (static_cast<std::size_t>(file_row) * h.width + x) * 3;
            const std::size_t idx = nm.index(x, y);
            nm.mask[idx] = 1;
            finalize_normal(nm, idx, Eigen::Vector3d(px[0], px[1], px[2]), report);
        }
    }
    return nm;
}

} // namespace

NormalMap load_normal_map(const std::string& path, NormalEncoding encoding, LoadReport* report) {
    LoadReport local;
    NormalMap nm = (encoding == NormalEncoding::Png16) ? load_normal_map_png16(path, local)
                                                       : load_normal_map_pfm(path, local);
    if (report) *report = local;
    return nm;
}

void save_normal_map_png16(const NormalMap& nm, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }

    std::vector<std::uint16_t> pixels(static_cast<std::size_t>(nm.width) * nm.height * 4);
    std::vector<png_bytep> rows(nm.height);
    for (int y = 0; y < nm.height; ++y) {
        rows[y] = reinterpret_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * nm.width * 4);
        for (int x = 0; x < nm.width; ++x) {
            std::uint16_t* px = pixels.data() + (static_cast<std::size_t>(y) * nm.width + x) * 4;
            if (nm.mask[nm.index(x, y)]) {
                const Eigen::Vector3d& n = nm.normal(x, y);
                for (int c = 0; c < 3; ++c) {
                    const double q = std::round((n[c] + 1.0) * 65535.0 / 2.0);
                    px[c] = static_cast<std::uint16_t>(std::clamp(q, 0.0, 65535.0));
                }
                px[3] = 65535;
            } else {
                px[0] = px[1] = px[2] = px[3] = 0;
            }
        }
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG encode error");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, nm.width, nm.height, 16, PNG_COLOR_TYPE_RGB_ALPHA,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_SWAP_ENDIAN, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_normal_map_pfm(const NormalMap& nm, const std::string& path) {
    std::vector<float> data(static_cast<std::size_t>(nm.width) * nm.height * 3, 0.0f);
    for (int y = 0; y < nm.height; ++y)
        for (int x = 0; x < nm.width; ++x) {
            const Eigen::Vector3d& n = nm.normal(x, y);
            float* px = data.data() + (static_cast<std::size_t>(y) * nm.width + x) * 3;
            px[0] = static_cast<float>(n.x());
            px[1] = static_cast<float>(n.y());
            px[2] = static_cast<float>(n.z());
        }
    write_pfm(path, nm.width, nm.height, 3, data);
}

DepthMap load_depth_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    const PfmHeader h = read_pfm_header(in, path);
    if (h.channels != 1) fail(path, "expected a 1-channel PFM depth map");
    const std::vector<float> data = read_pfm_payload(in, h, path);

    DepthMap dm(h.width, h.height);
    for (int y = 0; y < h.height; ++y) {
        const int file_row = h.height - 1 - y;
        for (int x = 0; x < h.width; ++x) {
            const float value = data[static_cast<std::size_t>(file_row) * h.width + x];
            const std::size_t idx = dm.index(x, y);
            if (std::isfinite(value)) {
                dm.mask[idx] = 1;
                dm.depth[idx] = value;
            }
        }
    }
    return dm;
}

void save_depth_map(const DepthMap& dm, const std::string& path) {
    std::vector<float> data(static_cast<std::size_t>(dm.width) * dm.height);
    for (int y = 0; y < dm.height; ++y)
        for (int x = 0; x < dm.width; ++x) {
            const std::size_t idx = dm.index(x, y);
            data[idx] = dm.mask[idx] ? static_cast<float>(dm.depth[idx])
                                     : std::numeric_limits<float>::quiet_NaN();
        }
    write_pfm(path, dm.width, dm.height, 1, data);
}

NormalMap gaussian_blur_normals(const NormalMap& nm, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("blur sigma must be positive");

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k)
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));

    const int w = nm.width, h = nm.height;
    std::vector<Eigen::Vector3d> tmp(nm.normals.size(), Eigen::Vector3d::Zero());
    NormalMap out(w, h);
    out.mask = nm.mask;

    // horizontal pass
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!nm.mask[nm.index(x, y)]) continue;
            Eigen::Vector3d acc = Eigen::Vector3d::Zero();
            double wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int xx = x + k;
                if (xx < 0 || xx >= w || !nm.mask[nm.index(xx, y)]) continue;
                acc += kernel[k + radius] * nm.normal(xx, y);
                wsum += kernel[k + radius];
            }
            tmp[nm.index(x, y)] = acc / wsum;
        }

    // vertical pass + renormalization
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = nm.index(x, y);
            if (!nm.mask[idx]) continue;
            Eigen::Vector3d acc = Eigen::Vector3d::Zero();
            double wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int yy = y + k;
                if (yy < 0 || yy >= h || !nm.mask[nm.index(x, yy)]) continue;
                acc += kernel[k + radius] * tmp[nm.index(x, yy)];
                wsum += kernel[k + radius];
            }
            acc /= wsum;
            const double len = acc.norm();
            // opposing normals can cancel; keep the unblurred one then
            out.normals[idx] = (len > 1e-12) ? Eigen::Vector3d(acc / len) : nm.normals[idx];
        }

    return out;
}

} // namespace meshint
