#pragma once

#include "meshint/image.hpp"

#include <string>

namespace meshint {

enum class NormalEncoding { Png16, Pfm };

// Per-load bookkeeping: pixels dropped from the mask are counted, not fatal.
struct LoadReport {
    std::size_t foreground = 0;
    std::size_t dropped_zero_length = 0; // zero or non-finite normal on a foreground pixel
    std::size_t dropped_grazing = 0;     // n_z <= 1e-3 after decoding
};

// 16-bit PNG decode is bit-exact: n_c = 2*v_c/65535 - 1 per channel, then the
// vector is renormalized. The mask comes from the alpha channel (foreground
// where alpha > 32767) or is all-true if absent. PFM values are taken as-is
// and renormalized.
NormalMap load_normal_map(const std::string& path, NormalEncoding encoding,
                          LoadReport* report = nullptr);

// Inverse of the png16 decode on quantized values: v_c = round((n_c+1)*65535/2).
// Background pixels get zero color and zero alpha.
void save_normal_map_png16(const NormalMap& nm, const std::string& path);

void save_normal_map_pfm(const NormalMap& nm, const std::string& path);

// 1-channel little-endian PFM; background pixels are written as NaN and read
// back as background.
DepthMap load_depth_map(const std::string& path);
void save_depth_map(const DepthMap& dm, const std::string& path);

// Mask-aware separable Gaussian: each component is convolved over foreground
// taps only, with the weights renormalized to sum to 1 over the taps actually
// used; the result is renormalized to unit length. The mask is unchanged.
NormalMap gaussian_blur_normals(const NormalMap& nm, double sigma);

} // namespace meshint
