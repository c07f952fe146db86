// Minimal PNG writer (stored deflate blocks, no external compression
// dependency) plus grayscale/viridis heatmap helpers.
#pragma once

#include "ossi/core.hpp"

#include <string>
#include <vector>

namespace ossi {

void png_write_gray8(const std::string &path, int width, int height,
                     const std::vector<uint8_t> &pixels);
void png_write_rgb8(const std::string &path, int width, int height,
                    const std::vector<uint8_t> &rgb);

// Maps values to [0,1] over [lo, hi] and writes a heatmap. Non-finite values
// render black.
void png_write_heatmap(const std::string &path, int width, int height,
                       const std::vector<double> &values, double lo, double hi,
                       bool viridis = true);

} // namespace ossi
