// OST binary tensor container.
//
// Layout (little-endian):
//   magic   "OST1"                4 bytes
//   version u8                    currently 1
//   dtype   u8                    0 = real f32, 1 = complex f32 pairs, 2 = bool u8
//   ndim    u8
//   dims    ndim x u32
//   payload row-major (last listed dim fastest), dtype-sized elements
//
// Axis conventions used by this project are documented per artifact; image
// series are written with dims (slow, fast, y, x).
#pragma once

#include "ossi/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ossi {

enum class OstDtype : uint8_t { real_f32 = 0, complex_f32 = 1, boolean = 2 };

struct OstTensor {
    OstDtype dtype = OstDtype::real_f32;
    std::vector<uint32_t> dims;
    std::vector<float> reals;       // dtype 0
    std::vector<cx> complexes;      // dtype 1, stored as f32 pairs on disk
    std::vector<uint8_t> bools;     // dtype 2

    size_t element_count() const;
};

void ost_write(const std::string &path, const OstTensor &t);
OstTensor ost_read(const std::string &path);

// Convenience wrappers for the common artifacts.
void ost_write_series(const std::string &path, const ImageSeries &s);
ImageSeries ost_read_series(const std::string &path);
void ost_write_real(const std::string &path, const RealSeries &s);
RealSeries ost_read_real(const std::string &path);

} // namespace ossi
