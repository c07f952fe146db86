#include "ossi/ost.hpp"

#include <cstring>
#include <fstream>

namespace ossi {

namespace {

void put_u32(std::ostream &os, uint32_t v) {
    uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
    os.write(reinterpret_cast<const char *>(b), 4);
}

uint32_t get_u32(std::istream &is) {
    uint8_t b[4];
    is.read(reinterpret_cast<char *>(b), 4);
    return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
           (uint32_t(b[3]) << 24);
}

} // namespace

size_t OstTensor::element_count() const {
    size_t n = 1;
    for (uint32_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
}

void ost_write(const std::string &path, const OstTensor &t) {
    if (t.dims.empty()) throw InvalidParameter("ost_write: no dimensions");
    for (uint32_t d : t.dims)
        if (d == 0) throw InvalidParameter("ost_write: zero-length axis");
    const size_t n = t.element_count();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ost_write: cannot open " + path);
    f.write("OST1", 4);
    const uint8_t version = 1;
    const uint8_t dtype = static_cast<uint8_t>(t.dtype);
    const uint8_t ndim = static_cast<uint8_t>(t.dims.size());
    f.write(reinterpret_cast<const char *>(&version), 1);
    f.write(reinterpret_cast<const char *>(&dtype), 1);
    f.write(reinterpret_cast<const char *>(&ndim), 1);
    for (uint32_t d : t.dims) put_u32(f, d);
    switch (t.dtype) {
    case OstDtype::real_f32: {
        if (t.reals.size() != n) throw DimensionMismatch("ost_write: payload size");
        f.write(reinterpret_cast<const char *>(t.reals.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        break;
    }
    case OstDtype::complex_f32: {
        if (t.complexes.size() != n) throw DimensionMismatch("ost_write: payload size");
        std::vector<float> pairs(2 * n);
        for (size_t i = 0; i < n; ++i) {
            pairs[2 * i] = static_cast<float>(t.complexes[i].real());
            pairs[2 * i + 1] = static_cast<float>(t.complexes[i].imag());
        }
        f.write(reinterpret_cast<const char *>(pairs.data()),
                static_cast<std::streamsize>(pairs.size() * sizeof(float)));
        break;
    }
    case OstDtype::boolean: {
        if (t.bools.size() != n) throw DimensionMismatch("ost_write: payload size");
        f.write(reinterpret_cast<const char *>(t.bools.data()),
                static_cast<std::streamsize>(n));
        break;
    }
    }
    if (!f) throw std::runtime_error("ost_write: write failed for " + path);
}

OstTensor ost_read(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ost_read: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "OST1", 4) != 0)
        throw std::runtime_error("ost_read: bad magic in " + path);
    uint8_t version = 0, dtype = 0, ndim = 0;
    f.read(reinterpret_cast<char *>(&version), 1);
    f.read(reinterpret_cast<char *>(&dtype), 1);
    f.read(reinterpret_cast<char *>(&ndim), 1);
    if (version != 1) throw std::runtime_error("ost_read: unsupported version");
    if (dtype > 2) throw std::runtime_error("ost_read: unknown dtype");
    if (ndim == 0) throw std::runtime_error("ost_read: no dimensions");
    OstTensor t;
    t.dtype = static_cast<OstDtype>(dtype);
    t.dims.resize(ndim);
    for (auto &d : t.dims) {
        d = get_u32(f);
        if (d == 0) throw std::runtime_error("ost_read: zero-length axis");
    }
    const size_t n = t.element_count();
    switch (t.dtype) {
    case OstDtype::real_f32: {
        t.reals.resize(n);
        f.read(reinterpret_cast<char *>(t.reals.data()),
               static_cast<std::streamsize>(n * sizeof(float)));
        break;
    }
    case OstDtype::complex_f32: {
        std::vector<float> pairs(2 * n);
        f.read(reinterpret_cast<char *>(pairs.data()),
               static_cast<std::streamsize>(pairs.size() * sizeof(float)));
        t.complexes.resize(n);
        for (size_t i = 0; i < n; ++i)
            t.complexes[i] = cx(pairs[2 * i], pairs[2 * i + 1]);
        break;
    }
    case OstDtype::boolean: {
        t.bools.resize(n);
        f.read(reinterpret_cast<char *>(t.bools.data()),
               static_cast<std::streamsize>(n));
        break;
    }
    }
    if (!f) throw std::runtime_error("ost_read: truncated payload in " + path);
    return t;
}

void ost_write_series(const std::string &path, const ImageSeries &s) {
    OstTensor t;
    t.dtype = OstDtype::complex_f32;
    t.dims = {uint32_t(s.ts), uint32_t(s.nc), uint32_t(s.ny), uint32_t(s.nx)};
    t.complexes = s.data;
    ost_write(path, t);
}

ImageSeries ost_read_series(const std::string &path) {
    const OstTensor t = ost_read(path);
    if (t.dtype != OstDtype::complex_f32 || t.dims.size() != 4)
        throw std::runtime_error("ost_read_series: expected 4-D complex tensor");
    ImageSeries s(int(t.dims[3]), int(t.dims[2]), int(t.dims[1]), int(t.dims[0]));
    s.data = t.complexes;
    return s;
}

void ost_write_real(const std::string &path, const RealSeries &s) {
    OstTensor t;
    t.dtype = OstDtype::real_f32;
    t.dims = {uint32_t(s.ts), uint32_t(s.ny), uint32_t(s.nx)};
    t.reals.assign(s.data.begin(), s.data.end());
    ost_write(path, t);
}

RealSeries ost_read_real(const std::string &path) {
    const OstTensor t = ost_read(path);
    if (t.dtype != OstDtype::real_f32 || t.dims.size() != 3)
        throw std::runtime_error("ost_read_real: expected 3-D real tensor");
    RealSeries s(int(t.dims[2]), int(t.dims[1]), int(t.dims[0]));
    s.data.assign(t.reals.begin(), t.reals.end());
    return s;
}

} // namespace ossi
