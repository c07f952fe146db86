#include "ossi/png.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace ossi {

namespace {

uint32_t crc32(const uint8_t *data, size_t n, uint32_t crc = 0xffffffffu) {
    static uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        init = true;
    }
    for (size_t i = 0; i < n; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return crc;
}

void put_be32(std::vector<uint8_t> &v, uint32_t x) {
    v.push_back(uint8_t(x >> 24));
    v.push_back(uint8_t(x >> 16));
    v.push_back(uint8_t(x >> 8));
    v.push_back(uint8_t(x));
}

void write_chunk(std::ofstream &f, const char type[4],
                 const std::vector<uint8_t> &payload) {
    std::vector<uint8_t> head;
    put_be32(head, uint32_t(payload.size()));
    f.write(reinterpret_cast<const char *>(head.data()), 4);
    std::vector<uint8_t> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    f.write(reinterpret_cast<const char *>(body.data()),
            static_cast<std::streamsize>(body.size()));
    uint32_t crc = crc32(body.data(), body.size()) ^ 0xffffffffu;
    std::vector<uint8_t> tail;
    put_be32(tail, crc);
    f.write(reinterpret_cast<const char *>(tail.data()), 4);
}

// zlib stream with stored (uncompressed) deflate blocks.
std::vector<uint8_t> zlib_store(const std::vector<uint8_t> &raw) {
    std::vector<uint8_t> out;
    out.push_back(0x78);
    out.push_back(0x01);
    size_t pos = 0;
    while (pos < raw.size() || raw.empty()) {
        const size_t n = std::min<size_t>(raw.size() - pos, 65535);
        const bool last = pos + n == raw.size();
        out.push_back(last ? 1 : 0);
        out.push_back(uint8_t(n));
        out.push_back(uint8_t(n >> 8));
        out.push_back(uint8_t(~n));
        out.push_back(uint8_t((~n) >> 8));
        out.insert(out.end(), raw.begin() + pos, raw.begin() + pos + n);
        pos += n;
        if (last) break;
    }
    uint32_t a = 1, b = 0;
    for (uint8_t byte : raw) {
        a = (a + byte) % 65521;
        b = (b + a) % 65521;
    }
    put_be32(out, (b << 16) | a);
    return out;
}

void write_png(const std::string &path, int width, int height, int channels,
               const std::vector<uint8_t> &pixels) {
    if (width <= 0 || height <= 0)
        throw InvalidParameter("png: non-positive dimensions");
    if (pixels.size() != size_t(width) * height * channels)
        throw DimensionMismatch("png: pixel buffer size");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("png: cannot open " + path);
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    f.write(reinterpret_cast<const char *>(sig), 8);

    std::vector<uint8_t> ihdr;
    put_be32(ihdr, uint32_t(width));
    put_be32(ihdr, uint32_t(height));
    ihdr.push_back(8);                              // bit depth
    ihdr.push_back(channels == 1 ? 0 : 2);          // gray / truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    write_chunk(f, "IHDR", ihdr);

    std::vector<uint8_t> raw;
    raw.reserve(size_t(height) * (size_t(width) * channels + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0); // filter: none
        const uint8_t *row = pixels.data() + size_t(y) * width * channels;
        raw.insert(raw.end(), row, row + size_t(width) * channels);
    }
    write_chunk(f, "IDAT", zlib_store(raw));
    write_chunk(f, "IEND", {});
    if (!f) throw std::runtime_error("png: write failed for " + path);
}

// 16-entry viridis anchor table, linearly interpolated.
const float kViridis[16][3] = {
    {0.267f, 0.005f, 0.329f}, {0.283f, 0.131f, 0.449f}, {0.262f, 0.242f, 0.521f},
    {0.220f, 0.343f, 0.549f}, {0.177f, 0.438f, 0.558f}, {0.143f, 0.523f, 0.556f},
    {0.120f, 0.607f, 0.540f}, {0.166f, 0.690f, 0.497f}, {0.288f, 0.758f, 0.428f},
    {0.468f, 0.819f, 0.323f}, {0.678f, 0.864f, 0.190f}, {0.874f, 0.889f, 0.100f},
    {0.993f, 0.906f, 0.144f}, {0.996f, 0.935f, 0.289f}, {0.987f, 0.964f, 0.474f},
    {0.993f, 0.906f, 0.144f}};

void viridis_rgb(double t, uint8_t rgb[3]) {
    t = std::clamp(t, 0.0, 1.0);
    const double x = t * 14.0;
    const int i = std::min(14, int(x));
    const double fr = x - i;
    for (int c = 0; c < 3; ++c) {
        const double v = kViridis[i][c] * (1.0 - fr) + kViridis[i + 1][c] * fr;
        rgb[c] = uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
}

} // namespace

void png_write_gray8(const std::string &path, int width, int height,
                     const std::vector<uint8_t> &pixels) {
    write_png(path, width, height, 1, pixels);
}

void png_write_rgb8(const std::string &path, int width, int height,
                    const std::vector<uint8_t> &rgb) {
    write_png(path, width, height, 3, rgb);
}

void png_write_heatmap(const std::string &path, int width, int height,
                       const std::vector<double> &values, double lo, double hi,
                       bool viridis) {
    if (values.size() != size_t(width) * height)
        throw DimensionMismatch("png_write_heatmap: value count");
    const double span = hi > lo ? hi - lo : 1.0;
    if (viridis) {
        std::vector<uint8_t> rgb(values.size() * 3, 0);
        for (size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) continue;
            viridis_rgb((values[i] - lo) / span, &rgb[3 * i]);
        }
        png_write_rgb8(path, width, height, rgb);
    } else {
        std::vector<uint8_t> gray(values.size(), 0);
        for (size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i])) continue;
            const double t = std::clamp((values[i] - lo) / span, 0.0, 1.0);
            gray[i] = uint8_t(std::lround(t * 255.0));
        }
        png_write_gray8(path, width, height, gray);
    }
}

} // namespace ossi
