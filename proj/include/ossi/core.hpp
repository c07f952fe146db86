// Shared primitives: error types, seeded RNG streams, deterministic
// parallelism, image-series container, and small hashing/format helpers.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ossi {

using cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string &what, double res)
        : std::runtime_error(what), residual(res) {}
    double residual;
};

struct SolverDiagnostic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complex image series over (x, y, fast time, slow time).
// Storage: x fastest, then y, then fast, then slow, so each (fast, slow)
// frame is a contiguous nx*ny plane.
struct ImageSeries {
    int nx = 0, ny = 0, nc = 0, ts = 0;
    std::vector<cx> data;

    ImageSeries() = default;
    ImageSeries(int nx_, int ny_, int nc_, int ts_)
        : nx(nx_), ny(ny_), nc(nc_), ts(ts_),
          data(static_cast<size_t>(nx_) * ny_ * nc_ * ts_) {}

    size_t size() const { return data.size(); }
    int frames() const { return nc * ts; }
    size_t frame_index(int c, int t) const {
        return static_cast<size_t>(t) * nc + c;
    }
    cx *frame(int c, int t) {
        return data.data() + frame_index(c, t) * static_cast<size_t>(nx) * ny;
    }
    const cx *frame(int c, int t) const {
        return data.data() + frame_index(c, t) * static_cast<size_t>(nx) * ny;
    }
    cx &at(int x, int y, int c, int t) {
        return data[(((static_cast<size_t>(t) * nc + c) * ny + y) * nx) + x];
    }
    const cx &at(int x, int y, int c, int t) const {
        return data[(((static_cast<size_t>(t) * nc + c) * ny + y) * nx) + x];
    }
    bool same_shape(const ImageSeries &o) const {
        return nx == o.nx && ny == o.ny && nc == o.nc && ts == o.ts;
    }
};

// Real-valued map / series helpers (combined magnitudes, parameter maps).
struct RealSeries {
    int nx = 0, ny = 0, ts = 0;
    std::vector<double> data;

    RealSeries() = default;
    RealSeries(int nx_, int ny_, int ts_)
        : nx(nx_), ny(ny_), ts(ts_),
          data(static_cast<size_t>(nx_) * ny_ * ts_) {}

    double &at(int x, int y, int t) {
        return data[((static_cast<size_t>(t) * ny + y) * nx) + x];
    }
    double at(int x, int y, int t) const {
        return data[((static_cast<size_t>(t) * ny + y) * nx) + x];
    }
};

// SplitMix64; used to derive independent substream seeds so that parallel
// scheduling cannot change any result.
uint64_t splitmix64(uint64_t &state);
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Deterministic Gaussian/uniform generator on top of std::mt19937_64.
// std::*_distribution is not used because its mapping is not pinned by the
// standard; the engine sequence is.
class Rng {
  public:
    explicit Rng(uint64_t seed);
    double uniform();                       // [0, 1)
    double normal();                        // standard normal
    cx cnormal();                           // complex, E|z|^2 = 1
    uint64_t integer(uint64_t bound);       // [0, bound)
  private:
    uint64_t next_raw();
    uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Thread count used by parallel_for. Results are identical for any value.
void set_threads(int n);
int get_threads();

// Static chunking over [0, n); fn(begin, end) runs on disjoint ranges.
void parallel_for(size_t n, const std::function<void(size_t, size_t)> &fn);

std::string sha256_hex(const void *data, size_t len);
std::string sha256_file_hex(const std::string &path);

} // namespace ossi
