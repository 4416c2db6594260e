#pragma once
// Shared utilities: error types, deterministic RNG, small vector math.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eskin {

// Error categories map 1:1 to CLI exit codes.
enum class ErrorKind { Config = 2, Data = 3, Numeric = 4 };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorKind::Config, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::Data, msg); }
inline Error numeric_error(const std::string& msg) { return Error(ErrorKind::Numeric, msg); }

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double dist(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Deterministic RNG. We do not use std::uniform_real_distribution /
// std::normal_distribution because their output is implementation-defined;
// datasets must be byte-identical for a given seed on any toolchain.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // splitmix64 warmup so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return next_u64() % n; }

    // standard normal via Box-Muller (pair cached)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0;
        while (u1 <= 1e-300) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

  private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0;
};

// Seed derivation for per-group worker streams.
inline uint64_t mix_seed(uint64_t master, uint64_t stream) {
    uint64_t z = master ^ (0x9e3779b97f4a7c15ULL * (stream + 0x632be59bd9b4e019ULL));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a 64-bit, used for dataset file checksums.
inline uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_hex(uint64_t v);

// Full-precision decimal formatting (round-trips doubles exactly).
std::string format_double(double v);

}  // namespace eskin
