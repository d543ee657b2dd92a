#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace kglink {

// Error hierarchy. The CLI maps any of these to a nonzero exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct NotFoundError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// Deterministic RNG. std::mt19937_64 has a standardized output sequence;
// the std::* distributions do not, so all mappings from raw bits to
// bounded ints / reals / normals are done here by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform(std::uint64_t n) { return next_u64() % n; }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    // Box-Muller; one value per call (the twin is discarded for simplicity).
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform_real();
        double u2 = uniform_real();
        while (u1 <= 1e-300) u1 = uniform_real();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

    bool chance(double p) { return uniform_real() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(v.size()))];
    }

private:
    std::mt19937_64 engine_;
};

// FNV-1a over raw bytes; used to fingerprint input files for cache checks.
std::uint64_t fnv1a64(const std::string& bytes);

std::string trim(const std::string& s);

// Renders a value with 4 significant digits ("1963", "0.6667", "5.234").
std::string format_sig4(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace kglink
