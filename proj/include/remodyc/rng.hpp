#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace remodyc {

/// Raised when a sampler's parameters are outside its domain.
class SamplerError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// SplitMix64 stream. The state after n raw draws is seed + n * kGamma
/// (mod 2^64), so it is a pure function of the seed and the draw count.
class Rng {
public:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t nextRaw() {
        std::uint64_t z = (state_ += kGamma);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// 53-bit uniform in [0, 1).
    double nextUnit() { return unitFromWord(nextRaw()); }

    static double unitFromWord(std::uint64_t word) {
        return static_cast<double>(word >> 11) * 0x1.0p-53;
    }

    std::uint64_t state() const { return state_; }
    void setState(std::uint64_t s) { state_ = s; }

    std::string stateHex() const;
    static std::optional<std::uint64_t> parseStateHex(std::string_view hex);

    /// Number of raw draws that take state `from` to state `to`.
    static std::uint64_t drawsBetween(std::uint64_t from, std::uint64_t to);

    bool operator==(const Rng&) const = default;

private:
    std::uint64_t state_;
};

/// low + u * (high - low); one raw draw, even when low == high.
double sampleUniform(Rng& rng, double low, double high);

/// Box-Muller with exactly two raw draws (radius, then angle).
double sampleNormal(Rng& rng, double mean, double sigma);

/// Marsaglia-Tsang; shape < 1 is boosted with one extra uniform.
double sampleGamma(Rng& rng, double shape, double scale);

/// Inverse CDF: scale * (u / (1 - u))^(1 / shape); one raw draw.
double sampleLogLogistic(Rng& rng, double scaleParam, double shapeParam);

}  // namespace remodyc
