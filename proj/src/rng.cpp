#include "remodyc/rng.hpp"

#include <cmath>
#include <numbers>

#include "remodyc/text.hpp"

namespace remodyc {

std::string Rng::stateHex() const { return formatHex64(state_); }

std::optional<std::uint64_t> Rng::parseStateHex(std::string_view hex) {
    if (hex.size() != 16) return std::nullopt;
    for (char c : hex)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
    return parseInteger<std::uint64_t>(hex, 16);
}

std::uint64_t Rng::drawsBetween(std::uint64_t from, std::uint64_t to) {
    // kGamma is odd, so it has a multiplicative inverse mod 2^64 (Newton).
    std::uint64_t inv = kGamma;
    for (int i = 0; i < 5; ++i) inv *= 2 - kGamma * inv;
    return (to - from) * inv;
}

double sampleUniform(Rng& rng, double low, double high) {
    if (!(low <= high)) throw SamplerError("uniform: lower bound exceeds upper bound");
    const double u = rng.nextUnit();
    return low + u * (high - low);
}

double sampleNormal(Rng& rng, double mean, double sigma) {
    if (!(sigma >= 0.0)) throw SamplerError("normal: sigma must be non-negative");
    const double u1 = rng.nextUnit();
    const double u2 = rng.nextUnit();
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double z = radius * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sigma * z;
}

double sampleGamma(Rng& rng, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw SamplerError("gamma: shape and scale must be positive");
    if (shape < 1.0) {
        const double g = sampleGamma(rng, shape + 1.0, 1.0);
        const double u = 1.0 - rng.nextUnit();  // (0, 1]
        return scale * g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        const double x = sampleNormal(rng, 0.0, 1.0);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.nextUnit();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

double sampleLogLogistic(Rng& rng, double scaleParam, double shapeParam) {
    if (!(scaleParam > 0.0) || !(shapeParam > 0.0))
        throw SamplerError("loglogistic: scale and shape must be positive");
    const double u = rng.nextUnit();
    return scaleParam * std::pow(u / (1.0 - u), 1.0 / shapeParam);
}

}  // namespace remodyc
