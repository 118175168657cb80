#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "remodyc/rng.hpp"

using namespace remodyc;

namespace {

// Reference SplitMix64, written out from the published algorithm.
struct Reference {
    std::uint64_t x;
    std::uint64_t next() {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

std::uint64_t inverseOdd(std::uint64_t a) {
    std::uint64_t x = a;
    for (int i = 0; i < 6; ++i) x *= 2 - a * x;
    return x;
}

std::uint64_t unshift(std::uint64_t y, int k) {
    std::uint64_t x = y;
    for (int i = 0; i < 64 / k + 1; ++i) x = y ^ (x >> k);
    return x;
}

// State that makes the next raw word equal `word`.
std::uint64_t stateBefore(std::uint64_t word) {
    std::uint64_t z = unshift(word, 31);
    z = unshift(z * inverseOdd(0x94d049bb133111ebULL), 27);
    z = unshift(z * inverseOdd(0xbf58476d1ce4e5b9ULL), 30);
    return z - Rng::kGamma;
}

template <class F>
std::vector<double> draw(std::uint64_t seed, int n, F f) {
    Rng rng(seed);
    std::vector<double> xs(n);
    for (auto& x : xs) x = f(rng);
    return xs;
}

double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / xs.size();
}

double variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / (xs.size() - 1);
}

double median(std::vector<double> xs) {
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    return xs[xs.size() / 2];
}

constexpr int kN = 100000;

}  // namespace

TEST_CASE("nextRaw matches the reference") {
    Rng rng(0);
    CHECK(rng.nextRaw() == 0xe220a8397b1dcdafULL);

    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL, ~0ULL}) {
        Reference ref{seed};
        Rng r(seed);
        for (int i = 0; i < 10000; ++i) REQUIRE(r.nextRaw() == ref.next());
    }
    CHECK(Rng(1).nextRaw() != Rng(2).nextRaw());
}

TEST_CASE("same seed gives the same stream") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 10000; ++i) REQUIRE(a.nextRaw() == b.nextRaw());
    CHECK(a == b);
}

TEST_CASE("nextUnit") {
    CHECK(Rng::unitFromWord(0) == 0.0);
    CHECK(Rng::unitFromWord(~0ULL) == std::ldexp(double((1ULL << 53) - 1), -53));
    CHECK(Rng::unitFromWord(~0ULL) < 1.0);
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.nextUnit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("state is seed plus draws times gamma") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) rng.nextRaw();
    CHECK(rng.state() == 77 + 1000 * Rng::kGamma);
    CHECK(Rng::drawsBetween(77, rng.state()) == 1000);
    CHECK(Rng::drawsBetween(rng.state(), rng.state()) == 0);
}

TEST_CASE("state hex round-trip") {
    Rng rng(0);
    CHECK(rng.stateHex() == "0000000000000000");
    rng.nextRaw();
    CHECK(rng.stateHex() == "9e3779b97f4a7c15");
    for (int i = 0; i < 1000; ++i) {
        rng.nextRaw();
        const auto back = Rng::parseStateHex(rng.stateHex());
        REQUIRE(back);
        CHECK(*back == rng.state());
    }
    CHECK_FALSE(Rng::parseStateHex("9E3779B97F4A7C15"));
    CHECK_FALSE(Rng::parseStateHex("123"));
    CHECK_FALSE(Rng::parseStateHex("zz3779b97f4a7c15"));
}

TEST_CASE("uniform") {
    Rng a(3), b(3);
    CHECK(sampleUniform(a, 0.0, 1.0) == b.nextUnit());

    Rng c(3);
    CHECK(sampleUniform(c, 2.5, 2.5) == 2.5);
    CHECK(Rng::drawsBetween(3, c.state()) == 1);

    CHECK_THROWS_AS(sampleUniform(c, 1.0, 0.0), SamplerError);
    CHECK_THROWS_AS(sampleUniform(c, NAN, 0.0), SamplerError);

    const auto xs = draw(11, kN, [](Rng& r) { return sampleUniform(r, 0.0, 1.0); });
    CHECK(std::fabs(mean(xs) - 0.5) <= 0.01);
}

TEST_CASE("normal") {
    Rng a(9);
    CHECK(sampleNormal(a, 4.25, 0.0) == 4.25);
    CHECK(Rng::drawsBetween(9, a.state()) == 2);
    CHECK_THROWS_AS(sampleNormal(a, 0.0, -1.0), SamplerError);

    const auto xs = draw(12, kN, [](Rng& r) { return sampleNormal(r, 0.0, 1.0); });
    CHECK(std::fabs(mean(xs)) <= 0.02);
    CHECK(std::fabs(variance(xs) - 1.0) <= 0.05);
}

TEST_CASE("gamma") {
    const auto xs = draw(13, kN, [](Rng& r) { return sampleGamma(r, 2.0, 3.0); });
    CHECK(std::fabs(mean(xs) - 6.0) <= 0.2);
    CHECK(std::all_of(xs.begin(), xs.end(), [](double x) { return x > 0; }));

    const auto ex = draw(14, kN, [](Rng& r) { return sampleGamma(r, 1.0, 2.5); });
    CHECK(std::fabs(mean(ex) - 2.5) <= 0.05);

    const auto small = draw(15, kN, [](Rng& r) { return sampleGamma(r, 0.5, 2.0); });
    CHECK(std::fabs(mean(small) - 1.0) <= 0.05);
    CHECK(std::all_of(small.begin(), small.end(), [](double x) { return x > 0; }));

    Rng r(0);
    CHECK_THROWS_AS(sampleGamma(r, 0.0, 1.0), SamplerError);
    CHECK_THROWS_AS(sampleGamma(r, 1.0, -1.0), SamplerError);
}

TEST_CASE("log-logistic") {
    // A state whose next draw is exactly one half.
    Rng half(stateBefore(1ULL << 63));
    Rng probe = half;
    REQUIRE(probe.nextUnit() == 0.5);
    CHECK(sampleLogLogistic(half, 2.0, 3.0) == 2.0);

    const auto xs = draw(16, kN, [](Rng& r) { return sampleLogLogistic(r, 2.0, 3.0); });
    CHECK(std::fabs(median(xs) - 2.0) <= 0.05);
    CHECK(std::all_of(xs.begin(), xs.end(), [](double x) { return x > 0; }));

    Rng r(0);
    CHECK_THROWS_AS(sampleLogLogistic(r, 0.0, 1.0), SamplerError);
    CHECK_THROWS_AS(sampleLogLogistic(r, 1.0, 0.0), SamplerError);
}
