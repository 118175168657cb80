#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace remodyc {

/// Base units of the dimension algebra, in canonical order.
enum class SIBaseUnit : std::uint8_t { kg, m, s, degreeC, K, degreeF, rad, mol };

inline constexpr std::size_t kBaseUnitCount = 8;
inline constexpr int kMaxExponent = 32;

std::string_view baseUnitName(SIBaseUnit u);

class UnitError : public std::runtime_error {
public:
    UnitError(const std::string& what, std::size_t offset = 0)
        : std::runtime_error(what), offset_(offset) {}

    /// Byte offset into the unit text where the problem was found.
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Exponent vector over the base units. Stored densely, so the canonical
/// (sorted, no duplicates, no zeros) term sequence falls out of the layout
/// and equality is structural.
class Dimension {
public:
    using Term = std::pair<SIBaseUnit, int>;

    Dimension() = default;
    static Dimension of(SIBaseUnit u, int exponent = 1);
    static Dimension fromTerms(const std::vector<Term>& terms);

    int exponent(SIBaseUnit u) const { return exps_[static_cast<std::size_t>(u)]; }
    bool dimensionless() const;

    /// Canonical term sequence: sorted by base order, nonzero exponents only.
    std::vector<Term> terms() const;

    Dimension operator+(const Dimension& o) const;
    Dimension operator-() const;
    Dimension scaled(int n) const;

    bool operator==(const Dimension&) const = default;

private:
    std::array<int, kBaseUnitCount> exps_{};
};

/// A measurement unit: a dimension plus the factor that converts a value
/// expressed in this unit to SI.
struct Unit {
    Dimension dimension;
    double scale = 1.0;

    static Unit dimensionless() { return {}; }
    static Unit si(SIBaseUnit u) { return {Dimension::of(u), 1.0}; }

    bool operator==(const Unit&) const = default;
};

Unit mulUnits(const Unit& a, const Unit& b);
Unit divUnits(const Unit& a, const Unit& b);
Unit powUnit(const Unit& a, int n);
Unit invertUnit(const Unit& a);

inline bool sameDimension(const Unit& a, const Unit& b) { return a.dimension == b.dimension; }

/// Parses the text between the brackets of a unit annotation, e.g. "km/day"
/// or "kg.m/s^2". Whitespace is not allowed inside the text.
Unit parseUnit(std::string_view text);

/// Canonical SI rendering including brackets, e.g. "[m.s^-1]".
std::string formatUnit(const Unit& u);

inline double toSI(double value, const Unit& u) { return value * u.scale; }
inline double fromSI(double value, const Unit& u) { return value / u.scale; }

struct NamedUnit {
    std::string_view name;
    Unit unit;
};

/// The fixed table of unit names accepted by parseUnit.
const std::vector<NamedUnit>& namedUnits();

}  // namespace remodyc
