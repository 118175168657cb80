#include "remodyc/units.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace remodyc {

namespace {

constexpr std::array<std::string_view, kBaseUnitCount> kBaseNames = {
    "kg", "m", "s", "degreeC", "K", "degreeF", "rad", "mol"};

int checkedExponent(long e) {
    if (e > kMaxExponent || e < -kMaxExponent)
        throw UnitError("dimension overflow: exponent " + std::to_string(e) + " exceeds +/-" +
                        std::to_string(kMaxExponent));
    return static_cast<int>(e);
}

Unit named(SIBaseUnit base, double scale) { return {Dimension::of(base), scale}; }

bool isNameChar(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

const Unit* lookupNamed(std::string_view name) {
    for (const auto& n : namedUnits())
        if (n.name == name) return &n.unit;
    return nullptr;
}

}  // namespace

std::string_view baseUnitName(SIBaseUnit u) { return kBaseNames[static_cast<std::size_t>(u)]; }

Dimension Dimension::of(SIBaseUnit u, int exponent) {
    Dimension d;
    d.exps_[static_cast<std::size_t>(u)] = checkedExponent(exponent);
    return d;
}

Dimension Dimension::fromTerms(const std::vector<Term>& terms) {
    Dimension d;
    for (const auto& [base, e] : terms) {
        auto& slot = d.exps_[static_cast<std::size_t>(base)];
        slot = checkedExponent(static_cast<long>(slot) + e);
    }
    return d;
}

bool Dimension::dimensionless() const {
    for (int e : exps_)
        if (e != 0) return false;
    return true;
}

std::vector<Dimension::Term> Dimension::terms() const {
    std::vector<Term> out;
    for (std::size_t i = 0; i < kBaseUnitCount; ++i)
        if (exps_[i] != 0) out.emplace_back(static_cast<SIBaseUnit>(i), exps_[i]);
    return out;
}

Dimension Dimension::operator+(const Dimension& o) const {
    Dimension d;
    for (std::size_t i = 0; i < kBaseUnitCount; ++i)
        d.exps_[i] = checkedExponent(static_cast<long>(exps_[i]) + o.exps_[i]);
    return d;
}

Dimension Dimension::operator-() const { return scaled(-1); }

Dimension Dimension::scaled(int n) const {
    Dimension d;
    for (std::size_t i = 0; i < kBaseUnitCount; ++i)
        d.exps_[i] = checkedExponent(static_cast<long>(exps_[i]) * n);
    return d;
}

Unit mulUnits(const Unit& a, const Unit& b) { return {a.dimension + b.dimension, a.scale * b.scale}; }

// Dividing the scales directly keeps divUnits(a, a) at exactly scale 1.
Unit divUnits(const Unit& a, const Unit& b) { return {a.dimension + (-b.dimension), a.scale / b.scale}; }

Unit invertUnit(const Unit& a) { return {-a.dimension, 1.0 / a.scale}; }

Unit powUnit(const Unit& a, int n) {
    if (n == 0) return Unit::dimensionless();
    return {a.dimension.scaled(n), std::pow(a.scale, n)};
}

const std::vector<NamedUnit>& namedUnits() {
    using B = SIBaseUnit;
    static const std::vector<NamedUnit> table = {
        {"m", named(B::m, 1.0)},
        {"km", named(B::m, 1000.0)},
        {"cm", named(B::m, 0.01)},
        {"mm", named(B::m, 0.001)},
        {"s", named(B::s, 1.0)},
        {"min", named(B::s, 60.0)},
        {"h", named(B::s, 3600.0)},
        {"day", named(B::s, 86400.0)},
        {"kg", named(B::kg, 1.0)},
        {"g", named(B::kg, 1e-3)},
        {"t", named(B::kg, 1e3)},
        {"K", named(B::K, 1.0)},
        {"degreeC", named(B::degreeC, 1.0)},
        {"degreeF", named(B::degreeF, 1.0)},
        {"rad", named(B::rad, 1.0)},
        {"deg", named(B::rad, std::numbers::pi / 180.0)},
        {"mol", named(B::mol, 1.0)},
    };
    return table;
}

// unit   := factor (("/" | "*" | ".") factor)*
// factor := NAME ("^" INT)?
// Once a "/" is seen, every later factor lands in the denominator.
Unit parseUnit(std::string_view text) {
    Unit result = Unit::dimensionless();
    if (text.empty()) return result;

    std::size_t pos = 0;
    bool denominator = false;
    while (true) {
        const std::size_t nameStart = pos;
        while (pos < text.size() && isNameChar(text[pos])) ++pos;
        if (pos == nameStart) {
            if (pos >= text.size()) throw UnitError("expected a unit name at end of unit", pos);
            throw UnitError(std::string("expected a unit name, found '") + text[pos] + "'", pos);
        }
        const std::string_view name = text.substr(nameStart, pos - nameStart);
        const Unit* base = lookupNamed(name);
        if (!base) throw UnitError("unknown unit '" + std::string(name) + "'", nameStart);

        long exponent = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            const std::size_t expStart = pos;
            const char* first = text.data() + pos;
            const char* last = text.data() + text.size();
            auto [ptr, ec] = std::from_chars(first, last, exponent);
            if (ec != std::errc{} || ptr == first)
                throw UnitError("malformed exponent after '^'", expStart);
            pos += static_cast<std::size_t>(ptr - first);
            if (exponent > kMaxExponent || exponent < -kMaxExponent)
                throw UnitError("exponent out of range", expStart);
        }

        Unit factor = powUnit(*base, static_cast<int>(exponent));
        try {
            result = denominator ? divUnits(result, factor) : mulUnits(result, factor);
        } catch (const UnitError& e) {
            throw UnitError(e.what(), nameStart);
        }

        if (pos >= text.size()) break;
        const char sep = text[pos];
        if (sep == '/') {
            denominator = true;
        } else if (sep != '.' && sep != '*') {
            throw UnitError(std::string("unexpected '") + sep + "' in unit", pos);
        }
        ++pos;
    }
    return result;
}

std::string formatUnit(const Unit& u) {
    std::string out = "[";
    bool first = true;
    for (const auto& [base, e] : u.dimension.terms()) {
        if (!first) out += '.';
        first = false;
        out += baseUnitName(base);
        if (e != 1) {
            out += '^';
            out += std::to_string(e);
        }
    }
    out += ']';
    return out;
}

}  // namespace remodyc
