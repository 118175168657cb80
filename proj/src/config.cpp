#include "remodyc/config.hpp"

#include <cmath>
#include <sstream>

#include "remodyc/text.hpp"

namespace remodyc {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

// "<number> <unit>" or "<number> [<unit>]"; returns the SI value and checks
// the dimension against `expected`.
double quantity(std::size_t line, std::string_view value, const Unit& expected, const char* key) {
    const auto space = value.find_first_of(" \t[");
    const std::string_view number = trim(value.substr(0, space));
    std::string_view unitText = space == std::string_view::npos ? std::string_view{} : trim(value.substr(space));
    if (!unitText.empty() && unitText.front() == '[') {
        if (unitText.back() != ']') fail(line, std::string("unterminated unit for ") + key);
        unitText = unitText.substr(1, unitText.size() - 2);
    }
    const auto v = parseDouble(number);
    if (!v) fail(line, std::string("expected a number for ") + key);
    Unit u;
    try {
        u = parseUnit(unitText);
    } catch (const UnitError& e) {
        fail(line, std::string(key) + ": " + e.what());
    }
    if (!sameDimension(u, expected))
        fail(line, std::string(key) + " expects " + formatUnit(expected) + ", got " + formatUnit(u));
    return toSI(*v, u);
}

std::uint64_t count(std::size_t line, std::string_view value, const char* key) {
    const auto v = parseInteger<std::uint64_t>(trim(value));
    if (!v) fail(line, std::string("expected a non-negative integer for ") + key);
    return *v;
}

}  // namespace

std::size_t SimulationConfig::patchColumns() const {
    return static_cast<std::size_t>(std::ceil(worldWidth / patchSize));
}

std::size_t SimulationConfig::patchRows() const {
    return static_cast<std::size_t>(std::ceil(worldHeight / patchSize));
}

void SimulationConfig::validate() const {
    if (!(deltaTime > 0.0) || !std::isfinite(deltaTime)) throw ConfigError("delta_time must be positive");
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (!(patchSize > 0.0) || !std::isfinite(patchSize)) throw ConfigError("patch_size must be positive");
    if (!(worldWidth > 0.0) || !(worldHeight > 0.0) || !std::isfinite(worldWidth) || !std::isfinite(worldHeight))
        throw ConfigError("world extents must be positive");
    if (std::fmod(worldWidth, patchSize) != 0.0 || std::fmod(worldHeight, patchSize) != 0.0)
        throw ConfigError("patch_size must divide world_width and world_height");
}

SimulationConfig parseConfig(std::string_view text) {
    SimulationConfig cfg;
    const Unit length = Unit::si(SIBaseUnit::m);
    const Unit time = Unit::si(SIBaseUnit::s);

    std::size_t lineNo = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.substr(0, 9) == "populate " || line.substr(0, 9) == "populate\t") {
            std::istringstream in{std::string(line.substr(9))};
            std::string n, stage, extra;
            if (!(in >> n >> stage) || (in >> extra)) fail(lineNo, "expected 'populate <count> <Stage>'");
            cfg.populations.push_back({count(lineNo, n, "populate"), stage});
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(lineNo, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "delta_time")
            cfg.deltaTime = quantity(lineNo, value, time, "delta_time");
        else if (key == "steps")
            cfg.steps = count(lineNo, value, "steps");
        else if (key == "seed")
            cfg.seed = count(lineNo, value, "seed");
        else if (key == "world_width")
            cfg.worldWidth = quantity(lineNo, value, length, "world_width");
        else if (key == "world_height")
            cfg.worldHeight = quantity(lineNo, value, length, "world_height");
        else if (key == "patch_size")
            cfg.patchSize = quantity(lineNo, value, length, "patch_size");
        else
            fail(lineNo, "unknown key '" + std::string(key) + "'");
    }
    cfg.validate();
    return cfg;
}

}  // namespace remodyc
