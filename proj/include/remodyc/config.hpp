#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "remodyc/ast.hpp"

namespace remodyc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Population {
    std::uint64_t count = 0;
    Identifier stage;
    bool operator==(const Population&) const = default;
};

/// Simulation settings. Lengths and times are SI (m, s).
struct SimulationConfig {
    double deltaTime = 86400.0;
    std::uint64_t steps = 1;
    std::uint64_t seed = 0;
    double worldWidth = 1.0;
    double worldHeight = 1.0;
    double patchSize = 1.0;
    std::vector<Population> populations;

    std::size_t patchColumns() const;
    std::size_t patchRows() const;

    /// Throws ConfigError unless deltaTime > 0, steps >= 1 and the patch
    /// edge divides both world extents.
    void validate() const;

    bool operator==(const SimulationConfig&) const = default;
};

/// Line-based settings file:
///
///     delta_time = 1 day
///     steps = 200
///     seed = 42
///     world_width = 10 km
///     world_height = 10 km
///     patch_size = 1 km
///     populate 20 Egg
///
/// Quantities take a unit from the unit table, bracketed or bare. Blank
/// lines and '#' comments are ignored. Throws ConfigError.
SimulationConfig parseConfig(std::string_view text);

}  // namespace remodyc
