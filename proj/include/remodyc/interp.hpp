#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "remodyc/ast.hpp"
#include "remodyc/config.hpp"
#include "remodyc/memory.hpp"
#include "remodyc/typecheck.hpp"

namespace remodyc {

/// The model failed static checking or cannot be instantiated.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(std::string message, std::vector<Diagnostic> diagnostics = {})
        : std::runtime_error(std::move(message)), diagnostics_(std::move(diagnostics)) {}
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// A run-time failure (division by zero, ln of a nonpositive value, bad
/// sampler parameters...). The run stops; completed frames are kept.
class RuntimeAbort : public std::runtime_error {
public:
    RuntimeAbort(std::string message, std::size_t tick, Identifier agent, Address base, SourcePos pos);

    const std::string& message() const { return message_; }
    std::size_t tick() const { return tick_; }
    const Identifier& agent() const { return agent_; }
    Address base() const { return base_; }
    SourcePos pos() const { return pos_; }

private:
    std::string message_;
    std::size_t tick_;
    Identifier agent_;
    Address base_;
    SourcePos pos_;
};

/// Where things live in memory: the world block, the patch grid and the
/// slot offset of every attribute of every agent kind.
struct Layout {
    std::optional<Address> world;
    std::optional<Address> firstPatch;
    std::size_t patchBlock = 0;
    std::size_t columns = 0;
    std::size_t rows = 0;
    double edge = 1.0;
    std::map<Identifier, std::map<Identifier, std::size_t>> slots;

    static Layout forModel(const Model& m, const SimulationConfig& cfg);

    std::optional<std::size_t> slotOf(const Identifier& agent, const Identifier& attr) const;
    /// Base of patch (col, row); patches are laid out row by row.
    Address patchAt(std::size_t col, std::size_t row) const;
    /// (col, row) of the patch containing a point, clamped to the grid.
    std::pair<std::size_t, std::size_t> patchContaining(double x, double y) const;
};

struct ExecutionContext {
    const Model* model = nullptr;
    MemoryImage* memory = nullptr;
    const Layout* layout = nullptr;
    double deltaTime = 86400.0;
    std::size_t tick = 0;

    /// Null while evaluating initializers.
    const AgentDefinition* performerAgent = nullptr;
    Address performer = 0;
    const ActionDefinition* action = nullptr;
    std::map<Identifier, std::optional<double>> utilityCache;

    Identifier performerName() const;
    [[noreturn]] void abort(const std::string& message, SourcePos pos) const;
};

Address getAttributeAddress(const ExecutionContext& ctx, AgentRef agent, const Identifier& attr);

double evalExpression(ExecutionContext& ctx, const Expression& e);

bool evalComparison(ExecutionContext& ctx, const Comparison& c);

void evalAttributeDefinition(ExecutionContext& ctx, const AttributeDefinition& d);

/// The task's action with every placeholder replaced by its binding.
ActionDefinition instantiateTask(const Model& m, const TaskDefinition& t);

/// Heading in [rad] from the performer toward the richest patch of its
/// 3x3 neighbourhood; 0 when its own patch is the richest.
double directionToRichest(const ExecutionContext& ctx, const Identifier& attr);

/// Live animats per stage, every stage of the model listed.
std::map<Identifier, std::size_t> populationCounts(const Model& m, const MemoryImage& memory);

class Simulation {
public:
    /// Checks the model and validates `cfg`; throws ModelError or ConfigError.
    Simulation(const Model& m, SimulationConfig cfg, StorageBackend& backend);

    /// Allocates and initializes every agent, then stores frame 1.
    void initialize();
    /// Runs one tick and stores the next frame.
    void step();
    /// Restores frame t and drops the frames after it.
    void rewind(std::size_t t);

    std::size_t tick() const { return memory_.ticks(); }
    MemoryImage& memory() { return memory_; }
    const MemoryImage& memory() const { return memory_; }
    const Layout& layout() const { return layout_; }
    const SimulationConfig& config() const { return cfg_; }

private:
    struct Birth {
        Identifier stage;
        Address parent;
        std::size_t count;
        bool transition;
    };

    ExecutionContext context() const;
    void initializeBlock(ExecutionContext& ctx, const AgentDefinition& agent, Address base, std::size_t firstSlot);
    void perform(const AgentDefinition& agent, Address base, const ActionDefinition& action,
                 std::vector<Birth>& births, std::map<Address, bool>& ended);
    void applyBirths(const std::vector<Birth>& births);

    const Model* model_;
    SimulationConfig cfg_;
    MemoryImage memory_;
    Layout layout_;
    std::vector<std::pair<const TaskDefinition*, ActionDefinition>> tasks_;
};

struct RunSummary {
    struct Row {
        std::size_t tick;
        Identifier stage;
        std::size_t count;
    };
    std::vector<Row> rows;
    std::size_t finalTick = 0;
    std::optional<RuntimeAbort> abort;

    /// "tick,stage,count" CSV.
    std::string csv() const;
};

/// initialize() then `steps` ticks. A RuntimeAbort ends the run early and
/// is reported in the summary rather than thrown.
RunSummary runSimulation(const Model& m, const SimulationConfig& cfg, StorageBackend& backend);

}  // namespace remodyc
