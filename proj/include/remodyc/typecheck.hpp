#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "remodyc/ast.hpp"
#include "remodyc/units.hpp"

namespace remodyc {

struct SimulationConfig;

/// A dimension mismatch or scoping problem found while typing an expression.
class TypeError : public std::runtime_error {
public:
    TypeError(std::string message, SourcePos pos, std::optional<Unit> expected = std::nullopt,
              std::optional<Unit> actual = std::nullopt)
        : std::runtime_error(message),
          message_(std::move(message)),
          pos_(pos),
          expected_(expected),
          actual_(actual) {}

    const std::string& message() const { return message_; }
    SourcePos pos() const { return pos_; }
    const std::optional<Unit>& expected() const { return expected_; }
    const std::optional<Unit>& actual() const { return actual_; }

private:
    std::string message_;
    SourcePos pos_;
    std::optional<Unit> expected_;
    std::optional<Unit> actual_;
};

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string message;
    SourcePos pos;
    std::optional<Unit> expected;
    std::optional<Unit> actual;

    static Diagnostic from(const TypeError& e);
};

/// "path:line:col: error: msg (expected [u1], got [u2])"
std::string renderDiagnostic(const Diagnostic& d, const std::string& path);

bool hasErrors(const std::vector<Diagnostic>& ds);

/// Names visible while typing an expression for one performer.
struct TypeEnv {
    const Model* model = nullptr;
    const AgentDefinition* performer = nullptr;  ///< null: closed expressions only
    std::map<Identifier, Unit> utilities;
    std::map<Identifier, Unit> placeholders;
    Unit deltaTime = Unit::si(SIBaseUnit::s);

    /// Declared unit of an attribute reachable through `ref`, or a TypeError.
    Unit attributeUnit(AgentRef ref, const Identifier& id, SourcePos pos) const;
};

/// Infers the unit of a fully bound expression. Throws TypeError.
Unit inferType(const Expression& e, const TypeEnv& env);

/// Types every definition, utility and lifecycle directive of `a` for the
/// given performer. Utility units are inferred in dependency order and
/// stored into `env.utilities`. Errors are accumulated.
std::vector<Diagnostic> checkAction(const ActionDefinition& a, const AgentDefinition& performer, TypeEnv& env);

/// Units of the placeholders bound by a task, typed in the performer's
/// scope. Binding problems are appended to `diags`.
std::map<Identifier, Unit> bindingUnits(const Model& m, const TaskDefinition& t, std::vector<Diagnostic>& diags);

/// Utility dependency cycles in an action, one diagnostic per cycle.
std::vector<Diagnostic> utilityCycles(const ActionDefinition& a);

/// Whole-model check: tasks, bindings, actions, initializers, and the
/// stage names used by `cfg`'s initial populations (when given).
std::vector<Diagnostic> checkModel(const Model& m, const SimulationConfig* cfg = nullptr);

}  // namespace remodyc
