#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "remodyc/units.hpp"

namespace remodyc {

using Identifier = std::string;

/// 1-based line/column of a node in its source text. Positions are
/// metadata: they never take part in structural equality of the tree.
struct SourcePos {
    std::uint32_t line = 0;
    std::uint32_t column = 0;

    friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

/// Heap cell with value semantics, for recursive variant members.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(Box other) noexcept {
        ptr_.swap(other.ptr_);
        return *this;
    }
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

/// A unit annotation as written ("km/day") together with its meaning.
/// The text is kept for display and pretty-printing.
struct UnitSpec {
    std::string text;
    Unit unit;

    static UnitSpec parse(std::string text);
    bool operator==(const UnitSpec&) const = default;
};

inline const Identifier kWorldAgent = "World";
inline const Identifier kPatchAgent = "Patch";

/// Qualifier of an attribute reference.
enum class AgentRef : std::uint8_t { my, world, here };

// ---------------------------------------------------------------------------
// Expressions

struct Expression;

struct AttributeVariable {
    AgentRef agent = AgentRef::my;
    Identifier identifier;
    bool operator==(const AttributeVariable&) const = default;
};

struct UtilityVariable {
    Identifier identifier;
    bool operator==(const UtilityVariable&) const = default;
};

struct PlaceholderRef {
    Identifier identifier;
    bool operator==(const PlaceholderRef&) const = default;
};

struct Literal {
    double value = 0.0;
    std::optional<UnitSpec> unit;  ///< absent: a bare dimensionless number
    bool operator==(const Literal&) const = default;
};

struct DeltaTime {
    bool operator==(const DeltaTime&) const = default;
};

enum class ArithOp : std::uint8_t { add, sub, mul, div, pow, neg };

struct Arithmetics {
    ArithOp op = ArithOp::add;
    std::vector<Expression> args;  ///< one operand for neg, two otherwise
    bool operator==(const Arithmetics&) const = default;
};

enum class Builtin : std::uint8_t { cos, sin, tan, exp, ln, log, sqrt, abs, floor, ceiling, min, max };

struct Apply {
    Builtin function = Builtin::cos;
    std::vector<Expression> args;
    bool operator==(const Apply&) const = default;
};

struct UniformDist {
    Box<Expression> low;
    Box<Expression> high;
    bool operator==(const UniformDist&) const = default;
};

struct NormalDist {
    Box<Expression> mean;
    Box<Expression> sigma;
    bool operator==(const NormalDist&) const = default;
};

struct GammaDist {
    Box<Expression> shape;
    Box<Expression> scale;
    bool operator==(const GammaDist&) const = default;
};

struct LogLogisticDist {
    Box<Expression> scaleParam;
    Box<Expression> shapeParam;
    bool operator==(const LogLogisticDist&) const = default;
};

/// Attaches a unit to a dimensionless value ("e as [m]").
struct EnUnit {
    Box<Expression> expr;
    UnitSpec unit;
    bool operator==(const EnUnit&) const = default;
};

/// Strips a unit, yielding a dimensionless value ("e in [h]").
struct DeUnit {
    Box<Expression> expr;
    UnitSpec unit;
    bool operator==(const DeUnit&) const = default;
};

/// Heading toward the neighbouring patch richest in a patch attribute.
struct Direction {
    Identifier attribute;
    bool operator==(const Direction&) const = default;
};

struct Expression {
    using Node = std::variant<AttributeVariable, UtilityVariable, PlaceholderRef, Literal, DeltaTime,
                              Arithmetics, Apply, UniformDist, NormalDist, GammaDist, LogLogisticDist,
                              EnUnit, DeUnit, Direction>;
    Node node;
    SourcePos pos;

    bool operator==(const Expression&) const = default;
};

// Small helpers for building trees in code.
Expression literal(double value, std::optional<std::string> unitText = std::nullopt);
Expression binary(ArithOp op, Expression lhs, Expression rhs);
Expression negate(Expression e);

std::string_view builtinName(Builtin b);
std::optional<Builtin> builtinByName(std::string_view name);
std::size_t builtinArity(Builtin b);

// ---------------------------------------------------------------------------
// Agents

struct AttributeDeclaration {
    Identifier identifier;
    UnitSpec unit;
    std::optional<Expression> initial;
    SourcePos pos;
    bool operator==(const AttributeDeclaration&) const = default;
};

struct WorldDefinition {
    std::vector<AttributeDeclaration> attributes;
    SourcePos pos;
    bool operator==(const WorldDefinition&) const = default;
};

struct PatchDefinition {
    std::vector<AttributeDeclaration> attributes;
    SourcePos pos;
    bool operator==(const PatchDefinition&) const = default;
};

/// A life-history stage of a species. Owns implicit x and y attributes
/// in [m] ahead of the declared ones; `attributes` holds only the declared.
struct StageDefinition {
    Identifier name;
    Identifier species;
    std::vector<AttributeDeclaration> attributes;
    SourcePos pos;
    bool operator==(const StageDefinition&) const = default;
};

using AgentDefinition = std::variant<WorldDefinition, PatchDefinition, StageDefinition>;

Identifier agentName(const AgentDefinition& a);
const std::vector<AttributeDeclaration>& declaredAttributes(const AgentDefinition& a);

/// Number of attribute slots: declared attributes, plus x and y for stages.
std::size_t sizeOfAgent(const AgentDefinition& a);

/// Every slot of the agent in memory order (x, y first for stages).
std::vector<AttributeDeclaration> attributeSlots(const AgentDefinition& a);

// ---------------------------------------------------------------------------
// Actions

enum class Decorator : std::uint8_t { assign, delta, differential };

struct Placeholder {
    Identifier identifier;
    bool operator==(const Placeholder&) const = default;
};

struct AttributeDefinition {
    std::variant<AttributeVariable, Placeholder> variable;
    Decorator decorator = Decorator::assign;
    Expression expression;
    SourcePos pos;
    bool operator==(const AttributeDefinition&) const = default;
};

struct UtilityDefinition {
    Identifier identifier;
    Expression expression;
    SourcePos pos;
    bool operator==(const UtilityDefinition&) const = default;
};

enum class RelOp : std::uint8_t { lt, le, gt, ge };

struct Comparison {
    Expression left;
    RelOp relop = RelOp::lt;
    Expression right;
    bool operator==(const Comparison&) const = default;
};

// Lifecycle directives: hatching, reproduction and death. These sit beside
// the attribute definitions rather than inside the expression language,
// which has no booleans.

struct StageTransition {
    Identifier target;
    Comparison guard;
    bool operator==(const StageTransition&) const = default;
};

struct Spawn {
    Identifier stage;
    Expression count;
    std::optional<Comparison> guard;
    bool operator==(const Spawn&) const = default;
};

struct Die {
    Comparison guard;
    bool operator==(const Die&) const = default;
};

struct LifecycleDirective {
    std::variant<StageTransition, Spawn, Die> directive;
    SourcePos pos;
    bool operator==(const LifecycleDirective&) const = default;
};

struct ActionDefinition {
    Identifier name;
    std::vector<AttributeDefinition> definitions;
    std::vector<UtilityDefinition> utilities;
    std::vector<LifecycleDirective> lifecycle;
    SourcePos pos;

    const UtilityDefinition* findUtility(const Identifier& id) const;
    bool operator==(const ActionDefinition&) const = default;
};

/// All placeholder names used anywhere in the action, utilities included.
std::set<Identifier> placeholdersOf(const ActionDefinition& a);

// ---------------------------------------------------------------------------
// Tasks and models

struct Binding {
    Identifier placeholder;
    Expression expression;
    SourcePos pos;
    bool operator==(const Binding&) const = default;
};

struct TaskDefinition {
    Identifier agent;
    Identifier action;
    std::vector<Binding> bindings;
    SourcePos pos;

    const Binding* findBinding(const Identifier& id) const;
    bool operator==(const TaskDefinition&) const = default;
};

struct Model {
    std::vector<AgentDefinition> agents;
    std::vector<ActionDefinition> actions;
    std::vector<TaskDefinition> tasks;

    const AgentDefinition* findAgent(const Identifier& name) const;
    const StageDefinition* findStage(const Identifier& name) const;
    const ActionDefinition* findAction(const Identifier& name) const;
    const WorldDefinition* world() const;
    const PatchDefinition* patch() const;
    std::vector<const StageDefinition*> stages() const;

    bool operator==(const Model&) const = default;
};

// ---------------------------------------------------------------------------
// Traversal

/// Calls `f` on every node of the tree, parents before children.
template <class F>
void forEachNode(const Expression& e, F&& f);

/// Calls `f` on every top-level expression of an action: definition
/// right-hand sides, utility bodies, lifecycle guards and spawn counts.
template <class F>
void forEachExpression(const ActionDefinition& a, F&& f);

/// Rewrites every node bottom-up: `f` receives a node whose children have
/// already been rewritten and returns its replacement.
template <class F>
Expression transform(Expression e, F&& f);

}  // namespace remodyc

#include "remodyc/ast_traversal.ipp"
