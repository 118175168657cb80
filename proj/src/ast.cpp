#include "remodyc/ast.hpp"

#include <array>

namespace remodyc {

namespace {

constexpr std::array<std::string_view, 12> kBuiltinNames = {
    "cos", "sin", "tan", "exp", "ln", "log", "sqrt", "abs", "floor", "ceiling", "min", "max"};

const AttributeDeclaration& positionSlot(const char* name) {
    static const AttributeDeclaration x{"x", UnitSpec::parse("m"), std::nullopt, {}};
    static const AttributeDeclaration y{"y", UnitSpec::parse("m"), std::nullopt, {}};
    return name[0] == 'x' ? x : y;
}

}  // namespace

UnitSpec UnitSpec::parse(std::string text) {
    Unit u = parseUnit(text);
    return {std::move(text), u};
}

Expression literal(double value, std::optional<std::string> unitText) {
    Literal lit{value, std::nullopt};
    if (unitText) lit.unit = UnitSpec::parse(std::move(*unitText));
    return Expression{std::move(lit), {}};
}

Expression binary(ArithOp op, Expression lhs, Expression rhs) {
    Arithmetics a{op, {}};
    a.args.push_back(std::move(lhs));
    a.args.push_back(std::move(rhs));
    return Expression{std::move(a), {}};
}

Expression negate(Expression e) {
    Arithmetics a{ArithOp::neg, {}};
    a.args.push_back(std::move(e));
    return Expression{std::move(a), {}};
}

std::string_view builtinName(Builtin b) { return kBuiltinNames[static_cast<std::size_t>(b)]; }

std::optional<Builtin> builtinByName(std::string_view name) {
    for (std::size_t i = 0; i < kBuiltinNames.size(); ++i)
        if (kBuiltinNames[i] == name) return static_cast<Builtin>(i);
    return std::nullopt;
}

std::size_t builtinArity(Builtin b) { return (b == Builtin::min || b == Builtin::max) ? 2 : 1; }

Identifier agentName(const AgentDefinition& a) {
    struct {
        Identifier operator()(const WorldDefinition&) const { return kWorldAgent; }
        Identifier operator()(const PatchDefinition&) const { return kPatchAgent; }
        Identifier operator()(const StageDefinition& s) const { return s.name; }
    } v;
    return std::visit(v, a);
}

const std::vector<AttributeDeclaration>& declaredAttributes(const AgentDefinition& a) {
    return std::visit([](const auto& d) -> const std::vector<AttributeDeclaration>& { return d.attributes; },
                      a);
}

std::size_t sizeOfAgent(const AgentDefinition& a) {
    const std::size_t implicit = std::holds_alternative<StageDefinition>(a) ? 2 : 0;
    return implicit + declaredAttributes(a).size();
}

std::vector<AttributeDeclaration> attributeSlots(const AgentDefinition& a) {
    std::vector<AttributeDeclaration> slots;
    slots.reserve(sizeOfAgent(a));
    if (std::holds_alternative<StageDefinition>(a)) {
        slots.push_back(positionSlot("x"));
        slots.push_back(positionSlot("y"));
    }
    const auto& declared = declaredAttributes(a);
    slots.insert(slots.end(), declared.begin(), declared.end());
    return slots;
}

const UtilityDefinition* ActionDefinition::findUtility(const Identifier& id) const {
    for (const auto& u : utilities)
        if (u.identifier == id) return &u;
    return nullptr;
}

std::set<Identifier> placeholdersOf(const ActionDefinition& a) {
    std::set<Identifier> out;
    for (const auto& d : a.definitions)
        if (const auto* p = std::get_if<Placeholder>(&d.variable)) out.insert(p->identifier);
    forEachExpression(a, [&](const Expression& root) {
        forEachNode(root, [&](const Expression& e) {
            if (const auto* p = std::get_if<PlaceholderRef>(&e.node)) out.insert(p->identifier);
        });
    });
    return out;
}

const Binding* TaskDefinition::findBinding(const Identifier& id) const {
    for (const auto& b : bindings)
        if (b.placeholder == id) return &b;
    return nullptr;
}

const AgentDefinition* Model::findAgent(const Identifier& name) const {
    for (const auto& a : agents)
        if (agentName(a) == name) return &a;
    return nullptr;
}

const StageDefinition* Model::findStage(const Identifier& name) const {
    for (const auto& a : agents)
        if (const auto* s = std::get_if<StageDefinition>(&a); s && s->name == name) return s;
    return nullptr;
}

const ActionDefinition* Model::findAction(const Identifier& name) const {
    for (const auto& a : actions)
        if (a.name == name) return &a;
    return nullptr;
}

const WorldDefinition* Model::world() const {
    for (const auto& a : agents)
        if (const auto* w = std::get_if<WorldDefinition>(&a)) return w;
    return nullptr;
}

const PatchDefinition* Model::patch() const {
    for (const auto& a : agents)
        if (const auto* p = std::get_if<PatchDefinition>(&a)) return p;
    return nullptr;
}

std::vector<const StageDefinition*> Model::stages() const {
    std::vector<const StageDefinition*> out;
    for (const auto& a : agents)
        if (const auto* s = std::get_if<StageDefinition>(&a)) out.push_back(s);
    return out;
}

}  // namespace remodyc
