#include "remodyc/typecheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

#include "remodyc/config.hpp"

namespace remodyc {

namespace {

const Unit kDimensionless = Unit::dimensionless();
const Unit kRadian = Unit::si(SIBaseUnit::rad);
const Unit kSecond = Unit::si(SIBaseUnit::s);

const AgentDefinition& implicitWorld() {
    static const AgentDefinition w = WorldDefinition{};
    return w;
}

std::string qualifiedName(AgentRef ref, const Identifier& id) {
    switch (ref) {
        case AgentRef::my: return "my " + id;
        case AgentRef::world: return "world's " + id;
        case AgentRef::here: return "here's " + id;
    }
    return id;
}

void requireSame(const Unit& expected, const Unit& actual, SourcePos pos, const std::string& what) {
    if (!sameDimension(expected, actual)) throw TypeError(what, pos, expected, actual);
}

/// Integer value of an exponent written as an integer literal, possibly negated.
std::optional<int> integerLiteral(const Expression& e) {
    if (const auto* lit = std::get_if<Literal>(&e.node)) {
        if (lit->unit && !lit->unit->unit.dimension.dimensionless()) return std::nullopt;
        const double v = lit->unit ? toSI(lit->value, lit->unit->unit) : lit->value;
        if (v != std::floor(v) || std::fabs(v) > kMaxExponent) return std::nullopt;
        return static_cast<int>(v);
    }
    if (const auto* a = std::get_if<Arithmetics>(&e.node); a && a->op == ArithOp::neg) {
        if (auto inner = integerLiteral(a->args[0])) return -*inner;
    }
    return std::nullopt;
}

Unit inferApply(const Apply& a, const TypeEnv& env, SourcePos pos) {
    const std::string name(builtinName(a.function));
    const Unit arg = inferType(a.args[0], env);
    switch (a.function) {
        case Builtin::cos:
        case Builtin::sin:
        case Builtin::tan:
            requireSame(kRadian, arg, a.args[0].pos, name + " expects an angle");
            return kDimensionless;
        case Builtin::exp:
        case Builtin::ln:
        case Builtin::log:
            requireSame(kDimensionless, arg, a.args[0].pos, name + " expects a dimensionless argument");
            return kDimensionless;
        case Builtin::sqrt: {
            std::vector<Dimension::Term> halved;
            for (auto [base, e] : arg.dimension.terms()) {
                if (e % 2 != 0) throw TypeError("sqrt needs even exponents in its argument's unit", pos, std::nullopt, arg);
                halved.emplace_back(base, e / 2);
            }
            return {Dimension::fromTerms(halved), std::sqrt(arg.scale)};
        }
        case Builtin::abs:
        case Builtin::floor:
        case Builtin::ceiling: return arg;
        case Builtin::min:
        case Builtin::max: {
            const Unit rhs = inferType(a.args[1], env);
            requireSame(arg, rhs, a.args[1].pos, name + " needs arguments of the same dimension");
            return arg;
        }
    }
    return arg;
}

struct Inferrer {
    const TypeEnv& env;
    SourcePos pos;

    Unit operator()(const AttributeVariable& v) const { return env.attributeUnit(v.agent, v.identifier, pos); }
    Unit operator()(const UtilityVariable& v) const {
        auto it = env.utilities.find(v.identifier);
        if (it == env.utilities.end()) throw TypeError("unknown utility '" + v.identifier + "'", pos);
        return it->second;
    }
    Unit operator()(const PlaceholderRef& p) const {
        auto it = env.placeholders.find(p.identifier);
        if (it == env.placeholders.end()) throw TypeError("unbound placeholder 'the " + p.identifier + "'", pos);
        return it->second;
    }
    Unit operator()(const Literal& l) const { return l.unit ? l.unit->unit : kDimensionless; }
    Unit operator()(const DeltaTime&) const { return env.deltaTime; }
    Unit operator()(const Arithmetics& a) const {
        if (a.op == ArithOp::neg) return inferType(a.args[0], env);
        const Unit lhs = inferType(a.args[0], env);
        if (a.op == ArithOp::pow) {
            const Unit exponent = inferType(a.args[1], env);
            requireSame(kDimensionless, exponent, a.args[1].pos, "exponent must be dimensionless");
            if (lhs.dimension.dimensionless()) return kDimensionless;
            const auto n = integerLiteral(a.args[1]);
            if (!n) throw TypeError("a dimensioned base needs an integer literal exponent", a.args[1].pos);
            return powUnit(lhs, *n);
        }
        const Unit rhs = inferType(a.args[1], env);
        switch (a.op) {
            case ArithOp::add:
                requireSame(lhs, rhs, pos, "operands of '+' have incompatible units");
                return lhs;
            case ArithOp::sub:
                requireSame(lhs, rhs, pos, "operands of '-' have incompatible units");
                return lhs;
            case ArithOp::mul: return mulUnits(lhs, rhs);
            case ArithOp::div: return divUnits(lhs, rhs);
            default: return lhs;
        }
    }
    Unit operator()(const Apply& a) const { return inferApply(a, env, pos); }
    Unit operator()(const UniformDist& d) const {
        const Unit low = inferType(*d.low, env);
        requireSame(low, inferType(*d.high, env), d.high->pos, "uniform bounds have incompatible units");
        return low;
    }
    Unit operator()(const NormalDist& d) const {
        const Unit mean = inferType(*d.mean, env);
        requireSame(mean, inferType(*d.sigma, env), d.sigma->pos, "normal mean and sigma have incompatible units");
        return mean;
    }
    Unit operator()(const GammaDist& d) const {
        requireSame(kDimensionless, inferType(*d.shape, env), d.shape->pos, "gamma shape must be dimensionless");
        return inferType(*d.scale, env);
    }
    Unit operator()(const LogLogisticDist& d) const {
        const Unit scale = inferType(*d.scaleParam, env);
        requireSame(kDimensionless, inferType(*d.shapeParam, env), d.shapeParam->pos,
                    "loglogistic shape must be dimensionless");
        return scale;
    }
    Unit operator()(const EnUnit& c) const {
        requireSame(kDimensionless, inferType(*c.expr, env), c.expr->pos, "'as' needs a dimensionless value");
        return c.unit.unit;
    }
    Unit operator()(const DeUnit& c) const {
        requireSame(c.unit.unit, inferType(*c.expr, env), c.expr->pos, "'in' needs a value of the target dimension");
        return kDimensionless;
    }
    Unit operator()(const Direction& d) const {
        if (!env.performer || !std::holds_alternative<StageDefinition>(*env.performer))
            throw TypeError("direction is only available to stages", pos);
        env.attributeUnit(AgentRef::here, d.attribute, pos);
        return kRadian;
    }
};

bool referencesAny(const Expression& root, const std::set<Identifier>& names) {
    if (names.empty()) return false;
    bool found = false;
    forEachNode(root, [&](const Expression& e) {
        if (const auto* u = std::get_if<UtilityVariable>(&e.node); u && names.count(u->identifier)) found = true;
    });
    return found;
}

std::set<Identifier> utilityRefs(const Expression& root) {
    std::set<Identifier> out;
    forEachNode(root, [&](const Expression& e) {
        if (const auto* u = std::get_if<UtilityVariable>(&e.node)) out.insert(u->identifier);
    });
    return out;
}

struct UtilityGraph {
    std::vector<std::vector<std::size_t>> edges;
    std::vector<std::vector<std::size_t>> cycles;  // strongly connected components that loop
    std::vector<std::size_t> order;                // dependencies first; cyclic nodes excluded
};

UtilityGraph analyzeUtilities(const ActionDefinition& a) {
    const std::size_t n = a.utilities.size();
    UtilityGraph g;
    g.edges.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& ref : utilityRefs(a.utilities[i].expression))
            for (std::size_t j = 0; j < n; ++j)
                if (a.utilities[j].identifier == ref) g.edges[i].push_back(j);
    }

    // Tarjan's strongly connected components.
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> onStack(n, false);
    std::vector<std::size_t> stack;
    std::vector<bool> cyclic(n, false);
    int counter = 0;
    std::function<void(std::size_t)> connect = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        onStack[v] = true;
        for (std::size_t w : g.edges[v]) {
            if (index[w] < 0) {
                connect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (onStack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> scc;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                onStack[w] = false;
                scc.push_back(w);
            } while (w != v);
            const bool selfLoop = std::find(g.edges[v].begin(), g.edges[v].end(), v) != g.edges[v].end();
            if (scc.size() > 1 || selfLoop) {
                std::sort(scc.begin(), scc.end());
                for (auto s : scc) cyclic[s] = true;
                g.cycles.push_back(std::move(scc));
            }
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) connect(v);

    // Post-order DFS gives dependencies before dependents.
    std::vector<int> state(n, 0);
    std::function<bool(std::size_t)> visit = [&](std::size_t v) -> bool {
        if (cyclic[v]) return false;
        if (state[v] == 2) return true;
        state[v] = 1;
        bool ok = true;
        for (std::size_t w : g.edges[v]) ok = visit(w) && ok;
        state[v] = 2;
        if (ok) g.order.push_back(v);
        else cyclic[v] = true;  // depends on a cycle
        return ok;
    };
    for (std::size_t v = 0; v < n; ++v) visit(v);
    return g;
}

void push(std::vector<Diagnostic>& out, const TypeError& e) { out.push_back(Diagnostic::from(e)); }

void pushError(std::vector<Diagnostic>& out, std::string msg, SourcePos pos) {
    out.push_back({Severity::error, std::move(msg), pos, std::nullopt, std::nullopt});
}

const AgentDefinition* performerFor(const Model& m, const Identifier& name) {
    if (const auto* a = m.findAgent(name)) return a;
    if (name == kWorldAgent) return &implicitWorld();
    return nullptr;
}

}  // namespace

Diagnostic Diagnostic::from(const TypeError& e) {
    return {Severity::error, e.message(), e.pos(), e.expected(), e.actual()};
}

std::string renderDiagnostic(const Diagnostic& d, const std::string& path) {
    std::ostringstream os;
    os << path << ":" << d.pos.line << ":" << d.pos.column << ": "
       << (d.severity == Severity::error ? "error" : "warning") << ": " << d.message;
    if (d.expected && d.actual)
        os << " (expected " << formatUnit(*d.expected) << ", got " << formatUnit(*d.actual) << ")";
    else if (d.actual)
        os << " (got " << formatUnit(*d.actual) << ")";
    return os.str();
}

bool hasErrors(const std::vector<Diagnostic>& ds) {
    return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

Unit TypeEnv::attributeUnit(AgentRef ref, const Identifier& id, SourcePos pos) const {
    const AgentDefinition* agent = nullptr;
    switch (ref) {
        case AgentRef::my:
            agent = performer;
            if (!agent) throw TypeError("'my " + id + "' has no performer here", pos);
            break;
        case AgentRef::world:
            agent = model ? performerFor(*model, kWorldAgent) : nullptr;
            break;
        case AgentRef::here:
            if (!performer || std::holds_alternative<WorldDefinition>(*performer))
                throw TypeError("'here' needs a stage or patch performer", pos);
            agent = model ? model->findAgent(kPatchAgent) : nullptr;
            if (!agent) throw TypeError("'here's " + id + "' used but the model defines no Patch", pos);
            break;
    }
    if (agent) {
        for (const auto& slot : attributeSlots(*agent))
            if (slot.identifier == id) return slot.unit.unit;
    }
    throw TypeError("unknown attribute '" + qualifiedName(ref, id) + "'", pos);
}

Unit inferType(const Expression& e, const TypeEnv& env) { return std::visit(Inferrer{env, e.pos}, e.node); }

std::vector<Diagnostic> utilityCycles(const ActionDefinition& a) {
    std::vector<Diagnostic> out;
    for (const auto& cycle : analyzeUtilities(a).cycles) {
        std::string names;
        for (auto i : cycle) names += (names.empty() ? "" : ", ") + a.utilities[i].identifier;
        pushError(out, "cyclic utility definitions in '" + a.name + "': " + names, a.utilities[cycle.front()].pos);
    }
    return out;
}

std::vector<Diagnostic> checkAction(const ActionDefinition& a, const AgentDefinition& performer, TypeEnv& env) {
    std::vector<Diagnostic> out = utilityCycles(a);
    env.performer = &performer;
    env.utilities.clear();

    const UtilityGraph graph = analyzeUtilities(a);
    std::set<Identifier> poisoned;
    for (std::size_t i = 0; i < a.utilities.size(); ++i) poisoned.insert(a.utilities[i].identifier);
    for (std::size_t i : graph.order) {
        const auto& u = a.utilities[i];
        // A utility whose dependency failed stays poisoned without a second report.
        if (!std::all_of(graph.edges[i].begin(), graph.edges[i].end(),
                         [&](std::size_t j) { return env.utilities.count(a.utilities[j].identifier) > 0; }))
            continue;
        try {
            env.utilities[u.identifier] = inferType(u.expression, env);
            poisoned.erase(u.identifier);
        } catch (const TypeError& e) {
            push(out, e);
        }
    }

    auto typed = [&](const Expression& e) -> std::optional<Unit> {
        if (referencesAny(e, poisoned)) return std::nullopt;
        try {
            return inferType(e, env);
        } catch (const TypeError& err) {
            push(out, err);
            return std::nullopt;
        }
    };

    std::set<std::pair<int, Identifier>> assigned;
    for (const auto& d : a.definitions) {
        std::optional<Unit> target;
        try {
            if (const auto* v = std::get_if<AttributeVariable>(&d.variable)) {
                target = env.attributeUnit(v->agent, v->identifier, d.pos);
                if (d.decorator == Decorator::assign &&
                    !assigned.insert({static_cast<int>(v->agent), v->identifier}).second)
                    out.push_back({Severity::warning,
                                   "'" + qualifiedName(v->agent, v->identifier) +
                                       "' is assigned more than once; the last write wins",
                                   d.pos, std::nullopt, std::nullopt});
            } else {
                const auto& id = std::get<Placeholder>(d.variable).identifier;
                auto it = env.placeholders.find(id);
                if (it == env.placeholders.end()) throw TypeError("unbound placeholder 'the " + id + "'", d.pos);
                target = it->second;
            }
        } catch (const TypeError& e) {
            push(out, e);
        }
        const auto value = typed(d.expression);
        if (!target || !value) continue;
        const Unit written = d.decorator == Decorator::differential ? mulUnits(*value, kSecond) : *value;
        if (!sameDimension(*target, written)) {
            const char* what = d.decorator == Decorator::differential ? "rate does not match the attribute's unit per second"
                                                                      : "value does not match the attribute's unit";
            out.push_back({Severity::error, what, d.expression.pos, *target, written});
        }
    }

    const bool isStage = std::holds_alternative<StageDefinition>(performer);
    auto guard = [&](const Comparison& c, SourcePos pos) {
        const auto l = typed(c.left);
        const auto r = typed(c.right);
        if (l && r && !sameDimension(*l, *r))
            out.push_back({Severity::error, "compared values have incompatible units", pos, *l, *r});
    };
    auto stageExists = [&](const Identifier& name, SourcePos pos) {
        if (!env.model || !env.model->findStage(name)) pushError(out, "unknown stage '" + name + "'", pos);
    };
    for (const auto& l : a.lifecycle) {
        if (!isStage) {
            pushError(out, "lifecycle directives are only available to stages", l.pos);
            continue;
        }
        if (const auto* t = std::get_if<StageTransition>(&l.directive)) {
            stageExists(t->target, l.pos);
            guard(t->guard, l.pos);
        } else if (const auto* s = std::get_if<Spawn>(&l.directive)) {
            stageExists(s->stage, l.pos);
            if (const auto n = typed(s->count); n && !sameDimension(*n, kDimensionless))
                out.push_back({Severity::error, "spawn count must be dimensionless", s->count.pos, kDimensionless, *n});
            if (s->guard) guard(*s->guard, l.pos);
        } else {
            guard(std::get<Die>(l.directive).guard, l.pos);
        }
    }
    return out;
}

std::map<Identifier, Unit> bindingUnits(const Model& m, const TaskDefinition& t, std::vector<Diagnostic>& diags) {
    std::map<Identifier, Unit> units;
    const ActionDefinition* action = m.findAction(t.action);
    const AgentDefinition* performer = performerFor(m, t.agent);
    if (!action || !performer) return units;

    const auto wanted = placeholdersOf(*action);
    std::set<Identifier> targets;
    for (const auto& d : action->definitions)
        if (const auto* p = std::get_if<Placeholder>(&d.variable)) targets.insert(p->identifier);

    for (const auto& name : wanted)
        if (!t.findBinding(name))
            pushError(diags, "task '" + t.agent + " " + t.action + "' does not bind 'the " + name + "'", t.pos);

    TypeEnv env;
    env.model = &m;
    env.performer = performer;
    for (const auto& b : t.bindings) {
        if (!wanted.count(b.placeholder)) {
            pushError(diags, "action '" + t.action + "' has no placeholder 'the " + b.placeholder + "'", b.pos);
            continue;
        }
        bool selfRef = false;
        forEachNode(b.expression, [&](const Expression& e) {
            if (std::holds_alternative<PlaceholderRef>(e.node)) selfRef = true;
        });
        if (selfRef) {
            pushError(diags, "binding for 'the " + b.placeholder + "' refers to a placeholder", b.pos);
            continue;
        }
        if (targets.count(b.placeholder) && !std::holds_alternative<AttributeVariable>(b.expression.node)) {
            pushError(diags, "'the " + b.placeholder + "' is written to, so it must be bound to an attribute", b.pos);
            continue;
        }
        try {
            units[b.placeholder] = inferType(b.expression, env);
        } catch (const TypeError& e) {
            push(diags, e);
        }
    }
    return units;
}

std::vector<Diagnostic> checkModel(const Model& m, const SimulationConfig* cfg) {
    std::vector<Diagnostic> out;

    TypeEnv closed;
    closed.model = &m;
    for (const auto& agent : m.agents) {
        for (const auto& attr : declaredAttributes(agent)) {
            if (!attr.initial) continue;
            try {
                const Unit u = inferType(*attr.initial, closed);
                if (!sameDimension(attr.unit.unit, u))
                    out.push_back({Severity::error, "initial value of '" + attr.identifier + "' has the wrong unit",
                                   attr.initial->pos, attr.unit.unit, u});
            } catch (const TypeError& e) {
                push(out, e);
            }
        }
    }

    std::set<Identifier> tasked;
    std::map<Identifier, std::map<Identifier, SourcePos>> assignedByAgent;
    for (const auto& t : m.tasks) {
        const AgentDefinition* performer = performerFor(m, t.agent);
        const ActionDefinition* action = m.findAction(t.action);
        if (!performer) pushError(out, "unknown agent '" + t.agent + "'", t.pos);
        if (!action) pushError(out, "unknown action '" + t.action + "'", t.pos);
        if (!performer || !action) continue;
        tasked.insert(action->name);

        TypeEnv env;
        env.model = &m;
        env.placeholders = bindingUnits(m, t, out);
        auto diags = checkAction(*action, *performer, env);
        out.insert(out.end(), diags.begin(), diags.end());

        auto& assigned = assignedByAgent[t.agent];
        std::set<Identifier> here;
        for (const auto& d : action->definitions) {
            const auto* v = std::get_if<AttributeVariable>(&d.variable);
            if (!v || v->agent != AgentRef::my || d.decorator != Decorator::assign) continue;
            if (!here.insert(v->identifier).second) continue;
            if (assigned.count(v->identifier))
                out.push_back({Severity::warning,
                               "'my " + v->identifier + "' of " + t.agent +
                                   " is assigned by more than one task; the last write wins",
                               d.pos, std::nullopt, std::nullopt});
            else
                assigned[v->identifier] = d.pos;
        }
    }
    for (const auto& a : m.actions) {
        if (tasked.count(a.name)) continue;
        auto cycles = utilityCycles(a);
        out.insert(out.end(), cycles.begin(), cycles.end());
    }

    if (cfg) {
        for (const auto& p : cfg->populations)
            if (!m.findStage(p.stage)) pushError(out, "config populates unknown stage '" + p.stage + "'", {1, 1});
    }

    // Actions shared by several tasks would otherwise report the same problem twice.
    std::vector<Diagnostic> unique;
    std::set<std::tuple<std::string, std::uint32_t, std::uint32_t>> seen;
    for (auto& d : out)
        if (seen.insert({d.message, d.pos.line, d.pos.column}).second) unique.push_back(std::move(d));
    return unique;
}

}  // namespace remodyc
