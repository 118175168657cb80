#include "remodyc/printer.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "remodyc/text.hpp"

namespace remodyc {

namespace {

// Binding strength of each printed form; an operand printed in a context
// that needs a stronger form gets parentheses.
enum Level : int { kCast = 0, kAdditive = 1, kTerm = 2, kUnary = 3, kPower = 4, kPrimary = 5 };

std::string sourceNumber(double v) {
    const double mag = std::fabs(v);
    if (v == 0.0 || (mag >= 1e-4 && mag < 1e15)) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
        if (ec == std::errc{}) return std::string(buf, ptr);
    }
    return formatDouble(v);
}

std::string unitText(const UnitSpec& u) { return "[" + u.text + "]"; }

std::string agentPrefix(AgentRef a) {
    switch (a) {
        case AgentRef::my: return "my ";
        case AgentRef::world: return "world's ";
        case AgentRef::here: return "here's ";
    }
    return {};
}

struct Printed {
    std::string text;
    int level;
};

Printed print(const Expression& e);

std::string at(const Expression& e, int needed) {
    Printed p = print(e);
    if (p.level < needed) return "(" + p.text + ")";
    return p.text;
}

Printed print(const Expression& e) {
    struct Visitor {
        Printed operator()(const AttributeVariable& v) const {
            return {agentPrefix(v.agent) + v.identifier, kPrimary};
        }
        Printed operator()(const UtilityVariable& v) const { return {v.identifier, kPrimary}; }
        Printed operator()(const PlaceholderRef& v) const { return {"the " + v.identifier, kPrimary}; }
        Printed operator()(const Literal& l) const {
            std::string s = sourceNumber(l.value);
            if (l.unit) s += " " + unitText(*l.unit);
            return {s, kPrimary};
        }
        Printed operator()(const DeltaTime&) const { return {"delta time", kPrimary}; }
        Printed operator()(const Arithmetics& a) const {
            switch (a.op) {
                case ArithOp::neg: return {"-" + at(a.args[0], kUnary), kUnary};
                case ArithOp::pow: return {at(a.args[0], kPrimary) + "^" + at(a.args[1], kUnary), kPower};
                case ArithOp::add: return {at(a.args[0], kAdditive) + " + " + at(a.args[1], kTerm), kAdditive};
                case ArithOp::sub: return {at(a.args[0], kAdditive) + " - " + at(a.args[1], kTerm), kAdditive};
                case ArithOp::mul: return {at(a.args[0], kTerm) + " * " + at(a.args[1], kUnary), kTerm};
                case ArithOp::div: return {at(a.args[0], kTerm) + " / " + at(a.args[1], kUnary), kTerm};
            }
            return {};
        }
        Printed operator()(const Apply& a) const {
            std::string s(builtinName(a.function));
            s += "(";
            for (std::size_t i = 0; i < a.args.size(); ++i) {
                if (i) s += ", ";
                s += at(a.args[i], kCast);
            }
            return {s + ")", kPrimary};
        }
        Printed operator()(const UniformDist& d) const {
            return {"uniform " + at(*d.low, kAdditive) + " to " + at(*d.high, kAdditive), kCast};
        }
        Printed operator()(const NormalDist& d) const {
            return {"normal(" + at(*d.mean, kCast) + ", " + at(*d.sigma, kCast) + ")", kPrimary};
        }
        Printed operator()(const GammaDist& d) const {
            return {"gamma(" + at(*d.shape, kCast) + ", " + at(*d.scale, kCast) + ")", kPrimary};
        }
        Printed operator()(const LogLogisticDist& d) const {
            return {"loglogistic(" + at(*d.scaleParam, kCast) + ", " + at(*d.shapeParam, kCast) + ")", kPrimary};
        }
        Printed operator()(const EnUnit& c) const { return {at(*c.expr, kCast) + " as " + unitText(c.unit), kCast}; }
        Printed operator()(const DeUnit& c) const { return {at(*c.expr, kCast) + " in " + unitText(c.unit), kCast}; }
        Printed operator()(const Direction& d) const { return {"direction neighbor's " + d.attribute, kPrimary}; }
    };
    return std::visit(Visitor{}, e.node);
}

const char* relopText(RelOp r) {
    switch (r) {
        case RelOp::lt: return "<";
        case RelOp::le: return "<=";
        case RelOp::gt: return ">";
        case RelOp::ge: return ">=";
    }
    return "";
}

std::string comparison(const Comparison& c) {
    return printExpression(c.left) + " " + relopText(c.relop) + " " + printExpression(c.right);
}

const char* decoratorText(Decorator d) {
    switch (d) {
        case Decorator::assign: return "";
        case Decorator::delta: return "delta ";
        case Decorator::differential: return "d/dt ";
    }
    return "";
}

void printAttributes(std::ostringstream& os, const std::vector<AttributeDeclaration>& attrs) {
    if (attrs.empty()) {
        os << ".\n";
        return;
    }
    os << "\n";
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        const auto& a = attrs[i];
        os << "    " << a.identifier << " " << unitText(a.unit);
        if (a.initial) os << " = " << printExpression(*a.initial);
        os << (i + 1 == attrs.size() ? ".\n" : "\n");
    }
}

void printAgent(std::ostringstream& os, const AgentDefinition& agent) {
    if (const auto* s = std::get_if<StageDefinition>(&agent))
        os << s->name << " is " << s->species << " with";
    else
        os << agentName(agent) << " with";
    printAttributes(os, declaredAttributes(agent));
}

std::string definitionLine(const AttributeDefinition& d) {
    std::string s;
    if (const auto* v = std::get_if<AttributeVariable>(&d.variable))
        s = agentPrefix(v->agent) + decoratorText(d.decorator) + v->identifier;
    else
        s = "the " + std::string(decoratorText(d.decorator)) + std::get<Placeholder>(d.variable).identifier;
    return s + "' = " + printExpression(d.expression);
}

std::string lifecycleLine(const LifecycleDirective& l) {
    struct Visitor {
        std::string operator()(const StageTransition& t) const {
            return "my become " + t.target + " when " + comparison(t.guard);
        }
        std::string operator()(const Spawn& s) const {
            std::string out = "my spawn " + s.stage + "' = " + printExpression(s.count);
            if (s.guard) out += " when " + comparison(*s.guard);
            return out;
        }
        std::string operator()(const Die& d) const { return "my die when " + comparison(d.guard); }
    };
    return std::visit(Visitor{}, l.directive);
}

void printLines(std::ostringstream& os, const std::vector<std::string>& lines, bool terminate) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        os << "    " << lines[i];
        os << ((terminate && i + 1 == lines.size()) ? ".\n" : "\n");
    }
}

void printAction(std::ostringstream& os, const ActionDefinition& a) {
    os << "to " << a.name << " is\n";
    std::vector<std::string> body;
    for (const auto& d : a.definitions) body.push_back(definitionLine(d));
    for (const auto& l : a.lifecycle) body.push_back(lifecycleLine(l));
    printLines(os, body, a.utilities.empty());
    if (a.utilities.empty()) return;
    os << "where\n";
    std::vector<std::string> utils;
    for (const auto& u : a.utilities) utils.push_back(u.identifier + " = " + printExpression(u.expression));
    printLines(os, utils, true);
}

void printTask(std::ostringstream& os, const TaskDefinition& t) {
    os << t.agent << " " << t.action;
    if (t.bindings.empty()) {
        os << ".\n";
        return;
    }
    os << "\nwhere\n";
    std::vector<std::string> lines;
    for (const auto& b : t.bindings) lines.push_back("the " + b.placeholder + " -> " + printExpression(b.expression));
    printLines(os, lines, true);
}

}  // namespace

std::string printExpression(const Expression& e) { return print(e).text; }

std::string prettyPrint(const Model& m) {
    std::ostringstream os;
    bool first = true;
    auto separate = [&] {
        if (!first) os << "\n";
        first = false;
    };
    for (const auto& a : m.agents) {
        separate();
        printAgent(os, a);
    }
    for (const auto& a : m.actions) {
        separate();
        printAction(os, a);
    }
    for (const auto& t : m.tasks) {
        separate();
        printTask(os, t);
    }
    return os.str();
}

}  // namespace remodyc
