#include "remodyc/parser.hpp"

#include <array>
#include <set>

#include "lexer.hpp"

namespace remodyc {

namespace {

using detail::Tok;
using detail::Token;

constexpr std::array<std::string_view, 22> kReserved = {
    "to",    "is",     "with",     "where",   "my",     "the",    "delta",       "when",
    "spawn", "die",    "become",   "world",   "here",   "neighbor", "uniform",   "normal",
    "gamma", "loglogistic", "direction", "as", "in", "d/dt"};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text), lines_(text), tokens_(detail::tokenize(text)) {}

    Model model() {
        Model m;
        std::set<Identifier> agentNames;
        std::set<Identifier> actionNames;
        while (!at(Tok::end)) {
            const Token& first = peek();
            if (isWord("to")) {
                ActionDefinition a = action();
                if (!actionNames.insert(a.name).second)
                    throw errorAt("duplicate action '" + a.name + "'", first.offset);
                m.actions.push_back(std::move(a));
                continue;
            }
            if (first.kind != Tok::ident) throw unexpected("a definition");
            const Token& second = peek(1);
            if ((first.text == kWorldAgent || first.text == kPatchAgent) && second.kind == Tok::ident &&
                second.text == "with") {
                const Identifier name(first.text);
                if (!agentNames.insert(name).second)
                    throw errorAt("duplicate " + name + " definition", first.offset);
                m.agents.push_back(environment());
                continue;
            }
            if (second.kind == Tok::ident && second.text == "is") {
                StageDefinition s = stage();
                if (!agentNames.insert(s.name).second)
                    throw errorAt("duplicate agent '" + s.name + "'", first.offset);
                m.agents.emplace_back(std::move(s));
                continue;
            }
            if (second.kind == Tok::ident) {
                m.tasks.push_back(task());
                continue;
            }
            advance();
            throw unexpected("'is', 'with' or an action name");
        }
        return m;
    }

    Expression standaloneExpression() {
        Expression e = expression();
        if (!at(Tok::end)) throw unexpected("end of expression");
        return e;
    }

private:
    // -- token helpers ------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    bool at(Tok k) const { return peek().kind == k; }
    bool isWord(std::string_view w, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::ident && t.text == w;
    }
    const Token& advance() {
        const Token& t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    SourcePos posOf(const Token& t) const { return lines_.at(t.offset); }

    SourceError errorAt(const std::string& msg, std::size_t offset) const {
        const SourcePos p = lines_.at(offset);
        return SourceError(msg, p.line, p.column);
    }

    SourceError unexpected(std::string_view expected) const {
        const Token& t = peek();
        return errorAt("expected " + std::string(expected) + ", found '" + std::string(detail::describe(t)) + "'",
                       t.offset);
    }

    const Token& expect(Tok k, std::string_view what) {
        if (!at(k)) throw unexpected(what);
        return advance();
    }

    void expectWord(std::string_view w) {
        if (!isWord(w)) throw unexpected("'" + std::string(w) + "'");
        advance();
    }

    Identifier identifier(std::string_view what) {
        if (!at(Tok::ident)) throw unexpected(what);
        if (isReservedWord(peek().text))
            throw errorAt("'" + std::string(peek().text) + "' is a reserved word", peek().offset);
        return Identifier(advance().text);
    }

    UnitSpec unitSpec() {
        const Token& t = expect(Tok::unit, "a unit in brackets");
        try {
            return UnitSpec::parse(std::string(t.text));
        } catch (const UnitError& e) {
            throw errorAt(e.what(), t.offset + 1 + e.offset());
        }
    }

    // -- agents -------------------------------------------------------------

    std::vector<AttributeDeclaration> attributeDeclarations(bool stage) {
        std::vector<AttributeDeclaration> attrs;
        std::set<Identifier> seen;
        if (stage) seen = {"x", "y"};
        while (!at(Tok::dot)) {
            const Token& start = peek();
            AttributeDeclaration d;
            d.pos = posOf(start);
            d.identifier = identifier("an attribute declaration or '.'");
            if (!seen.insert(d.identifier).second)
                throw errorAt("duplicate attribute '" + d.identifier + "'", start.offset);
            d.unit = unitSpec();
            if (at(Tok::eq)) {
                advance();
                const Token& exprStart = peek();
                d.initial = expression();
                requireClosed(*d.initial, exprStart.offset);
            }
            attrs.push_back(std::move(d));
        }
        advance();
        return attrs;
    }

    void requireClosed(const Expression& e, std::size_t offset) const {
        forEachNode(e, [&](const Expression& n) {
            if (std::holds_alternative<AttributeVariable>(n.node) || std::holds_alternative<UtilityVariable>(n.node) ||
                std::holds_alternative<PlaceholderRef>(n.node) || std::holds_alternative<Direction>(n.node))
                throw errorAt("initial value must not refer to attributes, utilities or placeholders", offset);
        });
    }

    AgentDefinition environment() {
        const Token& name = advance();
        advance();  // with
        if (name.text == kWorldAgent) return WorldDefinition{attributeDeclarations(false), posOf(name)};
        return PatchDefinition{attributeDeclarations(false), posOf(name)};
    }

    StageDefinition stage() {
        const Token& start = peek();
        StageDefinition s;
        s.pos = posOf(start);
        if (start.text == kWorldAgent || start.text == kPatchAgent)
            throw errorAt("'" + std::string(start.text) + "' cannot name a stage", start.offset);
        s.name = identifier("a stage name");
        expectWord("is");
        s.species = identifier("a species name");
        expectWord("with");
        s.attributes = attributeDeclarations(true);
        return s;
    }

    // -- actions ------------------------------------------------------------

    bool atStatement() const {
        return isWord("my") || isWord("world") || isWord("here") || isWord("the");
    }

    Decorator decorator() {
        if (isWord("delta")) {
            advance();
            return Decorator::delta;
        }
        if (at(Tok::ddt)) {
            advance();
            return Decorator::differential;
        }
        return Decorator::assign;
    }

    Comparison comparison() {
        Comparison c;
        c.left = expression();
        switch (peek().kind) {
            case Tok::lt: c.relop = RelOp::lt; break;
            case Tok::le: c.relop = RelOp::le; break;
            case Tok::gt: c.relop = RelOp::gt; break;
            case Tok::ge: c.relop = RelOp::ge; break;
            default: throw unexpected("a comparison operator");
        }
        advance();
        c.right = expression();
        return c;
    }

    void statement(ActionDefinition& a) {
        const Token& start = peek();
        const SourcePos pos = posOf(start);
        if (isWord("my")) {
            advance();
            if (isWord("become")) {
                advance();
                StageTransition t;
                t.target = identifier("a stage name");
                expectWord("when");
                t.guard = comparison();
                a.lifecycle.push_back({std::move(t), pos});
                return;
            }
            if (isWord("spawn")) {
                advance();
                Spawn s;
                s.stage = identifier("a stage name");
                expect(Tok::prime, "'");
                expect(Tok::eq, "'='");
                s.count = expression();
                if (isWord("when")) {
                    advance();
                    s.guard = comparison();
                }
                a.lifecycle.push_back({std::move(s), pos});
                return;
            }
            if (isWord("die")) {
                advance();
                expectWord("when");
                a.lifecycle.push_back({Die{comparison()}, pos});
                return;
            }
            attributeDefinition(a, AgentRef::my, pos);
            return;
        }
        if (isWord("the")) {
            advance();
            AttributeDefinition d;
            d.pos = pos;
            d.decorator = decorator();
            d.variable = Placeholder{identifier("a placeholder name")};
            expect(Tok::prime, "'");
            expect(Tok::eq, "'='");
            d.expression = expression();
            a.definitions.push_back(std::move(d));
            return;
        }
        const AgentRef agent = isWord("world") ? AgentRef::world : AgentRef::here;
        advance();
        expect(Tok::possessive, "'s");
        attributeDefinition(a, agent, pos);
    }

    void attributeDefinition(ActionDefinition& a, AgentRef agent, SourcePos pos) {
        AttributeDefinition d;
        d.pos = pos;
        d.decorator = decorator();
        d.variable = AttributeVariable{agent, identifier("an attribute name")};
        expect(Tok::prime, "' after the attribute name");
        expect(Tok::eq, "'='");
        d.expression = expression();
        a.definitions.push_back(std::move(d));
    }

    ActionDefinition action() {
        const Token& start = advance();  // to
        ActionDefinition a;
        a.pos = posOf(start);
        a.name = identifier("an action name");
        expectWord("is");
        if (!atStatement()) throw unexpected("an attribute definition");
        while (atStatement()) statement(a);
        if (isWord("where")) {
            advance();
            do {
                const Token& ustart = peek();
                UtilityDefinition u;
                u.pos = posOf(ustart);
                u.identifier = identifier("a utility name");
                if (a.findUtility(u.identifier))
                    throw errorAt("duplicate utility '" + u.identifier + "'", ustart.offset);
                expect(Tok::eq, "'='");
                u.expression = expression();
                a.utilities.push_back(std::move(u));
            } while (!at(Tok::dot));
        }
        expect(Tok::dot, "'.' or another attribute definition");
        return a;
    }

    // -- tasks --------------------------------------------------------------

    TaskDefinition task() {
        const Token& start = peek();
        TaskDefinition t;
        t.pos = posOf(start);
        if (start.text == kWorldAgent || start.text == kPatchAgent) {
            t.agent = Identifier(advance().text);
        } else {
            t.agent = identifier("an agent name");
        }
        t.action = identifier("an action name");
        if (isWord("where")) {
            advance();
            do {
                const Token& bstart = peek();
                expectWord("the");
                Binding b;
                b.pos = posOf(bstart);
                b.placeholder = identifier("a placeholder name");
                if (t.findBinding(b.placeholder))
                    throw errorAt("duplicate binding for 'the " + b.placeholder + "'", bstart.offset);
                expect(Tok::arrow, "'->'");
                b.expression = expression();
                t.bindings.push_back(std::move(b));
            } while (!at(Tok::dot));
        }
        expect(Tok::dot, "'.' or 'where'");
        return t;
    }

    // -- expressions --------------------------------------------------------
    //
    // expr     := additive (("as" | "in") UNIT)*
    // additive := term (("+" | "-") term)*
    // term     := unary (("*" | "/") unary)*
    // unary    := "-" unary | power
    // power    := primary ("^" unary)?

    Expression expression() {
        Expression e = additive();
        while (isWord("as") || isWord("in")) {
            const Token& op = advance();
            const SourcePos pos = posOf(op);
            UnitSpec u = unitSpec();
            if (op.text == "as")
                e = Expression{EnUnit{std::move(e), std::move(u)}, pos};
            else
                e = Expression{DeUnit{std::move(e), std::move(u)}, pos};
        }
        return e;
    }

    Expression additive() {
        Expression e = term();
        while (at(Tok::plus) || at(Tok::minus)) {
            const Token& op = advance();
            Expression rhs = term();
            e = binary(op.kind == Tok::plus ? ArithOp::add : ArithOp::sub, std::move(e), std::move(rhs));
            e.pos = posOf(op);
        }
        return e;
    }

    Expression term() {
        Expression e = unary();
        while (at(Tok::star) || at(Tok::slash)) {
            const Token& op = advance();
            Expression rhs = unary();
            e = binary(op.kind == Tok::star ? ArithOp::mul : ArithOp::div, std::move(e), std::move(rhs));
            e.pos = posOf(op);
        }
        return e;
    }

    Expression unary() {
        if (at(Tok::minus)) {
            const Token& op = advance();
            Expression e = negate(unary());
            e.pos = posOf(op);
            return e;
        }
        return power();
    }

    Expression power() {
        Expression base = primary();
        if (at(Tok::caret)) {
            const Token& op = advance();
            Expression e = binary(ArithOp::pow, std::move(base), unary());
            e.pos = posOf(op);
            return e;
        }
        return base;
    }

    Expression pairCall(const Token& kw) {
        expect(Tok::lparen, "'(' after '" + std::string(kw.text) + "'");
        Expression a = expression();
        expect(Tok::comma, "','");
        Expression b = expression();
        expect(Tok::rparen, "')'");
        const SourcePos pos = posOf(kw);
        if (kw.text == "normal") return Expression{NormalDist{std::move(a), std::move(b)}, pos};
        if (kw.text == "gamma") return Expression{GammaDist{std::move(a), std::move(b)}, pos};
        return Expression{LogLogisticDist{std::move(a), std::move(b)}, pos};
    }

    Expression primary() {
        const Token& t = peek();
        const SourcePos pos = posOf(t);
        switch (t.kind) {
            case Tok::number: {
                advance();
                Literal lit{t.number, std::nullopt};
                if (at(Tok::unit)) lit.unit = unitSpec();
                return Expression{std::move(lit), pos};
            }
            case Tok::lparen: {
                advance();
                Expression e = expression();
                expect(Tok::rparen, "')'");
                return e;
            }
            case Tok::ident: break;
            default: throw unexpected("an expression");
        }

        const std::string_view w = t.text;
        if (w == "my" || w == "world" || w == "here") {
            advance();
            AgentRef agent = AgentRef::my;
            if (w != "my") {
                expect(Tok::possessive, "'s");
                agent = w == "world" ? AgentRef::world : AgentRef::here;
            }
            return Expression{AttributeVariable{agent, identifier("an attribute name")}, pos};
        }
        if (w == "the") {
            advance();
            return Expression{PlaceholderRef{identifier("a placeholder name")}, pos};
        }
        if (w == "delta") {
            advance();
            expectWord("time");
            return Expression{DeltaTime{}, pos};
        }
        if (w == "uniform") {
            advance();
            Expression low = additive();
            expectWord("to");
            Expression high = additive();
            return Expression{UniformDist{std::move(low), std::move(high)}, pos};
        }
        if (w == "normal" || w == "gamma" || w == "loglogistic") {
            advance();
            return pairCall(t);
        }
        if (w == "direction") {
            advance();
            expectWord("neighbor");
            expect(Tok::possessive, "'s");
            return Expression{Direction{identifier("a patch attribute name")}, pos};
        }
        if (peek(1).kind == Tok::lparen) {
            const auto fn = builtinByName(w);
            if (!fn) throw errorAt("unknown function '" + std::string(w) + "'", t.offset);
            advance();
            advance();
            Apply call{*fn, {}};
            call.args.push_back(expression());
            while (at(Tok::comma)) {
                advance();
                call.args.push_back(expression());
            }
            if (call.args.size() != builtinArity(*fn))
                throw errorAt(std::string(w) + " takes " + std::to_string(builtinArity(*fn)) + " argument(s)",
                              t.offset);
            expect(Tok::rparen, "')'");
            return Expression{std::move(call), pos};
        }
        return Expression{UtilityVariable{identifier("an expression")}, pos};
    }

    std::string_view text_;
    detail::LineMap lines_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace

bool isReservedWord(std::string_view word) {
    for (auto r : kReserved)
        if (r == word) return true;
    return false;
}

Model parseModel(std::string_view text) { return Parser(text).model(); }

Expression parseExpression(std::string_view text) { return Parser(text).standaloneExpression(); }

}  // namespace remodyc
