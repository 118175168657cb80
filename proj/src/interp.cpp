#include "remodyc/interp.hpp"

#include <cmath>
#include <sstream>

#include "remodyc/rng.hpp"
#include "remodyc/text.hpp"

namespace remodyc {

namespace {

std::string abortText(const std::string& message, std::size_t tick, const Identifier& agent, Address base,
                      SourcePos pos) {
    std::ostringstream os;
    os << "runtime abort at tick " << tick;
    if (!agent.empty()) os << " (" << agent << " at address " << base << ")";
    os << ", line " << pos.line << ":" << pos.column << ": " << message;
    return os.str();
}

bool isStage(const AgentDefinition& a) { return std::holds_alternative<StageDefinition>(a); }

struct Evaluator {
    ExecutionContext& ctx;
    SourcePos pos;

    double eval(const Expression& e) const { return evalExpression(ctx, e); }

    double operator()(const AttributeVariable& v) const {
        return ctx.memory->read(getAttributeAddress(ctx, v.agent, v.identifier));
    }

    double operator()(const UtilityVariable& u) const {
        auto& slot = ctx.utilityCache[u.identifier];
        if (slot) return *slot;
        const UtilityDefinition* def = ctx.action ? ctx.action->findUtility(u.identifier) : nullptr;
        if (!def) throw std::logic_error("utility '" + u.identifier + "' has no definition");
        const double v = evalExpression(ctx, def->expression);
        ctx.utilityCache[u.identifier] = v;
        return v;
    }

    double operator()(const PlaceholderRef& p) const {
        throw std::logic_error("placeholder 'the " + p.identifier + "' was not instantiated");
    }

    double operator()(const Literal& l) const { return l.unit ? toSI(l.value, l.unit->unit) : l.value; }

    double operator()(const DeltaTime&) const { return ctx.deltaTime; }

    double operator()(const Arithmetics& a) const {
        if (a.op == ArithOp::neg) return -eval(a.args[0]);
        const double x = eval(a.args[0]);
        const double y = eval(a.args[1]);
        switch (a.op) {
            case ArithOp::add: return x + y;
            case ArithOp::sub: return x - y;
            case ArithOp::mul: return x * y;
            case ArithOp::div:
                if (y == 0.0) ctx.abort("division by zero", pos);
                return x / y;
            case ArithOp::pow: {
                const double r = std::pow(x, y);
                if (std::isnan(r) && !std::isnan(x) && !std::isnan(y))
                    ctx.abort("power " + formatDouble(x) + " ^ " + formatDouble(y) + " is undefined", pos);
                return r;
            }
            case ArithOp::neg: break;
        }
        return 0.0;
    }

    double operator()(const Apply& a) const {
        std::vector<double> v;
        v.reserve(a.args.size());
        for (const auto& arg : a.args) v.push_back(eval(arg));
        switch (a.function) {
            case Builtin::cos: return std::cos(v[0]);
            case Builtin::sin: return std::sin(v[0]);
            case Builtin::tan: return std::tan(v[0]);
            case Builtin::exp: return std::exp(v[0]);
            case Builtin::ln:
                if (v[0] <= 0.0) ctx.abort("ln of nonpositive value " + formatDouble(v[0]), pos);
                return std::log(v[0]);
            case Builtin::log:
                if (v[0] <= 0.0) ctx.abort("log of nonpositive value " + formatDouble(v[0]), pos);
                return std::log10(v[0]);
            case Builtin::sqrt:
                if (v[0] < 0.0) ctx.abort("sqrt of negative value " + formatDouble(v[0]), pos);
                return std::sqrt(v[0]);
            case Builtin::abs: return std::fabs(v[0]);
            case Builtin::floor: return std::floor(v[0]);
            case Builtin::ceiling: return std::ceil(v[0]);
            case Builtin::min: return std::min(v[0], v[1]);
            case Builtin::max: return std::max(v[0], v[1]);
        }
        return 0.0;
    }

    template <class F>
    double sample(F&& f) const {
        try {
            return f(ctx.memory->rng());
        } catch (const SamplerError& e) {
            ctx.abort(e.what(), pos);
        }
    }

    double operator()(const UniformDist& d) const {
        const double lo = eval(*d.low), hi = eval(*d.high);
        return sample([&](Rng& r) { return sampleUniform(r, lo, hi); });
    }
    double operator()(const NormalDist& d) const {
        const double mean = eval(*d.mean), sigma = eval(*d.sigma);
        return sample([&](Rng& r) { return sampleNormal(r, mean, sigma); });
    }
    double operator()(const GammaDist& d) const {
        const double shape = eval(*d.shape), scale = eval(*d.scale);
        return sample([&](Rng& r) { return sampleGamma(r, shape, scale); });
    }
    double operator()(const LogLogisticDist& d) const {
        const double scale = eval(*d.scaleParam), shape = eval(*d.shapeParam);
        return sample([&](Rng& r) { return sampleLogLogistic(r, scale, shape); });
    }

    double operator()(const EnUnit& c) const { return eval(*c.expr) * c.unit.unit.scale; }
    double operator()(const DeUnit& c) const { return eval(*c.expr) / c.unit.unit.scale; }

    double operator()(const Direction& d) const { return directionToRichest(ctx, d.attribute); }
};

Expression substitute(const Expression& e, const std::map<Identifier, const Expression*>& bound) {
    return transform(e, [&](Expression node) {
        if (const auto* p = std::get_if<PlaceholderRef>(&node.node)) {
            auto it = bound.find(p->identifier);
            if (it == bound.end()) throw ModelError("placeholder 'the " + p->identifier + "' is not bound");
            return *it->second;
        }
        return node;
    });
}

/// Position used for "here" and direction: a stage's x, y or a patch centre.
std::pair<double, double> performerPosition(const ExecutionContext& ctx) {
    const Layout& l = *ctx.layout;
    if (ctx.performerAgent && isStage(*ctx.performerAgent))
        return {ctx.memory->read(ctx.performer), ctx.memory->read(ctx.performer + 1)};
    if (ctx.performerAgent && std::holds_alternative<PatchDefinition>(*ctx.performerAgent) && l.firstPatch) {
        const std::size_t index = (ctx.performer - *l.firstPatch) / l.patchBlock;
        return {(static_cast<double>(index % l.columns) + 0.5) * l.edge,
                (static_cast<double>(index / l.columns) + 0.5) * l.edge};
    }
    throw AddressError(ctx.performer);
}

}  // namespace

RuntimeAbort::RuntimeAbort(std::string message, std::size_t tick, Identifier agent, Address base, SourcePos pos)
    : std::runtime_error(abortText(message, tick, agent, base, pos)),
      message_(std::move(message)),
      tick_(tick),
      agent_(std::move(agent)),
      base_(base),
      pos_(pos) {}

// ---------------------------------------------------------------------------
// Layout

Layout Layout::forModel(const Model& m, const SimulationConfig& cfg) {
    Layout l;
    l.columns = cfg.patchColumns();
    l.rows = cfg.patchRows();
    l.edge = cfg.patchSize;
    for (const auto& agent : m.agents) {
        auto& slots = l.slots[agentName(agent)];
        std::size_t i = 0;
        for (const auto& decl : attributeSlots(agent)) slots[decl.identifier] = i++;
    }
    // The implicit World has no attributes but is still a known agent.
    l.slots.try_emplace(kWorldAgent);
    if (const auto* p = m.patch()) l.patchBlock = p->attributes.size();
    return l;
}

std::optional<std::size_t> Layout::slotOf(const Identifier& agent, const Identifier& attr) const {
    auto a = slots.find(agent);
    if (a == slots.end()) return std::nullopt;
    auto s = a->second.find(attr);
    if (s == a->second.end()) return std::nullopt;
    return s->second;
}

Address Layout::patchAt(std::size_t col, std::size_t row) const {
    if (!firstPatch) throw std::logic_error("the model has no patch attributes");
    return *firstPatch + (row * columns + col) * patchBlock;
}

std::pair<std::size_t, std::size_t> Layout::patchContaining(double x, double y) const {
    auto cell = [this](double v, std::size_t n) -> std::size_t {
        const double c = std::floor(v / edge);
        if (!(c > 0.0)) return 0;  // also NaN
        return std::min(static_cast<std::size_t>(std::min(c, 1e18)), n - 1);
    };
    return {cell(x, columns), cell(y, rows)};
}

// ---------------------------------------------------------------------------
// Evaluation

Identifier ExecutionContext::performerName() const { return performerAgent ? agentName(*performerAgent) : ""; }

void ExecutionContext::abort(const std::string& message, SourcePos pos) const {
    throw RuntimeAbort(message, tick, performerName(), performer, pos);
}

Address getAttributeAddress(const ExecutionContext& ctx, AgentRef agent, const Identifier& attr) {
    const Layout& l = *ctx.layout;
    switch (agent) {
        case AgentRef::my: {
            if (!ctx.performerAgent) throw AddressError(0);
            const auto slot = l.slotOf(agentName(*ctx.performerAgent), attr);
            if (!slot) throw AddressError(ctx.performer);
            return ctx.performer + *slot;
        }
        case AgentRef::world: {
            const auto slot = l.slotOf(kWorldAgent, attr);
            if (!slot || !l.world) throw AddressError(0);
            return *l.world + *slot;
        }
        case AgentRef::here: {
            const auto slot = l.slotOf(kPatchAgent, attr);
            if (!slot || !l.firstPatch) throw AddressError(0);
            const auto [x, y] = performerPosition(ctx);
            const auto [col, row] = l.patchContaining(x, y);
            return l.patchAt(col, row) + *slot;
        }
    }
    throw AddressError(0);
}

double evalExpression(ExecutionContext& ctx, const Expression& e) { return std::visit(Evaluator{ctx, e.pos}, e.node); }

bool evalComparison(ExecutionContext& ctx, const Comparison& c) {
    const double l = evalExpression(ctx, c.left);
    const double r = evalExpression(ctx, c.right);
    switch (c.relop) {
        case RelOp::lt: return l < r;
        case RelOp::le: return l <= r;
        case RelOp::gt: return l > r;
        case RelOp::ge: return l >= r;
    }
    return false;
}

void evalAttributeDefinition(ExecutionContext& ctx, const AttributeDefinition& d) {
    const auto* target = std::get_if<AttributeVariable>(&d.variable);
    if (!target) throw std::logic_error("definition target was not instantiated");
    const double v = evalExpression(ctx, d.expression);
    const Address a = getAttributeAddress(ctx, target->agent, target->identifier);
    switch (d.decorator) {
        case Decorator::assign: ctx.memory->write(a, v); break;
        case Decorator::delta: ctx.memory->writeDelta(a, v); break;
        case Decorator::differential: ctx.memory->writeDelta(a, v * ctx.deltaTime); break;
    }
}

ActionDefinition instantiateTask(const Model& m, const TaskDefinition& t) {
    const ActionDefinition* action = m.findAction(t.action);
    if (!action) throw ModelError("task refers to unknown action '" + t.action + "'");

    const auto needed = placeholdersOf(*action);
    std::map<Identifier, const Expression*> bound;
    for (const auto& b : t.bindings) {
        if (!needed.count(b.placeholder))
            throw ModelError("task '" + t.agent + " " + t.action + "' binds unknown placeholder '" + b.placeholder + "'");
        bound[b.placeholder] = &b.expression;
    }
    for (const auto& p : needed)
        if (!bound.count(p)) throw ModelError("task '" + t.agent + " " + t.action + "' leaves 'the " + p + "' unbound");

    ActionDefinition out = *action;
    for (auto& d : out.definitions) {
        if (const auto* p = std::get_if<Placeholder>(&d.variable)) {
            const auto* v = std::get_if<AttributeVariable>(&bound.at(p->identifier)->node);
            if (!v) throw ModelError("'the " + p->identifier + "' is written to but not bound to an attribute");
            d.variable = *v;
        }
        d.expression = substitute(d.expression, bound);
    }
    for (auto& u : out.utilities) u.expression = substitute(u.expression, bound);
    auto guard = [&](Comparison& c) {
        c.left = substitute(c.left, bound);
        c.right = substitute(c.right, bound);
    };
    for (auto& l : out.lifecycle) {
        if (auto* s = std::get_if<StageTransition>(&l.directive)) {
            guard(s->guard);
        } else if (auto* s = std::get_if<Spawn>(&l.directive)) {
            s->count = substitute(s->count, bound);
            if (s->guard) guard(*s->guard);
        } else {
            guard(std::get<Die>(l.directive).guard);
        }
    }
    return out;
}

double directionToRichest(const ExecutionContext& ctx, const Identifier& attr) {
    const Layout& l = *ctx.layout;
    const auto slot = l.slotOf(kPatchAgent, attr);
    if (!slot || !l.firstPatch) throw AddressError(0);
    const auto [x, y] = performerPosition(ctx);
    const auto [col, row] = l.patchContaining(x, y);

    bool found = false;
    double best = 0.0;
    long bestCol = 0, bestRow = 0;
    for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
            const long c = static_cast<long>(col) + dx;
            const long r = static_cast<long>(row) + dy;
            if (c < 0 || r < 0 || c >= static_cast<long>(l.columns) || r >= static_cast<long>(l.rows)) continue;
            const double v = ctx.memory->read(
                l.patchAt(static_cast<std::size_t>(c), static_cast<std::size_t>(r)) + *slot);
            if (!found || v > best) {
                found = true;
                best = v;
                bestCol = c;
                bestRow = r;
            }
        }
    }
    if (bestCol == static_cast<long>(col) && bestRow == static_cast<long>(row)) return 0.0;
    const double cx = (static_cast<double>(bestCol) + 0.5) * l.edge;
    const double cy = (static_cast<double>(bestRow) + 0.5) * l.edge;
    return std::atan2(cy - y, cx - x);
}

std::map<Identifier, std::size_t> populationCounts(const Model& m, const MemoryImage& memory) {
    std::map<Identifier, std::size_t> counts;
    for (const auto* s : m.stages()) counts[s->name] = 0;
    for (const auto& [base, entry] : memory.animats()) {
        if (memory.dead(base)) continue;
        auto it = counts.find(entry.stage);
        if (it != counts.end()) ++it->second;
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(const Model& m, SimulationConfig cfg, StorageBackend& backend)
    : model_(&m), cfg_(std::move(cfg)), memory_(backend) {
    cfg_.validate();
    auto diags = checkModel(m, &cfg_);
    if (hasErrors(diags)) {
        for (const auto& d : diags)
            if (d.severity == Severity::error) throw ModelError(renderDiagnostic(d, "model"), diags);
    }
    layout_ = Layout::forModel(m, cfg_);
    for (const auto& t : m.tasks) tasks_.emplace_back(&t, instantiateTask(m, t));
}

ExecutionContext Simulation::context() const {
    ExecutionContext ctx;
    ctx.model = model_;
    ctx.memory = const_cast<MemoryImage*>(&memory_);
    ctx.layout = &layout_;
    ctx.deltaTime = cfg_.deltaTime;
    ctx.tick = memory_.ticks();
    return ctx;
}

void Simulation::initializeBlock(ExecutionContext& ctx, const AgentDefinition& agent, Address base,
                                 std::size_t firstSlot) {
    const auto& decls = declaredAttributes(agent);
    for (std::size_t i = 0; i < decls.size(); ++i) {
        const double v = decls[i].initial ? evalExpression(ctx, *decls[i].initial) : 0.0;
        memory_.write(base + firstSlot + i, v);
    }
}

void Simulation::initialize() {
    if (memory_.storage().frameCount() != 0 || memory_.ticks() != 0)
        throw std::logic_error("initialize: storage already holds frames");
    memory_.rng().setState(cfg_.seed);
    ExecutionContext ctx = context();

    const AgentDefinition* world = model_->findAgent(kWorldAgent);
    if (world && sizeOfAgent(*world) > 0) {
        layout_.world = memory_.allocate(kWorldAgent, sizeOfAgent(*world));
    }
    const AgentDefinition* patch = model_->findAgent(kPatchAgent);
    if (patch && layout_.patchBlock > 0) {
        for (std::size_t i = 0; i < layout_.columns * layout_.rows; ++i) {
            const Address base = memory_.allocate(kPatchAgent, layout_.patchBlock);
            if (i == 0) layout_.firstPatch = base;
        }
    }
    if (layout_.world) initializeBlock(ctx, *world, *layout_.world, 0);
    if (layout_.firstPatch)
        for (std::size_t r = 0; r < layout_.rows; ++r)
            for (std::size_t c = 0; c < layout_.columns; ++c) initializeBlock(ctx, *patch, layout_.patchAt(c, r), 0);

    const double width = cfg_.worldWidth, height = cfg_.worldHeight;
    for (const auto& pop : cfg_.populations) {
        const AgentDefinition* stage = model_->findAgent(pop.stage);
        for (std::uint64_t i = 0; i < pop.count; ++i) {
            const Address base = memory_.allocate(pop.stage, sizeOfAgent(*stage));
            memory_.write(base, sampleUniform(memory_.rng(), 0.0, width));
            memory_.write(base + 1, sampleUniform(memory_.rng(), 0.0, height));
            initializeBlock(ctx, *stage, base, 2);
        }
    }
    memory_.store();
    memory_.load(1);
}

void Simulation::perform(const AgentDefinition& agent, Address base, const ActionDefinition& action,
                         std::vector<Birth>& births, std::map<Address, bool>& ended) {
    ExecutionContext ctx = context();
    ctx.performerAgent = &agent;
    ctx.performer = base;
    ctx.action = &action;

    for (const auto& d : action.definitions) evalAttributeDefinition(ctx, d);

    for (const auto& l : action.lifecycle) {
        if (const auto* s = std::get_if<Spawn>(&l.directive)) {
            if (s->guard && !evalComparison(ctx, *s->guard)) continue;
            const double n = std::trunc(evalExpression(ctx, s->count));
            if (!(n >= 0.0)) ctx.abort("spawn count " + formatDouble(n) + " is negative", l.pos);
            if (n > 1e9) ctx.abort("spawn count " + formatDouble(n) + " is too large", l.pos);
            if (n > 0.0) births.push_back({s->stage, base, static_cast<std::size_t>(n), false});
            continue;
        }
        if (ended[base]) continue;
        if (const auto* t = std::get_if<StageTransition>(&l.directive)) {
            if (!evalComparison(ctx, t->guard)) continue;
            births.push_back({t->target, base, 1, true});
        } else if (!evalComparison(ctx, std::get<Die>(l.directive).guard)) {
            continue;
        }
        ended[base] = true;
        memory_.kill(base);
    }
}

void Simulation::applyBirths(const std::vector<Birth>& births) {
    ExecutionContext ctx = context();
    for (const auto& b : births) {
        const AgentDefinition& target = *model_->findAgent(b.stage);
        const auto& targetSlots = layout_.slots.at(b.stage);
        const auto& parentSlots = layout_.slots.at(memory_.animats().at(b.parent).stage);
        for (std::size_t i = 0; i < b.count; ++i) {
            const Address base = memory_.allocate(b.stage, sizeOfAgent(target));
            memory_.write(base, memory_.committed(b.parent));
            memory_.write(base + 1, memory_.committed(b.parent + 1));
            const auto& decls = declaredAttributes(target);
            for (std::size_t k = 0; k < decls.size(); ++k) {
                const Address a = base + targetSlots.at(decls[k].identifier);
                auto inherited = parentSlots.find(decls[k].identifier);
                if (b.transition && inherited != parentSlots.end())
                    memory_.write(a, memory_.committed(b.parent + inherited->second));
                else
                    memory_.write(a, decls[k].initial ? evalExpression(ctx, *decls[k].initial) : 0.0);
            }
        }
    }
}

void Simulation::step() {
    const std::size_t k = memory_.ticks();
    if (k < 1) throw std::logic_error("step: call initialize() first");

    // Every performer is fixed at the start of the tick.
    std::map<Identifier, std::vector<Address>> performers;
    auto performersOf = [&](const Identifier& agent) -> const std::vector<Address>& {
        auto it = performers.find(agent);
        if (it != performers.end()) return it->second;
        std::vector<Address> bases;
        if (agent == kWorldAgent) {
            if (layout_.world) bases.push_back(*layout_.world);
        } else {
            bases = memory_.blocksOf(agent);
        }
        return performers.emplace(agent, std::move(bases)).first->second;
    };
    for (const auto& [task, action] : tasks_) performersOf(task->agent);

    std::vector<Birth> births;
    std::map<Address, bool> ended;
    for (const auto& [task, action] : tasks_) {
        const AgentDefinition& agent = *model_->findAgent(task->agent);
        for (Address base : performers.at(task->agent)) perform(agent, base, action, births, ended);
    }
    applyBirths(births);
    memory_.store();
    memory_.load(k + 1);
}

void Simulation::rewind(std::size_t t) {
    memory_.load(t);
    memory_.storage().truncate(t);
}

// ---------------------------------------------------------------------------

std::string RunSummary::csv() const {
    std::string out = "tick,stage,count\n";
    for (const auto& r : rows) out += std::to_string(r.tick) + "," + r.stage + "," + std::to_string(r.count) + "\n";
    return out;
}

RunSummary runSimulation(const Model& m, const SimulationConfig& cfg, StorageBackend& backend) {
    Simulation sim(m, cfg, backend);
    RunSummary summary;
    auto record = [&] {
        summary.finalTick = sim.tick();
        const auto counts = populationCounts(m, sim.memory());
        for (const auto* s : m.stages()) summary.rows.push_back({sim.tick(), s->name, counts.at(s->name)});
    };
    try {
        sim.initialize();
        record();
        for (std::uint64_t i = 0; i < cfg.steps; ++i) {
            sim.step();
            record();
        }
    } catch (const RuntimeAbort& e) {
        summary.abort = e;
    }
    return summary;
}

}  // namespace remodyc
