#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "remodyc/config.hpp"
#include "remodyc/interp.hpp"
#include "remodyc/parser.hpp"
#include "remodyc/printer.hpp"
#include "samples.hpp"

using namespace remodyc;

namespace {

SimulationConfig grid(double widthKm, double heightKm, std::uint64_t steps = 1) {
    SimulationConfig cfg;
    cfg.worldWidth = widthKm * 1000;
    cfg.worldHeight = heightKm * 1000;
    cfg.patchSize = 1000;
    cfg.steps = steps;
    cfg.seed = 3;
    return cfg;
}

// Context for one performer of a running simulation.
ExecutionContext contextFor(Simulation& sim, const Model& m, const Identifier& agent, Address base) {
    ExecutionContext ctx;
    ctx.model = &m;
    ctx.memory = &sim.memory();
    ctx.layout = &sim.layout();
    ctx.deltaTime = sim.config().deltaTime;
    ctx.tick = sim.tick();
    ctx.performerAgent = m.findAgent(agent);
    ctx.performer = base;
    return ctx;
}

// Moves the simulation to a new frame holding the pending writes.
void commit(Simulation& sim) {
    sim.memory().store();
    sim.memory().load(sim.memory().storage().frameCount());
}

double eval(ExecutionContext& ctx, const char* text) { return evalExpression(ctx, parseExpression(text)); }

std::vector<TraceFrame> frames(const StorageBackend& s) {
    std::vector<TraceFrame> out;
    for (std::size_t t = 1; t <= s.frameCount(); ++t) out.push_back(s.loadFrame(t));
    return out;
}

}  // namespace

TEST_CASE("getAttributeAddress") {
    SUBCASE("slot offsets") {
        const Model m = parseModel(testing::kStagesText);
        Layout layout = Layout::forModel(m, grid(1, 1));
        InMemoryStorage storage;
        MemoryImage mem(storage);
        ExecutionContext ctx;
        ctx.memory = &mem;
        ctx.layout = &layout;
        ctx.performerAgent = m.findAgent("Adult");
        ctx.performer = 10;
        CHECK(getAttributeAddress(ctx, AgentRef::my, "age") == 12);
        CHECK(getAttributeAddress(ctx, AgentRef::my, "x") == 10);
        CHECK(getAttributeAddress(ctx, AgentRef::my, "y") == 11);
        CHECK_THROWS_AS(getAttributeAddress(ctx, AgentRef::my, "energy"), AddressError);
        CHECK_THROWS_AS(getAttributeAddress(ctx, AgentRef::world, "age"), AddressError);
    }
    SUBCASE("here resolves by floor division and clamps") {
        const Model m = parseModel(std::string(testing::kPatchText) + testing::kStagesText);
        SimulationConfig cfg = grid(3, 2);
        cfg.populations = {{1, "Adult"}};
        InMemoryStorage storage;
        Simulation sim(m, cfg, storage);
        sim.initialize();
        const Address adult = sim.memory().blocksOf("Adult").at(0);
        ExecutionContext ctx = contextFor(sim, m, "Adult", adult);

        auto hereAt = [&](double x, double y) {
            sim.memory().write(adult, x);
            sim.memory().write(adult + 1, y);
            commit(sim);
            return getAttributeAddress(ctx, AgentRef::here, "grass");
        };
        CHECK(*sim.layout().firstPatch == 1);
        CHECK(hereAt(1500, 0) == sim.layout().patchAt(1, 0));
        CHECK(sim.layout().patchAt(1, 0) == 2);
        CHECK(hereAt(1500, 1999) == sim.layout().patchAt(1, 1));
        CHECK(hereAt(2999.5, 1000) == sim.layout().patchAt(2, 1));
        CHECK(hereAt(3000, 2000) == sim.layout().patchAt(2, 1));
        CHECK(hereAt(-50, 7000) == sim.layout().patchAt(0, 1));
        CHECK(hereAt(NAN, -1) == sim.layout().patchAt(0, 0));
    }
}

TEST_CASE("evalExpression") {
    const Model m = parseModel("World with\n    n [] = 4.\nAdult is G with\n    age [day] = 2 [day].\n");
    SimulationConfig cfg = grid(1, 1);
    cfg.populations = {{1, "Adult"}};
    InMemoryStorage storage;
    Simulation sim(m, cfg, storage);
    sim.initialize();
    ExecutionContext ctx = contextFor(sim, m, "Adult", sim.memory().blocksOf("Adult").at(0));

    CHECK(eval(ctx, "0.5 [km/day]") == 500.0 / 86400.0);
    CHECK(eval(ctx, "7200 [s] in [h]") == 2.0);
    CHECK(eval(ctx, "3 as [km]") == 3000.0);
    CHECK(eval(ctx, "delta time") == 86400.0);
    CHECK(eval(ctx, "my age") == 2 * 86400.0);
    CHECK(eval(ctx, "my age in [day]") == 2.0);
    CHECK(eval(ctx, "world's n") == 4.0);
    CHECK(eval(ctx, "2^3^2") == 512.0);
    CHECK(eval(ctx, "-2^2") == -4.0);
    CHECK(eval(ctx, "10 - 4 - 3") == 3.0);
    CHECK(eval(ctx, "min(3, 2) + max(3, 2) + abs(-1) + floor(2.5) + ceiling(2.5)") == 2 + 3 + 1 + 2 + 3);
    CHECK(eval(ctx, "sqrt(16 [m^2])") == 4.0);
    CHECK(eval(ctx, "log(1000)") == doctest::Approx(3.0));
    CHECK(eval(ctx, "ln(exp(2))") == doctest::Approx(2.0));
    CHECK(eval(ctx, "cos(0 [rad]) + sin(0 [rad]) + tan(0 [rad])") == 1.0);
    CHECK(eval(ctx, "uniform 3 to 3") == 3.0);

    CHECK_THROWS_AS(eval(ctx, "1 / (2 - 2)"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "ln(0)"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "log(-1)"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "sqrt(-1)"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "(-8)^0.5"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "uniform 2 to 1"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "normal(0, -1)"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "gamma(0, 1)"), RuntimeAbort);
    CHECK_THROWS_AS(eval(ctx, "loglogistic(1, 0)"), RuntimeAbort);

    try {
        eval(ctx, "1 +\n  1 / 0");
        FAIL("expected an abort");
    } catch (const RuntimeAbort& e) {
        CHECK(e.message() == "division by zero");
        CHECK(e.tick() == 1);
        CHECK(e.agent() == "Adult");
        CHECK(e.pos().line == 2);
        CHECK(std::string(e.what()) == "runtime abort at tick 1 (Adult at address 2), line 2:5: division by zero");
    }
}

TEST_CASE("utilities are memoized") {
    const Model m = parseModel(testing::fixture("memo.rmd"));
    SimulationConfig cfg = grid(1, 1);
    cfg.populations = {{1, "Adult"}};
    InMemoryStorage storage;
    Simulation sim(m, cfg, storage);
    sim.initialize();
    ExecutionContext ctx = contextFor(sim, m, "Adult", sim.memory().blocksOf("Adult").at(0));
    ctx.action = m.findAction("jitter");
    const std::uint64_t before = sim.memory().rng().state();
    const double a = eval(ctx, "u");
    const double b = eval(ctx, "u");
    CHECK(a == b);
    CHECK(Rng::drawsBetween(before, sim.memory().rng().state()) == 1);

    Rng replay(before);
    CHECK(a == replay.nextUnit());

    ctx.utilityCache.clear();
    eval(ctx, "u");
    CHECK(Rng::drawsBetween(before, sim.memory().rng().state()) == 2);
}

TEST_CASE("evalAttributeDefinition") {
    const Model m = parseModel(testing::kStagesText);
    SimulationConfig cfg = grid(1, 1);
    cfg.populations = {{1, "Adult"}};
    InMemoryStorage storage;
    Simulation sim(m, cfg, storage);
    sim.initialize();
    const Address base = sim.memory().blocksOf("Adult").at(0);
    ExecutionContext ctx = contextFor(sim, m, "Adult", base);
    auto define = [&](const char* target, Decorator d, const char* e) {
        evalAttributeDefinition(ctx, AttributeDefinition{AttributeVariable{AgentRef::my, target}, d, parseExpression(e), {}});
    };

    define("age", Decorator::delta, "delta time");
    CHECK(sim.memory().deltaSlot(base + 2) == 86400.0);
    define("x", Decorator::differential, "2 [m/s]");
    CHECK(sim.memory().deltaSlot(base) == 2 * 86400.0);
    const double y = sim.memory().read(base + 1);
    define("y", Decorator::assign, "5 [m]");
    CHECK(sim.memory().nextSlot(base + 1) == 5.0);
    CHECK(sim.memory().read(base + 1) == y);
    CHECK(eval(ctx, "my y") == y);
}

TEST_CASE("instantiateTask") {
    const Model m = parseModel(std::string(testing::kPatchText) + testing::kStagesText + testing::kActionsText +
                               testing::kTaskText + "Adult age.\n");
    const ActionDefinition move = instantiateTask(m, m.tasks[0]);
    CHECK(placeholdersOf(move).empty());
    CHECK(move.findUtility("r")->expression == m.tasks[0].bindings[0].expression);
    CHECK(printExpression(move.findUtility("theta")->expression) == "direction neighbor's grass");
    CHECK(move.definitions == m.findAction("move")->definitions);

    CHECK(instantiateTask(m, m.tasks[1]) == *m.findAction("age"));

    TaskDefinition missing{"Adult", "move", {}, {}};
    CHECK_THROWS_AS(instantiateTask(m, missing), ModelError);
    TaskDefinition extra = m.tasks[0];
    extra.bindings.push_back({"colour", parseExpression("1"), {}});
    CHECK_THROWS_AS(instantiateTask(m, extra), ModelError);
    TaskDefinition unknown{"Adult", "fly", {}, {}};
    CHECK_THROWS_AS(instantiateTask(m, unknown), ModelError);
}

TEST_CASE("placeholder targets are replaced by the bound attribute") {
    const Model m = parseModel(
        "Adult is G with\n    energy [kg].\nto feed is\n    the store' = 1 [kg].\nAdult feed where the store -> my energy.\n");
    const ActionDefinition a = instantiateTask(m, m.tasks[0]);
    const auto* v = std::get_if<AttributeVariable>(&a.definitions[0].variable);
    REQUIRE(v);
    CHECK(v->identifier == "energy");
    CHECK(v->agent == AgentRef::my);
}

TEST_CASE("directionToRichest") {
    const Model m = parseModel(std::string(testing::kPatchText) + testing::kStagesText);
    SimulationConfig cfg = grid(3, 3);
    cfg.populations = {{1, "Adult"}};
    InMemoryStorage storage;
    Simulation sim(m, cfg, storage);
    sim.initialize();
    const Layout& l = sim.layout();
    const Address adult = sim.memory().blocksOf("Adult").at(0);
    ExecutionContext ctx = contextFor(sim, m, "Adult", adult);

    auto setup = [&](double x, double y, std::vector<std::tuple<int, int, double>> grass) {
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) sim.memory().write(l.patchAt(c, r), 1.0);
        for (auto [c, r, v] : grass) sim.memory().write(l.patchAt(c, r), v);
        sim.memory().write(adult, x);
        sim.memory().write(adult + 1, y);
        commit(sim);
        return directionToRichest(ctx, "grass");
    };
    const double pi = std::numbers::pi;

    // Ties go to the first patch scanned: bottom-left.
    CHECK(setup(1500, 1500, {}) == std::atan2(-1000.0, -1000.0));
    CHECK(setup(1500, 1500, {}) == doctest::Approx(-3 * pi / 4));
    CHECK(setup(1500, 1500, {{2, 1, 5.0}}) == 0.0);
    CHECK(setup(1500, 1500, {{1, 2, 5.0}}) == doctest::Approx(pi / 2));
    CHECK(setup(1500, 1500, {{0, 1, 5.0}}) == doctest::Approx(pi));
    CHECK(setup(1500, 1500, {{1, 1, 5.0}}) == 0.0);
    // Off-centre performer: the heading aims at the patch centre.
    CHECK(setup(1200, 1700, {{2, 1, 5.0}}) == std::atan2(1500.0 - 1700.0, 2500.0 - 1200.0));

    // Corner: only in-bounds patches are scanned, so the own patch is first.
    CHECK(setup(500, 500, {}) == 0.0);
    CHECK(setup(500, 500, {{1, 1, 5.0}}) == doctest::Approx(pi / 4));
    CHECK(setup(500, 500, {{2, 2, 9.0}, {1, 0, 2.0}}) == 0.0);
    CHECK(setup(2500, 2500, {}) == doctest::Approx(-3 * pi / 4));
}

TEST_CASE("age hand trace") {
    const Model m = parseModel(testing::fixture("age_only.rmd"));
    SimulationConfig cfg = parseConfig(testing::fixture("age_only.cfg"));
    cfg.steps = 3;
    InMemoryStorage storage;
    const RunSummary summary = runSimulation(m, cfg, storage);
    REQUIRE(storage.frameCount() == 4);
    CHECK(summary.finalTick == 4);
    CHECK_FALSE(summary.abort);
    const Address age = 3;  // x, y, age of the only block
    for (std::size_t t = 1; t <= 4; ++t) CHECK(storage.loadFrame(t).values.at(age) == (t - 1) * 86400.0);
    CHECK(storage.loadFrame(4).values.at(age) == 259200.0);
    CHECK(summary.csv() == "tick,stage,count\n1,Adult,1\n2,Adult,1\n3,Adult,1\n4,Adult,1\n");
}

TEST_CASE("steps and empty populations") {
    const Model m = parseModel(testing::fixture("age_only.rmd"));
    SimulationConfig cfg = grid(1, 1, 1);
    InMemoryStorage storage;
    const RunSummary empty = runSimulation(m, cfg, storage);
    CHECK(storage.frameCount() == 2);
    CHECK_FALSE(empty.abort);
    CHECK(storage.loadFrame(2).values.empty());
    CHECK(empty.rows.size() == 2);
    CHECK(empty.rows[1].count == 0);

    cfg.populations = {{2, "Adult"}};
    InMemoryStorage again;
    runSimulation(m, cfg, again);
    CHECK(again.frameCount() == 2);
}

TEST_CASE("initial state") {
    const Model m = parseModel(
        "World with\n    t [day] = 1 [day].\nPatch with\n    g [kg] = uniform 0 [kg] to 1 [kg].\n"
        "Egg is G with\n    age [day] = 2 [h]\n    w [g].\n");
    SimulationConfig cfg = grid(2, 1);
    cfg.seed = 77;
    cfg.populations = {{2, "Egg"}};
    InMemoryStorage storage;
    Simulation sim(m, cfg, storage);
    sim.initialize();
    const TraceFrame f = storage.loadFrame(1);

    // World, two patches, then the eggs; every draw in that order.
    Rng rng(77);
    std::map<Address, double> expected{{1, 86400.0}};
    expected[2] = sampleUniform(rng, 0, 1);
    expected[3] = sampleUniform(rng, 0, 1);
    for (Address base : {4, 8}) {
        expected[base] = sampleUniform(rng, 0, 2000);
        expected[base + 1] = sampleUniform(rng, 0, 1000);
        expected[base + 2] = 7200.0;
        expected[base + 3] = 0.0;
    }
    CHECK(f.values == expected);
    CHECK(f.rngState == rng.state());
    CHECK(f.animats.at(1) == AnimatEntry{"World", 1});
    CHECK(f.animats.at(3) == AnimatEntry{"Patch", 2});
    CHECK(f.animats.at(8) == AnimatEntry{"Egg", 2});
    CHECK(*sim.layout().world == 1);
}

TEST_CASE("implicit world and attribute-less patches take no memory") {
    const Model m = parseModel(testing::fixture("age_only.rmd"));
    InMemoryStorage storage;
    SimulationConfig cfg = grid(2, 2);
    cfg.populations = {{1, "Adult"}};
    Simulation sim(m, cfg, storage);
    sim.initialize();
    CHECK_FALSE(sim.layout().world);
    CHECK_FALSE(sim.layout().firstPatch);
    CHECK(storage.loadFrame(1).animats.begin()->first == 1);
}

TEST_CASE("lifecycle") {
    SUBCASE("hatching happens at the first tick where the guard holds") {
        const Model m = parseModel(
            "Adult is G with\n    age [day]\n    wings [] = 2.\nEgg is G with\n    age [day] = 0 [day]\n    yolk [g] = 1 [g].\n"
            "to age is\n    my delta age' = delta time.\n"
            "to hatch is\n    my become Adult when my age >= 10 [day].\n"
            "Egg age.\nEgg hatch.\nAdult age.\n");
        SimulationConfig cfg = grid(1, 1, 14);
        cfg.populations = {{1, "Egg"}};
        InMemoryStorage storage;
        const RunSummary s = runSimulation(m, cfg, storage);
        REQUIRE(storage.frameCount() == 15);
        for (std::size_t t = 1; t <= 11; ++t) {
            CAPTURE(t);
            const TraceFrame f = storage.loadFrame(t);
            REQUIRE(f.animats.size() == 1);
            CHECK(f.animats.begin()->second.stage == "Egg");
            CHECK(f.values.at(3) == (t - 1) * 86400.0);
        }
        const TraceFrame hatched = storage.loadFrame(12);
        REQUIRE(hatched.animats.size() == 1);
        CHECK(hatched.animats.begin()->first == 5);
        CHECK(hatched.animats.begin()->second == AnimatEntry{"Adult", 1});
        const TraceFrame before = storage.loadFrame(11);
        CHECK(hatched.values.at(5) == before.values.at(1));
        CHECK(hatched.values.at(6) == before.values.at(2));
        CHECK(hatched.values.at(7) == 11 * 86400.0);  // the committed age, this tick's delta included
        CHECK(hatched.values.at(8) == 2.0);
        CHECK_FALSE(hatched.values.count(1));
        CHECK(storage.loadFrame(15).values.at(7) == 14 * 86400.0);
        CHECK(s.rows.back().stage == "Egg");
        CHECK(s.rows.back().count == 0);
    }
    SUBCASE("spawn truncates the count and places offspring at the parent") {
        const Model m = parseModel(
            "Adult is G with\n    n [] = 0.\nEgg is G with\n    age [day] = 3 [day].\n"
            "to lay is\n    my d/dt x' = 1 [m/day]\n    my spawn Egg' = 2.9 when my n < 1\n    my delta n' = 1.\n"
            "Adult lay.\n");
        SimulationConfig cfg = grid(1, 1, 2);
        cfg.populations = {{1, "Adult"}};
        InMemoryStorage storage;
        runSimulation(m, cfg, storage);
        const TraceFrame f1 = storage.loadFrame(1), f2 = storage.loadFrame(2), f3 = storage.loadFrame(3);
        CHECK(f2.animats.size() == 3);
        CHECK(f2.animats.at(4) == AnimatEntry{"Egg", 1});
        CHECK(f2.animats.at(7) == AnimatEntry{"Egg", 2});
        CHECK(f2.values.at(4) == f1.values.at(1) + 1.0);
        CHECK(f2.values.at(5) == f1.values.at(2));
        CHECK(f2.values.at(6) == 3 * 86400.0);
        // n reached 1, so no more eggs.
        CHECK(f3.animats.size() == 3);
    }
    SUBCASE("death") {
        const Model m = parseModel(
            "Adult is G with\n    age [day] = 0 [day].\nto age is\n    my delta age' = delta time\n"
            "    my die when my age >= 2 [day]\n    my die when my age >= 1 [day].\nAdult age.\n");
        SimulationConfig cfg = grid(1, 1, 4);
        cfg.populations = {{2, "Adult"}};
        InMemoryStorage storage;
        const RunSummary s = runSimulation(m, cfg, storage);
        CHECK(storage.loadFrame(2).animats.size() == 2);
        CHECK(storage.loadFrame(3).animats.empty());
        CHECK(storage.loadFrame(3).values.empty());
        CHECK(s.rows[2].count == 0);
        CHECK_FALSE(s.abort);
    }
    SUBCASE("negative spawn count aborts") {
        const Model m = parseModel("Adult is G with.\nto lay is\n    my spawn Adult' = 0 - 1.\nAdult lay.\n");
        SimulationConfig cfg = grid(1, 1, 3);
        cfg.populations = {{1, "Adult"}};
        InMemoryStorage storage;
        const RunSummary s = runSimulation(m, cfg, storage);
        REQUIRE(s.abort);
        CHECK(s.abort->tick() == 1);
        CHECK(storage.frameCount() == 1);
    }
}

TEST_CASE("division by zero keeps completed frames") {
    const Model m = parseModel(testing::fixture("div_zero.rmd"));
    const SimulationConfig cfg = parseConfig(testing::fixture("div_zero.cfg"));
    InMemoryStorage storage;
    const RunSummary s = runSimulation(m, cfg, storage);
    REQUIRE(s.abort);
    CHECK(s.abort->tick() == 4);
    CHECK(s.abort->message() == "division by zero");
    CHECK(s.abort->pos().line == 8);
    CHECK(storage.frameCount() == 4);
    CHECK(s.finalTick == 4);
}

TEST_CASE("reads are isolated within a tick") {
    // Every definition reads 'a' after some earlier definition has written it.
    const Model m = parseModel(
        "Adult is G with\n    a [] = 1\n    b []\n    c []\n    d [].\n"
        "to mix is\n    my a' = 100\n    my b' = my a\n    my delta a' = 5\n    my c' = my a\n    my d' = u\n"
        "where\n    u = my a.\nAdult mix.\nAdult mix.\n");
    SimulationConfig cfg = grid(1, 1, 1);
    cfg.populations = {{1, "Adult"}};
    InMemoryStorage storage;
    runSimulation(m, cfg, storage);
    const TraceFrame f = storage.loadFrame(2);
    CHECK(f.values.at(3) == 110.0);
    CHECK(f.values.at(4) == 1.0);
    CHECK(f.values.at(5) == 1.0);
    CHECK(f.values.at(6) == 1.0);
}

TEST_CASE("stored values are SI") {
    const Model m = parseModel(
        "Adult is G with\n    d [km] = 2 [km]\n    v [km/h] = 36 [km/h]\n    t [min].\n"
        "to go is\n    my d/dt d' = my v\n    my t' = 90 [min].\nAdult go.\n");
    SimulationConfig cfg = grid(1, 1, 1);
    cfg.deltaTime = 60;
    cfg.populations = {{1, "Adult"}};
    InMemoryStorage storage;
    runSimulation(m, cfg, storage);
    const TraceFrame f1 = storage.loadFrame(1), f2 = storage.loadFrame(2);
    CHECK(f1.values.at(3) == 2000.0);
    CHECK(f1.values.at(4) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(f2.values.at(3) == doctest::Approx(2600.0).epsilon(1e-15));
    CHECK(f2.values.at(5) == 5400.0);
}

TEST_CASE("d/dt and explicit delta give identical traces") {
    const std::string ddt = testing::fixture("move_ddt.rmd");
    const std::string delta = testing::fixture("move_delta.rmd");
    const SimulationConfig cfg = parseConfig(testing::fixture("move.cfg"));
    InMemoryStorage a, b;
    runSimulation(parseModel(ddt), cfg, a);
    runSimulation(parseModel(delta), cfg, b);
    REQUIRE(a.frameCount() == cfg.steps + 1);
    CHECK(frames(a) == frames(b));
}

TEST_CASE("permuted delta definitions give identical traces") {
    const SimulationConfig cfg = parseConfig(testing::fixture("delta_order.cfg"));
    InMemoryStorage a, b;
    runSimulation(parseModel(testing::fixture("delta_order_a.rmd")), cfg, a);
    runSimulation(parseModel(testing::fixture("delta_order_b.rmd")), cfg, b);
    CHECK(frames(a) == frames(b));
}

TEST_CASE("rewind and re-run reproduces the trace") {
    const Model m = parseModel(testing::fixture("eggs_and_grasshoppers.rmd"));
    SimulationConfig cfg = parseConfig(testing::fixture("eggs_and_grasshoppers.cfg"));
    InMemoryStorage storage;
    Simulation sim(m, cfg, storage);
    sim.initialize();
    for (int i = 0; i < 40; ++i) sim.step();
    const auto original = frames(storage);

    for (std::size_t t : {1, 17, 40}) {
        sim.memory().load(t);
        CHECK(sim.memory().rng().state() == original[t - 1].rngState);
        for (const auto& [a, v] : original[t - 1].values) REQUIRE(sim.memory().read(a) == v);
    }
    sim.memory().load(41);

    sim.rewind(12);
    CHECK(storage.frameCount() == 12);
    while (sim.tick() < 41) sim.step();
    CHECK(frames(storage) == original);
}

TEST_CASE("same inputs give the same trace") {
    const Model m = parseModel(testing::fixture("eggs_and_grasshoppers.rmd"));
    SimulationConfig cfg = parseConfig(testing::fixture("eggs_and_grasshoppers.cfg"));
    cfg.steps = 60;
    InMemoryStorage a, b, c;
    runSimulation(m, cfg, a);
    runSimulation(m, cfg, b);
    CHECK(frames(a) == frames(b));
    cfg.seed += 1;
    runSimulation(m, cfg, c);
    CHECK(frames(a) != frames(c));
}

TEST_CASE("memo fixture draws once per animat per tick") {
    const Model m = parseModel(testing::fixture("memo.rmd"));
    const SimulationConfig cfg = parseConfig(testing::fixture("memo.cfg"));
    InMemoryStorage storage;
    runSimulation(m, cfg, storage);
    const std::uint64_t animats = cfg.populations.at(0).count;
    CHECK(Rng::drawsBetween(cfg.seed, storage.loadFrame(1).rngState) == 2 * animats);
    for (std::size_t t = 2; t <= storage.frameCount(); ++t)
        CHECK(Rng::drawsBetween(storage.loadFrame(t - 1).rngState, storage.loadFrame(t).rngState) == animats);
}

TEST_CASE("construction rejects bad models and configs") {
    const Model cyclic = parseModel(testing::fixture("cyclic_utilities.rmd"));
    InMemoryStorage storage;
    CHECK_THROWS_AS(Simulation(cyclic, grid(1, 1), storage), ModelError);
    const Model ok = parseModel(testing::fixture("age_only.rmd"));
    SimulationConfig cfg = grid(1, 1);
    cfg.populations = {{1, "Larva"}};
    CHECK_THROWS_AS(Simulation(ok, cfg, storage), ModelError);
    cfg = grid(1, 1);
    cfg.steps = 0;
    CHECK_THROWS_AS(Simulation(ok, cfg, storage), ConfigError);
    cfg = grid(1, 1);
    Simulation sim(ok, cfg, storage);
    CHECK_THROWS_AS(sim.step(), std::logic_error);
}

TEST_CASE("populationCounts lists every stage") {
    const Model m = parseModel(testing::kStagesText);
    InMemoryStorage storage;
    MemoryImage mem(storage);
    mem.allocate("Egg", 3);
    mem.allocate("Egg", 3);
    const Address dead = mem.allocate("Egg", 3);
    mem.kill(dead);
    CHECK(populationCounts(m, mem) == std::map<Identifier, std::size_t>{{"Adult", 0}, {"Egg", 2}});
}
