#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "model_gen.hpp"
#include "remodyc/parser.hpp"
#include "remodyc/printer.hpp"
#include "samples.hpp"

using namespace remodyc;

TEST_CASE("empty model prints nothing") { CHECK(prettyPrint(Model{}) == ""); }

TEST_CASE("sample texts round-trip") {
    for (const char* text : {testing::kStagesText, testing::kActionsText, testing::kTaskText, testing::kPatchText}) {
        const Model m = parseModel(text);
        const std::string once = prettyPrint(m);
        CAPTURE(once);
        CHECK(parseModel(once) == m);
        CHECK(prettyPrint(parseModel(once)) == once);
    }
}

TEST_CASE("canonical layout") {
    const Model m = parseModel(std::string(testing::kStagesText) + testing::kActionsText);
    CHECK(prettyPrint(m) == R"(Adult is Grasshopper with
    age [day].

Egg is Grasshopper with
    age [day] = 0 [day].

to age is
    my delta age' = delta time.

to move is
    my d/dt x' = cos(theta) * r
    my d/dt y' = sin(theta) * r
where
    theta = the heading
    r = the speed.
)");
}

TEST_CASE("expressions print with minimal parentheses") {
    auto same = [](const char* text, const char* printed) {
        CAPTURE(text);
        const Expression e = parseExpression(text);
        CHECK(printExpression(e) == printed);
        CHECK(parseExpression(printExpression(e)) == e);
    };
    same("1+2*3", "1 + 2 * 3");
    same("(1+2)*3", "(1 + 2) * 3");
    same("1-(2-3)", "1 - (2 - 3)");
    same("(1-2)-3", "1 - 2 - 3");
    same("(2^3)^2", "(2^3)^2");
    same("2^3^2", "2^3^2");
    same("(-2)^2", "(-2)^2");
    same("-(2^2)", "-2^2");
    same("2^-1", "2^-1");
    same("a - -b", "a - -b");
    same("(uniform 0 to 1) + 2", "(uniform 0 to 1) + 2");
    same("uniform (0 as [m]) to 1 [m]", "uniform (0 as [m]) to 1 [m]");
    same("(1 + 2) as [m] in [km]", "1 + 2 as [m] in [km]");
    same("(x in [h]) * 2", "(x in [h]) * 2");
    same("min(1 as [m], 2 [m])", "min(1 as [m], 2 [m])");
    same("0.5 [km/day]", "0.5 [km/day]");
    same("0.00001", "1e-05");
    same("1e20 [m]", "1e+20 [m]");
    same("123456.75", "123456.75");
    same("1 []", "1 []");
}

TEST_CASE("fixture models are fixed points") {
    namespace fs = std::filesystem;
    int n = 0;
    for (const auto& entry : fs::directory_iterator(testing::modelsDir())) {
        if (entry.path().extension() != ".rmd") continue;
        CAPTURE(entry.path().string());
        const Model m = parseModel(testing::slurp(entry.path()));
        const std::string printed = prettyPrint(m);
        CHECK(parseModel(printed) == m);
        CHECK(prettyPrint(parseModel(printed)) == printed);
        ++n;
    }
    CHECK(n >= 8);
}

TEST_CASE("generated models round-trip") {
    testing::ModelGenerator gen(12345);
    for (int i = 0; i < 500; ++i) {
        const Model m = gen.model();
        const std::string printed = prettyPrint(m);
        CAPTURE(printed);
        Model back;
        REQUIRE_NOTHROW(back = parseModel(printed));
        CHECK(back == m);
        CHECK(prettyPrint(back) == printed);
    }
}

TEST_CASE("generated expressions round-trip") {
    testing::ModelGenerator gen(99);
    for (int i = 0; i < 3000; ++i) {
        const Expression e = gen.expression(5);
        const std::string printed = printExpression(e);
        CAPTURE(printed);
        Expression back;
        REQUIRE_NOTHROW(back = parseExpression(printed));
        CHECK(back == e);
    }
}
