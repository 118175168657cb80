#include <iostream>

#include "CLI11.hpp"
#include "remodyc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"remodyc: check, run and replay multi-agent population models"};
    app.require_subcommand(1);

    std::string model, config, out, dir, stage, backend = "file";
    std::uint64_t tick = 0;

    auto* check = app.add_subcommand("check", "Parse and type-check a model");
    check->add_option("model", model, "Model file")->required();

    auto* run = app.add_subcommand("run", "Run a model and record its trace");
    run->add_option("model", model, "Model file")->required();
    run->add_option("--config", config, "Simulation settings file")->required();
    run->add_option("--out", out, "Run directory (file backend)");
    run->add_option("--backend", backend, "Trace storage")->check(CLI::IsMember({"file", "memory"}));

    auto* replay = app.add_subcommand("replay", "Print one recorded frame");
    replay->add_option("dir", dir, "Run directory")->required();
    replay->add_option("--tick", tick, "Frame number, from 1")->required();

    auto* chart = app.add_subcommand("chart", "Population of a stage over time");
    chart->add_option("dir", dir, "Run directory")->required();
    chart->add_option("--stage", stage, "Stage name")->required();
    chart->add_option("--out", out, "Output CSV")->required();

    auto* fmt = app.add_subcommand("fmt", "Rewrite a model in canonical form");
    fmt->add_option("model", model, "Model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return remodyc::kExitModel;
    }

    if (*check) return remodyc::cmdCheck(model, std::cout, std::cerr);
    if (*run) {
        const auto b = backend == "memory" ? remodyc::Backend::memory : remodyc::Backend::file;
        return remodyc::cmdRun(model, config, out, b, std::cout, std::cerr);
    }
    if (*replay) return remodyc::cmdReplay(dir, tick, std::cout, std::cerr);
    if (*chart) return remodyc::cmdChart(dir, stage, out, std::cerr);
    return remodyc::cmdFmt(model, std::cerr);
}
