#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "remodyc/config.hpp"
#include "remodyc/interp.hpp"
#include "remodyc/memory.hpp"
#include "remodyc/parser.hpp"
#include "remodyc/printer.hpp"
#include "remodyc/typecheck.hpp"
#include "remodyc/units.hpp"

namespace py = pybind11;
using namespace remodyc;

namespace {

py::dict unitDict(const Unit& u) {
    py::dict d;
    d["text"] = formatUnit(u);
    d["scale"] = u.scale;
    py::dict dims;
    for (const auto& [base, exp] : u.dimension.terms()) dims[py::str(std::string(baseUnitName(base)))] = exp;
    d["dimension"] = dims;
    return d;
}

py::list diagnostics(const std::vector<Diagnostic>& ds, const std::string& path) {
    py::list out;
    for (const auto& d : ds) {
        py::dict item;
        item["severity"] = d.severity == Severity::error ? "error" : "warning";
        item["message"] = d.message;
        item["line"] = d.pos.line;
        item["column"] = d.pos.column;
        item["text"] = renderDiagnostic(d, path);
        out.append(item);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Parser, unit checker and interpreter for population models";

    py::register_exception<SourceError>(m, "SourceError", PyExc_ValueError);
    py::register_exception<UnitError>(m, "UnitError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<TypeError>(m, "TypeCheckError", PyExc_ValueError);

    m.def("parse_unit", [](const std::string& text) { return unitDict(parseUnit(text)); }, py::arg("text"));

    m.def(
        "infer_unit",
        [](const std::string& expr) {
            TypeEnv env;
            return unitDict(inferType(parseExpression(expr), env));
        },
        py::arg("expression"), "Unit of a closed expression; raises ValueError on a type error.");

    m.def(
        "check",
        [](const std::string& source, const std::string& path) {
            return diagnostics(checkModel(parseModel(source)), path);
        },
        py::arg("source"), py::arg("path") = "model");

    m.def("format_model", [](const std::string& source) { return prettyPrint(parseModel(source)); },
          py::arg("source"));

    m.def(
        "run",
        [](const std::string& source, const std::string& config) {
            const Model model = parseModel(source);
            const SimulationConfig cfg = parseConfig(config);
            InMemoryStorage storage;
            const RunSummary summary = runSimulation(model, cfg, storage);
            py::list rows;
            for (const auto& r : summary.rows) rows.append(py::make_tuple(r.tick, r.stage, r.count));
            py::dict out;
            out["rows"] = rows;
            out["final_tick"] = summary.finalTick;
            out["frames"] = storage.frameCount();
            out["abort"] = summary.abort ? py::object(py::str(summary.abort->what())) : py::object(py::none());
            py::list final;
            if (storage.frameCount() > 0)
                for (const auto& [a, v] : storage.loadFrame(storage.frameCount()).values)
                    final.append(py::make_tuple(a, v));
            out["final_values"] = final;
            return out;
        },
        py::arg("source"), py::arg("config"),
        "Runs a model in memory; returns per-tick stage counts and the last frame.");
}
