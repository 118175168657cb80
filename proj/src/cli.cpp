#include "remodyc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "remodyc/config.hpp"
#include "remodyc/file_storage.hpp"
#include "remodyc/interp.hpp"
#include "remodyc/parser.hpp"
#include "remodyc/printer.hpp"
#include "remodyc/text.hpp"
#include "remodyc/typecheck.hpp"

namespace fs = std::filesystem;

namespace remodyc {

namespace {

constexpr const char* kModelCopy = "model.rmd";

std::optional<std::string> readFile(const std::string& path, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << path << ": cannot read file\n";
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool writeFile(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) {
        err << path << ": cannot write file\n";
        return false;
    }
    return true;
}

std::optional<Model> parseOrReport(const std::string& text, const std::string& path, std::ostream& err) {
    try {
        return parseModel(text);
    } catch (const SourceError& e) {
        err << path << ":" << e.line() << ":" << e.column() << ": error: " << e.message() << "\n";
    } catch (const UnitError& e) {
        err << path << ": error: " << e.what() << "\n";
    }
    return std::nullopt;
}

/// Prints every diagnostic; true when none is an error.
bool report(const std::vector<Diagnostic>& diags, const std::string& path, std::ostream& err) {
    for (const auto& d : diags) err << renderDiagnostic(d, path) << "\n";
    return !hasErrors(diags);
}

struct RunDir {
    std::unique_ptr<FileStorage> storage;
    Model model;
};

/// Opens a recorded run; returns an exit code on failure.
int openRun(const std::string& runDir, RunDir& run, std::ostream& err) {
    std::map<std::string, std::string> meta;
    try {
        meta = readMeta(runDir);
    } catch (const StorageError& e) {
        err << e.what() << "\n";
        return kExitIo;
    }
    if (meta["version"] != std::to_string(kTraceFormatVersion)) {
        err << runDir << ": trace format version '" << meta["version"] << "' is not supported (expected "
            << kTraceFormatVersion << ")\n";
        return kExitModel;
    }
    const std::string modelPath = (fs::path(runDir) / kModelCopy).string();
    const auto text = readFile(modelPath, err);
    if (!text) return kExitIo;
    auto model = parseOrReport(*text, modelPath, err);
    if (!model) return kExitModel;
    run.model = std::move(*model);
    try {
        run.storage = std::make_unique<FileStorage>(runDir, FileStorage::Mode::open);
    } catch (const StorageError& e) {
        err << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace

int cmdCheck(const std::string& modelPath, std::ostream&, std::ostream& err) {
    const auto text = readFile(modelPath, err);
    if (!text) return kExitIo;
    const auto model = parseOrReport(*text, modelPath, err);
    if (!model) return kExitModel;
    return report(checkModel(*model), modelPath, err) ? kExitOk : kExitModel;
}

int cmdRun(const std::string& modelPath, const std::string& configPath, const std::string& outDir, Backend backend,
           std::ostream& out, std::ostream& err) {
    const auto text = readFile(modelPath, err);
    const auto cfgText = readFile(configPath, err);
    if (!text || !cfgText) return kExitIo;
    const auto model = parseOrReport(*text, modelPath, err);
    if (!model) return kExitModel;

    SimulationConfig cfg;
    try {
        cfg = parseConfig(*cfgText);
    } catch (const ConfigError& e) {
        err << configPath << ": " << e.what() << "\n";
        return kExitModel;
    }
    if (!report(checkModel(*model, &cfg), modelPath, err)) return kExitModel;

    std::unique_ptr<StorageBackend> storage;
    if (backend == Backend::memory) {
        storage = std::make_unique<InMemoryStorage>();
    } else {
        if (outDir.empty()) {
            err << "run: --out is required with the file backend\n";
            return kExitModel;
        }
        try {
            storage = std::make_unique<FileStorage>(outDir, FileStorage::Mode::create);
        } catch (const StorageError& e) {
            err << e.what() << "\n";
            return kExitIo;
        }
        if (!writeFile((fs::path(outDir) / kModelCopy).string(), *text, err)) return kExitIo;
    }

    RunSummary summary;
    try {
        summary = runSimulation(*model, cfg, *storage);
    } catch (const ModelError& e) {
        err << modelPath << ": " << e.what() << "\n";
        return kExitModel;
    } catch (const StorageError& e) {
        err << e.what() << "\n";
        return kExitIo;
    }

    if (backend == Backend::file) {
        MetaData meta = {
            {"version", std::to_string(kTraceFormatVersion)},
            {"rng", "splitmix64"},
            {"rng_streams", "1"},
            {"seed", std::to_string(cfg.seed)},
            {"delta_time", formatDouble(cfg.deltaTime)},
            {"steps", std::to_string(cfg.steps)},
            {"world_width", formatDouble(cfg.worldWidth)},
            {"world_height", formatDouble(cfg.worldHeight)},
            {"patch_size", formatDouble(cfg.patchSize)},
            {"frames", std::to_string(storage->frameCount())},
            {"status", summary.abort ? "aborted" : "complete"},
        };
        if (summary.abort) meta.emplace_back("abort", summary.abort->what());
        try {
            writeMeta(outDir, meta);
        } catch (const StorageError& e) {
            err << e.what() << "\n";
            return kExitIo;
        }
    }

    out << summary.csv();
    if (summary.abort) {
        err << modelPath << ": " << summary.abort->what() << "\n";
        return kExitAbort;
    }
    return kExitOk;
}

int cmdReplay(const std::string& runDir, std::uint64_t tick, std::ostream& out, std::ostream& err) {
    RunDir run;
    if (int rc = openRun(runDir, run, err)) return rc;
    if (tick < 1 || tick > run.storage->frameCount()) {
        err << runDir << ": tick " << tick << " is out of range 1.." << run.storage->frameCount() << "\n";
        return kExitModel;
    }
    TraceFrame frame;
    try {
        frame = run.storage->loadFrame(tick);
    } catch (const StorageError& e) {
        err << e.what() << "\n";
        return kExitIo;
    }

    std::string text = "address,stage,attribute,value\n";
    for (const auto& [base, entry] : frame.animats) {
        const AgentDefinition* agent = run.model.findAgent(entry.stage);
        if (!agent) {
            err << runDir << ": frame names unknown agent '" << entry.stage << "'\n";
            return kExitModel;
        }
        Address a = base;
        for (const auto& slot : attributeSlots(*agent)) {
            auto v = frame.values.find(a);
            if (v == frame.values.end()) {
                err << runDir << ": address " << a << " missing from tick " << tick << "\n";
                return kExitIo;
            }
            text += std::to_string(a) + "," + entry.stage + "," + slot.identifier + "," +
                    formatDouble(fromSI(v->second, slot.unit.unit));
            if (!slot.unit.text.empty()) text += " " + slot.unit.text;
            text += "\n";
            ++a;
        }
    }
    out << text;
    return kExitOk;
}

int cmdChart(const std::string& runDir, const std::string& stage, const std::string& outPath, std::ostream& err) {
    RunDir run;
    if (int rc = openRun(runDir, run, err)) return rc;
    if (!run.model.findStage(stage)) {
        err << runDir << ": the model has no stage '" << stage << "'\n";
        return kExitModel;
    }
    std::string csv = "tick,count\n";
    try {
        for (std::size_t t = 1; t <= run.storage->frameCount(); ++t) {
            std::size_t n = 0;
            for (const auto& [base, entry] : run.storage->loadFrame(t).animats)
                if (entry.stage == stage) ++n;
            csv += std::to_string(t) + "," + std::to_string(n) + "\n";
        }
    } catch (const StorageError& e) {
        err << e.what() << "\n";
        return kExitIo;
    }
    return writeFile(outPath, csv, err) ? kExitOk : kExitIo;
}

int cmdFmt(const std::string& modelPath, std::ostream& err) {
    const auto text = readFile(modelPath, err);
    if (!text) return kExitIo;
    const auto model = parseOrReport(*text, modelPath, err);
    if (!model) return kExitModel;
    const std::string formatted = prettyPrint(*model);
    if (formatted == *text) return kExitOk;
    return writeFile(modelPath, formatted, err) ? kExitOk : kExitIo;
}

}  // namespace remodyc
