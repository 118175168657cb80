#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace remodyc {

/// Exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitModel = 1,  ///< syntax, type, config or usage error
    kExitIo = 2,
    kExitAbort = 3,  ///< runtime abort; the partial trace is kept
};

enum class Backend { file, memory };

int cmdCheck(const std::string& modelPath, std::ostream& out, std::ostream& err);

/// `outDir` may be empty with the memory backend.
int cmdRun(const std::string& modelPath, const std::string& configPath, const std::string& outDir, Backend backend,
           std::ostream& out, std::ostream& err);

/// Prints frame `tick` as "address,stage,attribute,value" with values in
/// their declared display units.
int cmdReplay(const std::string& runDir, std::uint64_t tick, std::ostream& out, std::ostream& err);

/// Writes "tick,count" for one stage to `outPath`.
int cmdChart(const std::string& runDir, const std::string& stage, const std::string& outPath, std::ostream& err);

/// Rewrites the model file in canonical form.
int cmdFmt(const std::string& modelPath, std::ostream& err);

}  // namespace remodyc
