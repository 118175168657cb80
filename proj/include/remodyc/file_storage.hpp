#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "remodyc/memory.hpp"

namespace remodyc {

inline constexpr int kTraceFormatVersion = 1;

class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Frames appended to CSV files in a run directory:
///
///   frames.csv   tick,address,value
///   animats.csv  tick,base_address,stage,index
///   rng.csv      tick,state_hex
///   alloc.csv    tick,counter,value   ("next_free" or "index:<Stage>")
///
/// Rows are sorted by tick, then address (or counter). Values use the
/// shortest decimal that round-trips, so equal runs give equal bytes.
class FileStorage final : public StorageBackend {
public:
    enum class Mode { create, open };

    /// `create` makes the directory and starts empty files, replacing any
    /// trace already there; `open` indexes an existing trace.
    FileStorage(std::filesystem::path dir, Mode mode);

    void appendFrame(const TraceFrame& frame) override;
    TraceFrame loadFrame(std::size_t t) const override;
    std::size_t frameCount() const override { return count_; }
    void truncate(std::size_t n) override;

    const std::filesystem::path& directory() const { return dir_; }

private:
    struct Table {
        std::filesystem::path path;
        std::ofstream out;
        std::vector<std::uintmax_t> tickOffsets;  // byte offset of tick t's first row at [t - 1]
    };

    void openWriters();
    void indexTable(Table& table);
    std::vector<std::string> rowsOf(const Table& table, std::size_t t) const;

    std::filesystem::path dir_;
    Table frames_;
    Table animats_;
    Table rng_;
    Table alloc_;
    std::size_t count_ = 0;
};

using MetaData = std::vector<std::pair<std::string, std::string>>;

/// meta.txt: one key=value per line, in the given order.
void writeMeta(const std::filesystem::path& dir, const MetaData& meta);
std::map<std::string, std::string> readMeta(const std::filesystem::path& dir);

}  // namespace remodyc
