#include "remodyc/file_storage.hpp"

#include <sstream>

#include "remodyc/text.hpp"

namespace fs = std::filesystem;

namespace remodyc {

namespace {

constexpr const char* kFramesHeader = "tick,address,value";
constexpr const char* kAnimatsHeader = "tick,base_address,stage,index";
constexpr const char* kRngHeader = "tick,state_hex";
constexpr const char* kAllocHeader = "tick,counter,value";
constexpr std::string_view kNextFree = "next_free";
constexpr std::string_view kIndexPrefix = "index:";

std::vector<std::string_view> splitCsv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void corrupt(const fs::path& p, const std::string& what) {
    throw StorageError(p.string() + ": " + what);
}

std::size_t rowTick(const fs::path& p, std::string_view line) {
    const auto comma = line.find(',');
    const auto tick = parseInteger<std::size_t>(line.substr(0, comma));
    if (!tick || *tick < 1) corrupt(p, "bad tick in row '" + std::string(line) + "'");
    return *tick;
}

void writeHeader(const fs::path& p, const char* header) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot create " + p.string());
    out << header << '\n';
}

}  // namespace

FileStorage::FileStorage(fs::path dir, Mode mode) : dir_(std::move(dir)) {
    frames_.path = dir_ / "frames.csv";
    animats_.path = dir_ / "animats.csv";
    rng_.path = dir_ / "rng.csv";
    alloc_.path = dir_ / "alloc.csv";

    if (mode == Mode::create) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw StorageError("cannot create " + dir_.string() + ": " + ec.message());
        writeHeader(frames_.path, kFramesHeader);
        writeHeader(animats_.path, kAnimatsHeader);
        writeHeader(rng_.path, kRngHeader);
        writeHeader(alloc_.path, kAllocHeader);
    } else {
        for (Table* t : {&frames_, &animats_, &rng_, &alloc_})
            if (!fs::exists(t->path)) throw StorageError("missing " + t->path.string());
        indexTable(rng_);
        count_ = rng_.tickOffsets.size();
        for (Table* t : {&frames_, &animats_, &alloc_}) {
            indexTable(*t);
            if (t->tickOffsets.size() > count_) corrupt(t->path, "more ticks than rng.csv");
            const auto end = fs::file_size(t->path);
            t->tickOffsets.resize(count_, end);
        }
    }
    openWriters();
}

void FileStorage::openWriters() {
    for (Table* t : {&frames_, &animats_, &rng_, &alloc_}) {
        t->out = std::ofstream(t->path, std::ios::binary | std::ios::app);
        if (!t->out) throw StorageError("cannot open " + t->path.string() + " for writing");
    }
}

void FileStorage::indexTable(Table& table) {
    std::ifstream in(table.path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + table.path.string());
    std::string line;
    std::getline(in, line);  // header
    table.tickOffsets.clear();
    std::uintmax_t offset = static_cast<std::uintmax_t>(in.tellg());
    std::size_t last = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            const std::size_t tick = rowTick(table.path, line);
            if (tick < last) corrupt(table.path, "rows out of tick order");
            while (table.tickOffsets.size() < tick) table.tickOffsets.push_back(offset);
            last = tick;
        }
        offset = static_cast<std::uintmax_t>(in.tellg());
        if (in.eof()) break;
    }
}

void FileStorage::appendFrame(const TraceFrame& frame) {
    const std::size_t tick = count_ + 1;
    for (Table* t : {&frames_, &animats_, &rng_, &alloc_})
        t->tickOffsets.push_back(static_cast<std::uintmax_t>(t->out.tellp()));

    std::string buf;
    const std::string tickText = std::to_string(tick) + ",";
    for (const auto& [a, v] : frame.values) buf += tickText + std::to_string(a) + "," + formatDouble(v) + "\n";
    frames_.out << buf;

    buf.clear();
    for (const auto& [base, e] : frame.animats)
        buf += tickText + std::to_string(base) + "," + e.stage + "," + std::to_string(e.index) + "\n";
    animats_.out << buf;

    rng_.out << tickText << formatHex64(frame.rngState) << '\n';

    buf = tickText + std::string(kNextFree) + "," + std::to_string(frame.allocation.nextFree) + "\n";
    for (const auto& [stage, next] : frame.allocation.nextIndex)
        buf += tickText + std::string(kIndexPrefix) + stage + "," + std::to_string(next) + "\n";
    alloc_.out << buf;

    for (Table* t : {&frames_, &animats_, &rng_, &alloc_}) {
        t->out.flush();
        if (!t->out) throw StorageError("write failed on " + t->path.string());
    }
    count_ = tick;
}

std::vector<std::string> FileStorage::rowsOf(const Table& table, std::size_t t) const {
    std::ifstream in(table.path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + table.path.string());
    in.seekg(static_cast<std::streamoff>(table.tickOffsets[t - 1]));
    const std::uintmax_t end =
        t < table.tickOffsets.size() ? table.tickOffsets[t] : static_cast<std::uintmax_t>(-1);
    std::vector<std::string> rows;
    std::string line;
    while (static_cast<std::uintmax_t>(in.tellg()) < end && std::getline(in, line)) {
        if (line.empty()) continue;
        if (rowTick(table.path, line) != t) break;
        rows.push_back(line);
    }
    return rows;
}

TraceFrame FileStorage::loadFrame(std::size_t t) const {
    if (t < 1 || t > count_) throw std::out_of_range("tick " + std::to_string(t) + " out of range");
    TraceFrame frame;

    for (const auto& row : rowsOf(frames_, t)) {
        const auto f = splitCsv(row);
        const auto a = f.size() == 3 ? parseInteger<Address>(f[1]) : std::nullopt;
        const auto v = f.size() == 3 ? parseDouble(f[2]) : std::nullopt;
        if (!a || !v) corrupt(frames_.path, "bad row '" + row + "'");
        frame.values.emplace_hint(frame.values.end(), *a, *v);
    }
    for (const auto& row : rowsOf(animats_, t)) {
        const auto f = splitCsv(row);
        const auto base = f.size() == 4 ? parseInteger<Address>(f[1]) : std::nullopt;
        const auto index = f.size() == 4 ? parseInteger<std::uint64_t>(f[3]) : std::nullopt;
        if (!base || !index) corrupt(animats_.path, "bad row '" + row + "'");
        frame.animats.emplace_hint(frame.animats.end(), *base, AnimatEntry{std::string(f[2]), *index});
    }
    const auto rngRows = rowsOf(rng_, t);
    const auto rngFields = rngRows.size() == 1 ? splitCsv(rngRows[0]) : std::vector<std::string_view>{};
    const auto state = rngFields.size() == 2 ? Rng::parseStateHex(rngFields[1]) : std::nullopt;
    if (!state) corrupt(rng_.path, "missing or bad state for tick " + std::to_string(t));
    frame.rngState = *state;

    for (const auto& row : rowsOf(alloc_, t)) {
        const auto f = splitCsv(row);
        const auto v = f.size() == 3 ? parseInteger<std::uint64_t>(f[2]) : std::nullopt;
        if (!v) corrupt(alloc_.path, "bad row '" + row + "'");
        if (f[1] == kNextFree)
            frame.allocation.nextFree = *v;
        else if (f[1].substr(0, kIndexPrefix.size()) == kIndexPrefix)
            frame.allocation.nextIndex[std::string(f[1].substr(kIndexPrefix.size()))] = *v;
        else
            corrupt(alloc_.path, "unknown counter '" + std::string(f[1]) + "'");
    }
    return frame;
}

void FileStorage::truncate(std::size_t n) {
    if (n >= count_) return;
    for (Table* t : {&frames_, &animats_, &rng_, &alloc_}) {
        t->out.close();
        fs::resize_file(t->path, t->tickOffsets[n]);
        t->tickOffsets.resize(n);
    }
    count_ = n;
    openWriters();
}

void writeMeta(const fs::path& dir, const MetaData& meta) {
    std::ofstream out(dir / "meta.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + (dir / "meta.txt").string());
    for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
}

std::map<std::string, std::string> readMeta(const fs::path& dir) {
    std::ifstream in(dir / "meta.txt", std::ios::binary);
    if (!in) throw StorageError("cannot read " + (dir / "meta.txt").string());
    std::map<std::string, std::string> meta;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return meta;
}

}  // namespace remodyc
