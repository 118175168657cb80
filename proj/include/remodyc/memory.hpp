#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "remodyc/ast.hpp"
#include "remodyc/rng.hpp"

namespace remodyc {

using Address = std::uint64_t;  ///< 1-based

class AddressError : public std::out_of_range {
public:
    explicit AddressError(Address a)
        : std::out_of_range("ADDRESS_ERROR: address " + std::to_string(a) + " is not allocated"), address_(a) {}
    Address address() const { return address_; }

private:
    Address address_;
};

/// Entry of the agent table: which stage owns the block starting at a base
/// address, and the per-stage instance index (1-based, never reused).
struct AnimatEntry {
    Identifier stage;
    std::uint64_t index = 1;
    bool operator==(const AnimatEntry&) const = default;
};

/// Allocator watermarks. Persisted with each frame so that re-running
/// forward after a rewind hands out the same addresses and indices.
struct AllocationState {
    Address nextFree = 1;
    std::map<Identifier, std::uint64_t> nextIndex;
    bool operator==(const AllocationState&) const = default;
};

/// One recorded time step.
struct TraceFrame {
    std::map<Address, double> values;
    std::map<Address, AnimatEntry> animats;
    std::uint64_t rngState = 0;
    AllocationState allocation;
    bool operator==(const TraceFrame&) const = default;
};

/// Append-only frame store. Frames are numbered from 1.
class StorageBackend {
public:
    virtual ~StorageBackend() = default;

    virtual void appendFrame(const TraceFrame& frame) = 0;
    /// The t-th appended frame; throws std::out_of_range unless 1 <= t <= frameCount().
    virtual TraceFrame loadFrame(std::size_t t) const = 0;
    virtual std::size_t frameCount() const = 0;
    /// Drops every frame after the n-th, so a rewound run can branch.
    virtual void truncate(std::size_t n) = 0;
};

class InMemoryStorage final : public StorageBackend {
public:
    void appendFrame(const TraceFrame& frame) override { frames_.push_back(frame); }
    TraceFrame loadFrame(std::size_t t) const override;
    std::size_t frameCount() const override { return frames_.size(); }
    void truncate(std::size_t n) override;

private:
    std::vector<TraceFrame> frames_;
};

/// Synchronous-update memory. Reads see the value slots; writes land in the
/// next and delta slots and only become visible after store() + load().
class MemoryImage {
public:
    explicit MemoryImage(StorageBackend& storage) : storage_(&storage) {}

    double read(Address a) const;
    void write(Address a, double v);
    void writeDelta(Address a, double v);

    /// Allocates a zero-initialized block of `size` slots for a new agent.
    Address allocate(const Identifier& stage, std::size_t size, std::uint64_t index);
    /// As above, with the stage's next instance index.
    Address allocate(const Identifier& stage, std::size_t size);

    /// Marks the block at `base` dead; it is left out of frames from the
    /// next store() on. Reads keep working until then.
    void kill(Address base);

    /// Appends the frame { a -> next(a) + delta(a) | a live }.
    void store();
    /// Restores frame t into all slots, clears deltas and deaths.
    void load(std::size_t t);

    /// The value store() would record for `a`.
    double committed(Address a) const;
    double nextSlot(Address a) const { return slot(a).next; }
    double deltaSlot(Address a) const { return slot(a).delta; }

    bool allocated(Address a) const { return slots_.count(a) > 0; }
    bool dead(Address a) const { return deads_.count(a) > 0; }
    std::size_t blockSize(Address base) const;

    const std::map<Address, AnimatEntry>& animats() const { return animats_; }
    /// Bases of live blocks of `stage`, ascending.
    std::vector<Address> blocksOf(const Identifier& stage) const;

    const AllocationState& allocation() const { return alloc_; }
    std::size_t ticks() const { return ticks_; }
    Rng& rng() { return rng_; }
    const Rng& rng() const { return rng_; }
    StorageBackend& storage() { return *storage_; }

private:
    struct Slot {
        double value = 0.0;
        double next = 0.0;
        double delta = 0.0;
    };
    const Slot& slot(Address a) const;
    Slot& slot(Address a);

    StorageBackend* storage_;
    std::map<Address, Slot> slots_;
    std::set<Address> deads_;
    std::map<Address, AnimatEntry> animats_;
    std::map<Address, std::size_t> blockSizes_;
    AllocationState alloc_;
    std::size_t ticks_ = 0;
    Rng rng_;
};

}  // namespace remodyc
