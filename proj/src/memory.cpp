#include "remodyc/memory.hpp"

namespace remodyc {

TraceFrame InMemoryStorage::loadFrame(std::size_t t) const {
    if (t < 1 || t > frames_.size()) throw std::out_of_range("tick " + std::to_string(t) + " out of range");
    return frames_[t - 1];
}

void InMemoryStorage::truncate(std::size_t n) {
    if (n < frames_.size()) frames_.resize(n);
}

const MemoryImage::Slot& MemoryImage::slot(Address a) const {
    auto it = slots_.find(a);
    if (it == slots_.end()) throw AddressError(a);
    return it->second;
}

MemoryImage::Slot& MemoryImage::slot(Address a) {
    auto it = slots_.find(a);
    if (it == slots_.end()) throw AddressError(a);
    return it->second;
}

double MemoryImage::read(Address a) const { return slot(a).value; }

void MemoryImage::write(Address a, double v) { slot(a).next = v; }

void MemoryImage::writeDelta(Address a, double v) { slot(a).delta += v; }

double MemoryImage::committed(Address a) const {
    const Slot& s = slot(a);
    return s.next + s.delta;
}

Address MemoryImage::allocate(const Identifier& stage, std::size_t size, std::uint64_t index) {
    if (size < 1) throw std::invalid_argument("allocate: block size must be at least 1");
    const Address base = alloc_.nextFree;
    for (std::size_t i = 0; i < size; ++i) slots_[base + i] = Slot{};
    animats_[base] = AnimatEntry{stage, index};
    blockSizes_[base] = size;
    alloc_.nextFree = base + size;
    auto& next = alloc_.nextIndex[stage];
    if (next <= index) next = index + 1;
    return base;
}

Address MemoryImage::allocate(const Identifier& stage, std::size_t size) {
    auto it = alloc_.nextIndex.find(stage);
    return allocate(stage, size, it == alloc_.nextIndex.end() ? 1 : it->second);
}

std::size_t MemoryImage::blockSize(Address base) const {
    auto it = blockSizes_.find(base);
    if (it == blockSizes_.end()) throw AddressError(base);
    return it->second;
}

void MemoryImage::kill(Address base) {
    const std::size_t size = blockSize(base);
    for (std::size_t i = 0; i < size; ++i) deads_.insert(base + i);
}

std::vector<Address> MemoryImage::blocksOf(const Identifier& stage) const {
    std::vector<Address> out;
    for (const auto& [base, entry] : animats_)
        if (entry.stage == stage && !deads_.count(base)) out.push_back(base);
    return out;
}

void MemoryImage::store() {
    if (ticks_ != storage_->frameCount())
        throw std::logic_error("store: memory is at tick " + std::to_string(ticks_) + " but storage holds " +
                               std::to_string(storage_->frameCount()) + " frames");
    TraceFrame frame;
    for (const auto& [a, s] : slots_)
        if (!deads_.count(a)) frame.values.emplace_hint(frame.values.end(), a, s.next + s.delta);
    for (const auto& [base, entry] : animats_)
        if (!deads_.count(base)) frame.animats.emplace_hint(frame.animats.end(), base, entry);
    frame.rngState = rng_.state();
    frame.allocation = alloc_;
    storage_->appendFrame(frame);
}

void MemoryImage::load(std::size_t t) {
    if (t < 1) throw std::out_of_range("load: ticks start at 1");
    TraceFrame frame = storage_->loadFrame(t);

    slots_.clear();
    for (const auto& [a, v] : frame.values) slots_.emplace_hint(slots_.end(), a, Slot{v, v, 0.0});
    deads_.clear();
    animats_ = std::move(frame.animats);

    // Blocks are contiguous and stored whole, so a block runs from its base
    // over consecutive present addresses up to the next base.
    blockSizes_.clear();
    for (auto it = animats_.begin(); it != animats_.end(); ++it) {
        const auto nextBase = std::next(it);
        std::size_t size = 0;
        for (Address a = it->first; slots_.count(a) && (nextBase == animats_.end() || a < nextBase->first); ++a)
            ++size;
        blockSizes_[it->first] = size;
    }

    alloc_ = std::move(frame.allocation);
    rng_.setState(frame.rngState);
    ticks_ = t;
}

}  // namespace remodyc
