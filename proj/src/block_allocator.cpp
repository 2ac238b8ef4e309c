#include "deltagraph/block_allocator.hpp"

#include <sys/mman.h>
#include <unistd.h>

namespace deltagraph {

namespace {

std::size_t page_round(std::size_t n) {
    static const std::size_t page = static_cast<std::size_t>(::sysconf(_SC_PAGESIZE));
    return (n + page - 1) & ~(page - 1);
}

} // namespace

BlockAllocator::~BlockAllocator() {
    std::lock_guard<std::mutex> lock(quarantine_mutex_);
    for (auto& [ptr, size] : quarantine_) {
        ::munmap(ptr, size);
    }
}

EdgeDeltaBlock* BlockAllocator::allocate(vertex_t owner, std::uint32_t capacity,
                                         std::uint32_t chain_count, timestamp_t creation_epoch) {
    std::size_t bytes = EdgeDeltaBlock::allocation_size(capacity, chain_count);
    void* mem = nullptr;
    if (poison_) {
        mem = ::mmap(nullptr, page_round(bytes), PROT_READ | PROT_WRITE,
                     MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
        if (mem == MAP_FAILED) throw StorageExhaustedError("mmap failed for edge-deltas block");
    } else {
        mem = ::operator new(bytes, std::align_val_t{64});
        std::memset(mem, 0, bytes);
    }
    live_.fetch_add(1, std::memory_order_relaxed);
    return EdgeDeltaBlock::init(mem, owner, capacity, chain_count, creation_epoch);
}

void BlockAllocator::release(EdgeDeltaBlock* block) {
    if (block == nullptr) return;
    std::size_t bytes = block->allocation_size();
    live_.fetch_sub(1, std::memory_order_relaxed);
    if (poison_) {
        std::size_t mapped = page_round(bytes);
        ::mprotect(block, mapped, PROT_NONE);
        quarantined_.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(quarantine_mutex_);
        quarantine_.emplace_back(block, mapped);
    } else {
        ::operator delete(static_cast<void*>(block), std::align_val_t{64});
    }
}

} // namespace deltagraph
