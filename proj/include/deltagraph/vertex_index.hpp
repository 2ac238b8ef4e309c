#pragma once

#include <array>
#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>
#include <string_view>

#include "deltagraph/block.hpp"
#include "deltagraph/types.hpp"

namespace deltagraph {

// One version of a vertex. Chains grow at the head; walking previous yields
// strictly decreasing resolved creation timestamps once stamped. Vertex
// deltas are never reclaimed while the graph is alive.
struct VertexDelta {
    std::atomic<timestamp_t> creation_ts;
    VertexDelta* previous;
    std::uint32_t data_size;

    const char* data() const noexcept { return reinterpret_cast<const char*>(this + 1); }
    char* data() noexcept { return reinterpret_cast<char*>(this + 1); }
    std::string_view property() const noexcept { return {data(), data_size}; }

    static VertexDelta* make(timestamp_t creation, VertexDelta* previous, std::string_view property) {
        void* mem = std::malloc(sizeof(VertexDelta) + property.size());
        if (mem == nullptr) throw StorageExhaustedError("vertex delta allocation failed");
        auto* d = new (mem) VertexDelta;
        d->creation_ts.store(creation, std::memory_order_relaxed);
        d->previous = previous;
        d->data_size = static_cast<std::uint32_t>(property.size());
        if (!property.empty()) std::memcpy(d->data(), property.data(), property.size());
        return d;
    }
};

struct VertexEntry {
    std::atomic<VertexDelta*> vertex_head{nullptr};
    std::atomic<EdgeDeltaBlock*> block{nullptr};
    // bumped on every block install; lets transactions detect consolidation
    std::atomic<std::uint64_t> block_version{0};
};

// Dense vertex index with O(1) lookup. Entries live in lazily allocated
// fixed-size segments reached through a fixed root directory, so an entry's
// address never changes and readers never block while the index grows.
class VertexIndex {
public:
    static constexpr std::size_t kSegmentBits = 13;
    static constexpr std::size_t kSegmentSize = std::size_t{1} << kSegmentBits;  // 8192 entries
    static constexpr std::size_t kRootSize = 1 << 15;                            // ~268M vertices max

    VertexIndex() { next_vertex_.store(1, std::memory_order_relaxed); }

    VertexIndex(const VertexIndex&) = delete;
    VertexIndex& operator=(const VertexIndex&) = delete;

    ~VertexIndex() {
        for (auto& slot : root_) {
            delete[] slot.load(std::memory_order_relaxed);
        }
    }

    // ids are dense and start at 1; next_vertex is one past the largest live id
    vertex_t next_vertex() const noexcept { return next_vertex_.load(std::memory_order_seq_cst); }

    bool exists(vertex_t v) const noexcept { return v > 0 && v < next_vertex(); }

    vertex_t allocate() {
        vertex_t id = next_vertex_.fetch_add(1, std::memory_order_seq_cst);
        (void)entry(id);
        return id;
    }

    // Extends the id space to include v. Idempotent, safe concurrently.
    void ensure(vertex_t v) {
        assert(v > 0);
        vertex_t cur = next_vertex_.load(std::memory_order_seq_cst);
        while (cur <= v) {
            if (next_vertex_.compare_exchange_weak(cur, v + 1, std::memory_order_seq_cst)) break;
        }
        (void)entry(v);
    }

    VertexEntry& entry(vertex_t v) {
        auto seg_idx = static_cast<std::size_t>(v >> kSegmentBits);
        assert(seg_idx < kRootSize);
        VertexEntry* seg = root_[seg_idx].load(std::memory_order_acquire);
        if (seg == nullptr) {
            auto* fresh = new VertexEntry[kSegmentSize];
            if (root_[seg_idx].compare_exchange_strong(seg, fresh, std::memory_order_acq_rel)) {
                seg = fresh;
            } else {
                delete[] fresh;  // lost the race
            }
        }
        return seg[v & (kSegmentSize - 1)];
    }

    // Read-side lookup that never allocates: null when the segment was never
    // touched (no versions, no edges).
    VertexEntry* entry_if_present(vertex_t v) const noexcept {
        auto seg_idx = static_cast<std::size_t>(v >> kSegmentBits);
        if (seg_idx >= kRootSize) return nullptr;
        VertexEntry* seg = root_[seg_idx].load(std::memory_order_acquire);
        if (seg == nullptr) return nullptr;
        return &seg[v & (kSegmentSize - 1)];
    }

    template <typename Fn>
    void for_each_entry(Fn&& fn) {
        vertex_t n = next_vertex();
        for (vertex_t v = 1; v < n; ++v) {
            VertexEntry* e = entry_if_present(v);
            if (e != nullptr) fn(v, *e);
        }
    }

private:
    std::array<std::atomic<VertexEntry*>, kRootSize> root_{};
    std::atomic<vertex_t> next_vertex_;
};

} // namespace deltagraph
