#pragma once

#include <atomic>
#include <cassert>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <thread>

#include "deltagraph/transaction_table.hpp"
#include "deltagraph/types.hpp"

namespace deltagraph {

// One commit request, allocated on the committing thread's stack; the thread
// blocks until the manager stores the assigned wts.
struct CommitRequest {
    timestamp_t txn_id = 0;
    std::atomic<timestamp_t> assigned_wts{0};
    CommitRequest* next = nullptr;
};

// Group commit with cooperative (hybrid) stamping. The manager drains the
// request queue into a group, stamps every member Committing(write epoch) in
// the transaction table, signals the members, then advances the write epoch
// and the read epoch by one — in that order, so no transaction ever begins
// with an rts at or above an unassigned wts. It does not wait for members'
// eager stamping; cooperative stamping covers stragglers.
class CommitManager {
public:
    CommitManager(TransactionTable& table, timestamp_t initial_read_epoch, bool run_thread)
        : table_(table) {
        read_epoch_.store(initial_read_epoch, std::memory_order_seq_cst);
        write_epoch_.store(initial_read_epoch + 1, std::memory_order_seq_cst);
        if (run_thread) {
            worker_ = std::thread([this] { run(); });
        }
    }

    ~CommitManager() { stop(); }

    void stop() {
        bool expected = false;
        if (!stopped_.compare_exchange_strong(expected, true)) return;
        if (worker_.joinable()) {
            wake_.notify_all();
            worker_.join();
        }
        // settle any request enqueued before the stop
        while (commit_group_step() != 0) {
        }
    }

    timestamp_t read_epoch() const noexcept { return read_epoch_.load(std::memory_order_seq_cst); }
    timestamp_t write_epoch() const noexcept { return write_epoch_.load(std::memory_order_seq_cst); }

    // Blocks until the manager assigns the group wts: a short spin for the
    // hot path, then parked so the manager thread gets a core promptly.
    timestamp_t request_commit(CommitRequest& req) {
        enqueue(req);
        for (std::uint32_t spin = 0; spin < 2048; ++spin) {
            timestamp_t wts = req.assigned_wts.load(std::memory_order_acquire);
            if (wts != 0) return wts;
            cpu_relax();
        }
        std::unique_lock<std::mutex> lock(done_mutex_);
        for (;;) {
            timestamp_t wts = req.assigned_wts.load(std::memory_order_acquire);
            if (wts != 0) return wts;
            // timeout guards the unlocked-notify race
            done_cv_.wait_for(lock, std::chrono::microseconds(100));
        }
    }

    // One commit round: drain, assign, signal, advance. Returns the group
    // size (0 leaves the epochs untouched). Also callable directly by tests
    // when no manager thread runs.
    std::size_t commit_group_step() {
        CommitRequest* head = queue_head_.exchange(nullptr, std::memory_order_acq_rel);
        if (head == nullptr) return 0;
        timestamp_t wts = write_epoch_.load(std::memory_order_seq_cst);
        std::size_t count = 0;
        for (CommitRequest* r = head; r != nullptr; r = r->next) {
            table_.set_committing(r->txn_id, wts);
            ++count;
        }
        // members may resume as soon as their status is visible
        for (CommitRequest* r = head; r != nullptr;) {
            CommitRequest* next = r->next;  // r may die once signalled
            r->assigned_wts.store(wts, std::memory_order_release);
            r = next;
        }
        {
            // pair with the members' predicate check so no wakeup is lost
            std::lock_guard<std::mutex> barrier(done_mutex_);
        }
        done_cv_.notify_all();
        write_epoch_.store(wts + 1, std::memory_order_seq_cst);
        read_epoch_.store(wts, std::memory_order_seq_cst);
        return count;
    }

    // The read epoch trails the member signal by a few stores; committed
    // sessions wait it out so their next snapshot includes their own commit.
    void wait_until_visible(timestamp_t wts) const {
        for (std::uint32_t spin = 0; read_epoch_.load(std::memory_order_seq_cst) < wts; ++spin) {
            if (spin < 64) {
                cpu_relax();
            } else {
                std::this_thread::yield();
            }
        }
    }

    // Deterministic timestamp control for fixtures and benchmarks: jump the
    // epoch pair so the next group commits at exactly `target_wts`. Only
    // meaningful while no commit is in flight.
    void advance_write_epoch_to(timestamp_t target_wts) {
        assert(is_epoch(target_wts) && target_wts >= write_epoch());
        write_epoch_.store(target_wts, std::memory_order_seq_cst);
        read_epoch_.store(target_wts - 1, std::memory_order_seq_cst);
    }

private:
    static void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
        __builtin_ia32_pause();
#else
        std::this_thread::yield();
#endif
    }

    void enqueue(CommitRequest& req) {
        CommitRequest* head = queue_head_.load(std::memory_order_acquire);
        do {
            req.next = head;
        } while (!queue_head_.compare_exchange_weak(head, &req, std::memory_order_acq_rel));
        {
            std::lock_guard<std::mutex> barrier(wake_mutex_);
        }
        wake_.notify_one();
    }

    void run() {
        while (!stopped_.load(std::memory_order_acquire)) {
            if (commit_group_step() != 0) continue;
            // idle backoff: spin a bounded number of polls, then park briefly
            bool got_work = false;
            for (int i = 0; i < 2048; ++i) {
                if (queue_head_.load(std::memory_order_acquire) != nullptr) {
                    got_work = true;
                    break;
                }
                cpu_relax();
            }
            if (!got_work) {
                std::unique_lock<std::mutex> lock(wake_mutex_);
                wake_.wait_for(lock, std::chrono::microseconds(200), [this] {
                    return queue_head_.load(std::memory_order_acquire) != nullptr ||
                           stopped_.load(std::memory_order_acquire);
                });
            }
        }
    }

    TransactionTable& table_;
    std::atomic<timestamp_t> read_epoch_;
    std::atomic<timestamp_t> write_epoch_;
    std::atomic<CommitRequest*> queue_head_{nullptr};
    std::atomic<bool> stopped_{false};
    std::mutex wake_mutex_;
    std::condition_variable wake_;
    std::mutex done_mutex_;
    std::condition_variable done_cv_;
    std::thread worker_;
};

} // namespace deltagraph
