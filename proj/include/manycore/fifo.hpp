// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "manycore/sim_error.hpp"

namespace manycore {

// Registered FIFO with two-phase semantics. During a cycle, readers see the
// state committed at the previous cycle boundary; enqueue/dequeue stage
// changes that take effect at commit(). An element enqueued at cycle t is
// therefore never visible at the head before t+1. One enqueue and one
// dequeue per cycle (single write/read port).
template <typename T>
class Fifo {
public:
    explicit Fifo(std::size_t depth) : depth_(depth), slots_(depth) {
        if (depth == 0) fail_config("fifo depth must be >= 1");
    }

    std::size_t depth() const { return depth_; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    bool full() const { return size_ == depth_; }
    bool can_enqueue() const { return !full() && !staged_in_.has_value(); }

    const T* head() const { return size_ == 0 ? nullptr : &slots_[head_]; }

    void enqueue(T v) {
        if (staged_in_.has_value())
            fail_protocol("fifo: second enqueue in one cycle");
        if (full()) fail_protocol("fifo: enqueue on full fifo");
        staged_in_ = std::move(v);
    }

    T dequeue() {
        if (staged_out_) fail_protocol("fifo: second dequeue in one cycle");
        if (empty()) fail_protocol("fifo: dequeue of empty fifo");
        staged_out_ = true;
        return slots_[head_];
    }

    bool enqueued_this_cycle() const { return staged_in_.has_value(); }
    bool dequeued_this_cycle() const { return staged_out_; }

    void commit() {
        if (staged_out_) {
            head_ = (head_ + 1) % depth_;
            --size_;
            staged_out_ = false;
        }
        if (staged_in_.has_value()) {
            if (size_ == depth_) fail_protocol("fifo: commit overflow");
            slots_[(head_ + size_) % depth_] = std::move(*staged_in_);
            ++size_;
            staged_in_.reset();
        }
    }

private:
    std::size_t depth_;
    std::vector<T> slots_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::optional<T> staged_in_;
    bool staged_out_ = false;
};

}  // namespace manycore
