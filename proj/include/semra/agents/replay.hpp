#pragma once

#include <cstddef>
#include <vector>

#include "semra/autodiff/array.hpp"
#include "semra/common/rng.hpp"

namespace semra::agents {

struct TransitionRecord {
    std::vector<double> state;
    std::vector<double> continuous;  // raw, in (-1, 1)
    std::vector<int> discrete;       // one choice per categorical head
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;  // true only when no bootstrap should follow
};

// Column-stacked mini-batch.
struct Batch {
    ad::Array states;      // Z x S
    ad::Array continuous;  // Z x A (A may be 0)
    std::vector<std::vector<int>> discrete;  // Z x H
    ad::Array rewards;     // Z x 1
    ad::Array next_states; // Z x S
    ad::Array not_done;    // Z x 1, 0 for terminal transitions

    std::size_t size() const noexcept { return states.rows(); }
};

Batch make_batch(const std::vector<const TransitionRecord*>& records);

// Fixed-capacity FIFO ring with uniform sampling (with replacement).
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(TransitionRecord record);
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    const TransitionRecord& at(std::size_t i) const { return data_.at(i); }

    // Throws UsageError when fewer than z records are stored.
    std::vector<std::size_t> sample_indices(std::size_t z, Rng& rng) const;
    Batch sample(std::size_t z, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<TransitionRecord> data_;
};

}  // namespace semra::agents
