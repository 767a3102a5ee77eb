#include "semra/agents/replay.hpp"

#include <algorithm>
#include <string>

#include "semra/common/errors.hpp"

namespace semra::agents {

Batch make_batch(const std::vector<const TransitionRecord*>& records) {
    if (records.empty()) throw DomainError("make_batch: empty batch");
    const std::size_t z = records.size();
    const std::size_t s = records.front()->state.size();
    const std::size_t a = records.front()->continuous.size();
    Batch b;
    b.states = ad::Array(z, s);
    b.continuous = ad::Array(z, a);
    b.rewards = ad::Array(z, 1);
    b.next_states = ad::Array(z, s);
    b.not_done = ad::Array(z, 1);
    b.discrete.reserve(z);
    for (std::size_t i = 0; i < z; ++i) {
        const auto& r = *records[i];
        if (r.state.size() != s || r.next_state.size() != s || r.continuous.size() != a)
            throw DimensionError("make_batch: transition " + std::to_string(i) + " has inconsistent dimensions");
        std::copy(r.state.begin(), r.state.end(), b.states.row_span(i).begin());
        std::copy(r.next_state.begin(), r.next_state.end(), b.next_states.row_span(i).begin());
        std::copy(r.continuous.begin(), r.continuous.end(), b.continuous.row_span(i).begin());
        b.discrete.push_back(r.discrete);
        b.rewards(i, 0) = r.reward;
        b.not_done(i, 0) = r.terminal ? 0.0 : 1.0;
    }
    return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("drl.replay_capacity", "must be positive");
    data_.reserve(std::min<std::size_t>(capacity, 1u << 16));
}

void ReplayBuffer::push(TransitionRecord record) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(record));
    } else {
        data_[next_] = std::move(record);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t z, Rng& rng) const {
    if (z == 0) throw UsageError("sample: batch size must be positive");
    if (data_.size() < z)
        throw UsageError("sample: buffer holds " + std::to_string(data_.size()) + " records, batch needs " + std::to_string(z));
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<std::size_t> idx(z);
    for (auto& i : idx) i = pick(rng);
    return idx;
}

Batch ReplayBuffer::sample(std::size_t z, Rng& rng) const {
    std::vector<const TransitionRecord*> recs;
    for (auto i : sample_indices(z, rng)) recs.push_back(&data_[i]);
    return make_batch(recs);
}

}  // namespace semra::agents
