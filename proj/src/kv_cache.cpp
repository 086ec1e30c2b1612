#include "specdec/kv_cache.hpp"

#include <stdexcept>

namespace specdec {

void KvCache::broadcast(std::size_t k) {
    if (batch_ != 1) throw std::logic_error("broadcast requires a single-row cache");
    if (k < 1) throw std::invalid_argument("batch must be at least 1");
    if (spec_len_ != 0) throw std::logic_error("broadcast with pending speculative entries");
    batch_ = k;
    tails_.clear();
}

void KvCache::commit(std::size_t winner, std::size_t n) {
    if (winner >= batch_) throw std::invalid_argument("winner row out of range");
    if (n > spec_len_) throw std::invalid_argument("commit length exceeds speculative entries");
    if (n > 0) {
        const Tail& t = tails_[winner];
        tokens_.insert(tokens_.end(), t.tokens.begin(), t.tokens.begin() + n);
        keys_.insert(keys_.end(), t.keys.begin(), t.keys.begin() + n * dim_);
        values_.insert(values_.end(), t.values.begin(), t.values.begin() + n * dim_);
    }
    tails_.clear();
    spec_len_ = 0;
    batch_ = 1;
}

void KvCache::begin_step(std::size_t spec_len) {
    spec_len_ = spec_len;
    tails_.assign(batch_, Tail{});
    for (auto& t : tails_) {
        t.tokens.assign(spec_len, 0);
        t.keys.assign(spec_len * dim_, 0.0);
        t.values.assign(spec_len * dim_, 0.0);
    }
}

void KvCache::set_spec(std::size_t row, std::size_t offset, Token token,
                       std::span<const double> key, std::span<const double> value) {
    if (row >= tails_.size() || offset >= spec_len_)
        throw std::out_of_range("speculative slot out of range");
    Tail& t = tails_[row];
    t.tokens[offset] = token;
    for (std::size_t i = 0; i < dim_; ++i) {
        t.keys[offset * dim_ + i] = key[i];
        t.values[offset * dim_ + i] = value[i];
    }
}

} // namespace specdec
