#pragma once

#include "specdec/token.hpp"

#include <span>
#include <vector>

namespace specdec {

/// Static attention key/value cache for one generation session.
///
/// The committed prefix is stored once and shared by every batch row, so
/// broadcasting to k rows duplicates nothing. Each forward call writes the
/// keys/values of its uncached positions into per-row speculative tails;
/// commit() appends the winning row's first n tail entries to the shared
/// prefix, discards the rest, and collapses the cache back to a single row.
///
/// `dim` is the per-position key (and value) width; predictors without
/// attention state use dim 0 and only the token bookkeeping is kept.
class KvCache {
public:
    explicit KvCache(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t batch() const { return batch_; }
    std::size_t committed_len() const { return tokens_.size(); }
    std::size_t spec_len() const { return spec_len_; }

    /// Fan the single-row cache out to k rows sharing the committed prefix.
    void broadcast(std::size_t k);

    /// Keep the first n speculative entries of row `winner` as committed
    /// context; drop all other speculative state and return to one row.
    void commit(std::size_t winner, std::size_t n);

    const TokenSeq& committed_tokens() const { return tokens_; }
    std::span<const double> committed_key(std::size_t pos) const {
        return {keys_.data() + pos * dim_, dim_};
    }
    std::span<const double> committed_value(std::size_t pos) const {
        return {values_.data() + pos * dim_, dim_};
    }

    // Forward-pass interface: allocate tails for this call, then fill them.
    void begin_step(std::size_t spec_len);
    void set_spec(std::size_t row, std::size_t offset, Token token,
                  std::span<const double> key, std::span<const double> value);

    Token spec_token(std::size_t row, std::size_t offset) const {
        return tails_[row].tokens[offset];
    }
    std::span<const double> spec_key(std::size_t row, std::size_t offset) const {
        return {tails_[row].keys.data() + offset * dim_, dim_};
    }
    std::span<const double> spec_value(std::size_t row, std::size_t offset) const {
        return {tails_[row].values.data() + offset * dim_, dim_};
    }

private:
    struct Tail {
        TokenSeq tokens;
        std::vector<double> keys;
        std::vector<double> values;
    };

    std::size_t dim_;
    TokenSeq tokens_;             // committed, shared by all rows
    std::vector<double> keys_;    // committed_len * dim
    std::vector<double> values_;  // committed_len * dim
    std::size_t batch_ = 1;
    std::size_t spec_len_ = 0;
    std::vector<Tail> tails_;
};

} // namespace specdec
