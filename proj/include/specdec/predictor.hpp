#pragma once

#include "specdec/kv_cache.hpp"
#include "specdec/matrix.hpp"
#include "specdec/token.hpp"

#include <vector>

namespace specdec {

/// Greedy predictions for a batched model call. For an input block of k rows
/// with n_outputs trailing positions requested, entry (r, t) is the model's
/// greedy next token for row r given that row's tokens up to and including
/// trailing position t. Score rows (one per entry, length vocab) are filled
/// only when requested.
struct PredictorOutput {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Token> greedy;                  // rows * cols, row-major
    std::vector<std::vector<double>> scores;    // rows * cols entries when requested

    Token id(std::size_t r, std::size_t c) const { return greedy[r * cols + c]; }
    const std::vector<double>& score_row(std::size_t r, std::size_t c) const {
        return scores[r * cols + c];
    }
};

/// Base model interface. Implementations are immutable after construction and
/// safe for concurrent read-only use; a KvCache belongs to one session.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::size_t vocab_size() const = 0;

    /// Width of a cached key/value entry (0 for models with no attention state).
    virtual std::size_t cache_dim() const { return 0; }

    /// Batched greedy forward pass.
    ///
    /// `rows` holds k complete token rows of equal length L >= 1; predictions
    /// are returned for the last n_outputs positions. When a cache is given,
    /// all rows must begin with the cache's committed tokens, the committed
    /// prefix is not recomputed, and the call fills the cache's speculative
    /// tails for positions committed..L-1. Results are identical with and
    /// without a cache.
    virtual PredictorOutput forward_greedy(const TokenRows& rows, std::size_t n_outputs,
                                           KvCache* cache = nullptr,
                                           bool want_scores = false) const = 0;

    virtual bool has_embeddings() const { return false; }
    virtual const Matrix& input_embeddings() const;      // |vocab| x dim
    virtual const Matrix& output_embedding_rows() const; // |vocab| x dim

    KvCache make_cache() const { return KvCache(cache_dim()); }
};

/// Plain autoregressive decoding: appends exactly n greedy tokens to the
/// prompt using one single-position model call per token (plus one prefill
/// call when the prompt is longer than one token).
TokenSeq greedy_decode(const Predictor& model, const TokenSeq& prompt, std::size_t n);

namespace detail {
/// Shared entry checks for forward_greedy implementations.
void validate_forward(const TokenRows& rows, std::size_t vocab_size, std::size_t n_outputs,
                      const KvCache* cache);
} // namespace detail

} // namespace specdec
