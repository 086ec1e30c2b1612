#pragma once

#include "specdec/predictor.hpp"

#include <span>
#include <unordered_map>

namespace specdec {

/// Explicit order-m Markov model: maps each m-token history seen in a corpus
/// to continuation counts. Unseen (or too-short) histories fall back to a
/// fixed uniform score vector, so their greedy prediction is token 0.
/// Exposes no embeddings.
class TableModel final : public Predictor {
public:
    static TableModel from_corpus(const TokenSeq& corpus, std::size_t order,
                                  std::size_t vocab_size);

    std::size_t order() const { return order_; }

    /// Empirical continuation count for a full-length history (0 if unseen).
    std::uint32_t continuation_count(std::span<const Token> history, Token next) const;

    std::size_t vocab_size() const override { return vocab_size_; }
    PredictorOutput forward_greedy(const TokenRows& rows, std::size_t n_outputs,
                                   KvCache* cache = nullptr,
                                   bool want_scores = false) const override;

private:
    TableModel(std::size_t vocab_size, std::size_t order)
        : vocab_size_(vocab_size), order_(order) {}

    struct SeqHash {
        std::size_t operator()(const TokenSeq& s) const {
            std::uint64_t h = 1469598103934665603ull; // FNV-1a
            for (Token t : s) {
                h ^= t;
                h *= 1099511628211ull;
            }
            return static_cast<std::size_t>(h);
        }
    };
    using Counts = std::unordered_map<Token, std::uint32_t>;

    /// Greedy continuation of the history ending at `ctx.back()`; ties and
    /// backoff resolve to the lowest token id.
    Token greedy_at(std::span<const Token> ctx) const;
    std::vector<double> scores_at(std::span<const Token> ctx) const;
    const Counts* lookup(std::span<const Token> ctx) const;

    std::size_t vocab_size_;
    std::size_t order_;
    std::unordered_map<TokenSeq, Counts, SeqHash> table_;
};

} // namespace specdec
