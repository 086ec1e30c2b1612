#include "specdec/predictor.hpp"

#include <stdexcept>

namespace specdec {

const Matrix& Predictor::input_embeddings() const {
    throw std::logic_error("predictor does not expose embeddings");
}

const Matrix& Predictor::output_embedding_rows() const {
    throw std::logic_error("predictor does not expose embeddings");
}

namespace detail {

void validate_forward(const TokenRows& rows, std::size_t vocab_size, std::size_t n_outputs,
                      const KvCache* cache) {
    if (rows.empty()) throw std::invalid_argument("forward on empty batch");
    const std::size_t len = rows[0].size();
    if (len == 0) throw std::invalid_argument("forward on empty rows");
    for (const auto& r : rows) {
        if (r.size() != len) throw std::invalid_argument("row length mismatch");
        for (Token t : r)
            if (t >= vocab_size) throw std::invalid_argument("token id out of vocabulary range");
    }
    if (n_outputs == 0 || n_outputs > len)
        throw std::invalid_argument("invalid output count for row length");
    if (cache) {
        if (cache->batch() != rows.size())
            throw std::invalid_argument("cache batch does not match row count");
        const std::size_t committed = cache->committed_len();
        if (committed > len)
            throw std::invalid_argument("cache committed length exceeds row length");
        if (committed > len - n_outputs)
            throw std::invalid_argument("cache committed length overlaps requested outputs");
        const TokenSeq& prefix = cache->committed_tokens();
        for (const auto& r : rows)
            for (std::size_t p = 0; p < committed; ++p)
                if (r[p] != prefix[p])
                    throw std::invalid_argument("row prefix does not match cached context");
    }
}

} // namespace detail

TokenSeq greedy_decode(const Predictor& model, const TokenSeq& prompt, std::size_t n) {
    if (prompt.empty()) throw std::invalid_argument("prompt must not be empty");
    TokenSeq out = prompt;
    if (n == 0) return out;

    KvCache cache = model.make_cache();
    if (out.size() >= 2) {
        // Prefill everything except the final token; its entry is written by
        // the first decoding step.
        TokenRows pre{TokenSeq(out.begin(), out.end() - 1)};
        model.forward_greedy(pre, 1, &cache);
        cache.commit(0, out.size() - 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        TokenRows rows{out};
        cache.broadcast(1);
        PredictorOutput o = model.forward_greedy(rows, 1, &cache);
        cache.commit(0, 1);
        out.push_back(o.id(0, 0));
    }
    return out;
}

} // namespace specdec
