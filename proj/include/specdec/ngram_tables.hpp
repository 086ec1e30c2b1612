#pragma once

#include "specdec/draft.hpp"
#include "specdec/predictor.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>

namespace specdec {

/// Per-token top-K continuation lists under the model's single-token-context
/// next-token scores, ordered by descending score with lowest-id tie-break.
/// Built once per model with batched single-token calls; immutable afterwards.
class BigramTable {
public:
    static constexpr std::size_t kBuildBatch = 64;

    static BigramTable derive(const Predictor& model, std::size_t top_k);

    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t top_k() const { return top_k_; }
    std::span<const Token> row(Token x) const {
        return {data_.data() + static_cast<std::size_t>(x) * top_k_, top_k_};
    }

    void save(std::ostream& os) const;
    void save_file(const std::filesystem::path& path) const;
    static BigramTable load(std::istream& is);
    static BigramTable load_file(const std::filesystem::path& path);

    bool operator==(const BigramTable&) const = default;

private:
    friend class ExtendedBigramTable;
    BigramTable() = default;

    std::size_t vocab_size_ = 0;
    std::size_t top_k_ = 0;
    std::vector<Token> data_; // vocab * top_k
};

/// For every seed token x, a (top_k x max_width) matrix: row j starts with
/// the j-th ranked bigram successor of x and continues with the model's
/// greedy decoding from [x, successor]. Column 0 always equals the bigram
/// list. Stored flat for O(1) lookup.
class ExtendedBigramTable {
public:
    static ExtendedBigramTable extend(const Predictor& model, const BigramTable& base,
                                      std::size_t max_width);

    std::size_t vocab_size() const { return vocab_size_; }
    std::size_t top_k() const { return top_k_; }
    std::size_t max_width() const { return max_width_; }

    /// Stored continuation row j for seed token x (max_width tokens).
    std::span<const Token> row(Token x, std::size_t j) const {
        return {data_.data() + (static_cast<std::size_t>(x) * top_k_ + j) * max_width_,
                max_width_};
    }

    void save(std::ostream& os) const;
    void save_file(const std::filesystem::path& path) const;
    static ExtendedBigramTable load(std::istream& is);
    static ExtendedBigramTable load_file(const std::filesystem::path& path);

    bool operator==(const ExtendedBigramTable&) const = default;

private:
    ExtendedBigramTable() = default;

    std::size_t vocab_size_ = 0;
    std::size_t top_k_ = 0;
    std::size_t max_width_ = 0;
    std::vector<Token> data_; // vocab * top_k * max_width
};

/// Top-k width-w slice of the stored matrix for `last_token`, tagged with the
/// producing rank of each row. Strict: k and w must fit the stored table.
DraftBatch extended_speculate(const ExtendedBigramTable& table, Token last_token,
                              std::size_t k, std::size_t w);

} // namespace specdec
