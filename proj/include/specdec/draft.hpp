#pragma once

#include "specdec/token.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace specdec {

enum class DraftStrategy {
    Context,     // continuation copied from an earlier occurrence in the context
    ModelBigram, // model-derived (extended) bigram lookup
    Unigram,     // model-derived unigram ranking
    Oracle,      // injected ground-truth rows (testing/ablation)
};
inline constexpr std::size_t kDraftStrategyCount = 4;

std::string_view to_string(DraftStrategy s);

struct DraftRow {
    TokenSeq tokens;
    DraftStrategy source = DraftStrategy::ModelBigram;
    std::size_t rank = 0; // rank within the producing strategy
};

/// A rectangular batch of speculations: every row has exactly `width` tokens,
/// context rows precede model rows, and no two rows are identical.
struct DraftBatch {
    std::size_t width = 0;
    std::vector<DraftRow> rows;

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }

    /// Throws std::logic_error if any batch invariant is violated.
    void validate() const;
};

} // namespace specdec
