#pragma once

#include "specdec/token.hpp"

#include <vector>

namespace specdec {

/// One grouped match of the context query: a full-width continuation, how
/// often it occurred, and the window start of its most recent occurrence.
struct ContextMatch {
    TokenSeq continuation;      // exactly w tokens
    std::size_t count = 0;      // occurrences in the context (>= 1)
    std::size_t last_position = 0;

    bool operator==(const ContextMatch&) const = default;
};

/// Sliding-window context matcher: the query is the last q tokens of the
/// context; every window of length q+w whose prefix equals the query
/// contributes its trailing w tokens. Identical windows are merged with
/// their multiplicity. Results are ordered by count descending, then by the
/// most recent occurrence, then lexicographically by continuation, and at
/// most k are returned. A context shorter than q+w yields no matches.
///
/// Occurrences inside the final q+w-1 positions cannot form a complete
/// window and are not counted.
std::vector<ContextMatch> context_ngram_match(const TokenSeq& context, std::size_t q,
                                              std::size_t w, std::size_t k);

} // namespace specdec
