#include "specdec/context_ngram.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace specdec {

std::vector<ContextMatch> context_ngram_match(const TokenSeq& context, std::size_t q,
                                              std::size_t w, std::size_t k) {
    if (q < 1 || w < 1 || k < 1)
        throw std::invalid_argument("q, w and k must all be at least 1");

    const std::size_t len = context.size();
    if (len < q + w || len < q) return {};

    const Token* query = context.data() + (len - q);

    // Group windows by continuation (the query prefix is shared), tracking
    // multiplicity and the most recent window start.
    std::map<TokenSeq, std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t s = 0; s + q + w <= len; ++s) {
        if (!std::equal(query, query + q, context.data() + s)) continue;
        TokenSeq continuation(context.begin() + s + q, context.begin() + s + q + w);
        auto [it, inserted] = groups.try_emplace(std::move(continuation), 1, s);
        if (!inserted) {
            it->second.first += 1;
            it->second.second = s; // window starts scan in increasing order
        }
    }

    std::vector<ContextMatch> matches;
    matches.reserve(groups.size());
    for (auto& [continuation, stats] : groups)
        matches.push_back({continuation, stats.first, stats.second});

    std::sort(matches.begin(), matches.end(), [](const ContextMatch& a, const ContextMatch& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.last_position != b.last_position) return a.last_position > b.last_position;
        return a.continuation < b.continuation;
    });
    if (matches.size() > k) matches.resize(k);
    return matches;
}

} // namespace specdec
