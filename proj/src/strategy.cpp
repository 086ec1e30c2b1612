#include "specdec/strategy.hpp"

#include <algorithm>
#include <stdexcept>

namespace specdec {

std::string_view to_string(DraftStrategy s) {
    switch (s) {
        case DraftStrategy::Context: return "context";
        case DraftStrategy::ModelBigram: return "model_bigram";
        case DraftStrategy::Unigram: return "unigram";
        case DraftStrategy::Oracle: return "oracle";
    }
    return "unknown";
}

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Mixed: return "mixed";
        case StrategyKind::Context: return "context";
        case StrategyKind::Bigram: return "bigram";
        case StrategyKind::Extended: return "extended";
        case StrategyKind::Unigram: return "unigram";
    }
    return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
    if (name == "mixed") return StrategyKind::Mixed;
    if (name == "context") return StrategyKind::Context;
    if (name == "bigram") return StrategyKind::Bigram;
    if (name == "extended") return StrategyKind::Extended;
    if (name == "unigram") return StrategyKind::Unigram;
    return std::nullopt;
}

void DraftBatch::validate() const {
    bool seen_model_row = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].tokens.size() != width)
            throw std::logic_error("draft row width mismatch");
        if (rows[i].source == DraftStrategy::ModelBigram) seen_model_row = true;
        else if (rows[i].source == DraftStrategy::Context && seen_model_row)
            throw std::logic_error("context rows must precede model rows");
        for (std::size_t j = 0; j < i; ++j)
            if (rows[j].tokens == rows[i].tokens)
                throw std::logic_error("duplicate draft rows");
    }
}

DraftBatch mixed_drafts(const TokenSeq& context, std::size_t k, std::size_t w, std::size_t q,
                        const ExtendedBigramTable& ext_table, std::size_t context_cap) {
    if (context.empty()) throw std::invalid_argument("context must not be empty");
    if (k < 1 || w < 1) throw std::invalid_argument("k and w must be at least 1");
    if (w > ext_table.max_width())
        throw std::invalid_argument("w exceeds stored table width");

    DraftBatch batch;
    batch.width = w;

    const std::size_t context_budget = context_cap > 0 ? std::min(k, context_cap) : k;
    for (auto& match : context_ngram_match(context, q, w, context_budget))
        batch.rows.push_back({std::move(match.continuation), DraftStrategy::Context,
                              batch.rows.size()});

    const Token seed = context.back();
    for (std::size_t j = 0; j < ext_table.top_k() && batch.rows.size() < k; ++j) {
        const auto stored = ext_table.row(seed, j);
        TokenSeq candidate(stored.begin(), stored.begin() + w);
        const bool duplicate = std::any_of(batch.rows.begin(), batch.rows.end(),
                                           [&](const DraftRow& r) { return r.tokens == candidate; });
        if (duplicate) continue;
        batch.rows.push_back({std::move(candidate), DraftStrategy::ModelBigram, j});
    }
    return batch;
}

DraftBatch single_strategy_drafts(StrategyKind kind, const TokenSeq& context, std::size_t k,
                                  std::size_t w, std::size_t q, const DraftTables& tables) {
    if (context.empty()) throw std::invalid_argument("context must not be empty");
    if (k < 1 || w < 1) throw std::invalid_argument("k and w must be at least 1");

    DraftBatch batch;
    batch.width = w;

    switch (kind) {
        case StrategyKind::Mixed:
            if (!tables.extended) throw std::invalid_argument("mixed strategy needs an extended table");
            return mixed_drafts(context, k, w, q, *tables.extended);
        case StrategyKind::Context:
            for (auto& match : context_ngram_match(context, q, w, k))
                batch.rows.push_back({std::move(match.continuation), DraftStrategy::Context,
                                      batch.rows.size()});
            return batch;
        case StrategyKind::Extended: {
            if (!tables.extended) throw std::invalid_argument("extended strategy needs a table");
            const std::size_t take = std::min(k, tables.extended->top_k());
            return extended_speculate(*tables.extended, context.back(), take, w);
        }
        case StrategyKind::Bigram: {
            if (!tables.bigram) throw std::invalid_argument("bigram strategy needs a table");
            if (w != 1) throw std::invalid_argument("bigram strategy requires w == 1");
            const auto row = tables.bigram->row(context.back());
            const std::size_t take = std::min(k, tables.bigram->top_k());
            for (std::size_t j = 0; j < take; ++j)
                batch.rows.push_back({{row[j]}, DraftStrategy::ModelBigram, j});
            return batch;
        }
        case StrategyKind::Unigram: {
            if (!tables.unigram) throw std::invalid_argument("unigram strategy needs a ranking");
            if (w != 1) throw std::invalid_argument("unigram strategy requires w == 1");
            const std::size_t take = std::min(k, tables.unigram->ranking.size());
            const auto top = unigram_topk(*tables.unigram, take);
            for (std::size_t j = 0; j < top.size(); ++j)
                batch.rows.push_back({{top[j]}, DraftStrategy::Unigram, j});
            return batch;
        }
    }
    throw std::logic_error("unreachable strategy kind");
}

DraftBatch StrategySource::make(const TokenSeq& context, std::size_t k, std::size_t w) const {
    if (kind_ == StrategyKind::Mixed) {
        if (!tables_.extended) throw std::invalid_argument("mixed strategy needs an extended table");
        return mixed_drafts(context, k, w, q_, *tables_.extended, context_cap_);
    }
    return single_strategy_drafts(kind_, context, k, w, q_, tables_);
}

} // namespace specdec
