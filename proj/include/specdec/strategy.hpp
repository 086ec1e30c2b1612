#pragma once

#include "specdec/context_ngram.hpp"
#include "specdec/draft.hpp"
#include "specdec/ngram_tables.hpp"
#include "specdec/unigram.hpp"

#include <optional>
#include <string_view>

namespace specdec {

enum class StrategyKind { Mixed, Context, Bigram, Extended, Unigram };

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);

/// Tables a draft source may need; only the ones its strategy uses must be set.
struct DraftTables {
    const BigramTable* bigram = nullptr;
    const ExtendedBigramTable* extended = nullptr;
    const UnigramRanking* unigram = nullptr;
};

/// Mixed allocation: as many context matches as available (optionally capped),
/// then extended-bigram rows seeded by the last context token in rank order.
/// Rows identical to an earlier row are skipped; if the table runs out of
/// distinct rows the batch stays short of k.
DraftBatch mixed_drafts(const TokenSeq& context, std::size_t k, std::size_t w, std::size_t q,
                        const ExtendedBigramTable& ext_table, std::size_t context_cap = 0);

/// Batch from exactly one strategy (for ablations). Unigram and bigram
/// require w == 1. k is clamped to what the strategy can produce.
DraftBatch single_strategy_drafts(StrategyKind kind, const TokenSeq& context, std::size_t k,
                                  std::size_t w, std::size_t q, const DraftTables& tables);

/// Per-step draft producer used by the decoding engine.
class DraftSource {
public:
    virtual ~DraftSource() = default;
    virtual DraftBatch make(const TokenSeq& context, std::size_t k, std::size_t w) const = 0;
};

/// DraftSource dispatching on a StrategyKind over shared immutable tables.
class StrategySource final : public DraftSource {
public:
    StrategySource(StrategyKind kind, std::size_t q, DraftTables tables,
                   std::size_t context_cap = 0)
        : kind_(kind), q_(q), tables_(tables), context_cap_(context_cap) {}

    DraftBatch make(const TokenSeq& context, std::size_t k, std::size_t w) const override;

    StrategyKind kind() const { return kind_; }

private:
    StrategyKind kind_;
    std::size_t q_;
    DraftTables tables_;
    std::size_t context_cap_;
};

} // namespace specdec
