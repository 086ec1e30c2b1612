#pragma once

#include "specdec/predictor.hpp"
#include "specdec/strategy.hpp"
#include "specdec/trace.hpp"

#include <array>
#include <optional>
#include <string>

namespace specdec {

/// Outcome of one decoding step. `emitted` is always accepted_len + 1: the
/// matched draft prefix plus the model's own next prediction from the same
/// call. When the end token cuts an accepted prefix short, accepted_len is
/// recorded after truncation so the identity still holds.
struct AcceptanceRecord {
    std::size_t accepted_len = 0;
    std::size_t emitted = 0;
    std::size_t winner_row = 0;
    DraftStrategy winner_strategy = DraftStrategy::ModelBigram;
    std::size_t winner_rank = 0;
    bool has_winner = false; // false for draft-free (plain greedy) calls
    std::size_t context_len = 0;
};

struct RunMetrics {
    std::size_t call_count = 0;
    std::size_t token_count = 0;
    std::size_t prefill_positions = 0;
    std::vector<std::size_t> acceptance_hist; // index = accepted length, 0..w
    std::vector<std::size_t> rank_hist;       // 0 = draft-free call, 1..k = winner rank
    std::array<std::vector<std::size_t>, kDraftStrategyCount>
        allocation_hist;                      // [strategy][rows allocated that call]
    std::vector<CallTrace> trace;

    double tokens_per_call() const {
        return static_cast<double>(token_count) / static_cast<double>(call_count);
    }

    /// Accumulate another run with the same (k, w) configuration.
    void merge(const RunMetrics& other);
};

/// JSON document with tokens_per_call, call_count, token_count, the three
/// histograms as arrays, and the trace as [l, k, w] triples.
std::string metrics_to_json(const RunMetrics& metrics);

/// Per-row accepted lengths: entry i is the longest draft prefix of row i
/// that matches the model's own predictions for that row.
std::vector<std::size_t> verify_drafts(const PredictorOutput& output, const DraftBatch& drafts);

/// Row with the maximum accepted length; ties go to the lowest index, so
/// context rows win by batch ordering.
std::size_t select_row(const std::vector<std::size_t>& accepted);

struct GenerationConfig {
    std::size_t k = 1;
    std::size_t w = 0;
    std::optional<Token> end_token; // stop (and truncate) once emitted
};

/// One speculative generation session: owns the KV cache and committed
/// tokens, prefilled from the prompt at construction. Strictly single-
/// threaded; the model and tables it reads are shared and immutable.
class Session {
public:
    Session(const Predictor& model, TokenSeq prompt, const DraftSource* drafts,
            GenerationConfig config);

    /// Build drafts, verify them in one model call, commit the winner, and
    /// append the emitted tokens. Always emits at least one token.
    AcceptanceRecord step();

    bool finished() const { return finished_; }
    const TokenSeq& tokens() const { return tokens_; }
    std::size_t prompt_len() const { return prompt_len_; }
    std::size_t generated_count() const { return tokens_.size() - prompt_len_; }
    const RunMetrics& metrics() const { return metrics_; }

private:
    const Predictor& model_;
    const DraftSource* drafts_;
    GenerationConfig config_;
    TokenSeq tokens_;
    std::size_t prompt_len_;
    KvCache cache_;
    RunMetrics metrics_;
    bool finished_ = false;
};

struct GenerationResult {
    TokenSeq output; // prompt + generated tokens
    RunMetrics metrics;
};

/// Run speculative decoding until at least max_tokens tokens are emitted (a
/// final step may overshoot by up to w) or the end token appears. The output
/// is token-identical to plain greedy decoding of the same length.
GenerationResult run_generation(const Predictor& model, const TokenSeq& prompt,
                                std::size_t max_tokens, const DraftSource* drafts,
                                const GenerationConfig& config);

} // namespace specdec
