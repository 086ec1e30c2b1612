#include "specdec/engine.hpp"

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace specdec {

void RunMetrics::merge(const RunMetrics& other) {
    if (acceptance_hist.size() != other.acceptance_hist.size() ||
        rank_hist.size() != other.rank_hist.size())
        throw std::invalid_argument("cannot merge metrics from different configurations");
    call_count += other.call_count;
    token_count += other.token_count;
    prefill_positions += other.prefill_positions;
    for (std::size_t i = 0; i < acceptance_hist.size(); ++i)
        acceptance_hist[i] += other.acceptance_hist[i];
    for (std::size_t i = 0; i < rank_hist.size(); ++i) rank_hist[i] += other.rank_hist[i];
    for (std::size_t s = 0; s < kDraftStrategyCount; ++s)
        for (std::size_t i = 0; i < allocation_hist[s].size(); ++i)
            allocation_hist[s][i] += other.allocation_hist[s][i];
    trace.insert(trace.end(), other.trace.begin(), other.trace.end());
}

std::string metrics_to_json(const RunMetrics& m) {
    nlohmann::json j;
    j["tokens_per_call"] = m.tokens_per_call();
    j["call_count"] = m.call_count;
    j["token_count"] = m.token_count;
    j["prefill_positions"] = m.prefill_positions;
    j["acceptance_length_hist"] = m.acceptance_hist;
    j["winner_rank_hist"] = m.rank_hist;
    nlohmann::json alloc;
    for (std::size_t s = 0; s < kDraftStrategyCount; ++s)
        alloc[std::string(to_string(static_cast<DraftStrategy>(s)))] = m.allocation_hist[s];
    j["allocation_hist"] = alloc;
    nlohmann::json trace = nlohmann::json::array();
    for (const CallTrace& t : m.trace)
        trace.push_back({t.context_len, t.batch, t.width});
    j["trace"] = trace;
    return j.dump(2);
}

std::vector<std::size_t> verify_drafts(const PredictorOutput& output, const DraftBatch& drafts) {
    if (output.rows != drafts.rows.size() || output.cols != drafts.width + 1)
        throw std::invalid_argument("prediction shape does not match draft batch");
    std::vector<std::size_t> accepted(drafts.rows.size(), 0);
    for (std::size_t r = 0; r < drafts.rows.size(); ++r) {
        const TokenSeq& row = drafts.rows[r].tokens;
        std::size_t len = 0;
        while (len < drafts.width && row[len] == output.id(r, len)) ++len;
        accepted[r] = len;
    }
    return accepted;
}

std::size_t select_row(const std::vector<std::size_t>& accepted) {
    if (accepted.empty()) throw std::invalid_argument("no rows to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < accepted.size(); ++i)
        if (accepted[i] > accepted[best]) best = i;
    return best;
}

Session::Session(const Predictor& model, TokenSeq prompt, const DraftSource* drafts,
                 GenerationConfig config)
    : model_(model),
      drafts_(drafts),
      config_(config),
      tokens_(std::move(prompt)),
      prompt_len_(tokens_.size()),
      cache_(model.make_cache()) {
    if (tokens_.empty()) throw std::invalid_argument("prompt must not be empty");
    if (config_.k < 1) throw std::invalid_argument("k must be at least 1");

    metrics_.acceptance_hist.assign(config_.w + 1, 0);
    metrics_.rank_hist.assign(config_.k + 1, 0);
    for (auto& h : metrics_.allocation_hist) h.assign(config_.k + 1, 0);

    // Prefill: cache everything except the final prompt token. One model
    // call, not counted against tokens-per-call.
    if (tokens_.size() >= 2) {
        TokenRows pre{TokenSeq(tokens_.begin(), tokens_.end() - 1)};
        model_.forward_greedy(pre, 1, &cache_);
        cache_.commit(0, tokens_.size() - 1);
        metrics_.prefill_positions = tokens_.size() - 1;
    }
}

AcceptanceRecord Session::step() {
    if (finished_) throw std::logic_error("generation already finished");
    const std::size_t context_len = tokens_.size();

    DraftBatch drafts;
    if (config_.w > 0 && drafts_ != nullptr) {
        drafts = drafts_->make(tokens_, config_.k, config_.w);
        if (!drafts.rows.empty() &&
            (drafts.width != config_.w || drafts.rows.size() > config_.k))
            throw std::invalid_argument("draft batch does not match the configuration");
    }

    const bool have_drafts = !drafts.rows.empty();
    const std::size_t batch = have_drafts ? drafts.rows.size() : 1;
    const std::size_t width = have_drafts ? drafts.width : 0;

    TokenRows rows(batch);
    for (std::size_t r = 0; r < batch; ++r) {
        rows[r] = tokens_;
        if (have_drafts)
            rows[r].insert(rows[r].end(), drafts.rows[r].tokens.begin(),
                           drafts.rows[r].tokens.end());
    }

    cache_.broadcast(batch);
    const PredictorOutput out = model_.forward_greedy(rows, width + 1, &cache_);

    const std::vector<std::size_t> accepted =
        have_drafts ? verify_drafts(out, drafts) : std::vector<std::size_t>{0};
    const std::size_t winner = select_row(accepted);

    TokenSeq emitted;
    emitted.reserve(accepted[winner] + 1);
    for (std::size_t t = 0; t < accepted[winner]; ++t)
        emitted.push_back(drafts.rows[winner].tokens[t]);
    emitted.push_back(out.id(winner, accepted[winner]));

    if (config_.end_token) {
        auto it = std::find(emitted.begin(), emitted.end(), *config_.end_token);
        if (it != emitted.end()) {
            emitted.erase(it + 1, emitted.end());
            finished_ = true;
        }
    }

    cache_.commit(winner, emitted.size());
    tokens_.insert(tokens_.end(), emitted.begin(), emitted.end());

    AcceptanceRecord rec;
    rec.accepted_len = emitted.size() - 1;
    rec.emitted = emitted.size();
    rec.winner_row = winner;
    rec.has_winner = have_drafts;
    if (have_drafts) {
        rec.winner_strategy = drafts.rows[winner].source;
        rec.winner_rank = drafts.rows[winner].rank;
    }
    rec.context_len = context_len;

    metrics_.call_count += 1;
    metrics_.token_count += emitted.size();
    metrics_.acceptance_hist[rec.accepted_len] += 1;
    // Ranks past k (deduplication skips) fold into the top bucket.
    metrics_.rank_hist[have_drafts ? std::min(rec.winner_rank + 1, config_.k) : 0] += 1;
    std::array<std::size_t, kDraftStrategyCount> alloc{};
    for (const DraftRow& r : drafts.rows) alloc[static_cast<std::size_t>(r.source)] += 1;
    for (std::size_t s = 0; s < kDraftStrategyCount; ++s)
        metrics_.allocation_hist[s][alloc[s]] += 1;
    metrics_.trace.push_back({context_len, batch, width});

    return rec;
}

GenerationResult run_generation(const Predictor& model, const TokenSeq& prompt,
                                std::size_t max_tokens, const DraftSource* drafts,
                                const GenerationConfig& config) {
    if (max_tokens < 1) throw std::invalid_argument("max_tokens must be at least 1");
    Session session(model, prompt, drafts, config);
    while (session.generated_count() < max_tokens && !session.finished()) session.step();
    return {session.tokens(), session.metrics()};
}

} // namespace specdec
