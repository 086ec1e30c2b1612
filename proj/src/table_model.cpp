#include "specdec/table_model.hpp"

#include <stdexcept>

namespace specdec {

TableModel TableModel::from_corpus(const TokenSeq& corpus, std::size_t order,
                                   std::size_t vocab_size) {
    if (order < 1) throw std::invalid_argument("order must be at least 1");
    if (vocab_size < 1) throw std::invalid_argument("vocab size must be at least 1");
    if (corpus.size() <= order) throw std::invalid_argument("corpus too short for order");
    for (Token t : corpus)
        if (t >= vocab_size) throw std::invalid_argument("corpus token out of vocabulary range");

    TableModel m(vocab_size, order);
    TokenSeq history(order);
    for (std::size_t i = 0; i + order < corpus.size(); ++i) {
        history.assign(corpus.begin() + i, corpus.begin() + i + order);
        m.table_[history][corpus[i + order]] += 1;
    }
    return m;
}

const TableModel::Counts* TableModel::lookup(std::span<const Token> ctx) const {
    if (ctx.size() < order_) return nullptr;
    TokenSeq history(ctx.end() - order_, ctx.end());
    auto it = table_.find(history);
    return it == table_.end() ? nullptr : &it->second;
}

std::uint32_t TableModel::continuation_count(std::span<const Token> history, Token next) const {
    if (history.size() != order_) throw std::invalid_argument("history length must equal order");
    const Counts* c = lookup(history);
    if (!c) return 0;
    auto it = c->find(next);
    return it == c->end() ? 0 : it->second;
}

Token TableModel::greedy_at(std::span<const Token> ctx) const {
    const Counts* c = lookup(ctx);
    if (!c) return 0; // uniform backoff, lowest id wins
    Token best = 0;
    std::uint32_t best_count = 0;
    bool first = true;
    for (const auto& [tok, count] : *c) {
        if (first || count > best_count || (count == best_count && tok < best)) {
            best = tok;
            best_count = count;
            first = false;
        }
    }
    return best;
}

std::vector<double> TableModel::scores_at(std::span<const Token> ctx) const {
    std::vector<double> scores(vocab_size_, 0.0);
    const Counts* c = lookup(ctx);
    if (!c) {
        const double u = 1.0 / static_cast<double>(vocab_size_);
        scores.assign(vocab_size_, u);
        return scores;
    }
    for (const auto& [tok, count] : *c) scores[tok] = static_cast<double>(count);
    return scores;
}

PredictorOutput TableModel::forward_greedy(const TokenRows& rows, std::size_t n_outputs,
                                           KvCache* cache, bool want_scores) const {
    detail::validate_forward(rows, vocab_size_, n_outputs, cache);
    const std::size_t len = rows[0].size();
    const std::size_t first_out = len - n_outputs;
    const std::size_t committed = cache ? cache->committed_len() : 0;

    if (cache) cache->begin_step(len - committed);

    PredictorOutput out;
    out.rows = rows.size();
    out.cols = n_outputs;
    out.greedy.resize(out.rows * out.cols);
    if (want_scores) out.scores.resize(out.rows * out.cols);

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const TokenSeq& row = rows[r];
        if (cache)
            for (std::size_t p = committed; p < len; ++p)
                cache->set_spec(r, p - committed, row[p], {}, {});
        for (std::size_t t = 0; t < n_outputs; ++t) {
            std::span<const Token> ctx(row.data(), first_out + t + 1);
            out.greedy[r * n_outputs + t] = greedy_at(ctx);
            if (want_scores) out.scores[r * n_outputs + t] = scores_at(ctx);
        }
    }
    return out;
}

} // namespace specdec
