#include "specdec/ngram_tables.hpp"

#include "specdec/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace specdec {

namespace {

constexpr char kMagic[4] = {'N', 'G', 'T', 'B'};
constexpr std::uint32_t kVersion = 1;

void write_table(std::ostream& os, std::size_t vocab, std::size_t top_k, std::size_t width,
                 const std::vector<Token>& data) {
    os.write(kMagic, 4);
    io::write_u32(os, kVersion);
    io::write_u32(os, static_cast<std::uint32_t>(vocab));
    io::write_u32(os, static_cast<std::uint32_t>(top_k));
    io::write_u32(os, static_cast<std::uint32_t>(width));
    for (Token t : data) io::write_u32(os, t);
    if (!os) throw std::runtime_error("failed to write table file");
}

struct TableHeader {
    std::size_t vocab, top_k, width;
};

TableHeader read_header(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic))
        throw std::runtime_error("not an n-gram table file");
    if (io::read_u32(is) != kVersion) throw std::runtime_error("unsupported table file version");
    TableHeader h;
    h.vocab = io::read_u32(is);
    h.top_k = io::read_u32(is);
    h.width = io::read_u32(is);
    if (h.vocab == 0 || h.top_k == 0 || h.width == 0 || h.top_k > h.vocab)
        throw std::runtime_error("table file header out of range");
    return h;
}

std::vector<Token> read_ids(std::istream& is, std::size_t count, std::size_t vocab) {
    std::vector<Token> data(count);
    for (Token& t : data) {
        t = io::read_u32(is);
        if (t >= vocab) throw std::runtime_error("table file token out of range");
    }
    return data;
}

} // namespace

BigramTable BigramTable::derive(const Predictor& model, std::size_t top_k) {
    const std::size_t vocab = model.vocab_size();
    if (top_k == 0) throw std::invalid_argument("top_k must be at least 1");
    if (top_k > vocab) throw std::invalid_argument("top_k exceeds vocabulary size");

    BigramTable table;
    table.vocab_size_ = vocab;
    table.top_k_ = top_k;
    table.data_.resize(vocab * top_k);

    std::vector<Token> order(vocab);
    for (std::size_t start = 0; start < vocab; start += kBuildBatch) {
        const std::size_t count = std::min(kBuildBatch, vocab - start);
        TokenRows rows(count);
        for (std::size_t i = 0; i < count; ++i) rows[i] = {static_cast<Token>(start + i)};
        PredictorOutput out = model.forward_greedy(rows, 1, nullptr, /*want_scores=*/true);
        for (std::size_t i = 0; i < count; ++i) {
            const std::vector<double>& scores = out.score_row(i, 0);
            std::iota(order.begin(), order.end(), Token{0});
            std::partial_sort(order.begin(), order.begin() + top_k, order.end(),
                              [&](Token a, Token b) {
                                  if (scores[a] != scores[b]) return scores[a] > scores[b];
                                  return a < b;
                              });
            std::copy(order.begin(), order.begin() + top_k,
                      table.data_.begin() + (start + i) * top_k);
        }
    }
    return table;
}

ExtendedBigramTable ExtendedBigramTable::extend(const Predictor& model, const BigramTable& base,
                                                std::size_t max_width) {
    if (max_width < 1) throw std::invalid_argument("max_width must be at least 1");

    ExtendedBigramTable table;
    table.vocab_size_ = base.vocab_size();
    table.top_k_ = base.top_k();
    table.max_width_ = max_width;
    table.data_.resize(table.vocab_size_ * table.top_k_ * max_width);

    // Per seed token, grow all top-k continuations together as one batch.
    for (std::size_t x = 0; x < table.vocab_size_; ++x) {
        const auto successors = base.row(static_cast<Token>(x));
        TokenRows rows(table.top_k_);
        for (std::size_t j = 0; j < table.top_k_; ++j)
            rows[j] = {static_cast<Token>(x), successors[j]};
        for (std::size_t t = 1; t < max_width; ++t) {
            PredictorOutput out = model.forward_greedy(rows, 1);
            for (std::size_t j = 0; j < table.top_k_; ++j) rows[j].push_back(out.id(j, 0));
        }
        for (std::size_t j = 0; j < table.top_k_; ++j)
            std::copy(rows[j].begin() + 1, rows[j].end(),
                      table.data_.begin() + (x * table.top_k_ + j) * max_width);
    }
    return table;
}

DraftBatch extended_speculate(const ExtendedBigramTable& table, Token last_token,
                              std::size_t k, std::size_t w) {
    if (last_token >= table.vocab_size()) throw std::invalid_argument("seed token out of range");
    if (k > table.top_k()) throw std::invalid_argument("k exceeds stored table depth");
    if (w < 1 || w > table.max_width()) throw std::invalid_argument("w exceeds stored table width");

    DraftBatch batch;
    batch.width = w;
    batch.rows.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto stored = table.row(last_token, j);
        batch.rows.push_back({TokenSeq(stored.begin(), stored.begin() + w),
                              DraftStrategy::ModelBigram, j});
    }
    return batch;
}

void BigramTable::save(std::ostream& os) const {
    write_table(os, vocab_size_, top_k_, 1, data_);
}

void BigramTable::save_file(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open table file for writing: " + path.string());
    save(os);
}

BigramTable BigramTable::load(std::istream& is) {
    const TableHeader h = read_header(is);
    if (h.width != 1) throw std::runtime_error("not a bigram table file");
    BigramTable t;
    t.vocab_size_ = h.vocab;
    t.top_k_ = h.top_k;
    t.data_ = read_ids(is, h.vocab * h.top_k, h.vocab);
    return t;
}

BigramTable BigramTable::load_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open table file: " + path.string());
    return load(is);
}

void ExtendedBigramTable::save(std::ostream& os) const {
    write_table(os, vocab_size_, top_k_, max_width_, data_);
}

void ExtendedBigramTable::save_file(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open table file for writing: " + path.string());
    save(os);
}

ExtendedBigramTable ExtendedBigramTable::load(std::istream& is) {
    const TableHeader h = read_header(is);
    ExtendedBigramTable t;
    t.vocab_size_ = h.vocab;
    t.top_k_ = h.top_k;
    t.max_width_ = h.width;
    t.data_ = read_ids(is, h.vocab * h.top_k * h.width, h.vocab);
    return t;
}

ExtendedBigramTable ExtendedBigramTable::load_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open table file: " + path.string());
    return load(is);
}

} // namespace specdec
