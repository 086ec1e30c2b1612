#include "specdec/vocab.hpp"

#include <cctype>
#include <stdexcept>

namespace specdec {

namespace {

std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) words.push_back(text.substr(start, i - start));
    }
    return words;
}

} // namespace

Vocab Vocab::build(std::string_view corpus_text, VocabMode mode) {
    Vocab v;
    v.mode_ = mode;
    if (mode == VocabMode::Byte) {
        if (corpus_text.empty()) throw std::invalid_argument("empty corpus");
        v.size_ = 256;
        return v;
    }
    auto words = split_words(corpus_text);
    if (words.empty()) throw std::invalid_argument("empty corpus");
    for (auto w : words) {
        std::string key(w);
        if (v.ids_.find(key) == v.ids_.end()) {
            v.ids_.emplace(std::move(key), static_cast<Token>(v.words_.size()));
            v.words_.emplace_back(w);
        }
    }
    v.words_.emplace_back("<unk>"); // reserved; detokenizes unseen words
    v.size_ = v.words_.size();
    return v;
}

Token Vocab::unknown_id() const {
    if (mode_ != VocabMode::Word) throw std::logic_error("unknown_id is word-mode only");
    return static_cast<Token>(size_ - 1);
}

TokenSeq Vocab::tokenize(std::string_view text) const {
    TokenSeq out;
    if (mode_ == VocabMode::Byte) {
        out.reserve(text.size());
        for (unsigned char c : text) out.push_back(static_cast<Token>(c));
        return out;
    }
    for (auto w : split_words(text)) {
        auto it = ids_.find(std::string(w));
        out.push_back(it == ids_.end() ? unknown_id() : it->second);
    }
    return out;
}

std::string Vocab::detokenize(const TokenSeq& tokens) const {
    std::string out;
    if (mode_ == VocabMode::Byte) {
        out.reserve(tokens.size());
        for (Token t : tokens) {
            if (t >= 256) throw std::invalid_argument("token id out of range for byte vocab");
            out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
        }
        return out;
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] >= size_) throw std::invalid_argument("token id out of range");
        if (i > 0) out.push_back(' ');
        out += words_[tokens[i]];
    }
    return out;
}

std::optional<Token> Vocab::word_id(std::string_view word) const {
    if (mode_ != VocabMode::Word) return std::nullopt;
    auto it = ids_.find(std::string(word));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

} // namespace specdec
