#pragma once

#include "specdec/token.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace specdec {

enum class VocabMode {
    Byte, // one token per byte value, size fixed at 256
    Word, // one token per distinct whitespace-delimited word, plus <unk>
};

/// Closed vocabulary over a corpus. Immutable after build; token ids are
/// contiguous in [0, size).
class Vocab {
public:
    static Vocab build(std::string_view corpus_text, VocabMode mode);

    VocabMode mode() const { return mode_; }
    std::size_t size() const { return size_; }

    /// Word mode only: the reserved id unseen words map to (always size-1).
    Token unknown_id() const;

    TokenSeq tokenize(std::string_view text) const;

    /// Inverse of tokenize for byte mode on any input; for word mode on
    /// single-space-separated known words.
    std::string detokenize(const TokenSeq& tokens) const;

    std::optional<Token> word_id(std::string_view word) const;

private:
    Vocab() = default;

    VocabMode mode_ = VocabMode::Byte;
    std::size_t size_ = 0;
    std::vector<std::string> words_;               // id -> word (word mode)
    std::unordered_map<std::string, Token> ids_;   // word -> id (word mode)
};

} // namespace specdec
