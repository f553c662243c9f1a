#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ambisql {

using TokenId = int;

/// Token id <-> text bijection with a deterministic word-level tokenizer.
/// Ids 0 and 1 are reserved for the begin/end markers. With
/// split_underscores, identifiers break into subword pieces
/// ("song_release_year" -> "song" "_release" "_year") to exercise multi-token
/// schema names. Closed after construction: encoding an unknown token throws
/// VocabError. decode(encode(s)) == s for canonically rendered strings.
class Vocabulary {
public:
    static constexpr TokenId kBegin = 0;
    static constexpr TokenId kEnd = 1;

    static Vocabulary build(std::span<const std::string> corpus, bool split_underscores = false);

    std::vector<std::string> tokenize(std::string_view text) const;
    std::vector<TokenId> encode(std::string_view text) const;
    std::string decode(std::span<const TokenId> ids) const;

    /// Tokenizer pieces back to texts, begin/end skipped.
    std::vector<std::string> decode_texts(std::span<const TokenId> ids) const;

    TokenId id(std::string_view text) const;  // throws VocabError if absent
    std::optional<TokenId> try_id(std::string_view text) const;
    const std::string& text(TokenId id) const;
    size_t size() const { return id_to_text_.size(); }
    bool split_underscores() const { return split_underscores_; }

    /// For the remote protocol: construct from an explicit id->text table.
    static Vocabulary from_table(std::vector<std::string> id_to_text, bool split_underscores);
    const std::vector<std::string>& table() const { return id_to_text_; }

private:
    Vocabulary() = default;
    std::vector<std::string> id_to_text_;
    std::unordered_map<std::string, TokenId> text_to_id_;
    bool split_underscores_ = false;
};

}  // namespace ambisql
