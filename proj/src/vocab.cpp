#include "ambisql/vocab.hpp"

#include <algorithm>
#include <set>

#include "ambisql/errors.hpp"
#include "ambisql/token.hpp"

namespace ambisql {

namespace {

// "song_release_year" -> "song" "_release" "_year"; pieces concatenate back
// to the original, so the renderer can glue on the leading '_'.
void split_identifier(const std::string& word, std::vector<std::string>& out) {
    size_t pos = word.find('_', word[0] == '_' ? 1 : 0);
    if (pos == std::string::npos) {
        out.push_back(word);
        return;
    }
    out.push_back(word.substr(0, pos));
    while (pos < word.size()) {
        size_t next = word.find('_', pos + 1);
        if (next == std::string::npos) next = word.size();
        out.push_back(word.substr(pos, next - pos));
        pos = next;
    }
}

}  // namespace

std::vector<std::string> Vocabulary::tokenize(std::string_view text) const {
    std::vector<std::string> out;
    for (const SqlToken& tok : lex(text)) {
        if (tok.kind == TokKind::Identifier && split_underscores_ &&
            tok.text.find('_') != std::string::npos) {
            split_identifier(tok.text, out);
        } else {
            out.push_back(surface_text(tok));
        }
    }
    return out;
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus, bool split_underscores) {
    Vocabulary v;
    v.split_underscores_ = split_underscores;
    v.id_to_text_ = {"<s>", "</s>"};
    std::set<std::string> uniq;
    for (const std::string& text : corpus)
        for (std::string& piece : v.tokenize(text)) uniq.insert(std::move(piece));
    for (const std::string& piece : uniq) v.id_to_text_.push_back(piece);
    for (TokenId i = 0; i < static_cast<TokenId>(v.id_to_text_.size()); ++i)
        v.text_to_id_[v.id_to_text_[i]] = i;
    return v;
}

Vocabulary Vocabulary::from_table(std::vector<std::string> id_to_text, bool split_underscores) {
    Vocabulary v;
    v.split_underscores_ = split_underscores;
    v.id_to_text_ = std::move(id_to_text);
    for (TokenId i = 0; i < static_cast<TokenId>(v.id_to_text_.size()); ++i)
        v.text_to_id_[v.id_to_text_[i]] = i;
    if (v.id_to_text_.size() < 2 || v.id_to_text_[0] != "<s>" || v.id_to_text_[1] != "</s>")
        throw VocabError("vocabulary table must start with <s>, </s>");
    return v;
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
    std::vector<TokenId> ids;
    for (const std::string& piece : tokenize(text)) ids.push_back(id(piece));
    return ids;
}

TokenId Vocabulary::id(std::string_view text) const {
    auto it = text_to_id_.find(std::string(text));
    if (it == text_to_id_.end())
        throw VocabError("token not in vocabulary: '" + std::string(text) + "'");
    return it->second;
}

std::optional<TokenId> Vocabulary::try_id(std::string_view text) const {
    auto it = text_to_id_.find(std::string(text));
    if (it == text_to_id_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::text(TokenId id) const {
    if (id < 0 || id >= static_cast<TokenId>(id_to_text_.size()))
        throw VocabError("token id out of range: " + std::to_string(id));
    return id_to_text_[id];
}

std::vector<std::string> Vocabulary::decode_texts(std::span<const TokenId> ids) const {
    std::vector<std::string> texts;
    for (TokenId id : ids) {
        if (id == kBegin || id == kEnd) continue;
        texts.push_back(text(id));
    }
    return texts;
}

std::string Vocabulary::decode(std::span<const TokenId> ids) const {
    return render_tokens(decode_texts(ids));
}

}  // namespace ambisql
