#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ambisql {

enum class TokKind {
    Keyword,
    Identifier,
    Number,
    String,
    Operator,
    Punct,
};

struct SqlToken {
    TokKind kind;
    std::string text;  // keywords uppercased, identifiers lowercased, strings hold inner content
    size_t begin = 0;  // byte offsets into the source
    size_t end = 0;
};

/// Tokenizes a SQL-ish string. Total: returns tokens or throws LexError,
/// never crashes on arbitrary bytes. "<>" is normalized to "!=".
std::vector<SqlToken> lex(std::string_view source);

bool is_keyword(std::string_view upper);
bool is_aggregate_keyword(std::string_view upper);

/// Joins token texts into the canonical surface form: single spaces except
/// around '.', after '(' (and before it in aggregate calls), before ')' and
/// ',', and before subword pieces starting with '_'.
std::string render_tokens(const std::vector<std::string>& texts);

/// Token text as it appears in the canonical surface form (re-quotes strings).
std::string surface_text(const SqlToken& tok);

}  // namespace ambisql
