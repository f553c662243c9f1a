#include "ambisql/token.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "ambisql/errors.hpp"

namespace ambisql {

namespace {

const std::array<std::string_view, 27> kKeywords = {
    "SELECT", "DISTINCT", "FROM", "AS", "JOIN", "ON", "WHERE", "GROUP", "BY",
    "HAVING", "ORDER", "LIMIT", "UNION", "INTERSECT", "EXCEPT", "AND", "OR",
    "NOT", "IN", "BETWEEN", "LIKE", "ASC", "DESC", "AVG", "SUM", "MIN", "MAX",
};

std::string to_upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

bool is_keyword(std::string_view upper) {
    return std::find(kKeywords.begin(), kKeywords.end(), upper) != kKeywords.end() ||
           upper == "COUNT";
}

bool is_aggregate_keyword(std::string_view upper) {
    return upper == "AVG" || upper == "SUM" || upper == "MIN" || upper == "MAX" ||
           upper == "COUNT";
}

std::vector<SqlToken> lex(std::string_view src) {
    std::vector<SqlToken> out;
    size_t i = 0;
    const size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const size_t start = i;
        if (c == '"' || c == '\'') {
            const char quote = c;
            ++i;
            std::string inner;
            while (i < n && src[i] != quote) {
                inner.push_back(src[i]);
                ++i;
            }
            if (i >= n) throw LexError("unterminated string literal", start);
            ++i;  // closing quote
            out.push_back({TokKind::String, inner, start, i});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            ++i;
            while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            if (i + 1 < n && src[i] == '.' &&
                std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
                ++i;
                while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
            }
            out.push_back({TokKind::Number, std::string(src.substr(start, i - start)),
                           start, i});
            continue;
        }
        if (ident_start(c)) {
            ++i;
            while (i < n && ident_char(src[i])) ++i;
            std::string word(src.substr(start, i - start));
            std::string upper = to_upper(word);
            if (is_keyword(upper)) {
                out.push_back({TokKind::Keyword, upper, start, i});
            } else {
                out.push_back({TokKind::Identifier, to_lower(word), start, i});
            }
            continue;
        }
        // Two-char comparison operators first.
        if (i + 1 < n) {
            std::string_view two = src.substr(i, 2);
            if (two == "<=" || two == ">=" || two == "!=" || two == "<>") {
                out.push_back({TokKind::Operator, two == "<>" ? "!=" : std::string(two),
                               start, i + 2});
                i += 2;
                continue;
            }
        }
        if (c == '=' || c == '<' || c == '>' || c == '+' || c == '-' || c == '/' ||
            c == '%') {
            out.push_back({TokKind::Operator, std::string(1, c), start, i + 1});
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == ',' || c == '.' || c == '*' || c == '|' ||
            c == ';') {
            out.push_back({TokKind::Punct, std::string(1, c), start, i + 1});
            ++i;
            continue;
        }
        throw LexError("illegal character '" + std::string(1, c) + "'", i);
    }
    return out;
}

std::string surface_text(const SqlToken& tok) {
    if (tok.kind == TokKind::String) return "\"" + tok.text + "\"";
    return tok.text;
}

std::string render_tokens(const std::vector<std::string>& texts) {
    std::string out;
    std::string prev;
    for (const std::string& t : texts) {
        if (t.empty()) continue;
        bool space = !out.empty();
        if (t == "," || t == ")" || t == ".") space = false;
        if (prev == "." || prev == "(") space = false;
        if (!t.empty() && t[0] == '_') space = false;  // subword piece
        if (t == "(" && is_aggregate_keyword(prev)) space = false;
        if (space) out.push_back(' ');
        out += t;
        prev = t;
    }
    return out;
}

}  // namespace ambisql
