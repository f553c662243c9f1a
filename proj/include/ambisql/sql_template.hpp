#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ambisql/ast.hpp"
#include "ambisql/name_trie.hpp"
#include "ambisql/vocab.hpp"

namespace ambisql {

enum class SlotKind { Column, Table, Number, String };

/// SQL skeleton: schema names and literal constants abstracted into slots,
/// everything else kept verbatim. Serialized slots use the placeholder words
/// "column", "table", "number", "string".
struct SqlTemplate {
    struct Element {
        enum class Type { Literal, Slot };
        Type type = Type::Literal;
        std::string text;  // literal token text
        SlotKind slot = SlotKind::Column;

        bool operator==(const Element&) const = default;
        static Element literal(std::string t) { return {Type::Literal, std::move(t), {}}; }
        static Element make_slot(SlotKind k) { return {Type::Slot, {}, k}; }
    };

    std::vector<Element> elements;
    bool operator==(const SqlTemplate&) const = default;

    std::string to_string() const;
    static SqlTemplate from_string(std::string_view text);
    bool empty() const { return elements.empty(); }
};

/// Structural summary prefixed to a template: JOIN count over the whole
/// template, selection count of the outermost SELECT list.
struct Plan {
    int joins = 0;
    int selects = 1;
    bool operator==(const Plan&) const = default;
};

inline constexpr int kMaxPlanJoins = 3;

/// Replaces column refs, table names, and literal constants with slots;
/// keywords, operators, aggregates, stars, and alias declarations stay.
SqlTemplate extract_template(const SqlAst& ast);

/// Throws TemplateMalformed when the skeleton has no outermost SELECT...FROM
/// segmentation.
Plan compute_plan(const SqlTemplate& templ);

/// "<J> joins | <S> selects | <TEMPLATE>"
std::string serialize_planned(const Plan& plan, const SqlTemplate& templ);
std::pair<Plan, SqlTemplate> parse_planned(std::string_view text);
/// The enforcement prefix "<J> joins | <S> selects |".
std::string plan_prefix(const Plan& plan);

/// Neighborhood (j-1,s), (j+1,s), (j,s-1), (j,s+1) in that order, invalid
/// members (j<0, j>3, s<1) removed.
std::vector<Plan> counterfactual_plans(const Plan& base);

enum class TokenClass { Column, Table, Other };

/// Tracks a position inside a template during token-by-token infilling.
/// Advancing either stays valid or flips to violated; it never skips
/// template content. Column slots admit either a bare name or
/// "alias.name" with alias drawn from t1..t9 plus aliases declared earlier
/// in the template. A name slot closes on the lookahead token of the next
/// literal, ties broken toward closing.
class TemplateCursor {
public:
    TemplateCursor(const SqlTemplate& templ, const NameTrie& trie, const Vocabulary& vocab,
                   bool union_classes = true);

    enum class Advance { Ok, Violated };
    Advance advance(TokenId token);

    bool violated() const { return violated_; }
    /// Template fully consumed: the only valid continuation is end-of-sequence.
    bool complete() const;
    /// True when emitting end-of-sequence now yields a full instantiation
    /// (closes a trailing name slot at a terminal node if needed).
    bool can_finish() const;

    TokenClass next_class() const;

    /// Tokens that keep the cursor valid at a name slot, sorted ascending;
    /// includes the closing literal (or kEnd) when the fill may terminate.
    std::vector<TokenId> admissible_name_tokens() const;

private:
    enum class Phase {
        AtElement,   // next token starts elements_[elem_]
        AliasDot,    // consumed an alias token, expecting "."
        AfterDot,    // consumed alias ".", name must start
        InName,      // walking the trie at node_
    };

    const SqlTemplate* templ_;
    const NameTrie* trie_;
    const Vocabulary* vocab_;
    bool union_classes_;
    size_t elem_ = 0;
    Phase phase_ = Phase::AtElement;
    int node_ = NameTrie::kRoot;
    bool violated_ = false;
    std::set<std::string> declared_aliases_;

    bool is_alias_token(const std::string& text) const;
    SlotKind cur_slot() const { return templ_->elements[elem_].slot; }
    NameClass cur_class() const {
        return cur_slot() == SlotKind::Table ? NameClass::Table : NameClass::Column;
    }
    std::optional<TokenId> closing_token() const;
    void note_literal(size_t idx);
};

}  // namespace ambisql
