#include "ambisql/sql_template.hpp"

#include <algorithm>

#include "ambisql/ast_walk.hpp"
#include "ambisql/errors.hpp"
#include "ambisql/token.hpp"

namespace ambisql {

namespace {

const char* placeholder(SlotKind k) {
    switch (k) {
        case SlotKind::Column: return "column";
        case SlotKind::Table: return "table";
        case SlotKind::Number: return "number";
        case SlotKind::String: return "string";
    }
    return "column";
}

std::optional<SlotKind> placeholder_kind(const std::string& word) {
    if (word == "column") return SlotKind::Column;
    if (word == "table") return SlotKind::Table;
    if (word == "number") return SlotKind::Number;
    if (word == "string") return SlotKind::String;
    return std::nullopt;
}

class TemplateSink : public TokenSink {
public:
    void word(const std::string& text) override {
        elements.push_back(SqlTemplate::Element::literal(text));
    }
    void column_ref(const ColumnRef&) override {
        elements.push_back(SqlTemplate::Element::make_slot(SlotKind::Column));
    }
    void table_name(const std::string&) override {
        elements.push_back(SqlTemplate::Element::make_slot(SlotKind::Table));
    }
    void number(const LiteralValue&) override {
        elements.push_back(SqlTemplate::Element::make_slot(SlotKind::Number));
    }
    void string_lit(const LiteralValue&) override {
        elements.push_back(SqlTemplate::Element::make_slot(SlotKind::String));
    }

    std::vector<SqlTemplate::Element> elements;
};

bool lexes_as_number(const std::string& text) {
    if (text.empty()) return false;
    try {
        auto toks = lex(text);
        return toks.size() == 1 && toks[0].kind == TokKind::Number;
    } catch (const LexError&) {
        return false;
    }
}

bool is_quoted_string(const std::string& text) {
    return text.size() >= 2 && text.front() == '"' && text.back() == '"';
}

}  // namespace

std::string SqlTemplate::to_string() const {
    std::vector<std::string> texts;
    texts.reserve(elements.size());
    for (const Element& e : elements)
        texts.push_back(e.type == Element::Type::Slot ? placeholder(e.slot) : e.text);
    return render_tokens(texts);
}

SqlTemplate SqlTemplate::from_string(std::string_view text) {
    SqlTemplate t;
    for (const SqlToken& tok : lex(text)) {
        if (tok.kind == TokKind::Identifier) {
            if (auto kind = placeholder_kind(tok.text)) {
                t.elements.push_back(Element::make_slot(*kind));
                continue;
            }
        }
        t.elements.push_back(Element::literal(surface_text(tok)));
    }
    return t;
}

SqlTemplate extract_template(const SqlAst& ast) {
    TemplateSink sink;
    walk_ast(ast, sink);
    SqlTemplate t;
    t.elements = std::move(sink.elements);
    return t;
}

Plan compute_plan(const SqlTemplate& templ) {
    using Element = SqlTemplate::Element;
    const auto& el = templ.elements;
    if (el.empty() || el[0].type != Element::Type::Literal || el[0].text != "SELECT")
        throw TemplateMalformed("template does not start with SELECT");
    Plan plan;
    plan.joins = 0;
    for (const Element& e : el)
        if (e.type == Element::Type::Literal && e.text == "JOIN") ++plan.joins;

    // Outermost select list: between the leading SELECT and the first FROM at
    // paren depth 0. Commas at depth 0 separate the final selections.
    int depth = 0;
    int commas = 0;
    bool found_from = false;
    for (size_t i = 1; i < el.size(); ++i) {
        if (el[i].type != Element::Type::Literal) continue;
        const std::string& t = el[i].text;
        if (t == "(") ++depth;
        else if (t == ")") --depth;
        else if (depth == 0 && t == ",") ++commas;
        else if (depth == 0 && t == "FROM") {
            found_from = true;
            break;
        }
    }
    if (!found_from) throw TemplateMalformed("no outermost FROM clause");
    plan.selects = commas + 1;
    return plan;
}

std::string plan_prefix(const Plan& plan) {
    return render_tokens(
        {std::to_string(plan.joins), "joins", "|", std::to_string(plan.selects), "selects", "|"});
}

std::string serialize_planned(const Plan& plan, const SqlTemplate& templ) {
    return plan_prefix(plan) + " " + templ.to_string();
}

std::pair<Plan, SqlTemplate> parse_planned(std::string_view text) {
    std::vector<SqlToken> toks = lex(text);
    auto bad = [&]() -> TemplateMalformed {
        return TemplateMalformed("not a planned template: " + std::string(text));
    };
    if (toks.size() < 7) throw bad();
    if (toks[0].kind != TokKind::Number || toks[1].text != "joins" || toks[2].text != "|" ||
        toks[3].kind != TokKind::Number || toks[4].text != "selects" || toks[5].text != "|")
        throw bad();
    Plan plan;
    plan.joins = static_cast<int>(std::stoll(toks[0].text));
    plan.selects = static_cast<int>(std::stoll(toks[3].text));
    SqlTemplate templ;
    for (size_t i = 6; i < toks.size(); ++i) {
        const SqlToken& tok = toks[i];
        if (tok.kind == TokKind::Identifier) {
            if (auto kind = placeholder_kind(tok.text)) {
                templ.elements.push_back(SqlTemplate::Element::make_slot(*kind));
                continue;
            }
        }
        templ.elements.push_back(SqlTemplate::Element::literal(surface_text(tok)));
    }
    return {plan, templ};
}

std::vector<Plan> counterfactual_plans(const Plan& base) {
    const Plan candidates[4] = {
        {base.joins - 1, base.selects},
        {base.joins + 1, base.selects},
        {base.joins, base.selects - 1},
        {base.joins, base.selects + 1},
    };
    std::vector<Plan> out;
    for (const Plan& p : candidates)
        if (p.joins >= 0 && p.joins <= kMaxPlanJoins && p.selects >= 1) out.push_back(p);
    return out;
}

TemplateCursor::TemplateCursor(const SqlTemplate& templ, const NameTrie& trie,
                               const Vocabulary& vocab, bool union_classes)
    : templ_(&templ), trie_(&trie), vocab_(&vocab), union_classes_(union_classes) {
    for (int i = 1; i <= 9; ++i) declared_aliases_.insert("t" + std::to_string(i));
}

bool TemplateCursor::is_alias_token(const std::string& text) const {
    return declared_aliases_.count(text) > 0;
}

std::optional<TokenId> TemplateCursor::closing_token() const {
    // Token that follows the current slot; kEnd when the slot is last.
    if (elem_ + 1 >= templ_->elements.size()) return Vocabulary::kEnd;
    const auto& next = templ_->elements[elem_ + 1];
    if (next.type != SqlTemplate::Element::Type::Literal) return std::nullopt;
    return vocab_->try_id(next.text);
}

void TemplateCursor::note_literal(size_t idx) {
    // "AS x" declares x as an alias usable in later column slots.
    if (idx > 0) {
        const auto& prev = templ_->elements[idx - 1];
        if (prev.type == SqlTemplate::Element::Type::Literal && prev.text == "AS")
            declared_aliases_.insert(templ_->elements[idx].text);
    }
}

TemplateCursor::Advance TemplateCursor::advance(TokenId token) {
    if (violated_) return Advance::Violated;
    const std::string& text = vocab_->text(token);
    const auto violate = [&]() {
        violated_ = true;
        return Advance::Violated;
    };

    switch (phase_) {
        case Phase::AtElement: {
            if (elem_ >= templ_->elements.size()) return violate();
            const auto& el = templ_->elements[elem_];
            if (el.type == SqlTemplate::Element::Type::Literal) {
                if (text != el.text) return violate();
                note_literal(elem_);
                ++elem_;
                return Advance::Ok;
            }
            switch (el.slot) {
                case SlotKind::Number:
                    if (!lexes_as_number(text)) return violate();
                    ++elem_;
                    return Advance::Ok;
                case SlotKind::String:
                    if (!is_quoted_string(text)) return violate();
                    ++elem_;
                    return Advance::Ok;
                case SlotKind::Table: {
                    int next = trie_->step(NameTrie::kRoot, token, NameClass::Table,
                                           union_classes_);
                    if (next == NameTrie::kNoNode) return violate();
                    node_ = next;
                    phase_ = Phase::InName;
                    return Advance::Ok;
                }
                case SlotKind::Column: {
                    int next = trie_->step(NameTrie::kRoot, token, NameClass::Column,
                                           union_classes_);
                    if (next != NameTrie::kNoNode) {
                        node_ = next;
                        phase_ = Phase::InName;
                        return Advance::Ok;
                    }
                    if (is_alias_token(text)) {
                        phase_ = Phase::AliasDot;
                        return Advance::Ok;
                    }
                    return violate();
                }
            }
            return violate();
        }
        case Phase::AliasDot:
            if (text != ".") return violate();
            phase_ = Phase::AfterDot;
            return Advance::Ok;
        case Phase::AfterDot: {
            int next = trie_->step(NameTrie::kRoot, token, NameClass::Column, union_classes_);
            if (next == NameTrie::kNoNode) return violate();
            node_ = next;
            phase_ = Phase::InName;
            return Advance::Ok;
        }
        case Phase::InName: {
            // Ties between closing the slot and extending the name break
            // toward closing.
            if (trie_->terminal(node_, cur_class(), union_classes_)) {
                auto close = closing_token();
                if (close && *close != Vocabulary::kEnd && token == *close) {
                    size_t literal_idx = elem_ + 1;
                    note_literal(literal_idx);
                    elem_ += 2;
                    phase_ = Phase::AtElement;
                    node_ = NameTrie::kRoot;
                    return Advance::Ok;
                }
            }
            int next = trie_->step(node_, token, cur_class(), union_classes_);
            if (next == NameTrie::kNoNode) return violate();
            node_ = next;
            return Advance::Ok;
        }
    }
    return violate();
}

bool TemplateCursor::complete() const {
    return !violated_ && phase_ == Phase::AtElement && elem_ >= templ_->elements.size();
}

bool TemplateCursor::can_finish() const {
    if (violated_) return false;
    if (complete()) return true;
    return phase_ == Phase::InName && elem_ + 1 >= templ_->elements.size() &&
           trie_->terminal(node_, cur_class(), union_classes_);
}

TokenClass TemplateCursor::next_class() const {
    if (violated_) return TokenClass::Other;
    switch (phase_) {
        case Phase::AliasDot:
        case Phase::AfterDot:
            return TokenClass::Column;
        case Phase::InName:
            return cur_slot() == SlotKind::Table ? TokenClass::Table : TokenClass::Column;
        case Phase::AtElement: {
            if (elem_ >= templ_->elements.size()) return TokenClass::Other;
            const auto& el = templ_->elements[elem_];
            if (el.type != SqlTemplate::Element::Type::Slot) return TokenClass::Other;
            if (el.slot == SlotKind::Column) return TokenClass::Column;
            if (el.slot == SlotKind::Table) return TokenClass::Table;
            return TokenClass::Other;
        }
    }
    return TokenClass::Other;
}

std::vector<TokenId> TemplateCursor::admissible_name_tokens() const {
    std::set<TokenId> out;
    switch (phase_) {
        case Phase::AtElement: {
            if (elem_ >= templ_->elements.size()) break;
            const auto& el = templ_->elements[elem_];
            if (el.type != SqlTemplate::Element::Type::Slot) break;
            if (el.slot == SlotKind::Table) {
                for (TokenId t : trie_->continuations(NameTrie::kRoot, NameClass::Table,
                                                      union_classes_))
                    out.insert(t);
            } else if (el.slot == SlotKind::Column) {
                for (TokenId t : trie_->continuations(NameTrie::kRoot, NameClass::Column,
                                                      union_classes_))
                    out.insert(t);
                for (const std::string& alias : declared_aliases_)
                    if (auto id = vocab_->try_id(alias)) out.insert(*id);
            }
            break;
        }
        case Phase::AliasDot:
            if (auto id = vocab_->try_id(".")) out.insert(*id);
            break;
        case Phase::AfterDot:
            for (TokenId t :
                 trie_->continuations(NameTrie::kRoot, NameClass::Column, union_classes_))
                out.insert(t);
            break;
        case Phase::InName: {
            for (TokenId t : trie_->continuations(node_, cur_class(), union_classes_))
                out.insert(t);
            if (trie_->terminal(node_, cur_class(), union_classes_)) {
                if (auto close = closing_token()) out.insert(*close);
            }
            break;
        }
    }
    return {out.begin(), out.end()};
}

}  // namespace ambisql
