#include "ambisql/parser.hpp"

#include <algorithm>
#include <set>

#include "ambisql/errors.hpp"

namespace ambisql {

namespace {

class Parser {
public:
    explicit Parser(const std::vector<SqlToken>& toks) : toks_(toks) {}

    SqlAst run() {
        SqlAst ast = query();
        if (peek_is(TokKind::Punct, ";")) advance();
        if (pos_ != toks_.size()) throw ParseError("end of input", cur_text());
        return ast;
    }

private:
    SqlAst query() {
        SqlAst ast;
        ast.body = select_body();
        if (peek_is_kw("UNION") || peek_is_kw("INTERSECT") || peek_is_kw("EXCEPT")) {
            const std::string op = advance().text;
            if (peek_is_kw("ALL")) throw UnsupportedError("UNION ALL");
            ast.set_op = op == "UNION"    ? SetOp::Union
                         : op == "EXCEPT" ? SetOp::Except
                                          : SetOp::Intersect;
            ast.rhs = std::make_shared<SqlAst>(query_no_tail());
        }
        if (peek_is_kw("ORDER")) {
            advance();
            expect_kw("BY");
            ast.order_by.push_back(order_item());
            while (peek_is(TokKind::Punct, ",")) {
                advance();
                ast.order_by.push_back(order_item());
            }
        }
        if (peek_is_kw("LIMIT")) {
            advance();
            const SqlToken& tok = expect(TokKind::Number, "limit count");
            if (tok.text.find('.') != std::string::npos)
                throw ParseError("integer limit", tok.text);
            ast.limit = std::stoll(tok.text);
        }
        return ast;
    }

    // Set-op arms own no ORDER BY / LIMIT; those attach to the whole compound.
    SqlAst query_no_tail() {
        SqlAst ast;
        ast.body = select_body();
        if (peek_is_kw("UNION") || peek_is_kw("INTERSECT") || peek_is_kw("EXCEPT")) {
            const std::string op = advance().text;
            ast.set_op = op == "UNION"    ? SetOp::Union
                         : op == "EXCEPT" ? SetOp::Except
                                          : SetOp::Intersect;
            ast.rhs = std::make_shared<SqlAst>(query_no_tail());
        }
        return ast;
    }

    SelectBody select_body() {
        SelectBody body;
        expect_kw("SELECT");
        if (peek_is_kw("DISTINCT")) {
            advance();
            body.distinct = true;
        }
        body.items.push_back(select_item());
        while (peek_is(TokKind::Punct, ",")) {
            advance();
            body.items.push_back(select_item());
        }
        expect_kw("FROM");
        body.from = table_ref();
        while (peek_is_kw("JOIN") || peek_is_kw("INNER") || peek_is_kw("LEFT") ||
               peek_is_kw("RIGHT") || peek_is_kw("OUTER") || peek_is_kw("CROSS")) {
            if (!peek_is_kw("JOIN")) throw UnsupportedError("non-inner JOIN");
            advance();
            Join join;
            join.table = table_ref();
            expect_kw("ON");
            join.left = column_ref();
            if (!peek_is(TokKind::Operator, "=")) throw ParseError("= in ON clause", cur_text());
            advance();
            join.right = column_ref();
            body.joins.push_back(std::move(join));
        }
        if (peek_is_kw("WHERE")) {
            advance();
            body.where = bool_or();
        }
        if (peek_is_kw("GROUP")) {
            advance();
            expect_kw("BY");
            body.group_by.push_back(column_ref());
            while (peek_is(TokKind::Punct, ",")) {
                advance();
                body.group_by.push_back(column_ref());
            }
        }
        if (peek_is_kw("HAVING")) {
            advance();
            body.having = bool_or();
        }
        check_qualifiers(body);
        return body;
    }

    SelectExpr select_item() {
        if (peek_is(TokKind::Punct, "*")) {
            advance();
            return Star{};
        }
        if (peek_is_aggregate()) return aggregate();
        ColumnRef ref = column_ref();
        if (peek_is(TokKind::Operator)) throw UnsupportedError("arithmetic in select list");
        if (peek_is_kw("AS")) throw UnsupportedError("column alias");
        return ref;
    }

    Aggregate aggregate() {
        Aggregate agg;
        const std::string fn = advance().text;
        agg.fn = fn == "AVG"   ? AggFn::Avg
                 : fn == "SUM" ? AggFn::Sum
                 : fn == "MIN" ? AggFn::Min
                 : fn == "MAX" ? AggFn::Max
                               : AggFn::Count;
        expect_text(TokKind::Punct, "(");
        if (peek_is(TokKind::Punct, "*")) {
            advance();
            agg.star = true;
        } else {
            if (peek_is_kw("DISTINCT")) throw UnsupportedError("DISTINCT inside aggregate");
            agg.column = column_ref();
        }
        expect_text(TokKind::Punct, ")");
        return agg;
    }

    ColumnRef column_ref() {
        ColumnRef ref;
        const SqlToken& first = expect(TokKind::Identifier, "column name");
        if (peek_is(TokKind::Punct, ".")) {
            advance();
            const SqlToken& col = expect(TokKind::Identifier, "column name after '.'");
            ref.qualifier = first.text;
            ref.column = col.text;
        } else {
            ref.column = first.text;
        }
        return ref;
    }

    TableRef table_ref() {
        TableRef t;
        t.table = expect(TokKind::Identifier, "table name").text;
        if (peek_is_kw("AS")) {
            advance();
            t.alias = expect(TokKind::Identifier, "alias").text;
        }
        return t;
    }

    BoolExprPtr bool_or() {
        std::vector<BoolExprPtr> children;
        children.push_back(bool_and());
        while (peek_is_kw("OR")) {
            advance();
            children.push_back(bool_and());
        }
        if (children.size() == 1) return children[0];
        auto node = std::make_shared<BoolExpr>();
        node->type = BoolExpr::Type::Or;
        node->children = std::move(children);
        return node;
    }

    BoolExprPtr bool_and() {
        std::vector<BoolExprPtr> children;
        children.push_back(bool_factor());
        while (peek_is_kw("AND")) {
            advance();
            children.push_back(bool_factor());
        }
        if (children.size() == 1) return children[0];
        auto node = std::make_shared<BoolExpr>();
        node->type = BoolExpr::Type::And;
        node->children = std::move(children);
        return node;
    }

    BoolExprPtr bool_factor() {
        if (peek_is_kw("NOT")) {
            advance();
            auto node = std::make_shared<BoolExpr>();
            node->type = BoolExpr::Type::Not;
            node->children.push_back(bool_factor());
            return node;
        }
        if (peek_is_kw("EXISTS")) throw UnsupportedError("EXISTS");
        if (peek_is(TokKind::Punct, "(") && !next_is_select()) {
            advance();
            BoolExprPtr inner = bool_or();
            expect_text(TokKind::Punct, ")");
            return inner;
        }
        return predicate();
    }

    BoolExprPtr predicate() {
        auto node = std::make_shared<BoolExpr>();
        node->lhs = operand();
        if (peek_is_kw("NOT")) {
            advance();
            if (!peek_is_kw("IN") && !peek_is_kw("LIKE"))
                throw ParseError("IN or LIKE after NOT", cur_text());
            BoolExprPtr inner = predicate_tail(std::move(node));
            auto wrap = std::make_shared<BoolExpr>();
            wrap->type = BoolExpr::Type::Not;
            wrap->children.push_back(inner);
            return wrap;
        }
        return predicate_tail(std::move(node));
    }

    BoolExprPtr predicate_tail(std::shared_ptr<BoolExpr> node) {
        if (peek_is_kw("IN")) {
            advance();
            node->type = BoolExpr::Type::InList;
            expect_text(TokKind::Punct, "(");
            if (peek_is_kw("SELECT")) throw UnsupportedError("IN (subquery)");
            node->in_items.push_back(literal_value());
            while (peek_is(TokKind::Punct, ",")) {
                advance();
                node->in_items.push_back(literal_value());
            }
            expect_text(TokKind::Punct, ")");
            return node;
        }
        if (peek_is_kw("BETWEEN")) {
            advance();
            node->type = BoolExpr::Type::Between;
            node->low = literal_value();
            expect_kw("AND");
            node->high = literal_value();
            return node;
        }
        if (peek_is_kw("LIKE")) {
            advance();
            node->type = BoolExpr::Type::Cmp;
            node->op = CmpOp::Like;
            node->rhs = operand();
            return node;
        }
        if (!peek_is(TokKind::Operator)) throw ParseError("comparison operator", cur_text());
        const std::string op = advance().text;
        node->type = BoolExpr::Type::Cmp;
        if (op == "=") node->op = CmpOp::Eq;
        else if (op == "!=") node->op = CmpOp::Ne;
        else if (op == "<") node->op = CmpOp::Lt;
        else if (op == ">") node->op = CmpOp::Gt;
        else if (op == "<=") node->op = CmpOp::Le;
        else if (op == ">=") node->op = CmpOp::Ge;
        else throw UnsupportedError("operator " + op);
        node->rhs = operand();
        return node;
    }

    Operand operand() {
        Operand o;
        if (peek_is(TokKind::Punct, "(")) {
            if (!next_is_select()) throw ParseError("scalar subquery", cur_text());
            advance();
            o.kind = Operand::Kind::Subquery;
            o.subquery = subquery();
            return o;
        }
        if (peek_is(TokKind::Number) || peek_is(TokKind::String)) {
            o.kind = Operand::Kind::Literal;
            o.literal = literal_value();
            return o;
        }
        if (peek_is_aggregate()) {
            o.kind = Operand::Kind::Agg;
            o.agg = aggregate();
            return o;
        }
        o.kind = Operand::Kind::Column;
        o.column = column_ref();
        return o;
    }

    std::shared_ptr<const SqlAst> subquery() {
        // The opening '(' is already consumed. Correlated references are
        // rejected when the inner body checks its own qualifier scope.
        auto inner = std::make_shared<SqlAst>(query());
        expect_text(TokKind::Punct, ")");
        return inner;
    }

    LiteralValue literal_value() {
        if (peek_is(TokKind::Number)) {
            const SqlToken& tok = advance();
            if (tok.text.find('.') != std::string::npos)
                return LiteralValue::make_float(std::stod(tok.text), tok.text);
            return LiteralValue::make_int(std::stoll(tok.text), tok.text);
        }
        if (peek_is(TokKind::String)) return LiteralValue::make_str(advance().text);
        throw ParseError("literal", cur_text());
    }

    OrderItem order_item() {
        OrderItem item;
        if (peek_is_aggregate()) {
            item.expr = aggregate();
        } else {
            item.expr = column_ref();
        }
        if (peek_is_kw("ASC")) advance();
        else if (peek_is_kw("DESC")) {
            advance();
            item.desc = true;
        }
        return item;
    }

    // Every qualifier used in this body must be an alias or table declared in
    // its FROM clause. Subqueries run their own check, so correlated
    // references surface as unresolved qualifiers.
    void check_qualifiers(const SelectBody& body) {
        std::set<std::string> declared;
        declared.insert(body.from.alias.empty() ? body.from.table : body.from.alias);
        declared.insert(body.from.table);
        for (const Join& j : body.joins) {
            declared.insert(j.table.alias.empty() ? j.table.table : j.table.alias);
            declared.insert(j.table.table);
        }
        auto check_ref = [&](const ColumnRef& ref) {
            if (!ref.qualifier.empty() && !declared.count(ref.qualifier))
                throw ParseError("declared alias or table as qualifier", ref.qualifier);
        };
        for (const SelectExpr& e : body.items) {
            if (std::holds_alternative<ColumnRef>(e)) check_ref(std::get<ColumnRef>(e));
            else if (std::holds_alternative<Aggregate>(e)) {
                const Aggregate& a = std::get<Aggregate>(e);
                if (!a.star) check_ref(a.column);
            }
        }
        for (const Join& j : body.joins) {
            check_ref(j.left);
            check_ref(j.right);
        }
        for (const ColumnRef& g : body.group_by) check_ref(g);
        std::vector<const BoolExpr*> stack;
        if (body.where) stack.push_back(body.where.get());
        if (body.having) stack.push_back(body.having.get());
        while (!stack.empty()) {
            const BoolExpr* e = stack.back();
            stack.pop_back();
            for (const auto& c : e->children) stack.push_back(c.get());
            auto check_operand = [&](const Operand& o) {
                if (o.kind == Operand::Kind::Column) check_ref(o.column);
                else if (o.kind == Operand::Kind::Agg && !o.agg.star) check_ref(o.agg.column);
            };
            if (e->type == BoolExpr::Type::Cmp) {
                check_operand(e->lhs);
                check_operand(e->rhs);
            } else if (e->type == BoolExpr::Type::InList || e->type == BoolExpr::Type::Between) {
                check_operand(e->lhs);
            }
        }
    }

    bool next_is_select() const {
        return pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == TokKind::Keyword &&
               toks_[pos_ + 1].text == "SELECT";
    }

    bool peek_is(TokKind kind) const {
        return pos_ < toks_.size() && toks_[pos_].kind == kind;
    }

    bool peek_is(TokKind kind, std::string_view text) const {
        return peek_is(kind) && toks_[pos_].text == text;
    }

    bool peek_is_kw(std::string_view kw) const {
        // Unknown words like ALL or EXISTS lex as identifiers; match either way.
        if (pos_ >= toks_.size()) return false;
        const SqlToken& t = toks_[pos_];
        if (t.kind == TokKind::Keyword) return t.text == kw;
        if (t.kind == TokKind::Identifier) {
            std::string upper(t.text);
            std::transform(upper.begin(), upper.end(), upper.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            return upper == kw;
        }
        return false;
    }

    bool peek_is_aggregate() const {
        return peek_is(TokKind::Keyword) && is_aggregate_keyword(toks_[pos_].text) &&
               pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == TokKind::Punct &&
               toks_[pos_ + 1].text == "(";
    }

    const SqlToken& advance() {
        if (pos_ >= toks_.size()) throw ParseError("token", "end of input");
        return toks_[pos_++];
    }

    const SqlToken& expect(TokKind kind, std::string_view what) {
        if (!peek_is(kind)) throw ParseError(std::string(what), cur_text());
        return advance();
    }

    void expect_text(TokKind kind, std::string_view text) {
        if (!peek_is(kind, text)) throw ParseError("'" + std::string(text) + "'", cur_text());
        advance();
    }

    void expect_kw(const char* kw) {
        if (!peek_is_kw(kw)) throw ParseError("'" + std::string(kw) + "'", cur_text());
        advance();
    }

    std::string cur_text() const {
        return pos_ < toks_.size() ? toks_[pos_].text : std::string("end of input");
    }

    const std::vector<SqlToken>& toks_;
    size_t pos_ = 0;
};

}  // namespace

SqlAst parse(const std::vector<SqlToken>& tokens) {
    if (tokens.empty()) throw ParseError("SELECT", "end of input");
    if (tokens[0].kind == TokKind::Keyword && tokens[0].text != "SELECT")
        throw UnsupportedError(tokens[0].text + " statement");
    return Parser(tokens).run();
}

SqlAst parse_sql(std::string_view source) {
    return parse(lex(source));
}

}  // namespace ambisql
