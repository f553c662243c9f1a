#include "ambisql/ast.hpp"

#include "ambisql/ast_walk.hpp"
#include "ambisql/token.hpp"

namespace ambisql {

LiteralValue LiteralValue::make_int(long long v, std::string lexeme) {
    LiteralValue lit;
    lit.kind = Kind::Int;
    lit.int_value = v;
    lit.float_value = static_cast<double>(v);
    lit.text = std::move(lexeme);
    return lit;
}

LiteralValue LiteralValue::make_float(double v, std::string lexeme) {
    LiteralValue lit;
    lit.kind = Kind::Float;
    lit.float_value = v;
    lit.int_value = static_cast<long long>(v);
    lit.text = std::move(lexeme);
    return lit;
}

LiteralValue LiteralValue::make_str(std::string s) {
    LiteralValue lit;
    lit.kind = Kind::Str;
    lit.text = std::move(s);
    return lit;
}

namespace {

const char* agg_name(AggFn fn) {
    switch (fn) {
        case AggFn::Avg: return "AVG";
        case AggFn::Sum: return "SUM";
        case AggFn::Min: return "MIN";
        case AggFn::Max: return "MAX";
        case AggFn::Count: return "COUNT";
    }
    return "COUNT";
}

const char* cmp_name(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Gt: return ">";
        case CmpOp::Le: return "<=";
        case CmpOp::Ge: return ">=";
        case CmpOp::Like: return "LIKE";
    }
    return "=";
}

class Walker {
public:
    explicit Walker(TokenSink& sink) : sink_(sink) {}

    void query(const SqlAst& ast) {
        body(ast.body);
        if (ast.set_op != SetOp::None) {
            switch (ast.set_op) {
                case SetOp::Union: sink_.word("UNION"); break;
                case SetOp::Intersect: sink_.word("INTERSECT"); break;
                case SetOp::Except: sink_.word("EXCEPT"); break;
                default: break;
            }
            query(*ast.rhs);
        }
        if (!ast.order_by.empty()) {
            sink_.word("ORDER");
            sink_.word("BY");
            for (size_t i = 0; i < ast.order_by.size(); ++i) {
                if (i) sink_.word(",");
                const OrderItem& item = ast.order_by[i];
                if (std::holds_alternative<ColumnRef>(item.expr)) {
                    sink_.column_ref(std::get<ColumnRef>(item.expr));
                } else {
                    aggregate(std::get<Aggregate>(item.expr));
                }
                if (item.desc) sink_.word("DESC");
            }
        }
        if (ast.limit) {
            sink_.word("LIMIT");
            sink_.number(LiteralValue::make_int(*ast.limit, std::to_string(*ast.limit)));
        }
    }

private:
    void body(const SelectBody& b) {
        sink_.word("SELECT");
        if (b.distinct) sink_.word("DISTINCT");
        for (size_t i = 0; i < b.items.size(); ++i) {
            if (i) sink_.word(",");
            const SelectExpr& e = b.items[i];
            if (std::holds_alternative<Star>(e)) {
                sink_.word("*");
            } else if (std::holds_alternative<ColumnRef>(e)) {
                sink_.column_ref(std::get<ColumnRef>(e));
            } else {
                aggregate(std::get<Aggregate>(e));
            }
        }
        sink_.word("FROM");
        table_ref(b.from);
        for (const Join& j : b.joins) {
            sink_.word("JOIN");
            table_ref(j.table);
            sink_.word("ON");
            sink_.column_ref(j.left);
            sink_.word("=");
            sink_.column_ref(j.right);
        }
        if (b.where) {
            sink_.word("WHERE");
            bool_expr(*b.where, /*top=*/true);
        }
        if (!b.group_by.empty()) {
            sink_.word("GROUP");
            sink_.word("BY");
            for (size_t i = 0; i < b.group_by.size(); ++i) {
                if (i) sink_.word(",");
                sink_.column_ref(b.group_by[i]);
            }
        }
        if (b.having) {
            sink_.word("HAVING");
            bool_expr(*b.having, /*top=*/true);
        }
    }

    void table_ref(const TableRef& t) {
        sink_.table_name(t.table);
        if (!t.alias.empty()) {
            sink_.word("AS");
            sink_.word(t.alias);
        }
    }

    void aggregate(const Aggregate& a) {
        sink_.word(agg_name(a.fn));
        sink_.word("(");
        if (a.star) {
            sink_.word("*");
        } else {
            sink_.column_ref(a.column);
        }
        sink_.word(")");
    }

    void operand(const Operand& o) {
        switch (o.kind) {
            case Operand::Kind::Column: sink_.column_ref(o.column); break;
            case Operand::Kind::Agg: aggregate(o.agg); break;
            case Operand::Kind::Literal: literal(o.literal); break;
            case Operand::Kind::Subquery:
                sink_.word("(");
                query(*o.subquery);
                sink_.word(")");
                break;
        }
    }

    void literal(const LiteralValue& v) {
        if (v.kind == LiteralValue::Kind::Str) {
            sink_.string_lit(v);
        } else {
            sink_.number(v);
        }
    }

    // Precedence: OR < AND < NOT < atoms. Parens only where needed.
    void bool_expr(const BoolExpr& e, bool top) {
        switch (e.type) {
            case BoolExpr::Type::Or: {
                if (!top) sink_.word("(");
                for (size_t i = 0; i < e.children.size(); ++i) {
                    if (i) sink_.word("OR");
                    bool_expr(*e.children[i], false);
                }
                if (!top) sink_.word(")");
                break;
            }
            case BoolExpr::Type::And: {
                // AND binds tighter than OR; an OR child parenthesizes itself.
                for (size_t i = 0; i < e.children.size(); ++i) {
                    if (i) sink_.word("AND");
                    bool_expr(*e.children[i], false);
                }
                break;
            }
            case BoolExpr::Type::Not:
                sink_.word("NOT");
                sink_.word("(");
                bool_expr(*e.children[0], true);
                sink_.word(")");
                break;
            case BoolExpr::Type::Cmp:
                operand(e.lhs);
                sink_.word(cmp_name(e.op));
                operand(e.rhs);
                break;
            case BoolExpr::Type::InList:
                operand(e.lhs);
                sink_.word("IN");
                sink_.word("(");
                for (size_t i = 0; i < e.in_items.size(); ++i) {
                    if (i) sink_.word(",");
                    literal(e.in_items[i]);
                }
                sink_.word(")");
                break;
            case BoolExpr::Type::Between:
                operand(e.lhs);
                sink_.word("BETWEEN");
                literal(e.low);
                sink_.word("AND");
                literal(e.high);
                break;
        }
    }

    TokenSink& sink_;
};

class PrintSink : public TokenSink {
public:
    void word(const std::string& text) override { texts.push_back(text); }
    void column_ref(const ColumnRef& ref) override {
        if (!ref.qualifier.empty()) {
            texts.push_back(ref.qualifier);
            texts.push_back(".");
        }
        texts.push_back(ref.column);
    }
    void table_name(const std::string& name) override { texts.push_back(name); }
    void number(const LiteralValue& v) override { texts.push_back(v.text); }
    void string_lit(const LiteralValue& v) override { texts.push_back("\"" + v.text + "\""); }

    std::vector<std::string> texts;
};

}  // namespace

void walk_ast(const SqlAst& ast, TokenSink& sink) {
    Walker(sink).query(ast);
}

std::vector<std::string> print_tokens(const SqlAst& ast) {
    PrintSink sink;
    walk_ast(ast, sink);
    return sink.texts;
}

std::string print_sql(const SqlAst& ast) {
    return render_tokens(print_tokens(ast));
}

}  // namespace ambisql
