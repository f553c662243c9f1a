#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ambisql {

// Parse tree for the supported SQL subset: SELECT/DISTINCT, the five
// aggregates, inner JOIN chains with ON equality, WHERE/HAVING boolean trees,
// GROUP BY, ORDER BY, LIMIT, UNION/INTERSECT/EXCEPT, and non-correlated
// scalar subqueries in comparisons. Everything is immutable after
// construction; sub-trees are shared via shared_ptr so copies are cheap and
// thread-safe.

struct SqlAst;

struct ColumnRef {
    std::string qualifier;  // alias or table name; empty if unqualified
    std::string column;
    bool operator==(const ColumnRef&) const = default;
};

struct LiteralValue {
    enum class Kind { Int, Float, Str };
    Kind kind = Kind::Int;
    long long int_value = 0;
    double float_value = 0.0;
    std::string text;  // string content, or the numeric lexeme as written
    bool operator==(const LiteralValue&) const = default;

    static LiteralValue make_int(long long v, std::string lexeme);
    static LiteralValue make_float(double v, std::string lexeme);
    static LiteralValue make_str(std::string s);
};

enum class AggFn { Avg, Sum, Min, Max, Count };

struct Aggregate {
    AggFn fn = AggFn::Count;
    bool star = false;  // COUNT(*)
    ColumnRef column;   // unused when star
    bool operator==(const Aggregate&) const = default;
};

struct Star {
    bool operator==(const Star&) const = default;
};

using SelectExpr = std::variant<Star, ColumnRef, Aggregate>;

enum class CmpOp { Eq, Ne, Lt, Gt, Le, Ge, Like };

// Comparison operand: column, literal, aggregate (HAVING), or scalar subquery.
struct Operand {
    enum class Kind { Column, Literal, Agg, Subquery };
    Kind kind = Kind::Column;
    ColumnRef column;
    LiteralValue literal;
    Aggregate agg;
    std::shared_ptr<const SqlAst> subquery;
};

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
    enum class Type { Cmp, InList, Between, And, Or, Not };
    Type type = Type::Cmp;

    // Cmp
    CmpOp op = CmpOp::Eq;
    Operand lhs, rhs;
    // InList: lhs IN (items)
    std::vector<LiteralValue> in_items;
    // Between: lhs BETWEEN low AND high
    LiteralValue low, high;
    // And / Or / Not
    std::vector<BoolExprPtr> children;
};

struct TableRef {
    std::string table;
    std::string alias;  // empty if none
    bool operator==(const TableRef&) const = default;
};

struct Join {
    TableRef table;
    ColumnRef left, right;  // ON left = right
    bool operator==(const Join&) const = default;
};

struct SelectBody {
    bool distinct = false;
    std::vector<SelectExpr> items;
    TableRef from;
    std::vector<Join> joins;
    BoolExprPtr where;  // null if absent
    std::vector<ColumnRef> group_by;
    BoolExprPtr having;
};

enum class SetOp { None, Union, Intersect, Except };

struct OrderItem {
    std::variant<ColumnRef, Aggregate> expr;
    bool desc = false;
};

struct SqlAst {
    SelectBody body;
    SetOp set_op = SetOp::None;
    std::shared_ptr<const SqlAst> rhs;  // second arm when set_op != None
    std::vector<OrderItem> order_by;
    std::optional<long long> limit;
};

/// Canonical surface form: keywords uppercase, identifiers lowercase,
/// single-space separation with tight punctuation. Re-parses to an equal AST.
std::string print_sql(const SqlAst& ast);

/// Token texts of the canonical surface form (strings re-quoted).
std::vector<std::string> print_tokens(const SqlAst& ast);

}  // namespace ambisql
