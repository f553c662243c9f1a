#include "ambisql/executor.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "ambisql/errors.hpp"
#include "ambisql/parser.hpp"

namespace ambisql {

using nlohmann::json;
namespace fs = std::filesystem;

bool value_equal(const Value& a, const Value& b) {
    if (a.index() == b.index()) {
        if (std::holds_alternative<double>(a))
            return std::get<double>(a) == std::get<double>(b);
        return a == b;
    }
    const bool a_num = std::holds_alternative<int64_t>(a) || std::holds_alternative<double>(a);
    const bool b_num = std::holds_alternative<int64_t>(b) || std::holds_alternative<double>(b);
    if (a_num && b_num) {
        const double x = std::holds_alternative<int64_t>(a)
                             ? static_cast<double>(std::get<int64_t>(a))
                             : std::get<double>(a);
        const double y = std::holds_alternative<int64_t>(b)
                             ? static_cast<double>(std::get<int64_t>(b))
                             : std::get<double>(b);
        return x == y;
    }
    return false;
}

bool value_less(const Value& a, const Value& b) {
    auto rank = [](const Value& v) {
        if (std::holds_alternative<std::monostate>(v)) return 0;
        if (std::holds_alternative<std::string>(v)) return 2;
        return 1;
    };
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    if (rank(a) == 0) return false;
    if (rank(a) == 2) return std::get<std::string>(a) < std::get<std::string>(b);
    const double x = std::holds_alternative<int64_t>(a)
                         ? static_cast<double>(std::get<int64_t>(a))
                         : std::get<double>(a);
    const double y = std::holds_alternative<int64_t>(b)
                         ? static_cast<double>(std::get<int64_t>(b))
                         : std::get<double>(b);
    return x < y;
}

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return "NULL";
    if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
    if (std::holds_alternative<double>(v)) {
        std::string s = std::to_string(std::get<double>(v));
        return s;
    }
    return std::get<std::string>(v);
}

const TableData& Database::table(const std::string& name) const {
    auto it = tables.find(name);
    if (it == tables.end()) throw NameResolutionError("no such table: " + name);
    return it->second;
}

namespace {

bool rows_less(const std::vector<Value>& a, const std::vector<Value>& b) {
    for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (value_less(a[i], b[i])) return true;
        if (value_less(b[i], a[i])) return false;
    }
    return a.size() < b.size();
}

std::vector<std::vector<Value>> sorted_rows(std::vector<std::vector<Value>> rows) {
    std::sort(rows.begin(), rows.end(), rows_less);
    return rows;
}

bool rows_equal(const std::vector<Value>& a, const std::vector<Value>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!value_equal(a[i], b[i])) return false;
    return true;
}

// Working rows carry one slot per FROM-chain table reference.
struct Scope {
    // One entry per table reference: (binding name(s), column list).
    struct Slot {
        std::vector<std::string> bindings;  // alias and/or table name
        const TableData* data = nullptr;
    };
    std::vector<Slot> slots;

    // Resolves a column ref to (slot, column index).
    std::pair<size_t, size_t> resolve(const ColumnRef& ref) const {
        if (!ref.qualifier.empty()) {
            for (size_t s = 0; s < slots.size(); ++s) {
                const Slot& slot = slots[s];
                if (std::find(slot.bindings.begin(), slot.bindings.end(), ref.qualifier) ==
                    slot.bindings.end())
                    continue;
                const auto& cols = slot.data->columns;
                auto it = std::find(cols.begin(), cols.end(), ref.column);
                if (it == cols.end())
                    throw NameResolutionError("no column " + ref.column + " under " +
                                              ref.qualifier);
                return {s, static_cast<size_t>(it - cols.begin())};
            }
            throw NameResolutionError("unknown qualifier: " + ref.qualifier);
        }
        std::pair<size_t, size_t> found{0, 0};
        int hits = 0;
        for (size_t s = 0; s < slots.size(); ++s) {
            const auto& cols = slots[s].data->columns;
            auto it = std::find(cols.begin(), cols.end(), ref.column);
            if (it != cols.end()) {
                found = {s, static_cast<size_t>(it - cols.begin())};
                ++hits;
            }
        }
        if (hits == 0) throw NameResolutionError("no such column: " + ref.column);
        if (hits > 1) throw NameResolutionError("ambiguous column: " + ref.column);
        return found;
    }
};

using WorkingRow = std::vector<const std::vector<Value>*>;  // one row per slot

class Evaluator {
public:
    explicit Evaluator(const Database& db) : db_(db) {}

    ResultSet query(const SqlAst& ast) {
        ResultSet rs = body(ast.body);
        if (ast.set_op != SetOp::None) {
            ResultSet rhs = query(*ast.rhs);
            if (!rs.rows.empty() && !rhs.rows.empty() &&
                rs.rows[0].size() != rhs.rows[0].size())
                throw TypeMismatchError("set operation arity mismatch");
            rs.rows = set_op_rows(ast.set_op, rs.rows, rhs.rows);
        }
        if (!ast.order_by.empty()) {
            order_rows(ast, rs);
            rs.ordered = true;
        }
        if (ast.limit) {
            const size_t n = static_cast<size_t>(*ast.limit);
            if (rs.rows.size() > n) rs.rows.resize(n);
        }
        return rs;
    }

private:
    // Group of working rows; aggregates evaluate over a group.
    struct Group {
        std::vector<WorkingRow> rows;
    };

    ResultSet body(const SelectBody& b) {
        Scope scope;
        auto add_slot = [&](const TableRef& t) {
            Scope::Slot slot;
            slot.bindings.push_back(t.table);
            if (!t.alias.empty()) slot.bindings.push_back(t.alias);
            slot.data = &db_.table(t.table);
            scope.slots.push_back(std::move(slot));
        };
        add_slot(b.from);
        for (const Join& j : b.joins) add_slot(j.table);

        // Cross product of the FROM chain filtered by ON equalities.
        std::vector<WorkingRow> rows;
        WorkingRow current(scope.slots.size(), nullptr);
        build_rows(scope, b, 0, current, rows);

        if (b.where) {
            std::vector<WorkingRow> kept;
            for (const WorkingRow& row : rows)
                if (truthy(*b.where, scope, row, nullptr)) kept.push_back(row);
            rows = std::move(kept);
        }

        const bool has_agg = body_has_aggregate(b);
        std::vector<Group> groups;
        if (!b.group_by.empty()) {
            // Key order follows first appearance; grouping is stable.
            std::vector<std::vector<Value>> keys;
            for (const WorkingRow& row : rows) {
                std::vector<Value> key;
                for (const ColumnRef& g : b.group_by) key.push_back(column_value(g, scope, row));
                bool placed = false;
                for (size_t i = 0; i < keys.size(); ++i) {
                    if (rows_equal(keys[i], key)) {
                        groups[i].rows.push_back(row);
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    keys.push_back(std::move(key));
                    groups.push_back(Group{{row}});
                }
            }
        } else if (has_agg) {
            groups.push_back(Group{rows});  // single group, possibly empty
        } else {
            for (const WorkingRow& row : rows) groups.push_back(Group{{row}});
        }

        if (b.having) {
            std::vector<Group> kept;
            for (const Group& g : groups)
                if (!g.rows.empty() || b.group_by.empty()) {
                    const WorkingRow* sample = g.rows.empty() ? nullptr : &g.rows[0];
                    WorkingRow empty;
                    if (truthy(*b.having, scope, sample ? *sample : empty, &g))
                        kept.push_back(g);
                }
            groups = std::move(kept);
        }

        ResultSet rs;
        for (const SelectExpr& item : b.items) rs.labels.push_back(item_label(item));
        for (const Group& g : groups) {
            if (g.rows.empty() && !b.group_by.empty()) continue;
            std::vector<Value> out;
            for (const SelectExpr& item : b.items) {
                if (std::holds_alternative<Star>(item)) {
                    const WorkingRow& row = g.rows.at(0);
                    for (size_t s = 0; s < scope.slots.size(); ++s)
                        for (const Value& v : *row[s]) out.push_back(v);
                } else if (std::holds_alternative<ColumnRef>(item)) {
                    out.push_back(g.rows.empty()
                                      ? Value(std::monostate{})
                                      : column_value(std::get<ColumnRef>(item), scope, g.rows[0]));
                } else {
                    out.push_back(aggregate_value(std::get<Aggregate>(item), scope, g));
                }
            }
            rs.rows.push_back(std::move(out));
        }
        if (b.distinct) {
            std::vector<std::vector<Value>> uniq;
            for (const auto& row : rs.rows) {
                bool dup = false;
                for (const auto& u : uniq)
                    if (rows_equal(u, row)) {
                        dup = true;
                        break;
                    }
                if (!dup) uniq.push_back(row);
            }
            rs.rows = std::move(uniq);
        }
        return rs;
    }

    void build_rows(const Scope& scope, const SelectBody& b, size_t slot, WorkingRow& current,
                    std::vector<WorkingRow>& out) {
        if (slot == scope.slots.size()) {
            out.push_back(current);
            return;
        }
        for (const std::vector<Value>& row : scope.slots[slot].data->rows) {
            current[slot] = &row;
            // ON condition of join (slot-1 joins list index slot-1... slot 0 is base).
            if (slot > 0) {
                const Join& j = b.joins[slot - 1];
                // Both sides must already be bound; equality per value_equal,
                // NULLs never join.
                bool ok = true;
                const Value lv = column_value_partial(j.left, scope, current, slot + 1, ok);
                const Value rv = column_value_partial(j.right, scope, current, slot + 1, ok);
                if (ok) {
                    if (std::holds_alternative<std::monostate>(lv) ||
                        std::holds_alternative<std::monostate>(rv) || !value_equal(lv, rv))
                        continue;
                }
            }
            build_rows(scope, b, slot + 1, current, out);
        }
        current[slot] = nullptr;
    }

    // ON clauses may reference any table of the chain; defer the check until
    // both slots are bound.
    Value column_value_partial(const ColumnRef& ref, const Scope& scope,
                               const WorkingRow& row, size_t bound, bool& ok) {
        auto [slot, col] = scope.resolve(ref);
        if (slot >= bound || row[slot] == nullptr) {
            ok = false;
            return {};
        }
        return (*row[slot])[col];
    }

    Value column_value(const ColumnRef& ref, const Scope& scope, const WorkingRow& row) {
        auto [slot, col] = scope.resolve(ref);
        if (slot >= row.size() || row[slot] == nullptr) return std::monostate{};
        return (*row[slot])[col];
    }

    static bool body_has_aggregate(const SelectBody& b) {
        for (const SelectExpr& item : b.items)
            if (std::holds_alternative<Aggregate>(item)) return true;
        return false;
    }

    static std::string item_label(const SelectExpr& item) {
        if (std::holds_alternative<Star>(item)) return "*";
        if (std::holds_alternative<ColumnRef>(item)) {
            const ColumnRef& c = std::get<ColumnRef>(item);
            return c.qualifier.empty() ? c.column : c.qualifier + "." + c.column;
        }
        return "agg";
    }

    Value aggregate_value(const Aggregate& agg, const Scope& scope, const Group& g) {
        if (agg.fn == AggFn::Count && agg.star)
            return static_cast<int64_t>(g.rows.size());
        std::vector<Value> inputs;
        for (const WorkingRow& row : g.rows) {
            Value v = agg.star ? Value(static_cast<int64_t>(1))
                               : column_value(agg.column, scope, row);
            if (!std::holds_alternative<std::monostate>(v)) inputs.push_back(std::move(v));
        }
        if (agg.fn == AggFn::Count) return static_cast<int64_t>(inputs.size());
        if (inputs.empty()) return std::monostate{};
        if (agg.fn == AggFn::Min || agg.fn == AggFn::Max) {
            Value best = inputs[0];
            for (const Value& v : inputs) {
                if (agg.fn == AggFn::Min ? value_less(v, best) : value_less(best, v)) best = v;
            }
            return best;
        }
        // AVG / SUM over numbers only.
        double total = 0.0;
        bool all_int = true;
        for (const Value& v : inputs) {
            if (std::holds_alternative<int64_t>(v)) {
                total += static_cast<double>(std::get<int64_t>(v));
            } else if (std::holds_alternative<double>(v)) {
                total += std::get<double>(v);
                all_int = false;
            } else {
                throw TypeMismatchError("aggregate over non-numeric column");
            }
        }
        if (agg.fn == AggFn::Avg) return total / static_cast<double>(inputs.size());
        if (all_int) return static_cast<int64_t>(total);
        return total;
    }

    Value operand_value(const Operand& o, const Scope& scope, const WorkingRow& row,
                        const Group* group) {
        switch (o.kind) {
            case Operand::Kind::Column: return column_value(o.column, scope, row);
            case Operand::Kind::Literal: return literal_value(o.literal);
            case Operand::Kind::Agg:
                if (!group) throw UnsupportedError("aggregate outside HAVING");
                return aggregate_value(o.agg, scope, *group);
            case Operand::Kind::Subquery: {
                ResultSet sub = Evaluator(db_).query(*o.subquery);
                if (sub.labels.size() != 1)
                    throw UnsupportedError("scalar subquery with multiple columns");
                if (sub.rows.empty()) return std::monostate{};
                return sub.rows[0][0];
            }
        }
        return std::monostate{};
    }

    static Value literal_value(const LiteralValue& lit) {
        switch (lit.kind) {
            case LiteralValue::Kind::Int: return lit.int_value;
            case LiteralValue::Kind::Float: return lit.float_value;
            case LiteralValue::Kind::Str: return lit.text;
        }
        return std::monostate{};
    }

    // Simplified NULL logic: any comparison touching NULL is false.
    bool truthy(const BoolExpr& e, const Scope& scope, const WorkingRow& row,
                const Group* group) {
        switch (e.type) {
            case BoolExpr::Type::And:
                for (const auto& c : e.children)
                    if (!truthy(*c, scope, row, group)) return false;
                return true;
            case BoolExpr::Type::Or:
                for (const auto& c : e.children)
                    if (truthy(*c, scope, row, group)) return true;
                return false;
            case BoolExpr::Type::Not:
                return !truthy(*e.children[0], scope, row, group);
            case BoolExpr::Type::InList: {
                const Value v = operand_value(e.lhs, scope, row, group);
                if (std::holds_alternative<std::monostate>(v)) return false;
                for (const LiteralValue& item : e.in_items)
                    if (value_equal(v, literal_value(item))) return true;
                return false;
            }
            case BoolExpr::Type::Between: {
                const Value v = operand_value(e.lhs, scope, row, group);
                if (std::holds_alternative<std::monostate>(v)) return false;
                const Value lo = literal_value(e.low);
                const Value hi = literal_value(e.high);
                return !value_less(v, lo) && !value_less(hi, v);
            }
            case BoolExpr::Type::Cmp: {
                const Value l = operand_value(e.lhs, scope, row, group);
                const Value r = operand_value(e.rhs, scope, row, group);
                if (std::holds_alternative<std::monostate>(l) ||
                    std::holds_alternative<std::monostate>(r))
                    return false;
                return compare(e.op, l, r);
            }
        }
        return false;
    }

    static bool compare(CmpOp op, const Value& l, const Value& r) {
        const bool l_str = std::holds_alternative<std::string>(l);
        const bool r_str = std::holds_alternative<std::string>(r);
        if (op == CmpOp::Like) {
            if (!l_str || !r_str) throw TypeMismatchError("LIKE needs strings");
            return like_match(std::get<std::string>(l), std::get<std::string>(r));
        }
        if (l_str != r_str) throw TypeMismatchError("comparison across value kinds");
        switch (op) {
            case CmpOp::Eq: return value_equal(l, r);
            case CmpOp::Ne: return !value_equal(l, r);
            case CmpOp::Lt: return value_less(l, r);
            case CmpOp::Gt: return value_less(r, l);
            case CmpOp::Le: return !value_less(r, l);
            case CmpOp::Ge: return !value_less(l, r);
            default: return false;
        }
    }

    // SQL LIKE with % and _ wildcards, case-sensitive.
    static bool like_match(const std::string& text, const std::string& pattern) {
        std::vector<std::vector<bool>> dp(text.size() + 1,
                                          std::vector<bool>(pattern.size() + 1, false));
        dp[0][0] = true;
        for (size_t j = 1; j <= pattern.size(); ++j)
            dp[0][j] = pattern[j - 1] == '%' && dp[0][j - 1];
        for (size_t i = 1; i <= text.size(); ++i) {
            for (size_t j = 1; j <= pattern.size(); ++j) {
                const char p = pattern[j - 1];
                if (p == '%') dp[i][j] = dp[i][j - 1] || dp[i - 1][j];
                else if (p == '_') dp[i][j] = dp[i - 1][j - 1];
                else dp[i][j] = dp[i - 1][j - 1] && text[i - 1] == p;
            }
        }
        return dp[text.size()][pattern.size()];
    }

    void order_rows(const SqlAst& ast, ResultSet& rs) {
        // ORDER BY keys are evaluated against the select output when the
        // expression matches a select item; otherwise they must be resolvable
        // against the base result via re-execution scope. The subset keeps
        // this simple: keys must appear in the select list or be plain
        // columns of the (single-body) query.
        const SelectBody& b = ast.body;
        std::vector<std::vector<Value>> keys(rs.rows.size());
        for (const OrderItem& item : ast.order_by) {
            int sel_idx = -1;
            for (size_t i = 0; i < b.items.size(); ++i) {
                if (std::holds_alternative<ColumnRef>(item.expr) &&
                    std::holds_alternative<ColumnRef>(b.items[i]) &&
                    std::get<ColumnRef>(b.items[i]) == std::get<ColumnRef>(item.expr))
                    sel_idx = static_cast<int>(i);
                if (std::holds_alternative<Aggregate>(item.expr) &&
                    std::holds_alternative<Aggregate>(b.items[i]) &&
                    std::get<Aggregate>(b.items[i]) == std::get<Aggregate>(item.expr))
                    sel_idx = static_cast<int>(i);
            }
            if (sel_idx >= 0) {
                for (size_t r = 0; r < rs.rows.size(); ++r)
                    keys[r].push_back(rs.rows[r][static_cast<size_t>(sel_idx)]);
            } else if (std::holds_alternative<ColumnRef>(item.expr)) {
                // Re-run the body with the key column appended, then sort by it.
                SqlAst widened;
                widened.body = b;
                widened.body.items.push_back(std::get<ColumnRef>(item.expr));
                widened.body.distinct = false;
                ResultSet wide = Evaluator(db_).body(widened.body);
                if (wide.rows.size() != rs.rows.size())
                    throw UnsupportedError("ORDER BY key outside the select list");
                for (size_t r = 0; r < rs.rows.size(); ++r)
                    keys[r].push_back(wide.rows[r].back());
            } else {
                throw UnsupportedError("ORDER BY aggregate outside the select list");
            }
        }
        std::vector<size_t> idx(rs.rows.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t bI) {
            for (size_t k = 0; k < ast.order_by.size(); ++k) {
                const bool desc = ast.order_by[k].desc;
                if (value_less(keys[a][k], keys[bI][k])) return !desc;
                if (value_less(keys[bI][k], keys[a][k])) return desc;
            }
            return false;  // stable: ties keep input order
        });
        std::vector<std::vector<Value>> sorted;
        sorted.reserve(rs.rows.size());
        for (size_t i : idx) sorted.push_back(std::move(rs.rows[i]));
        rs.rows = std::move(sorted);
    }

    static std::vector<std::vector<Value>> set_op_rows(
        SetOp op, const std::vector<std::vector<Value>>& lhs,
        const std::vector<std::vector<Value>>& rhs) {
        auto contains = [](const std::vector<std::vector<Value>>& rows,
                           const std::vector<Value>& row) {
            for (const auto& r : rows)
                if (rows_equal(r, row)) return true;
            return false;
        };
        std::vector<std::vector<Value>> out;
        auto push_unique = [&](const std::vector<Value>& row) {
            if (!contains(out, row)) out.push_back(row);
        };
        switch (op) {
            case SetOp::Union:
                for (const auto& r : lhs) push_unique(r);
                for (const auto& r : rhs) push_unique(r);
                break;
            case SetOp::Intersect:
                for (const auto& r : lhs)
                    if (contains(rhs, r)) push_unique(r);
                break;
            case SetOp::Except:
                for (const auto& r : lhs)
                    if (!contains(rhs, r)) push_unique(r);
                break;
            default: break;
        }
        return out;
    }

    const Database& db_;
};

}  // namespace

bool ResultSet::equals(const ResultSet& other) const {
    if (rows.size() != other.rows.size()) return false;
    if (ordered || other.ordered) {
        for (size_t i = 0; i < rows.size(); ++i)
            if (!rows_equal(rows[i], other.rows[i])) return false;
        return true;
    }
    auto a = sorted_rows(rows);
    auto b = sorted_rows(other.rows);
    for (size_t i = 0; i < a.size(); ++i)
        if (!rows_equal(a[i], b[i])) return false;
    return true;
}

ResultSet execute(const SqlAst& ast, const Database& db) {
    return Evaluator(db).query(ast);
}

ResultSet execute_sql(const std::string& sql, const Database& db) {
    return execute(parse_sql(sql), db);
}

namespace {

Value json_to_value(const json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_number_integer()) return j.get<int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return static_cast<int64_t>(j.get<bool>());
    throw Error("unsupported fixture value: " + j.dump());
}

json value_to_json(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return nullptr;
    if (std::holds_alternative<int64_t>(v)) return std::get<int64_t>(v);
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    return std::get<std::string>(v);
}

}  // namespace

Database load_fixtures(const std::string& dir, const Schema& schema) {
    Database db;
    for (const Table& t : schema.tables) {
        const fs::path path = fs::path(dir) / (t.name + ".json");
        TableData data;
        for (const Column& c : t.columns) data.columns.push_back(c.name);
        if (fs::exists(path)) {
            std::ifstream in(path);
            json rows = json::parse(in);
            for (const json& row : rows) {
                std::vector<Value> values;
                for (const Column& c : t.columns) {
                    if (row.contains(c.name)) values.push_back(json_to_value(row.at(c.name)));
                    else values.push_back(std::monostate{});
                }
                data.rows.push_back(std::move(values));
            }
        }
        db.tables[t.name] = std::move(data);
    }
    return db;
}

void save_fixtures(const Database& db, const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& [name, data] : db.tables) {
        json rows = json::array();
        for (const auto& row : data.rows) {
            json obj = json::object();
            for (size_t i = 0; i < data.columns.size(); ++i)
                obj[data.columns[i]] = value_to_json(row[i]);
            rows.push_back(std::move(obj));
        }
        std::ofstream out(fs::path(dir) / (name + ".json"));
        out << rows.dump(1) << "\n";
    }
}

}  // namespace ambisql
