#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ambisql/ast.hpp"
#include "ambisql/schema.hpp"

namespace ambisql {

/// Cell value. monostate is NULL.
using Value = std::variant<std::monostate, int64_t, double, std::string>;

bool value_equal(const Value& a, const Value& b);  // 15 == 15.0
/// Total order for sorting: NULL < numbers < strings, numbers unified.
bool value_less(const Value& a, const Value& b);
std::string value_to_string(const Value& v);

struct TableData {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;  // row arity == column arity
};

/// Column-ordered in-memory row store; immutable during execution.
struct Database {
    std::map<std::string, TableData> tables;

    const TableData& table(const std::string& name) const;
};

struct ResultSet {
    std::vector<std::string> labels;
    std::vector<std::vector<Value>> rows;
    bool ordered = false;  // true iff the query had ORDER BY

    /// Multiset comparison when unordered, sequence comparison when ordered;
    /// labels are ignored.
    bool equals(const ResultSet& other) const;
};

/// Standard semantics over the subset; NULLs are excluded from aggregate
/// inputs (COUNT(*) counts rows) and NULL comparisons are false. Throws
/// UnsupportedError, NameResolutionError, or TypeMismatchError.
ResultSet execute(const SqlAst& ast, const Database& db);
ResultSet execute_sql(const std::string& sql, const Database& db);

/// Loads the fixture directory: one <table>.json per table, each a JSON array
/// of column-name-keyed row objects. Column order comes from the schema.
Database load_fixtures(const std::string& dir, const Schema& schema);
void save_fixtures(const Database& db, const std::string& dir);

}  // namespace ambisql
