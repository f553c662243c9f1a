#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ambisql {

struct Column {
    std::string name;
    std::string type;  // "number", "text", ...
    bool operator==(const Column&) const = default;
};

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::optional<std::string> primary_key;

    const Column* find_column(const std::string& name) const;
};

struct ForeignKey {
    std::string from_table, from_column;
    std::string to_table, to_column;
    bool operator==(const ForeignKey&) const = default;
};

struct Schema {
    std::string db_id;
    std::vector<Table> tables;
    std::vector<ForeignKey> foreign_keys;

    const Table* find_table(const std::string& name) const;
    bool has_table(const std::string& name) const { return find_table(name) != nullptr; }

    /// Table names unique, column names unique per table, keys resolve.
    void validate() const;

    /// All column and table names, column names first, declaration order.
    std::vector<std::string> all_names() const;
};

/// SPIDER-style tables file: a JSON array of documents with fields db_id,
/// table_names, column_names ([table index, name] pairs; a leading [-1, "*"]
/// row is tolerated and skipped), column_types, primary_keys (column
/// indices), foreign_keys ([from index, to index] pairs).
std::vector<Schema> load_schemas(const std::string& path);
Schema load_schema(const std::string& path, const std::string& db_id);
void save_schemas(const std::vector<Schema>& schemas, const std::string& path);

std::string schema_to_json(const Schema& schema);
Schema schema_from_json(const std::string& json_text);

/// "db_id | table : col, col | table : col" serialization used in
/// training-pair exports.
std::string serialize_schema(const Schema& schema);

}  // namespace ambisql
