#include "ambisql/schema.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ambisql/errors.hpp"

namespace ambisql {

using nlohmann::json;

const Column* Table::find_column(const std::string& name) const {
    for (const Column& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

const Table* Schema::find_table(const std::string& name) const {
    for (const Table& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

void Schema::validate() const {
    std::set<std::string> seen;
    for (const Table& t : tables) {
        if (!seen.insert(t.name).second)
            throw Error("duplicate table name: " + t.name);
        std::set<std::string> cols;
        for (const Column& c : t.columns)
            if (!cols.insert(c.name).second)
                throw Error("duplicate column " + c.name + " in table " + t.name);
        if (t.primary_key && !t.find_column(*t.primary_key))
            throw Error("primary key " + *t.primary_key + " not a column of " + t.name);
    }
    for (const ForeignKey& fk : foreign_keys) {
        const Table* from = find_table(fk.from_table);
        const Table* to = find_table(fk.to_table);
        if (!from || !from->find_column(fk.from_column) || !to ||
            !to->find_column(fk.to_column))
            throw Error("unresolved foreign key " + fk.from_table + "." + fk.from_column +
                        " -> " + fk.to_table + "." + fk.to_column);
    }
}

std::vector<std::string> Schema::all_names() const {
    std::vector<std::string> names;
    for (const Table& t : tables)
        for (const Column& c : t.columns) names.push_back(c.name);
    for (const Table& t : tables) names.push_back(t.name);
    return names;
}

namespace {

json schema_to_doc(const Schema& s) {
    json doc;
    doc["db_id"] = s.db_id;
    json table_names = json::array();
    json column_names = json::array();
    json column_types = json::array();
    json primary_keys = json::array();
    json foreign_keys = json::array();

    // Column index 0 is the conventional star row.
    column_names.push_back(json::array({-1, "*"}));
    column_types.push_back("text");
    std::map<std::pair<std::string, std::string>, int> col_index;
    int next_index = 1;
    for (size_t ti = 0; ti < s.tables.size(); ++ti) {
        const Table& t = s.tables[ti];
        table_names.push_back(t.name);
        for (const Column& c : t.columns) {
            column_names.push_back(json::array({static_cast<int>(ti), c.name}));
            column_types.push_back(c.type.empty() ? "text" : c.type);
            col_index[{t.name, c.name}] = next_index++;
        }
    }
    for (const Table& t : s.tables)
        if (t.primary_key) primary_keys.push_back(col_index.at({t.name, *t.primary_key}));
    for (const ForeignKey& fk : s.foreign_keys)
        foreign_keys.push_back(json::array({col_index.at({fk.from_table, fk.from_column}),
                                            col_index.at({fk.to_table, fk.to_column})}));

    doc["table_names"] = table_names;
    doc["column_names"] = column_names;
    doc["column_types"] = column_types;
    doc["primary_keys"] = primary_keys;
    doc["foreign_keys"] = foreign_keys;
    return doc;
}

Schema schema_from_doc(const json& doc) {
    Schema s;
    s.db_id = doc.at("db_id").get<std::string>();
    for (const auto& name : doc.at("table_names")) {
        Table t;
        t.name = name.get<std::string>();
        s.tables.push_back(std::move(t));
    }
    const json& cols = doc.at("column_names");
    const json* types = doc.contains("column_types") ? &doc.at("column_types") : nullptr;
    // Global column index -> (table, column) for key references.
    std::vector<std::pair<int, std::string>> by_index;
    for (size_t i = 0; i < cols.size(); ++i) {
        int ti = cols[i].at(0).get<int>();
        std::string name = cols[i].at(1).get<std::string>();
        by_index.emplace_back(ti, name);
        if (ti < 0) continue;  // the star row
        if (ti >= static_cast<int>(s.tables.size()))
            throw Error("column " + name + " references missing table index");
        Column c;
        c.name = name;
        if (types && i < types->size()) c.type = (*types)[i].get<std::string>();
        s.tables[ti].columns.push_back(std::move(c));
    }
    if (doc.contains("primary_keys")) {
        for (const auto& pk : doc.at("primary_keys")) {
            int idx = pk.get<int>();
            auto [ti, name] = by_index.at(idx);
            s.tables.at(ti).primary_key = name;
        }
    }
    if (doc.contains("foreign_keys")) {
        for (const auto& fk : doc.at("foreign_keys")) {
            int from = fk.at(0).get<int>();
            int to = fk.at(1).get<int>();
            auto [fti, fname] = by_index.at(from);
            auto [tti, tname] = by_index.at(to);
            s.foreign_keys.push_back(
                {s.tables.at(fti).name, fname, s.tables.at(tti).name, tname});
        }
    }
    s.validate();
    return s;
}

}  // namespace

std::vector<Schema> load_schemas(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open schema file: " + path);
    json doc = json::parse(in);
    std::vector<Schema> out;
    if (doc.is_array()) {
        for (const auto& d : doc) out.push_back(schema_from_doc(d));
    } else {
        out.push_back(schema_from_doc(doc));
    }
    return out;
}

Schema load_schema(const std::string& path, const std::string& db_id) {
    for (Schema& s : load_schemas(path))
        if (s.db_id == db_id) return std::move(s);
    throw Error("db_id not found in schema file: " + db_id);
}

void save_schemas(const std::vector<Schema>& schemas, const std::string& path) {
    json arr = json::array();
    for (const Schema& s : schemas) arr.push_back(schema_to_doc(s));
    std::ofstream out(path);
    if (!out) throw Error("cannot write schema file: " + path);
    out << arr.dump(2) << "\n";
}

std::string schema_to_json(const Schema& schema) {
    return schema_to_doc(schema).dump(2);
}

Schema schema_from_json(const std::string& json_text) {
    return schema_from_doc(json::parse(json_text));
}

std::string serialize_schema(const Schema& schema) {
    std::ostringstream out;
    out << schema.db_id;
    for (const Table& t : schema.tables) {
        out << " | " << t.name << " :";
        for (size_t i = 0; i < t.columns.size(); ++i)
            out << (i ? ", " : " ") << t.columns[i].name;
    }
    return out.str();
}

}  // namespace ambisql
