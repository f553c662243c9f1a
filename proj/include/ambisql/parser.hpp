#pragma once

#include <string_view>
#include <vector>

#include "ambisql/ast.hpp"
#include "ambisql/token.hpp"

namespace ambisql {

/// Parses a lexed token stream. Throws ParseError on malformed input and
/// UnsupportedError on recognizable constructs outside the subset
/// (arithmetic, outer joins, correlated subqueries, DDL/DML, ...).
SqlAst parse(const std::vector<SqlToken>& tokens);

/// lex + parse in one step.
SqlAst parse_sql(std::string_view source);

}  // namespace ambisql
