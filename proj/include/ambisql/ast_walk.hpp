#pragma once

#include <string>

#include "ambisql/ast.hpp"

namespace ambisql {

// Single token-level traversal shared by the printer and the template
// extractor so the two stay aligned token for token.
struct TokenSink {
    virtual ~TokenSink() = default;
    virtual void word(const std::string& text) = 0;  // keyword / operator / punct / alias
    virtual void column_ref(const ColumnRef& ref) = 0;
    virtual void table_name(const std::string& name) = 0;  // FROM/JOIN position
    virtual void number(const LiteralValue& v) = 0;
    virtual void string_lit(const LiteralValue& v) = 0;
};

void walk_ast(const SqlAst& ast, TokenSink& sink);

}  // namespace ambisql
