#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ambisql/schema.hpp"
#include "ambisql/vocab.hpp"

namespace ambisql {

enum class NameClass { Column, Table };

/// Token-level prefix structure over all schema column and table names.
/// Its root-level token set is the whitelist for constrained decoding;
/// deeper levels restrict the continuations of multi-token names.
class NameTrie {
public:
    static constexpr int kRoot = 0;

    static NameTrie build(const Schema& schema, const Vocabulary& vocab);

    /// Child node for `token`, filtered to paths that can still reach a
    /// terminal of `cls` (or of any class when union_classes).
    int step(int node, TokenId token, NameClass cls, bool union_classes) const;
    static constexpr int kNoNode = -1;

    bool terminal(int node, NameClass cls, bool union_classes) const;
    /// Schema name spelled by the path ending at a terminal node.
    const std::string& terminal_name(int node) const;

    /// Admissible next tokens at `node` (class-filtered), sorted.
    std::vector<TokenId> continuations(int node, NameClass cls, bool union_classes) const;

    /// First tokens of all names: the whitelist U.
    std::set<TokenId> first_tokens() const;
    std::set<TokenId> first_tokens(NameClass cls) const;

    size_t name_count() const { return name_count_; }

private:
    struct Node {
        std::map<TokenId, int> next;
        bool terminal_column = false;
        bool terminal_table = false;
        bool reach_column = false;  // subtree holds a column terminal
        bool reach_table = false;
        std::string name;  // set on terminal nodes
    };

    void insert(const std::vector<TokenId>& path, NameClass cls, const std::string& name);

    std::vector<Node> nodes_{1};
    size_t name_count_ = 0;
};

}  // namespace ambisql
