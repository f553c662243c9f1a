#include "ambisql/name_trie.hpp"

#include "ambisql/errors.hpp"

namespace ambisql {

NameTrie NameTrie::build(const Schema& schema, const Vocabulary& vocab) {
    NameTrie trie;
    for (const Table& t : schema.tables) {
        for (const Column& c : t.columns) {
            std::vector<TokenId> path = vocab.encode(c.name);
            if (path.empty()) throw VocabError("column name tokenizes to nothing: " + c.name);
            trie.insert(path, NameClass::Column, c.name);
        }
        std::vector<TokenId> path = vocab.encode(t.name);
        if (path.empty()) throw VocabError("table name tokenizes to nothing: " + t.name);
        trie.insert(path, NameClass::Table, t.name);
    }
    return trie;
}

void NameTrie::insert(const std::vector<TokenId>& path, NameClass cls,
                      const std::string& name) {
    int node = kRoot;
    for (TokenId tok : path) {
        if (cls == NameClass::Column) nodes_[node].reach_column = true;
        else nodes_[node].reach_table = true;
        auto it = nodes_[node].next.find(tok);
        if (it == nodes_[node].next.end()) {
            nodes_.push_back(Node{});
            it = nodes_[node].next.emplace(tok, static_cast<int>(nodes_.size() - 1)).first;
        }
        node = it->second;
    }
    Node& leaf = nodes_[node];
    if (cls == NameClass::Column) {
        leaf.terminal_column = true;
        leaf.reach_column = true;
    } else {
        leaf.terminal_table = true;
        leaf.reach_table = true;
    }
    leaf.name = name;
    ++name_count_;
}

int NameTrie::step(int node, TokenId token, NameClass cls, bool union_classes) const {
    auto it = nodes_[node].next.find(token);
    if (it == nodes_[node].next.end()) return kNoNode;
    const Node& child = nodes_[it->second];
    const bool ok = union_classes ? (child.reach_column || child.reach_table)
                    : cls == NameClass::Column ? child.reach_column
                                               : child.reach_table;
    return ok ? it->second : kNoNode;
}

bool NameTrie::terminal(int node, NameClass cls, bool union_classes) const {
    const Node& n = nodes_[node];
    if (union_classes) return n.terminal_column || n.terminal_table;
    return cls == NameClass::Column ? n.terminal_column : n.terminal_table;
}

const std::string& NameTrie::terminal_name(int node) const {
    return nodes_[node].name;
}

std::vector<TokenId> NameTrie::continuations(int node, NameClass cls,
                                             bool union_classes) const {
    std::vector<TokenId> out;
    for (const auto& [tok, child] : nodes_[node].next) {
        const Node& c = nodes_[child];
        const bool ok = union_classes ? (c.reach_column || c.reach_table)
                        : cls == NameClass::Column ? c.reach_column
                                                   : c.reach_table;
        if (ok) out.push_back(tok);
    }
    return out;
}

std::set<TokenId> NameTrie::first_tokens() const {
    std::set<TokenId> out;
    for (const auto& [tok, child] : nodes_[kRoot].next) out.insert(tok);
    return out;
}

std::set<TokenId> NameTrie::first_tokens(NameClass cls) const {
    std::set<TokenId> out;
    for (TokenId tok : continuations(kRoot, cls, false)) out.insert(tok);
    return out;
}

}  // namespace ambisql
