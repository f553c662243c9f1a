#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ambisql/name_trie.hpp"
#include "ambisql/schema.hpp"
#include "ambisql/scorer.hpp"
#include "ambisql/sql_template.hpp"

namespace ambisql {

enum class Strategy { Greedy, Beam, TopK, Nucleus, Typical, RestrictedFillIn, LogicalBeam };

struct DecodeConfig {
    Strategy strategy = Strategy::Greedy;
    int beam_width = 10;
    int samples = 5;
    int top_k = 50;
    double top_p = 0.9;
    double typical_p = 0.9;
    int max_len = 256;
    uint64_t seed = 0;

    void validate() const;  // beam_width >= 1, 0 < top_p <= 1, 0 < typical_p <= 1
};

/// Forced prefix tokens are emitted verbatim with their scorer log-probs
/// accrued, then argmax per step. Ties break toward the lower token id.
/// Hypotheses that hit max_len come back with finished == false.
Hypothesis greedy(const Scorer& scorer, std::span<const TokenId> enforce_prefix, int max_len);

/// Length-unnormalized beam search, deterministic, sorted by score
/// descending.
std::vector<Hypothesis> beam_search(const Scorer& scorer, int beam_width, int max_len);

/// Seeded ancestral sampling with top-k / nucleus / typical truncation.
std::vector<Hypothesis> sample_decode(const Scorer& scorer, Strategy strategy,
                                      const DecodeConfig& config);

/// Truncated candidate set of one distribution, renormalized. Exposed so the
/// samplers' set construction is testable in isolation.
struct TruncatedDist {
    std::vector<TokenId> ids;
    std::vector<double> probs;  // renormalized, aligned with ids
};
TruncatedDist truncate_top_k(const std::vector<double>& logprobs, int k);
TruncatedDist truncate_nucleus(const std::vector<double>& logprobs, double top_p);
TruncatedDist truncate_typical(const std::vector<double>& logprobs, double typical_p);

/// Per-step record for the restricted fill-in instrumentation.
struct FillStep {
    int step = 0;
    size_t parent = 0;  // index into the previous beam
    TokenId token = 0;
    TokenClass cls = TokenClass::Other;
};
struct FillTrace {
    std::vector<FillStep> steps;
};

struct FillResult {
    std::vector<Hypothesis> hypotheses;  // finished, template-conforming, best first
    bool all_violated = false;
    std::string diagnostic;
};

/// One-template constrained beam search: hypotheses violating the template
/// are not extended; at column/table positions extensions branch over the
/// schema-name whitelist (everything else masked to -inf); elsewhere only the
/// top-scoring extension is taken. Every returned hypothesis is a complete
/// instantiation of the template.
///
/// restrict_names=false lifts the whitelist mask and branching control
/// (plain beam search that still drops template violators), which is the
/// infilling used by the two_stage / plus_template_diversity ablations.
FillResult restricted_fill_in(const Scorer& scorer, const SqlTemplate& templ,
                              const NameTrie& trie, int beam_width, int max_len,
                              bool union_classes = true, bool restrict_names = true,
                              FillTrace* trace = nullptr);

enum class LogicalBeamMode { SingleStage, TwoStage, PlusTemplateDiversity, Full };

struct LogicalBeamConfig {
    LogicalBeamMode mode = LogicalBeamMode::Full;
    int per_template_take = 2;
    int vanilla_take = 2;
    int final_size = 5;
    int infill_beam_width = 10;
    int max_len = 256;
    bool vanilla_first = false;      // placement of the vanilla pair in the ranking
    bool per_class_whitelist = false;  // restrict column slots to columns, table slots to tables

    void validate() const;
};

struct LogicalBeamResult {
    std::vector<std::string> sqls;        // ranked, deduplicated, <= final_size
    std::vector<std::string> templates;   // stage-1 templates actually used
    std::vector<Plan> plans;              // base plan first, then counterfactuals
};

/// Two-stage decode: greedy plan+template generation, counterfactual plan
/// prefixes for structural diversity, restricted infilling for schema
/// diversity, then top-2 per template plus the top-2 of a vanilla beam,
/// deduplicated by canonical SQL. Throws EmptyResultError when no stage
/// produces anything.
LogicalBeamResult logical_beam(const Scorer& template_scorer, const Scorer& sql_scorer,
                               const Schema& schema, const NameTrie& trie,
                               const LogicalBeamConfig& config);

}  // namespace ambisql
