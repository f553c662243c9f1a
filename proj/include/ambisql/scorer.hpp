#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ambisql/vocab.hpp"

namespace ambisql {

/// Next-token log-probability provider. Every returned vector covers the
/// whole vocabulary and log-sum-exps to 0 within 1e-6; -inf entries are
/// allowed. Implementations must be callable from multiple threads.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::vector<double> score(std::span<const TokenId> prefix) const = 0;
    virtual const Vocabulary& vocab() const = 0;
};

using ScorerPtr = std::shared_ptr<const Scorer>;

/// A scored partial token sequence. tokens[0] is always kBegin; finished iff
/// the last token is kEnd.
struct Hypothesis {
    std::vector<TokenId> tokens{Vocabulary::kBegin};
    double score = 0.0;
    bool finished = false;

    std::string text(const Vocabulary& v) const { return v.decode(tokens); }
};

/// Deterministic prefix-tree scorer over weighted target strings. At each
/// prefix, (1 - epsilon) of the mass goes to the next tokens of matching
/// targets proportionally to weight and epsilon is spread uniformly over the
/// remaining tokens. Prefixes off every target put all mass on kEnd.
/// Throws EmptyTargetsError.
ScorerPtr oracle_scorer(const Vocabulary& vocab,
                        const std::vector<std::pair<std::string, double>>& weighted_targets,
                        double epsilon = 0.0);

/// Add-one-smoothed n-gram scorer over the corpus (order n >= 1). Owns a
/// vocabulary built from the corpus.
ScorerPtr ngram_scorer(const std::vector<std::string>& corpus, int order,
                       bool split_underscores = false);

/// Checks the normalization invariant; throws ShapeMismatchError on a vector
/// of the wrong length and Error when logsumexp is off by more than 1e-6.
void check_score_vector(const std::vector<double>& logprobs, size_t vocab_size);

}  // namespace ambisql
