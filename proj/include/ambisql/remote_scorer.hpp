#pragma once

#include <chrono>
#include <string>

#include "ambisql/scorer.hpp"

namespace ambisql {

/// Client for the scoring wire protocol:
///   GET  /vocab            -> {"tokens": ["<s>", "</s>", ...], "split_underscores": bool}
///   POST /score            <- {"prefix": [ids]}
///                          -> {"logprobs": [float; |V|]}
/// Servers send log-probabilities, pre-normalized. Responses are cached per
/// prefix; clear_cache() resets between decodes. Errors map to
/// TransportError (unreachable / non-200), TimeoutError, and
/// ShapeMismatchError (vector length != |V|).
ScorerPtr remote_scorer(const std::string& endpoint,
                        std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

/// Cache control for scorers that have one; no-op otherwise.
void clear_scorer_cache(const Scorer& scorer);

/// Network round-trips made so far (for cache tests); 0 for local scorers.
size_t scorer_call_count(const Scorer& scorer);

}  // namespace ambisql
