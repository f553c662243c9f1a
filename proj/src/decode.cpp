#include "ambisql/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "ambisql/errors.hpp"
#include "ambisql/parser.hpp"

namespace ambisql {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

TokenId argmax_token(const std::vector<double>& dist) {
    TokenId best = 0;
    double best_score = kNegInf;
    for (size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] > best_score) {
            best_score = dist[i];
            best = static_cast<TokenId>(i);
        }
    }
    return best;
}

bool hyp_less(const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tokens < b.tokens;
}

std::string canonical_sql(const std::string& text) {
    try {
        return print_sql(parse_sql(text));
    } catch (const Error&) {
        return text;
    }
}

// Portable uniform double in [0, 1): 53 random bits.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void DecodeConfig::validate() const {
    if (beam_width < 1) throw Error("beam width must be >= 1");
    if (samples < 1) throw Error("sample count must be >= 1");
    if (top_k < 1) throw Error("top_k must be >= 1");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw Error("top_p must be in (0, 1]");
    if (!(typical_p > 0.0 && typical_p <= 1.0)) throw Error("typical_p must be in (0, 1]");
    if (max_len < 1) throw Error("max length must be >= 1");
}

void LogicalBeamConfig::validate() const {
    if (per_template_take < 1 || vanilla_take < 1) throw Error("take counts must be >= 1");
    if (final_size < per_template_take)
        throw Error("final list size must be >= per-template take count");
    if (infill_beam_width < 1) throw Error("infill beam width must be >= 1");
}

Hypothesis greedy(const Scorer& scorer, std::span<const TokenId> enforce_prefix, int max_len) {
    Hypothesis hyp;
    for (TokenId forced : enforce_prefix) {
        if (static_cast<int>(hyp.tokens.size()) - 1 >= max_len) return hyp;
        std::vector<double> dist = scorer.score(hyp.tokens);
        hyp.score += dist[forced];
        hyp.tokens.push_back(forced);
        if (forced == Vocabulary::kEnd) {
            hyp.finished = true;
            return hyp;
        }
    }
    while (static_cast<int>(hyp.tokens.size()) - 1 < max_len) {
        std::vector<double> dist = scorer.score(hyp.tokens);
        TokenId tok = argmax_token(dist);
        hyp.score += dist[tok];
        hyp.tokens.push_back(tok);
        if (tok == Vocabulary::kEnd) {
            hyp.finished = true;
            break;
        }
    }
    return hyp;
}

std::vector<Hypothesis> beam_search(const Scorer& scorer, int beam_width, int max_len) {
    if (beam_width < 1) throw Error("beam width must be >= 1");
    std::vector<Hypothesis> beam{Hypothesis{}};
    for (int step = 0; step < max_len; ++step) {
        bool any_alive = false;
        std::vector<Hypothesis> candidates;
        for (const Hypothesis& hyp : beam) {
            if (hyp.finished) {
                candidates.push_back(hyp);
                continue;
            }
            any_alive = true;
            std::vector<double> dist = scorer.score(hyp.tokens);
            for (size_t tok = 0; tok < dist.size(); ++tok) {
                if (dist[tok] == kNegInf) continue;
                Hypothesis next = hyp;
                next.score += dist[tok];
                next.tokens.push_back(static_cast<TokenId>(tok));
                next.finished = tok == Vocabulary::kEnd;
                candidates.push_back(std::move(next));
            }
        }
        if (!any_alive) break;
        std::sort(candidates.begin(), candidates.end(), hyp_less);
        if (static_cast<int>(candidates.size()) > beam_width)
            candidates.resize(static_cast<size_t>(beam_width));
        beam = std::move(candidates);
    }
    std::sort(beam.begin(), beam.end(), hyp_less);
    return beam;
}

TruncatedDist truncate_top_k(const std::vector<double>& logprobs, int k) {
    std::vector<TokenId> order;
    for (size_t i = 0; i < logprobs.size(); ++i)
        if (logprobs[i] != kNegInf) order.push_back(static_cast<TokenId>(i));
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        if (logprobs[a] != logprobs[b]) return logprobs[a] > logprobs[b];
        return a < b;
    });
    if (static_cast<int>(order.size()) > k) order.resize(static_cast<size_t>(k));
    TruncatedDist out;
    double total = 0.0;
    for (TokenId id : order) total += std::exp(logprobs[id]);
    for (TokenId id : order) {
        out.ids.push_back(id);
        out.probs.push_back(std::exp(logprobs[id]) / total);
    }
    return out;
}

TruncatedDist truncate_nucleus(const std::vector<double>& logprobs, double top_p) {
    std::vector<TokenId> order;
    for (size_t i = 0; i < logprobs.size(); ++i)
        if (logprobs[i] != kNegInf) order.push_back(static_cast<TokenId>(i));
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        if (logprobs[a] != logprobs[b]) return logprobs[a] > logprobs[b];
        return a < b;
    });
    TruncatedDist out;
    double mass = 0.0;
    for (TokenId id : order) {
        out.ids.push_back(id);
        mass += std::exp(logprobs[id]);
        if (mass >= top_p - 1e-12) break;
    }
    for (TokenId id : out.ids) out.probs.push_back(std::exp(logprobs[id]) / mass);
    return out;
}

TruncatedDist truncate_typical(const std::vector<double>& logprobs, double typical_p) {
    double entropy = 0.0;
    for (double lp : logprobs)
        if (lp != kNegInf) entropy -= std::exp(lp) * lp;
    std::vector<TokenId> order;
    for (size_t i = 0; i < logprobs.size(); ++i)
        if (logprobs[i] != kNegInf) order.push_back(static_cast<TokenId>(i));
    // Minimal set ordered by |log p + H|; ties prefer the likelier token.
    std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
        double ka = std::abs(logprobs[a] + entropy);
        double kb = std::abs(logprobs[b] + entropy);
        if (ka != kb) return ka < kb;
        if (logprobs[a] != logprobs[b]) return logprobs[a] > logprobs[b];
        return a < b;
    });
    TruncatedDist out;
    double mass = 0.0;
    for (TokenId id : order) {
        out.ids.push_back(id);
        mass += std::exp(logprobs[id]);
        if (mass >= typical_p - 1e-12) break;
    }
    for (TokenId id : out.ids) out.probs.push_back(std::exp(logprobs[id]) / mass);
    return out;
}

std::vector<Hypothesis> sample_decode(const Scorer& scorer, Strategy strategy,
                                      const DecodeConfig& config) {
    config.validate();
    if (strategy != Strategy::TopK && strategy != Strategy::Nucleus &&
        strategy != Strategy::Typical)
        throw Error("sample_decode expects a sampling strategy");
    std::mt19937_64 rng(config.seed);
    std::vector<Hypothesis> out;
    for (int s = 0; s < config.samples; ++s) {
        Hypothesis hyp;
        while (static_cast<int>(hyp.tokens.size()) - 1 < config.max_len) {
            std::vector<double> dist = scorer.score(hyp.tokens);
            TruncatedDist cand;
            switch (strategy) {
                case Strategy::TopK: cand = truncate_top_k(dist, config.top_k); break;
                case Strategy::Nucleus: cand = truncate_nucleus(dist, config.top_p); break;
                default: cand = truncate_typical(dist, config.typical_p); break;
            }
            const double u = next_uniform(rng);
            double cum = 0.0;
            TokenId tok = cand.ids.back();
            for (size_t i = 0; i < cand.ids.size(); ++i) {
                cum += cand.probs[i];
                if (u < cum) {
                    tok = cand.ids[i];
                    break;
                }
            }
            hyp.score += dist[tok];
            hyp.tokens.push_back(tok);
            if (tok == Vocabulary::kEnd) {
                hyp.finished = true;
                break;
            }
        }
        out.push_back(std::move(hyp));
    }
    return out;
}

namespace {

struct FillEntry {
    Hypothesis hyp;
    TemplateCursor cur;
    bool dead = false;
};

bool entry_less(const FillEntry& a, const FillEntry& b) {
    return hyp_less(a.hyp, b.hyp);
}

}  // namespace

FillResult restricted_fill_in(const Scorer& scorer, const SqlTemplate& templ,
                              const NameTrie& trie, int beam_width, int max_len,
                              bool union_classes, bool restrict_names, FillTrace* trace) {
    if (templ.empty()) throw Error("restricted fill-in needs a nonempty template");
    if (beam_width < 1) throw Error("beam width must be >= 1");
    const Vocabulary& vocab = scorer.vocab();

    std::vector<FillEntry> beam;
    beam.push_back({Hypothesis{}, TemplateCursor(templ, trie, vocab, union_classes), false});
    bool hit_empty = false;

    for (int step = 0; step < max_len; ++step) {
        bool any_alive = false;
        std::vector<FillEntry> candidates;
        for (size_t parent = 0; parent < beam.size(); ++parent) {
            FillEntry& entry = beam[parent];
            if (entry.dead) continue;  // violated hypotheses are not extended
            if (entry.hyp.finished) {
                candidates.push_back(entry);
                continue;
            }
            any_alive = true;
            std::vector<double> dist = scorer.score(entry.hyp.tokens);
            const TokenClass cls = entry.cur.next_class();

            auto emit = [&](TokenId tok) {
                if (dist[tok] == kNegInf) return;
                FillEntry next = entry;
                next.hyp.score += dist[tok];
                next.hyp.tokens.push_back(tok);
                if (tok == Vocabulary::kEnd) {
                    next.hyp.finished = true;
                    next.dead = !next.cur.can_finish();
                } else {
                    next.dead = next.cur.advance(tok) == TemplateCursor::Advance::Violated;
                }
                if (trace) trace->steps.push_back({step, parent, tok, cls});
                candidates.push_back(std::move(next));
            };

            if (restrict_names && (cls == TokenClass::Column || cls == TokenClass::Table)) {
                // Branch, but only over the whitelist; everything else is
                // masked to -inf.
                for (TokenId tok : entry.cur.admissible_name_tokens()) emit(tok);
            } else if (!restrict_names) {
                // Unrestricted infilling: branch over the full vocabulary but
                // still drop extensions that break the template.
                for (size_t tok = 0; tok < dist.size(); ++tok) {
                    if (dist[tok] == kNegInf) continue;
                    FillEntry next = entry;
                    next.hyp.score += dist[tok];
                    next.hyp.tokens.push_back(static_cast<TokenId>(tok));
                    if (tok == Vocabulary::kEnd) {
                        next.hyp.finished = true;
                        if (!next.cur.can_finish()) continue;
                    } else if (next.cur.advance(static_cast<TokenId>(tok)) ==
                               TemplateCursor::Advance::Violated) {
                        continue;
                    }
                    if (trace)
                        trace->steps.push_back({step, parent, static_cast<TokenId>(tok), cls});
                    candidates.push_back(std::move(next));
                }
            } else {
                // Disallow branching: only the top-scoring extension, taken
                // unmasked; a violation is caught at the next step.
                emit(argmax_token(dist));
            }
        }
        if (!any_alive) break;
        if (candidates.empty()) {
            hit_empty = true;
            break;
        }
        std::sort(candidates.begin(), candidates.end(), entry_less);
        if (static_cast<int>(candidates.size()) > beam_width)
            candidates.erase(candidates.begin() + beam_width, candidates.end());
        beam = std::move(candidates);
    }

    FillResult result;
    for (const FillEntry& e : beam)
        if (e.hyp.finished && !e.dead) result.hypotheses.push_back(e.hyp);
    std::sort(result.hypotheses.begin(), result.hypotheses.end(), hyp_less);
    if (result.hypotheses.empty()) {
        result.all_violated = true;
        result.diagnostic = hit_empty
                                ? "no hypothesis could be extended without violating the template"
                                : "no hypothesis completed the template within max length";
    }
    return result;
}

namespace {

// Plan-prefixed decoding without a template stage: branching is allowed only
// into schema-name tokens (whitelist first tokens or continuations of a name
// in progress) plus the top-scoring extension.
std::vector<Hypothesis> plan_guided_beam(const Scorer& scorer,
                                         std::span<const TokenId> enforce_prefix,
                                         const NameTrie& trie, int beam_width, int max_len) {
    Hypothesis root = greedy(scorer, enforce_prefix, static_cast<int>(enforce_prefix.size()));
    if (root.finished ||
        root.tokens.size() - 1 < enforce_prefix.size())
        return {root};

    struct Entry {
        Hypothesis hyp;
        std::set<int> active;  // trie nodes of name walks in progress
    };
    std::vector<Entry> beam{{root, {}}};
    const std::set<TokenId> whitelist = trie.first_tokens();

    for (int step = 0; step < max_len; ++step) {
        bool any_alive = false;
        std::vector<Entry> candidates;
        for (const Entry& entry : beam) {
            if (entry.hyp.finished) {
                candidates.push_back(entry);
                continue;
            }
            any_alive = true;
            std::vector<double> dist = scorer.score(entry.hyp.tokens);
            std::set<TokenId> allowed;
            allowed.insert(argmax_token(dist));
            for (TokenId tok : whitelist) allowed.insert(tok);
            for (int node : entry.active)
                for (TokenId tok : trie.continuations(node, NameClass::Column, true))
                    allowed.insert(tok);
            for (TokenId tok : allowed) {
                if (dist[tok] == kNegInf) continue;
                Entry next = entry;
                next.hyp.score += dist[tok];
                next.hyp.tokens.push_back(tok);
                next.hyp.finished = tok == Vocabulary::kEnd;
                if (!next.hyp.finished) {
                    std::set<int> moved;
                    for (int node : entry.active) {
                        int child = trie.step(node, tok, NameClass::Column, true);
                        if (child != NameTrie::kNoNode) moved.insert(child);
                    }
                    int fresh = trie.step(NameTrie::kRoot, tok, NameClass::Column, true);
                    if (fresh != NameTrie::kNoNode) moved.insert(fresh);
                    next.active = std::move(moved);
                }
                candidates.push_back(std::move(next));
            }
        }
        if (!any_alive) break;
        std::sort(candidates.begin(), candidates.end(),
                  [](const Entry& a, const Entry& b) { return hyp_less(a.hyp, b.hyp); });
        if (static_cast<int>(candidates.size()) > beam_width)
            candidates.resize(static_cast<size_t>(beam_width));
        beam = std::move(candidates);
    }
    std::vector<Hypothesis> out;
    for (const Entry& e : beam)
        if (e.hyp.finished) out.push_back(e.hyp);
    std::sort(out.begin(), out.end(), hyp_less);
    return out;
}

void push_ranked(std::vector<std::string>& ranked, std::set<std::string>& seen,
                 const std::string& sql) {
    std::string canon = canonical_sql(sql);
    if (seen.insert(canon).second) ranked.push_back(sql);
}

std::vector<std::string> take_vanilla(const Scorer& sql_scorer, const LogicalBeamConfig& cfg) {
    std::vector<std::string> out;
    for (const Hypothesis& h :
         beam_search(sql_scorer, cfg.infill_beam_width, cfg.max_len)) {
        if (!h.finished) continue;
        out.push_back(h.text(sql_scorer.vocab()));
        if (static_cast<int>(out.size()) >= cfg.vanilla_take) break;
    }
    return out;
}

}  // namespace

LogicalBeamResult logical_beam(const Scorer& template_scorer, const Scorer& sql_scorer,
                               const Schema& schema, const NameTrie& trie,
                               const LogicalBeamConfig& config) {
    (void)schema;
    config.validate();
    const bool union_classes = !config.per_class_whitelist;
    LogicalBeamResult result;
    std::vector<std::string> ranked;
    std::set<std::string> seen;

    const bool mix_vanilla = config.mode != LogicalBeamMode::SingleStage;
    const std::vector<std::string> vanilla =
        mix_vanilla ? take_vanilla(sql_scorer, config) : std::vector<std::string>{};
    if (mix_vanilla && config.vanilla_first)
        for (const std::string& sql : vanilla) push_ranked(ranked, seen, sql);

    if (config.mode == LogicalBeamMode::SingleStage) {
        // One stage: plan prefix enforced directly on SQL generation, with
        // branching restricted to schema names.
        const Vocabulary& vocab = sql_scorer.vocab();
        Hypothesis base = greedy(sql_scorer, {}, config.max_len);
        std::optional<Plan> base_plan;
        try {
            base_plan = parse_planned(base.text(vocab)).first;
        } catch (const Error&) {
        }
        if (base_plan) {
            result.plans.push_back(*base_plan);
            for (const Plan& p : counterfactual_plans(*base_plan)) result.plans.push_back(p);
            for (const Plan& plan : result.plans) {
                std::vector<TokenId> prefix;
                try {
                    prefix = vocab.encode(plan_prefix(plan));
                } catch (const VocabError&) {
                    continue;
                }
                std::vector<Hypothesis> hyps = plan_guided_beam(
                    sql_scorer, prefix, trie, config.infill_beam_width, config.max_len);
                int taken = 0;
                for (const Hypothesis& h : hyps) {
                    if (!h.finished || taken >= config.per_template_take) break;
                    // Strip the enforced plan prefix: keep tokens after it.
                    std::span<const TokenId> tail(h.tokens.data() + 1 + prefix.size(),
                                                  h.tokens.size() - 1 - prefix.size());
                    push_ranked(ranked, seen, vocab.decode(tail));
                    ++taken;
                }
            }
        }
    } else {
        const Vocabulary& tvocab = template_scorer.vocab();
        std::vector<SqlTemplate> templates;
        Hypothesis base = greedy(template_scorer, {}, config.max_len);
        std::optional<Plan> base_plan;
        try {
            auto [plan, templ] = parse_planned(base.text(tvocab));
            compute_plan(templ);  // reject skeletons that do not segment
            base_plan = plan;
            templates.push_back(std::move(templ));
            result.plans.push_back(plan);
        } catch (const Error&) {
        }
        if (base_plan && config.mode != LogicalBeamMode::TwoStage) {
            for (const Plan& plan : counterfactual_plans(*base_plan)) {
                std::vector<TokenId> prefix;
                try {
                    prefix = tvocab.encode(plan_prefix(plan));
                } catch (const VocabError&) {
                    continue;
                }
                Hypothesis h = greedy(template_scorer, prefix, config.max_len);
                try {
                    auto [out_plan, templ] = parse_planned(h.text(tvocab));
                    compute_plan(templ);
                    templates.push_back(std::move(templ));
                    result.plans.push_back(plan);
                } catch (const Error&) {
                    continue;
                }
            }
        }

        const bool restrict = config.mode == LogicalBeamMode::Full;
        for (const SqlTemplate& templ : templates) {
            result.templates.push_back(templ.to_string());
            FillResult fill =
                restricted_fill_in(sql_scorer, templ, trie, config.infill_beam_width,
                                   config.max_len, union_classes, restrict);
            int taken = 0;
            for (const Hypothesis& h : fill.hypotheses) {
                if (taken >= config.per_template_take) break;
                push_ranked(ranked, seen, h.text(sql_scorer.vocab()));
                ++taken;
            }
        }
    }

    if (mix_vanilla && !config.vanilla_first)
        for (const std::string& sql : vanilla) push_ranked(ranked, seen, sql);

    if (ranked.empty()) throw EmptyResultError("every decoding stage came back empty");
    if (static_cast<int>(ranked.size()) > config.final_size)
        ranked.resize(static_cast<size_t>(config.final_size));
    result.sqls = std::move(ranked);
    return result;
}

}  // namespace ambisql
