#include "ambisql/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ambisql/errors.hpp"

namespace ambisql {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> to_logs(const std::vector<double>& probs) {
    std::vector<double> out(probs.size());
    for (size_t i = 0; i < probs.size(); ++i)
        out[i] = probs[i] > 0.0 ? std::log(probs[i]) : kNegInf;
    return out;
}

class OracleScorer final : public Scorer {
public:
    OracleScorer(Vocabulary vocab,
                 const std::vector<std::pair<std::string, double>>& targets, double epsilon)
        : vocab_(std::move(vocab)), epsilon_(epsilon) {
        if (targets.empty()) throw EmptyTargetsError("oracle scorer needs targets");
        for (const auto& [text, weight] : targets) {
            if (weight <= 0.0) throw EmptyTargetsError("target weight must be positive");
            std::vector<TokenId> ids = vocab_.encode(text);
            ids.push_back(Vocabulary::kEnd);
            targets_.emplace_back(std::move(ids), weight);
        }
    }

    std::vector<double> score(std::span<const TokenId> prefix) const override {
        // prefix[0] is kBegin; match the remainder against target prefixes.
        std::span<const TokenId> tail =
            prefix.empty() || prefix[0] != Vocabulary::kBegin ? prefix : prefix.subspan(1);
        std::map<TokenId, double> next_weight;
        double total = 0.0;
        for (const auto& [ids, weight] : targets_) {
            if (ids.size() <= tail.size()) continue;
            if (!std::equal(tail.begin(), tail.end(), ids.begin())) continue;
            next_weight[ids[tail.size()]] += weight;
            total += weight;
        }
        std::vector<double> probs(vocab_.size(), 0.0);
        if (next_weight.empty()) {
            probs[Vocabulary::kEnd] = 1.0;
            return to_logs(probs);
        }
        const size_t others = vocab_.size() - next_weight.size();
        const double spread = others > 0 ? epsilon_ : 0.0;
        if (others > 0)
            for (size_t i = 0; i < probs.size(); ++i) probs[i] = spread / others;
        for (const auto& [tok, w] : next_weight)
            probs[tok] = (w / total) * (1.0 - spread);
        return to_logs(probs);
    }

    const Vocabulary& vocab() const override { return vocab_; }

private:
    Vocabulary vocab_;
    double epsilon_;
    std::vector<std::pair<std::vector<TokenId>, double>> targets_;
};

class NgramScorer final : public Scorer {
public:
    NgramScorer(const std::vector<std::string>& corpus, int order, bool split_underscores)
        : order_(order), vocab_(Vocabulary::build(corpus, split_underscores)) {
        if (order < 1) throw Error("n-gram order must be >= 1");
        if (corpus.empty()) throw Error("n-gram corpus must be nonempty");
        for (const std::string& line : corpus) {
            std::vector<TokenId> ids(static_cast<size_t>(order_ - 1), Vocabulary::kBegin);
            std::vector<TokenId> body = vocab_.encode(line);
            ids.insert(ids.end(), body.begin(), body.end());
            ids.push_back(Vocabulary::kEnd);
            for (size_t i = static_cast<size_t>(order_ - 1); i < ids.size(); ++i) {
                std::vector<TokenId> ctx(ids.begin() + i - (order_ - 1), ids.begin() + i);
                counts_[ctx][ids[i]] += 1;
                context_totals_[ctx] += 1;
            }
        }
    }

    std::vector<double> score(std::span<const TokenId> prefix) const override {
        std::vector<TokenId> ctx;
        const size_t need = static_cast<size_t>(order_ - 1);
        for (size_t i = prefix.size() >= need ? prefix.size() - need : 0; i < prefix.size(); ++i)
            ctx.push_back(prefix[i]);
        while (ctx.size() < need) ctx.insert(ctx.begin(), Vocabulary::kBegin);

        const double v = static_cast<double>(vocab_.size());
        std::vector<double> probs(vocab_.size(), 0.0);
        auto ctx_it = context_totals_.find(ctx);
        const double denom = (ctx_it == context_totals_.end() ? 0.0 : ctx_it->second) + v;
        const auto count_it = counts_.find(ctx);
        for (size_t tok = 0; tok < probs.size(); ++tok) {
            double c = 0.0;
            if (count_it != counts_.end()) {
                auto it = count_it->second.find(static_cast<TokenId>(tok));
                if (it != count_it->second.end()) c = it->second;
            }
            probs[tok] = (c + 1.0) / denom;
        }
        return to_logs(probs);
    }

    const Vocabulary& vocab() const override { return vocab_; }

private:
    int order_;
    Vocabulary vocab_;
    std::map<std::vector<TokenId>, std::map<TokenId, double>> counts_;
    std::map<std::vector<TokenId>, double> context_totals_;
};

}  // namespace

ScorerPtr oracle_scorer(const Vocabulary& vocab,
                        const std::vector<std::pair<std::string, double>>& weighted_targets,
                        double epsilon) {
    return std::make_shared<OracleScorer>(vocab, weighted_targets, epsilon);
}

ScorerPtr ngram_scorer(const std::vector<std::string>& corpus, int order,
                       bool split_underscores) {
    return std::make_shared<NgramScorer>(corpus, order, split_underscores);
}

void check_score_vector(const std::vector<double>& logprobs, size_t vocab_size) {
    if (logprobs.size() != vocab_size)
        throw ShapeMismatchError("score vector length " + std::to_string(logprobs.size()) +
                                 " != vocabulary size " + std::to_string(vocab_size));
    double total = 0.0;
    for (double lp : logprobs)
        if (lp != kNegInf) total += std::exp(lp);
    if (std::abs(std::log(total)) > 1e-6)
        throw Error("score vector does not normalize: logsumexp = " +
                    std::to_string(std::log(total)));
}

}  // namespace ambisql
