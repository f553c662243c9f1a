#include "ambisql/remote_scorer.hpp"

#include <map>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "ambisql/errors.hpp"

namespace ambisql {

using nlohmann::json;

namespace {

class RemoteScorer final : public Scorer {
public:
    RemoteScorer(const std::string& endpoint, std::chrono::milliseconds timeout)
        : endpoint_(endpoint), timeout_(timeout) {
        auto res = client().Get("/vocab");
        if (!res) throw_transport(res.error());
        if (res->status != 200)
            throw TransportError("/vocab returned status " + std::to_string(res->status));
        json doc = json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("tokens"))
            throw ShapeMismatchError("/vocab response lacks a tokens table");
        std::vector<std::string> table = doc.at("tokens").get<std::vector<std::string>>();
        bool split = doc.value("split_underscores", false);
        vocab_ = Vocabulary::from_table(std::move(table), split);
    }

    std::vector<double> score(std::span<const TokenId> prefix) const override {
        std::vector<TokenId> key(prefix.begin(), prefix.end());
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        json body;
        body["prefix"] = key;
        auto res = client().Post("/score", body.dump(), "application/json");
        if (!res) throw_transport(res.error());
        if (res->status != 200)
            throw TransportError("/score returned status " + std::to_string(res->status));
        json doc = json::parse(res->body, nullptr, false);
        if (doc.is_discarded() || !doc.contains("logprobs"))
            throw ShapeMismatchError("/score response lacks logprobs");
        std::vector<double> logprobs = doc.at("logprobs").get<std::vector<double>>();
        if (logprobs.size() != vocab_.size())
            throw ShapeMismatchError("logprobs length " + std::to_string(logprobs.size()) +
                                     " != vocabulary size " + std::to_string(vocab_.size()));
        std::lock_guard<std::mutex> lock(mutex_);
        ++calls_;
        cache_[std::move(key)] = logprobs;
        return logprobs;
    }

    const Vocabulary& vocab() const override { return vocab_; }

    void clear_cache() const {
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.clear();
    }

    size_t calls() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return calls_;
    }

private:
    httplib::Client client() const {
        httplib::Client c(endpoint_);
        c.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_));
        c.set_read_timeout(timeout_);
        c.set_write_timeout(timeout_);
        return c;
    }

    [[noreturn]] static void throw_transport(httplib::Error err) {
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write)
            throw TimeoutError("scorer endpoint timed out");
        throw TransportError("scorer endpoint unreachable: " + httplib::to_string(err));
    }

    std::string endpoint_;
    std::chrono::milliseconds timeout_;
    Vocabulary vocab_ = Vocabulary::from_table({"<s>", "</s>"}, false);
    mutable std::mutex mutex_;
    mutable std::map<std::vector<TokenId>, std::vector<double>> cache_;
    mutable size_t calls_ = 0;
};

}  // namespace

ScorerPtr remote_scorer(const std::string& endpoint, std::chrono::milliseconds timeout) {
    return std::make_shared<RemoteScorer>(endpoint, timeout);
}

void clear_scorer_cache(const Scorer& scorer) {
    if (auto* r = dynamic_cast<const RemoteScorer*>(&scorer)) r->clear_cache();
}

size_t scorer_call_count(const Scorer& scorer) {
    if (auto* r = dynamic_cast<const RemoteScorer*>(&scorer)) return r->calls();
    return 0;
}

}  // namespace ambisql
