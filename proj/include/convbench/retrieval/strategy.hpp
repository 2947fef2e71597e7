#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/turn_forge.hpp"

namespace convbench::retrieval {

enum class Strategy { baseline, rewrite, reasoning, history, history_reasoning };

inline const std::vector<Strategy>& all_strategies() {
    static const std::vector<Strategy> v{Strategy::baseline, Strategy::rewrite, Strategy::reasoning, Strategy::history,
                                         Strategy::history_reasoning};
    return v;
}

inline std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::baseline: return "baseline";
        case Strategy::rewrite: return "rewrite";
        case Strategy::reasoning: return "reasoning";
        case Strategy::history: return "history";
        case Strategy::history_reasoning: return "history_reasoning";
    }
    return "baseline";
}

inline Strategy parse_strategy(const std::string& s) {
    for (auto st : all_strategies())
        if (to_string(st) == s) return st;
    throw PreconditionError("unknown strategy '" + s + "'");
}

inline bool needs_llm(Strategy s) { return s == Strategy::rewrite || s == Strategy::reasoning || s == Strategy::history_reasoning; }

struct StrategyQuery {
    Strategy strategy = Strategy::baseline;
    std::string query_text;
    std::string turn_ref;  // query id
};

/// Builds retrieval inputs for turns. Rewrites and search rationales are
/// produced once per turn and shared across strategies and retrievers.
class QueryBuilder {
public:
    explicit QueryBuilder(llm::Gateway* gateway = nullptr) : gateway_(gateway) {}

    StrategyQuery build(const forge::Conversation& conv, int turn_index, Strategy strategy) {
        if (turn_index < 1 || static_cast<std::size_t>(turn_index) > conv.turns.size())
            throw PreconditionError("turn " + std::to_string(turn_index) + " is not part of " + conv.conv_id);
        if (needs_llm(strategy) && !gateway_)
            throw PreconditionError("strategy '" + to_string(strategy) + "' needs an LLM gateway");

        const auto& raw = conv.turns[static_cast<std::size_t>(turn_index) - 1].conversational_query;
        const auto history = forge::render_history(forge::history_of(conv, static_cast<std::size_t>(turn_index) - 1));
        StrategyQuery q;
        q.strategy = strategy;
        q.turn_ref = forge::query_id(conv.conv_id, turn_index);
        switch (strategy) {
            case Strategy::baseline: q.query_text = raw; break;
            case Strategy::rewrite: q.query_text = history.empty() ? raw : rewrite(q.turn_ref, history, raw); break;
            case Strategy::reasoning: q.query_text = raw + "\n" + rationale(q.turn_ref, history, raw); break;
            case Strategy::history: q.query_text = history.empty() ? raw : history + "\n" + raw; break;
            case Strategy::history_reasoning:
                q.query_text = (history.empty() ? raw : history + "\n" + raw) + "\n" + rationale(q.turn_ref, history, raw);
                break;
        }
        return q;
    }

private:
    std::string cached(std::map<std::string, std::string>& cache, const std::string& key) {
        std::lock_guard lock(mutex_);
        auto it = cache.find(key);
        return it == cache.end() ? std::string() : it->second;
    }

    void store(std::map<std::string, std::string>& cache, const std::string& key, const std::string& value) {
        std::lock_guard lock(mutex_);
        cache.emplace(key, value);
    }

    std::string rewrite(const std::string& key, const std::string& history, const std::string& raw) {
        if (auto hit = cached(rewrites_, key); !hit.empty()) return hit;
        auto out = text::trim(gateway_->complete_structured(llm::prompt_ids::query_rewrite, {{"history", history}, {"query", raw}})
                                  .parsed["rewritten_query"]
                                  .get<std::string>());
        if (out.empty()) out = raw;
        store(rewrites_, key, out);
        return out;
    }

    std::string rationale(const std::string& key, const std::string& history, const std::string& raw) {
        if (auto hit = cached(rationales_, key); !hit.empty()) return hit;
        auto out = text::trim(gateway_
                                  ->complete_structured(llm::prompt_ids::search_rationale,
                                                        {{"history", history.empty() ? "(none)" : history}, {"query", raw}})
                                  .parsed["rationale"]
                                  .get<std::string>());
        if (out.empty()) throw ValidationError("empty search rationale for " + key, "", 1);
        store(rationales_, key, out);
        return out;
    }

    llm::Gateway* gateway_;
    std::mutex mutex_;
    std::map<std::string, std::string> rewrites_;
    std::map<std::string, std::string> rationales_;
};

}  // namespace convbench::retrieval
