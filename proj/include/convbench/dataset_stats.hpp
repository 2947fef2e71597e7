#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convbench/corpus.hpp"
#include "convbench/report.hpp"
#include "convbench/turn_forge.hpp"

namespace convbench {

/// Integer totals; averages are divided only when printed.
struct StatsRow {
    std::size_t conversations = 0;
    std::size_t turns = 0;
    std::size_t aspects = 0;
    std::size_t selected_docs = 0;
    std::size_t min_turns = 0;
    std::size_t max_turns = 0;

    double avg_turns() const { return conversations ? static_cast<double>(turns) / conversations : 0.0; }
    double avg_aspects() const { return conversations ? static_cast<double>(aspects) / conversations : 0.0; }
    double avg_docs_per_turn() const { return turns ? static_cast<double>(selected_docs) / turns : 0.0; }

    void add(const forge::Conversation& c) {
        const auto n = c.turns.size();
        min_turns = conversations ? std::min(min_turns, n) : n;
        max_turns = std::max(max_turns, n);
        ++conversations;
        turns += n;
        aspects += static_cast<std::size_t>(std::max(0, c.aspect_count));
        for (const auto& t : c.turns) selected_docs += t.selected_docs.size();
    }
};

struct DatasetStats {
    StatsRow total;
    std::map<std::string, StatsRow> domains;
    std::size_t query_words = 0;
    std::size_t answer_words = 0;
    std::size_t history_words = 0;  // summed over turns 2 and later
    std::size_t later_turns = 0;
    std::optional<corpus::CorpusStats> corpus;

    double avg_query_words() const { return total.turns ? static_cast<double>(query_words) / total.turns : 0.0; }
    double avg_answer_words() const { return total.turns ? static_cast<double>(answer_words) / total.turns : 0.0; }
    double avg_history_words() const { return later_turns ? static_cast<double>(history_words) / later_turns : 0.0; }
};

inline DatasetStats compute_stats(const std::vector<forge::Conversation>& convs, const corpus::Corpus* corpus = nullptr) {
    DatasetStats s;
    for (const auto& c : convs) {
        s.total.add(c);
        s.domains[c.domain].add(c);
        std::size_t history = 0;
        for (const auto& t : c.turns) {
            const auto q = text::word_count(t.conversational_query);
            const auto a = text::word_count(t.answer);
            s.query_words += q;
            s.answer_words += a;
            if (t.turn_index > 1) {
                s.history_words += history;
                ++s.later_turns;
            }
            history += q + a;
        }
    }
    if (corpus) s.corpus = corpus->stats();
    return s;
}

inline Table stats_table(const DatasetStats& s) {
    Table t{"Dataset statistics", {"domain", "conversations", "turns", "avg turns", "avg aspects", "avg docs/turn"}, {}};
    auto row = [](const std::string& name, const StatsRow& r) {
        return std::vector<std::string>{name,
                                        std::to_string(r.conversations),
                                        std::to_string(r.turns),
                                        fixed(r.avg_turns(), 2),
                                        fixed(r.avg_aspects(), 2),
                                        fixed(r.avg_docs_per_turn(), 2)};
    };
    for (const auto& [d, r] : s.domains) t.add(row(d.empty() ? "(none)" : d, r));
    t.add(row("Total", s.total));
    return t;
}

inline Table text_stats_table(const DatasetStats& s) {
    Table t{"Text and corpus statistics", {"measure", "value"}, {}};
    t.add({"turn range", std::to_string(s.total.min_turns) + "-" + std::to_string(s.total.max_turns)});
    t.add({"avg query words", fixed(s.avg_query_words(), 1)});
    t.add({"avg answer words", fixed(s.avg_answer_words(), 1)});
    t.add({"avg history words (turns 2+)", fixed(s.avg_history_words(), 1)});
    if (s.corpus) {
        t.add({"corpus documents", std::to_string(s.corpus->total)});
        t.add({"positive documents", std::to_string(s.corpus->positives)});
        t.add({"negative documents", std::to_string(s.corpus->negatives)});
        t.add({"negatives per positive", fixed(s.corpus->negative_ratio(), 0) + ":1"});
    }
    return t;
}

inline nlohmann::json to_json(const DatasetStats& s) {
    auto row = [](const StatsRow& r) {
        return nlohmann::json{{"conversations", r.conversations}, {"turns", r.turns},
                              {"aspects", r.aspects},             {"selected_docs", r.selected_docs},
                              {"avg_turns", r.avg_turns()},       {"avg_aspects", r.avg_aspects()},
                              {"avg_docs_per_turn", r.avg_docs_per_turn()}};
    };
    nlohmann::json domains = nlohmann::json::object();
    for (const auto& [d, r] : s.domains) domains[d] = row(r);
    nlohmann::json j{{"total", row(s.total)},
                     {"domains", domains},
                     {"avg_query_words", s.avg_query_words()},
                     {"avg_answer_words", s.avg_answer_words()},
                     {"avg_history_words", s.avg_history_words()}};
    if (s.corpus)
        j["corpus"] = {{"total", s.corpus->total}, {"positives", s.corpus->positives}, {"negatives", s.corpus->negatives}};
    return j;
}

}  // namespace convbench
