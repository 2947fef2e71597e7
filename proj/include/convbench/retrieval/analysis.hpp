#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "convbench/errors.hpp"
#include "convbench/report.hpp"
#include "convbench/retrieval/run.hpp"

namespace convbench::retrieval {

enum class AnalysisKind { turn_position, complexity, failure };

inline AnalysisKind parse_analysis_kind(const std::string& s) {
    if (s == "turn_position") return AnalysisKind::turn_position;
    if (s == "complexity") return AnalysisKind::complexity;
    if (s == "failure") return AnalysisKind::failure;
    throw PreconditionError("unknown analysis kind '" + s + "'");
}

inline std::size_t turn_bucket(int turn_index) { return static_cast<std::size_t>(std::clamp(turn_index, 1, 5) - 1); }
inline const std::array<std::string, 5>& turn_bucket_labels() {
    static const std::array<std::string, 5> v{"1", "2", "3", "4", "5+"};
    return v;
}

struct TurnPositionRow {
    Strategy strategy = Strategy::baseline;
    std::array<std::optional<double>, 5> mean_ndcg;
    std::array<std::size_t, 5> count{};
};

/// Mean nDCG@10 per turn bucket, pooled over retrievers.
inline std::vector<TurnPositionRow> turn_position_analysis(const std::vector<QueryScore>& scores) {
    std::map<Strategy, TurnPositionRow> rows;
    std::map<Strategy, std::array<double, 5>> sums;
    for (const auto& s : scores) {
        auto& row = rows[s.strategy];
        row.strategy = s.strategy;
        auto b = turn_bucket(s.turn_index);
        sums[s.strategy][b] += s.metrics.ndcg_at_10;
        ++row.count[b];
    }
    std::vector<TurnPositionRow> out;
    for (auto& [st, row] : rows) {
        for (std::size_t b = 0; b < 5; ++b)
            if (row.count[b]) row.mean_ndcg[b] = sums[st][b] / static_cast<double>(row.count[b]);
        out.push_back(row);
    }
    return out;
}

/// Best nDCG@10 over retrievers for each (strategy, query).
struct BestScore {
    Strategy strategy = Strategy::baseline;
    std::string query_id;
    std::string conv_id;
    int turn_index = 0;
    int aspect_count = 0;
    double ndcg = 0.0;
};

inline std::vector<BestScore> best_over_retrievers(const std::vector<QueryScore>& scores) {
    std::map<std::pair<Strategy, std::string>, BestScore> best;
    for (const auto& s : scores) {
        auto [it, fresh] = best.try_emplace({s.strategy, s.query_id},
                                            BestScore{s.strategy, s.query_id, s.conv_id, s.turn_index, s.aspect_count,
                                                      s.metrics.ndcg_at_10});
        if (!fresh) it->second.ndcg = std::max(it->second.ndcg, s.metrics.ndcg_at_10);
    }
    std::vector<BestScore> out;
    for (auto& [k, v] : best) out.push_back(v);
    return out;
}

enum class Complexity { low, medium, high };

/// Low 3-4 aspects, Medium 5-6, High 7 or more; nullopt below 3.
inline std::optional<Complexity> complexity_of(int aspect_count) {
    if (aspect_count >= 7) return Complexity::high;
    if (aspect_count >= 5) return Complexity::medium;
    if (aspect_count >= 3) return Complexity::low;
    return std::nullopt;
}

inline std::string to_string(Complexity c) {
    switch (c) {
        case Complexity::low: return "Low (3-4)";
        case Complexity::medium: return "Medium (5-6)";
        case Complexity::high: return "High (7+)";
    }
    return "";
}

struct ComplexityRow {
    Strategy strategy = Strategy::baseline;
    std::array<std::optional<double>, 3> mean_ndcg;
    std::array<std::size_t, 3> turns{};
};

/// Turns from 2 onward, scored by the best retriever, averaged per complexity bucket.
inline std::vector<ComplexityRow> complexity_analysis(const std::vector<QueryScore>& scores) {
    std::map<Strategy, ComplexityRow> rows;
    std::map<Strategy, std::array<double, 3>> sums;
    for (const auto& b : best_over_retrievers(scores)) {
        if (b.turn_index < 2) continue;
        auto c = complexity_of(b.aspect_count);
        if (!c) continue;
        auto& row = rows[b.strategy];
        row.strategy = b.strategy;
        auto i = static_cast<std::size_t>(*c);
        sums[b.strategy][i] += b.ndcg;
        ++row.turns[i];
    }
    std::vector<ComplexityRow> out;
    for (auto& [st, row] : rows) {
        for (std::size_t i = 0; i < 3; ++i)
            if (row.turns[i]) row.mean_ndcg[i] = sums[st][i] / static_cast<double>(row.turns[i]);
        out.push_back(row);
    }
    return out;
}

struct FailureReport {
    Strategy strategy = Strategy::history_reasoning;
    std::array<std::size_t, 4> counts{};  // [0.8,1], [0.5,0.8), [0.3,0.5), [0,0.3)
    std::size_t total = 0;
    std::size_t bottom_first_turn = 0;
    std::size_t first_turns = 0;

    double share(std::size_t bucket) const { return total ? static_cast<double>(counts[bucket]) / total : 0.0; }
    double bottom_first_turn_share() const {
        return counts[3] ? static_cast<double>(bottom_first_turn) / counts[3] : 0.0;
    }
    double first_turn_share() const { return total ? static_cast<double>(first_turns) / total : 0.0; }
};

inline const std::array<std::string, 4>& failure_bucket_labels() {
    static const std::array<std::string, 4> v{"[0.8, 1.0]", "[0.5, 0.8)", "[0.3, 0.5)", "[0.0, 0.3)"};
    return v;
}

inline std::size_t failure_bucket(double ndcg) {
    if (ndcg >= 0.8) return 0;
    if (ndcg >= 0.5) return 1;
    if (ndcg >= 0.3) return 2;
    return 3;
}

inline FailureReport failure_analysis(const std::vector<QueryScore>& scores,
                                      Strategy strategy = Strategy::history_reasoning) {
    FailureReport r;
    r.strategy = strategy;
    for (const auto& b : best_over_retrievers(scores)) {
        if (b.strategy != strategy) continue;
        auto bucket = failure_bucket(b.ndcg);
        ++r.counts[bucket];
        ++r.total;
        if (b.turn_index == 1) {
            ++r.first_turns;
            if (bucket == 3) ++r.bottom_first_turn;
        }
    }
    return r;
}

inline Table turn_position_table(const std::vector<TurnPositionRow>& rows) {
    Table t{"nDCG@10 by turn position", {"strategy"}, {}};
    for (const auto& l : turn_bucket_labels()) t.headers.push_back("turn " + l);
    for (const auto& r : rows) {
        std::vector<std::string> cells{to_string(r.strategy)};
        for (const auto& m : r.mean_ndcg) cells.push_back(m ? fixed(*m) : "-");
        t.add(std::move(cells));
    }
    return t;
}

inline Table complexity_table(const std::vector<ComplexityRow>& rows) {
    Table t{"Best-retriever nDCG@10 by conversation complexity (turns >= 2)", {"strategy"}, {}};
    for (auto c : {Complexity::low, Complexity::medium, Complexity::high}) t.headers.push_back(to_string(c));
    t.headers.push_back("turns");
    for (const auto& r : rows) {
        std::vector<std::string> cells{to_string(r.strategy)};
        for (const auto& m : r.mean_ndcg) cells.push_back(m ? fixed(*m) : "-");
        cells.push_back(std::to_string(r.turns[0]) + "/" + std::to_string(r.turns[1]) + "/" + std::to_string(r.turns[2]));
        t.add(std::move(cells));
    }
    return t;
}

inline Table failure_table(const FailureReport& r) {
    Table t{"Best-retriever nDCG@10 distribution (" + to_string(r.strategy) + ")", {"bucket", "queries", "share"}, {}};
    for (std::size_t b = 0; b < 4; ++b)
        t.add({failure_bucket_labels()[b], std::to_string(r.counts[b]), percent(r.share(b))});
    t.add({"first turns in [0.0, 0.3)", std::to_string(r.bottom_first_turn), percent(r.bottom_first_turn_share())});
    t.add({"first turns overall", std::to_string(r.first_turns), percent(r.first_turn_share())});
    return t;
}

inline Table analyze_results(const std::vector<QueryScore>& scores, AnalysisKind kind) {
    switch (kind) {
        case AnalysisKind::turn_position: return turn_position_table(turn_position_analysis(scores));
        case AnalysisKind::complexity: return complexity_table(complexity_analysis(scores));
        case AnalysisKind::failure: return failure_table(failure_analysis(scores));
    }
    throw PreconditionError("unknown analysis kind");
}

inline Table analyze_results(const std::vector<RunResult>& runs, const corpus::Qrels& qrels,
                             const std::vector<forge::Conversation>& convs, const std::string& kind) {
    auto k = parse_analysis_kind(kind);
    return analyze_results(score_runs(runs, qrels, convs), k);
}

}  // namespace convbench::retrieval
