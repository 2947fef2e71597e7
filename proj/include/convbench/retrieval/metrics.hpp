#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "convbench/errors.hpp"
#include "convbench/qrels.hpp"

namespace convbench::retrieval {

struct MetricVector {
    double ndcg_at_10 = 0.0;
    double map_at_10 = 0.0;
    double recall_at_10 = 0.0;
    double mrr = 0.0;

    MetricVector& operator+=(const MetricVector& o) {
        ndcg_at_10 += o.ndcg_at_10;
        map_at_10 += o.map_at_10;
        recall_at_10 += o.recall_at_10;
        mrr += o.mrr;
        return *this;
    }
    MetricVector operator/(double n) const { return {ndcg_at_10 / n, map_at_10 / n, recall_at_10 / n, mrr / n}; }
};

enum class Gain { exponential, linear };

inline double gain(int grade, Gain g) {
    return g == Gain::exponential ? std::exp2(static_cast<double>(grade)) - 1.0 : static_cast<double>(grade);
}

/// Metrics for one ranked list over the first k positions. Returns nullopt
/// when the judgments contain no relevant document. MRR is also cut at k.
inline std::optional<MetricVector> compute_metrics(const std::vector<std::string>& ranking,
                                                   const corpus::Qrels::Judgments& judgments, std::size_t k = 10,
                                                   Gain g = Gain::exponential) {
    if (k == 0) throw PreconditionError("k must be >= 1");
    std::vector<int> ideal;
    for (const auto& [doc, grade] : judgments)
        if (grade > 0) ideal.push_back(grade);
    if (ideal.empty()) return std::nullopt;
    std::sort(ideal.rbegin(), ideal.rend());

    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) idcg += gain(ideal[i], g) / std::log2(i + 2.0);

    MetricVector m;
    double dcg = 0.0, precision_sum = 0.0;
    std::size_t hits = 0, rank = 0;
    std::set<std::string> seen;
    for (const auto& doc : ranking) {
        if (rank == k) break;
        if (!seen.insert(doc).second) continue;
        ++rank;
        auto it = judgments.find(doc);
        int grade = it == judgments.end() ? 0 : it->second;
        if (grade <= 0) continue;
        dcg += gain(grade, g) / std::log2(rank + 1.0);
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(rank);
        if (m.mrr == 0.0) m.mrr = 1.0 / static_cast<double>(rank);
    }
    const double relevant = static_cast<double>(ideal.size());
    m.ndcg_at_10 = idcg > 0.0 ? dcg / idcg : 0.0;
    m.map_at_10 = precision_sum / relevant;
    m.recall_at_10 = static_cast<double>(hits) / relevant;
    return m;
}

struct DomainRow {
    std::size_t count = 0;
    MetricVector mean;
};

struct MacroReport {
    std::map<std::string, DomainRow> domains;
    MetricVector macro;
};

/// Mean per domain, then the unweighted mean of the domain means.
inline MacroReport macro_average(const std::vector<std::pair<std::string, MetricVector>>& per_turn) {
    if (per_turn.empty()) throw PreconditionError("macro_average needs at least one observation");
    MacroReport r;
    std::map<std::string, MetricVector> sums;
    for (const auto& [domain, m] : per_turn) {
        sums[domain] += m;
        ++r.domains[domain].count;
    }
    MetricVector total;
    for (auto& [domain, row] : r.domains) {
        row.mean = sums[domain] / static_cast<double>(row.count);
        total += row.mean;
    }
    r.macro = total / static_cast<double>(r.domains.size());
    return r;
}

}  // namespace convbench::retrieval
