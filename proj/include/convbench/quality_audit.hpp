#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "convbench/conversation_io.hpp"
#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/parallel.hpp"
#include "convbench/report.hpp"
#include "convbench/source.hpp"

namespace convbench::audit {

struct DimensionScore {
    std::optional<int> score;  // absent when the dimension failed
    std::vector<std::string> evidence;
    std::string justification;
};

struct AuditScore {
    DimensionScore naturalness;
    DimensionScore turn_coherence;
    DimensionScore question_quality;
    DimensionScore groundedness;
    bool partial = false;

    std::array<const DimensionScore*, 4> dimensions() const {
        return {&naturalness, &turn_coherence, &question_quality, &groundedness};
    }
};

inline constexpr std::array<const char*, 4> audit_dimensions{"naturalness", "turn_coherence", "question_quality",
                                                             "groundedness"};

inline std::string render_conversation(const forge::Conversation& conv) {
    std::string out;
    for (const auto& t : conv.turns) {
        if (!out.empty()) out += "\n\n";
        out += "Turn " + std::to_string(t.turn_index) + "\nQ: " + t.conversational_query + "\nA: " + t.answer;
    }
    return out;
}

inline std::string numbered(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += '\n';
        out += std::to_string(i + 1) + ". " + items[i];
    }
    return out;
}

namespace detail {

inline DimensionScore run_dimension(llm::Gateway& gateway, const char* template_id, const llm::Variables& vars,
                                    const std::vector<std::string>& evidence_fields) {
    DimensionScore d;
    std::string note;
    for (int attempt = 0; attempt < 2; ++attempt) {
        nlohmann::json j;
        try {
            j = gateway.complete_structured(template_id, vars, note).parsed;
        } catch (const Error& e) {
            spdlog::warn("audit {} failed: {}", template_id, e.what());
            return d;
        }
        int s = j["score"].get<int>();
        if (s < 1 || s > 5) {
            note = "score must be an integer from 1 to 5.";
            continue;
        }
        d.score = s;
        d.justification = j.value("justification", "");
        for (const auto& f : evidence_fields)
            if (j.contains(f) && j[f].is_array())
                for (const auto& e : j[f]) d.evidence.push_back(e.get<std::string>());
        if (d.evidence.empty() && s < 5 && !d.justification.empty()) d.evidence.push_back(d.justification);
        return d;
    }
    return d;
}

}  // namespace detail

/// Four independent dimension calls. A dimension that still fails after its
/// retry leaves the audit partial.
inline AuditScore audit_conversation(const forge::Conversation& conv, const std::vector<corpus::Document>& documents,
                                     llm::Gateway& gateway) {
    if (conv.turns.empty()) throw PreconditionError("cannot audit an empty conversation");
    const auto rendered = render_conversation(conv);
    std::vector<std::string> questions, answers;
    for (const auto& t : conv.turns) {
        questions.push_back(t.conversational_query);
        answers.push_back(t.answer);
    }
    AuditScore a;
    a.naturalness = detail::run_dimension(gateway, llm::prompt_ids::naturalness, {{"conversation", rendered}},
                                          {"unnatural_phrases"});
    a.turn_coherence = detail::run_dimension(gateway, llm::prompt_ids::coherence, {{"conversation", rendered}},
                                             {"weak_connections", "unclear_references"});
    a.question_quality =
        detail::run_dimension(gateway, llm::prompt_ids::question_quality,
                              {{"original_query", conv.topic.empty() ? conv.turns.front().conversational_query : conv.topic},
                               {"questions", numbered(questions)}},
                              {"repeated_questions", "weak_questions"});
    a.groundedness = detail::run_dimension(gateway, llm::prompt_ids::groundedness,
                                           {{"documents", render_documents(documents)}, {"answers", numbered(answers)}},
                                           {"unsupported_claims", "made_up_content"});
    for (const auto* d : a.dimensions()) a.partial = a.partial || !d->score;
    return a;
}

struct Label {
    std::string label;
    std::string evidence;
};

inline std::size_t label_index(const std::vector<std::string>& labels, const std::string& l) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == l) return i;
    throw ValidationError("label '" + l + "' outside the label set", l, 1);
}

/// First turns have no context and are self-contained by definition.
inline Label classify_dependency(std::string_view question, const forge::History& prior_context, llm::Gateway& gateway) {
    if (text::trim(question).empty()) throw PreconditionError("cannot classify an empty question");
    if (prior_context.empty()) return {"self_contained", ""};
    auto j = gateway
                 .complete_structured(llm::prompt_ids::dependency,
                                      {{"prior_context", forge::render_history(prior_context)},
                                       {"current_question", std::string(question)}})
                 .parsed;
    return {j["dependency_type"].get<std::string>(), j.value("evidence", "")};
}

inline Label classify_question_pattern(std::string_view question, llm::Gateway& gateway) {
    if (text::trim(question).empty()) throw PreconditionError("cannot classify an empty question");
    auto j = gateway.complete_structured(llm::prompt_ids::pattern, {{"question", std::string(question)}}).parsed;
    return {j["question_pattern"].get<std::string>(), j.value("evidence", "")};
}

/// Shannon entropy (natural log) divided by ln k.
inline double normalized_entropy(const std::vector<long long>& counts, std::size_t k) {
    if (k < 2) throw PreconditionError("entropy normalization needs k >= 2");
    if (counts.size() > k) throw PreconditionError("more counts than categories");
    long double total = 0;
    for (auto c : counts) {
        if (c < 0) throw PreconditionError("counts must be non-negative");
        total += c;
    }
    if (total == 0) throw PreconditionError("entropy of all-zero counts is undefined");
    long double h = 0;
    for (auto c : counts) {
        if (c == 0) continue;
        long double p = c / total;
        h -= p * std::log(p);
    }
    return static_cast<double>(std::clamp<long double>(h / std::log(static_cast<long double>(k)), 0.0L, 1.0L));
}

struct AlignmentRow {
    std::string dimension;
    double llm = 0.0;
    double human = 0.0;
    double delta = 0.0;
    bool pass = false;
};

struct HumanAlignmentReport {
    std::vector<AlignmentRow> rows;
    bool pass = true;
    double threshold = 0.5;
};

inline HumanAlignmentReport human_alignment_report(const std::map<std::string, double>& llm_means,
                                                   const std::map<std::string, double>& human_means,
                                                   double threshold = 0.5) {
    if (llm_means.size() != human_means.size()) throw PreconditionError("dimension sets differ");
    HumanAlignmentReport r;
    r.threshold = threshold;
    for (const auto& [dim, v] : llm_means) {
        auto it = human_means.find(dim);
        if (it == human_means.end()) throw PreconditionError("dimension '" + dim + "' has no human mean");
        AlignmentRow row{dim, v, it->second, v - it->second, false};
        row.pass = std::fabs(row.delta) <= threshold + 1e-12;
        r.pass = r.pass && row.pass;
        r.rows.push_back(row);
    }
    return r;
}

inline Table human_alignment_table(const HumanAlignmentReport& r) {
    Table t{"LLM vs human audit means (threshold " + fixed(r.threshold, 2) + ")",
            {"dimension", "llm", "human", "delta", "pass"},
            {}};
    for (const auto& row : r.rows)
        t.add({row.dimension, fixed(row.llm, 2), fixed(row.human, 2), (row.delta >= 0 ? "+" : "") + fixed(row.delta, 2),
               row.pass ? "yes" : "no"});
    t.add({"overall", "", "", "", r.pass ? "yes" : "no"});
    return t;
}

struct ConversationAudit {
    std::string conv_id;
    std::string domain;
    AuditScore score;
    std::vector<Label> dependencies;  // one per turn
    std::vector<Label> patterns;      // one per turn
};

struct DatasetAudit {
    std::vector<ConversationAudit> conversations;
    std::map<std::string, double> means;
    std::map<std::string, double> stddevs;
    std::map<std::string, std::array<std::size_t, 5>> histogram;  // dimension -> counts of scores 1..5
    std::map<std::string, long long> dependency_counts;
    std::map<std::string, long long> pattern_counts;
    double dependency_entropy = 0.0;
    double pattern_entropy = 0.0;
    std::size_t partial = 0;
    std::size_t turns = 0;
    std::size_t first_turns_self_contained = 0;
    long long self_contained = 0;
    bool self_contained_matches_conversations = false;
};

/// Audits every conversation: four dimension scores plus per-turn dependency
/// and question-pattern labels, then dataset-level tables.
inline DatasetAudit audit_dataset(const std::vector<forge::Conversation>& convs, const corpus::Corpus& corpus,
                                  llm::Gateway& gateway, std::size_t workers = 4) {
    DatasetAudit out;
    out.conversations = parallel_map(convs.size(), workers, [&](std::size_t i) {
        const auto& c = convs[i];
        ConversationAudit a;
        a.conv_id = c.conv_id;
        a.domain = c.domain;
        std::vector<corpus::Document> docs;
        std::set<std::string> seen;
        for (const auto& t : c.turns)
            for (const auto& s : t.selected_docs)
                if (seen.insert(s.doc_id).second) {
                    if (const auto* d = corpus.find(s.doc_id)) docs.push_back(*d);
                }
        a.score = audit_conversation(c, docs, gateway);
        for (std::size_t t = 0; t < c.turns.size(); ++t) {
            const auto& q = c.turns[t].conversational_query;
            a.dependencies.push_back(classify_dependency(q, forge::history_of(c, t), gateway));
            a.patterns.push_back(classify_question_pattern(q, gateway));
        }
        return a;
    });

    for (const auto& l : llm::dependency_types()) out.dependency_counts[l] = 0;
    for (const auto& l : llm::question_patterns()) out.pattern_counts[l] = 0;
    std::map<std::string, std::vector<int>> values;
    for (const auto& a : out.conversations) {
        out.partial += a.score.partial ? 1 : 0;
        auto dims = a.score.dimensions();
        for (std::size_t d = 0; d < 4; ++d) {
            auto& h = out.histogram[audit_dimensions[d]];
            if (dims[d]->score) {
                values[audit_dimensions[d]].push_back(*dims[d]->score);
                ++h[static_cast<std::size_t>(*dims[d]->score - 1)];
            }
        }
        for (std::size_t t = 0; t < a.dependencies.size(); ++t) {
            ++out.dependency_counts[a.dependencies[t].label];
            ++out.turns;
            if (t == 0 && a.dependencies[t].label == "self_contained") ++out.first_turns_self_contained;
        }
        for (const auto& p : a.patterns) ++out.pattern_counts[p.label];
    }
    for (const auto& [dim, vs] : values) {
        double m = 0.0;
        for (int v : vs) m += v;
        m /= static_cast<double>(vs.size());
        double ss = 0.0;
        for (int v : vs) ss += (v - m) * (v - m);
        out.means[dim] = m;
        out.stddevs[dim] = vs.size() > 1 ? std::sqrt(ss / static_cast<double>(vs.size() - 1)) : 0.0;
    }
    auto counts_of = [](const std::map<std::string, long long>& m, const std::vector<std::string>& order) {
        std::vector<long long> v;
        for (const auto& l : order) v.push_back(m.at(l));
        return v;
    };
    if (out.turns) {
        out.dependency_entropy = normalized_entropy(counts_of(out.dependency_counts, llm::dependency_types()),
                                                    llm::dependency_types().size());
        out.pattern_entropy =
            normalized_entropy(counts_of(out.pattern_counts, llm::question_patterns()), llm::question_patterns().size());
    }
    out.self_contained = out.dependency_counts["self_contained"];
    out.self_contained_matches_conversations = out.self_contained == static_cast<long long>(convs.size());
    if (!out.self_contained_matches_conversations)
        spdlog::warn("self_contained count {} differs from conversation count {}", out.self_contained, convs.size());
    return out;
}

inline std::vector<Table> audit_tables(const DatasetAudit& a) {
    std::vector<Table> out;
    Table means{"Audit dimension means", {"dimension", "mean", "std", "1", "2", "3", "4", "5"}, {}};
    for (const auto* d : audit_dimensions) {
        auto m = a.means.find(d);
        auto s = a.stddevs.find(d);
        std::vector<std::string> row{d, m == a.means.end() ? "-" : fixed(m->second, 2),
                                     s == a.stddevs.end() ? "-" : fixed(s->second, 2)};
        auto h = a.histogram.find(d);
        for (std::size_t i = 0; i < 5; ++i) row.push_back(h == a.histogram.end() ? "0" : std::to_string(h->second[i]));
        means.add(std::move(row));
    }
    out.push_back(std::move(means));

    auto dist = [&](const std::string& title, const std::map<std::string, long long>& counts,
                    const std::vector<std::string>& order, double entropy) {
        Table t{title, {"label", "count", "share"}, {}};
        long long total = 0;
        for (const auto& l : order) total += counts.at(l);
        for (const auto& l : order)
            t.add({l, std::to_string(counts.at(l)), total ? percent(static_cast<double>(counts.at(l)) / total) : "-"});
        t.add({"total", std::to_string(total), ""});
        t.add({"normalized entropy", fixed(entropy, 2), ""});
        return t;
    };
    out.push_back(dist("Turn dependency types", a.dependency_counts, llm::dependency_types(), a.dependency_entropy));
    out.push_back(dist("Question patterns", a.pattern_counts, llm::question_patterns(), a.pattern_entropy));

    Table check{"Consistency", {"check", "value"}, {}};
    check.add({"conversations", std::to_string(a.conversations.size())});
    check.add({"self_contained turns", std::to_string(a.self_contained)});
    check.add({"self_contained == conversations", a.self_contained_matches_conversations ? "yes" : "no"});
    check.add({"partial audits", std::to_string(a.partial)});
    out.push_back(std::move(check));
    return out;
}

inline nlohmann::json to_json(const ConversationAudit& a) {
    nlohmann::json dims = nlohmann::json::object();
    auto ds = a.score.dimensions();
    for (std::size_t d = 0; d < 4; ++d)
        dims[audit_dimensions[d]] = {{"score", ds[d]->score ? nlohmann::json(*ds[d]->score) : nlohmann::json()},
                                     {"evidence", ds[d]->evidence}};
    nlohmann::json deps = nlohmann::json::array(), pats = nlohmann::json::array();
    for (const auto& l : a.dependencies) deps.push_back({{"label", l.label}, {"evidence", l.evidence}});
    for (const auto& l : a.patterns) pats.push_back({{"label", l.label}, {"evidence", l.evidence}});
    return {{"conv_id", a.conv_id}, {"domain", a.domain}, {"scores", dims},
            {"partial", a.score.partial}, {"dependencies", deps}, {"patterns", pats}};
}

}  // namespace convbench::audit
