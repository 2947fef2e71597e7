#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/source.hpp"
#include "convbench/text.hpp"

namespace convbench::decompose {

struct AlignmentReport {
    std::vector<std::string> key_claims;
    std::vector<std::string> supported_claims;
    std::vector<std::string> unsupported_claims;
    double coverage_percentage = 0.0;
    bool is_sufficient = false;
};

enum class AspectType { detail, step, implication, distinction, definition, mechanism, example, comparison, history, application };

inline std::string to_string(AspectType t) {
    return llm::aspect_types()[static_cast<std::size_t>(t)];
}

/// Case-insensitive; nullopt for anything outside the ten known types.
inline std::optional<AspectType> parse_aspect_type(std::string_view s) {
    auto lowered = text::trim(s);
    for (auto& c : lowered)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    const auto& names = llm::aspect_types();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == lowered) return static_cast<AspectType>(i);
    return std::nullopt;
}

struct Aspect {
    std::string aspect_name;
    AspectType aspect_type = AspectType::detail;
    std::string excerpt;
    std::optional<double> coverage;
    int order_index = 0;
};

struct Rejection {
    std::string aspect_name;
    std::string reason;
    bool transient = false;
};

struct ScreenVerdict {
    bool accepted = true;
    std::string reason;  // overlap type, aspect category or failure description when rejected
    bool transient = false;

    static ScreenVerdict accept() { return {}; }
    static ScreenVerdict reject(std::string why, bool transient = false) { return {false, std::move(why), transient}; }
};

inline bool excerpt_in_answer(std::string_view excerpt, std::string_view answer) {
    auto e = text::normalize_whitespace(excerpt);
    return !e.empty() && text::normalize_whitespace(answer).find(e) != std::string::npos;
}

namespace detail {

inline std::string norm_claim(std::string_view s) {
    auto n = text::normalize_whitespace(s);
    for (auto& c : n)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return n;
}

inline std::string render_existing(const std::vector<Aspect>& existing) {
    if (existing.empty()) return "(none)";
    std::string out;
    for (const auto& a : existing) {
        if (!out.empty()) out += '\n';
        out += "- [" + to_string(a.aspect_type) + "] " + a.aspect_name + ": " + a.excerpt;
    }
    return out;
}

}  // namespace detail

/// Checks whether the source documents support the gold answer. Coverage is
/// recomputed from the claim lists; sufficiency is the model's verdict.
inline AlignmentReport validate_alignment(const SourceRecord& source, llm::Gateway& gateway) {
    if (text::trim(source.query).empty() || text::trim(source.gold_answer).empty())
        throw PreconditionError("source '" + source.source_id + "': query and gold answer must be non-empty");
    AlignmentReport report;
    if (source.documents.empty()) return report;

    auto reply = gateway.complete_structured(
        llm::prompt_ids::alignment,
        {{"gold_answer", source.gold_answer}, {"documents", render_documents(source.documents)}});
    const auto& j = reply.parsed;

    std::set<std::string> seen;
    for (const auto& c : j["key_claims"]) {
        auto claim = text::trim(c.get<std::string>());
        if (claim.empty() || !seen.insert(detail::norm_claim(claim)).second) continue;
        if (report.key_claims.size() == 5) break;
        report.key_claims.push_back(std::move(claim));
    }
    std::set<std::string> supported;
    for (const auto& c : j["supported_claims"]) supported.insert(detail::norm_claim(c.get<std::string>()));
    for (const auto& claim : report.key_claims) {
        if (supported.count(detail::norm_claim(claim))) report.supported_claims.push_back(claim);
        else report.unsupported_claims.push_back(claim);
    }
    if (!report.key_claims.empty()) {
        report.coverage_percentage =
            static_cast<double>(report.supported_claims.size()) / static_cast<double>(report.key_claims.size());
    } else {
        report.coverage_percentage = std::clamp(j["coverage_percentage"].get<double>(), 0.0, 1.0);
    }
    report.is_sufficient = j["is_sufficient"].get<bool>();
    return report;
}

/// Overlap check against accepted aspects, then the suitability filter.
inline ScreenVerdict screen_aspect(const Aspect& candidate, const std::vector<Aspect>& existing, llm::Gateway& gateway) {
    if (text::trim(candidate.excerpt).empty() || text::trim(candidate.aspect_name).empty())
        throw PreconditionError("aspect candidate must have a name and an excerpt");
    try {
        if (!existing.empty()) {
            auto overlap = gateway.complete_structured(llm::prompt_ids::overlap,
                                                       {{"aspect_name", candidate.aspect_name},
                                                        {"aspect_type", to_string(candidate.aspect_type)},
                                                        {"excerpt", candidate.excerpt},
                                                        {"existing_aspects_text", detail::render_existing(existing)}});
            if (overlap.parsed["has_overlap"].get<bool>()) {
                auto type = overlap.parsed["overlap_type"].get<std::string>();
                return ScreenVerdict::reject(type == "no_overlap" ? "overlap" : type);
            }
        }
        auto suit = gateway.complete_structured(llm::prompt_ids::suitability,
                                                {{"aspect_name", candidate.aspect_name},
                                                 {"aspect_type", to_string(candidate.aspect_type)},
                                                 {"excerpt", candidate.excerpt}});
        auto category = suit.parsed["aspect_category"].get<std::string>();
        if (category != "substantive") return ScreenVerdict::reject(category);
        if (!suit.parsed["should_generate"].get<bool>()) return ScreenVerdict::reject("not_suitable");
        return ScreenVerdict::accept();
    } catch (const ValidationError& e) {
        return ScreenVerdict::reject(std::string("gateway: ") + e.what(), true);
    } catch (const ServiceError& e) {
        return ScreenVerdict::reject(std::string("gateway: ") + e.what(), true);
    }
}

struct ExtractionResult {
    std::vector<Aspect> accepted;
    std::vector<Rejection> rejected;
};

/// One extraction round: asks for up to `batch` new aspects and keeps the
/// ones that are verbatim, well-typed and pass screening.
inline ExtractionResult extract_aspects(const SourceRecord& source, const std::vector<Aspect>& existing,
                                        std::size_t batch, llm::Gateway& gateway) {
    if (batch == 0) throw PreconditionError("batch must be at least 1");
    if (text::trim(source.gold_answer).empty()) throw PreconditionError("source '" + source.source_id + "': empty gold answer");

    auto reply = gateway.complete_structured(llm::prompt_ids::aspects,
                                             {{"num_aspects", std::to_string(batch)},
                                              {"query", source.query},
                                              {"reasoning", source.overall_reasoning},
                                              {"gold_answer", source.gold_answer},
                                              {"existing_aspects", detail::render_existing(existing)}});
    ExtractionResult out;
    auto known = existing;
    for (const auto& item : reply.parsed["aspects"]) {
        if (out.accepted.size() == batch) break;
        Aspect a;
        a.aspect_name = text::trim(item["aspect_name"].get<std::string>());
        a.excerpt = text::trim(item["excerpt"].get<std::string>());
        if (auto cov = item.find("coverage"); cov != item.end() && cov->is_number())
            a.coverage = std::clamp(cov->get<double>(), 0.0, 1.0);
        auto type = parse_aspect_type(item["aspect_type"].get<std::string>());
        if (!type) {
            out.rejected.push_back({a.aspect_name, "unknown_aspect_type"});
            continue;
        }
        a.aspect_type = *type;
        if (a.aspect_name.empty() || !excerpt_in_answer(a.excerpt, source.gold_answer)) {
            out.rejected.push_back({a.aspect_name, "excerpt_not_in_answer"});
            continue;
        }
        auto verdict = screen_aspect(a, known, gateway);
        if (!verdict.accepted) {
            out.rejected.push_back({a.aspect_name, verdict.reason, verdict.transient});
            continue;
        }
        a.order_index = static_cast<int>(known.size());
        known.push_back(a);
        out.accepted.push_back(std::move(a));
    }
    return out;
}

/// Repeats extraction rounds until `target` aspects are accepted or a round adds nothing.
inline ExtractionResult extract_all_aspects(const SourceRecord& source, std::size_t target, llm::Gateway& gateway) {
    ExtractionResult all;
    while (all.accepted.size() < target) {
        auto round = extract_aspects(source, all.accepted, target - all.accepted.size(), gateway);
        all.rejected.insert(all.rejected.end(), round.rejected.begin(), round.rejected.end());
        if (round.accepted.empty()) break;
        all.accepted.insert(all.accepted.end(), round.accepted.begin(), round.accepted.end());
    }
    return all;
}

inline bool is_permutation_of_n(const std::vector<long long>& v, std::size_t n) {
    if (v.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto x : v) {
        if (x < 0 || static_cast<std::size_t>(x) >= n || seen[static_cast<std::size_t>(x)]) return false;
        seen[static_cast<std::size_t>(x)] = true;
    }
    return true;
}

inline constexpr const char* default_ordering_note =
    "Start from what the topic is, move through how it works and why, then examples, and end with implications.";

/// Conversation order for `aspects` as a permutation of their indices. An
/// invalid answer is retried once; after that the input order is kept.
inline std::vector<std::size_t> order_aspects(const std::vector<Aspect>& aspects, std::string_view strategy_note,
                                              llm::Gateway& gateway) {
    if (aspects.empty()) throw PreconditionError("order_aspects needs at least one aspect");
    std::vector<std::size_t> identity(aspects.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    if (aspects.size() == 1) return identity;

    std::string summaries;
    for (std::size_t i = 0; i < aspects.size(); ++i) {
        if (i) summaries += '\n';
        summaries += std::to_string(i) + ". [" + to_string(aspects[i].aspect_type) + "] " + aspects[i].aspect_name;
    }
    llm::Variables vars{{"conversation_strategy", std::string(strategy_note)}, {"aspect_summaries", summaries}};
    std::string note;
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            auto reply = gateway.complete_structured(llm::prompt_ids::ordering, vars, note);
            auto indices = reply.parsed["ordered_indices"].get<std::vector<long long>>();
            if (is_permutation_of_n(indices, aspects.size())) return {indices.begin(), indices.end()};
        } catch (const Error& e) {
            spdlog::warn("aspect ordering failed: {}", e.what());
            return identity;
        }
        note = "ordered_indices must list every index from 0 to " + std::to_string(aspects.size() - 1) +
               " exactly once.";
    }
    spdlog::warn("aspect ordering returned no valid permutation; keeping input order");
    return identity;
}

/// Applies an ordering and renumbers order_index to match.
inline std::vector<Aspect> apply_order(const std::vector<Aspect>& aspects, const std::vector<std::size_t>& order) {
    std::vector<Aspect> out;
    out.reserve(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        out.push_back(aspects.at(order[pos]));
        out.back().order_index = static_cast<int>(pos);
    }
    return out;
}

}  // namespace convbench::decompose
