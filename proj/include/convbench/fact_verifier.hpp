#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convbench/decomposer.hpp"
#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/source.hpp"

namespace convbench::facts {

struct AtomicFact {
    std::string fact;
    bool is_supported = false;
    std::optional<std::string> supporting_doc_id;
    std::string reason;
};

struct FactReport {
    std::string aspect_ref;
    std::vector<AtomicFact> extracted;
    int supported_count = 0;
    int total_count = 0;
    bool survives = false;
    bool transient = false;  // set when the gateway failed rather than the facts

    std::vector<std::string> supported_facts() const {
        std::vector<std::string> out;
        for (const auto& f : extracted)
            if (f.is_supported) out.push_back(f.fact);
        return out;
    }
};

inline constexpr std::size_t max_facts_per_aspect = 5;

/// Extracts up to five atomic facts from the aspect excerpt and keeps the
/// model's support verdicts, subject to local rules: a supported fact must
/// name a document of this record, and an excerpt quoted verbatim by a
/// document makes all of its facts supported by that document.
inline FactReport extract_and_verify_facts(const decompose::Aspect& aspect, const std::vector<corpus::Document>& documents,
                                           llm::Gateway& gateway) {
    if (text::trim(aspect.excerpt).empty()) throw PreconditionError("aspect '" + aspect.aspect_name + "' has an empty excerpt");
    if (documents.empty()) throw PreconditionError("fact verification needs at least one document");

    FactReport report;
    report.aspect_ref = aspect.aspect_name;
    nlohmann::json reply;
    try {
        reply = gateway.complete_structured(llm::prompt_ids::facts, {{"aspect_excerpt", aspect.excerpt},
                                                                     {"documents", render_documents(documents)}})
                    .parsed;
    } catch (const Error& e) {
        spdlog::warn("fact verification failed for aspect '{}': {}", aspect.aspect_name, e.what());
        report.transient = true;
        return report;
    }

    auto known_doc = [&](const std::string& id) {
        for (const auto& d : documents)
            if (d.doc_id == id) return true;
        return false;
    };
    std::optional<std::string> verbatim_doc;
    auto excerpt = text::normalize_whitespace(aspect.excerpt);
    for (const auto& d : documents) {
        if (text::contains_ci(text::normalize_whitespace(d.text), excerpt)) {
            verbatim_doc = d.doc_id;
            break;
        }
    }

    for (const auto& item : reply["extracted_facts"]) {
        if (report.extracted.size() == max_facts_per_aspect) break;
        AtomicFact f;
        f.fact = text::trim(item["fact"].get<std::string>());
        if (f.fact.empty()) continue;
        f.is_supported = item["is_supported"].get<bool>();
        if (item["supporting_doc_id"].is_string()) f.supporting_doc_id = item["supporting_doc_id"].get<std::string>();
        f.reason = item.value("reason", "");
        if (f.is_supported && (!f.supporting_doc_id || !known_doc(*f.supporting_doc_id))) {
            f.is_supported = false;
            f.reason += f.reason.empty() ? "no resolvable supporting document" : " (no resolvable supporting document)";
        }
        if (!f.is_supported && verbatim_doc) {
            f.is_supported = true;
            f.supporting_doc_id = verbatim_doc;
        }
        if (!f.is_supported) f.supporting_doc_id.reset();
        report.extracted.push_back(std::move(f));
    }
    report.total_count = static_cast<int>(report.extracted.size());
    for (const auto& f : report.extracted) report.supported_count += f.is_supported ? 1 : 0;
    report.survives = report.supported_count >= 1;
    return report;
}

struct SupportSummary {
    int supported = 0;
    int total = 0;
    double verification_rate = 0.0;
    int surviving_aspects = 0;
};

inline SupportSummary support_summary(const std::vector<FactReport>& reports) {
    if (reports.empty()) throw PreconditionError("support_summary needs at least one report");
    SupportSummary s;
    for (const auto& r : reports) {
        s.supported += r.supported_count;
        s.total += r.total_count;
        s.surviving_aspects += r.survives ? 1 : 0;
    }
    s.verification_rate = s.total ? static_cast<double>(s.supported) / s.total : 0.0;
    return s;
}

}  // namespace convbench::facts
