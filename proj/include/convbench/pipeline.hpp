#pragma once

#include <optional>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "convbench/decomposer.hpp"
#include "convbench/fact_verifier.hpp"
#include "convbench/parallel.hpp"
#include "convbench/turn_forge.hpp"

namespace convbench {

struct SynthesisConfig {
    std::size_t target_aspects = 6;
    std::string ordering_note = decompose::default_ordering_note;
    forge::ForgeConfig forge;
    std::size_t workers = 4;
};

struct SynthesisOutcome {
    std::string source_id;
    decompose::AlignmentReport alignment;
    std::vector<decompose::Aspect> aspects;  // in conversation order
    std::vector<decompose::Rejection> rejected_aspects;
    std::vector<facts::FactReport> fact_reports;
    std::optional<forge::Conversation> conversation;
    std::string rejection;  // empty when a conversation was produced
    std::vector<std::string> skipped;
};

/// Full decomposition-and-verification run for one source record.
inline SynthesisOutcome synthesize(const SourceRecord& source, llm::Gateway& gateway, const SynthesisConfig& config = {}) {
    source.check();
    SynthesisOutcome out;
    out.source_id = source.source_id;

    out.alignment = decompose::validate_alignment(source, gateway);
    if (!out.alignment.is_sufficient) {
        out.rejection = "insufficient_alignment";
        return out;
    }

    auto extracted = decompose::extract_all_aspects(source, config.target_aspects, gateway);
    out.rejected_aspects = std::move(extracted.rejected);
    if (extracted.accepted.empty()) {
        out.rejection = "no_aspects";
        return out;
    }
    auto order = decompose::order_aspects(extracted.accepted, config.ordering_note, gateway);
    out.aspects = decompose::apply_order(extracted.accepted, order);

    out.fact_reports = parallel_map(out.aspects.size(), config.workers, [&](std::size_t i) {
        return facts::extract_and_verify_facts(out.aspects[i], source.documents, gateway);
    });

    auto assembled = forge::assemble_conversation(source, out.aspects, out.fact_reports, gateway, config.forge);
    out.skipped = std::move(assembled.skipped);
    if (assembled.rejection) {
        out.rejection = forge::to_string(*assembled.rejection) + (assembled.detail.empty() ? "" : ": " + assembled.detail);
        return out;
    }
    out.conversation = std::move(assembled.conversation);
    return out;
}

/// Runs every source; one source's failure never stops the others. Output
/// order follows input order.
inline std::vector<SynthesisOutcome> synthesize_all(const std::vector<SourceRecord>& sources, llm::Gateway& gateway,
                                                    const SynthesisConfig& config = {}) {
    auto inner = config;
    inner.workers = 1;
    return parallel_map(sources.size(), config.workers, [&](std::size_t i) {
        try {
            return synthesize(sources[i], gateway, inner);
        } catch (const Error& e) {
            spdlog::warn("source '{}' failed: {}", sources[i].source_id, e.what());
            SynthesisOutcome o;
            o.source_id = sources[i].source_id;
            o.rejection = std::string("error: ") + e.what();
            return o;
        }
    });
}

}  // namespace convbench
