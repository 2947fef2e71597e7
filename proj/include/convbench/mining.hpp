#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/source.hpp"
#include "convbench/text.hpp"

namespace convbench::corpus {

struct MiningConfig {
    std::size_t queries_per_source = 5;
    std::size_t passage_target_len = 200;  // words
    double overlap_threshold = 0.8;        // 3-word shingle Jaccard
    std::set<std::string> excluded_urls;
    std::size_t max_results = 10;          // per search query
    std::string domain;                    // stamped onto produced passages

    void check() const {
        if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0))
            throw PreconditionError("overlap_threshold must be in (0, 1]");
        if (passage_target_len == 0) throw PreconditionError("passage_target_len must be positive");
    }
};

struct WebPage {
    std::string url;
    std::string text;
};

struct SearchRequest {
    std::string query;
    std::size_t max_results = 10;
    std::vector<std::string> exclude_urls;
};

class SearchClient {
public:
    virtual ~SearchClient() = default;
    /// Throws ServiceError when the backend fails.
    virtual std::vector<WebPage> search(const SearchRequest& request) = 0;
};

/// Canned search backend. A rule answers every query containing its needle
/// (case-insensitive); an empty needle matches everything. Honors exclude_urls.
class MockSearchClient : public SearchClient {
public:
    struct Rule {
        std::string needle;
        std::vector<WebPage> pages;
        bool fail = false;
    };

    void add(Rule rule) { rules_.push_back(std::move(rule)); }

    /// Lines: {"query_contains": "...", "pages": [{"url","text"}], "fail": false}
    static std::shared_ptr<MockSearchClient> from_file(const std::filesystem::path& path) {
        auto mock = std::make_shared<MockSearchClient>();
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open search fixture " + path.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (text::trim(line).empty()) continue;
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object()) throw ParseError("malformed search fixture", lineno);
            Rule r;
            r.needle = j.value("query_contains", "");
            r.fail = j.value("fail", false);
            for (const auto& p : j.value("pages", nlohmann::json::array()))
                r.pages.push_back({p.at("url").get<std::string>(), p.at("text").get<std::string>()});
            mock->add(std::move(r));
        }
        return mock;
    }

    std::vector<WebPage> search(const SearchRequest& req) override {
        {
            std::lock_guard lock(mutex_);
            requests_.push_back(req);
        }
        for (const auto& r : rules_) {
            if (!r.needle.empty() && !text::contains_ci(req.query, r.needle)) continue;
            if (r.fail) throw ServiceError("search backend failure", "mock-search");
            std::vector<WebPage> out;
            for (const auto& p : r.pages) {
                bool excluded = false;
                for (const auto& u : req.exclude_urls) excluded = excluded || u == p.url;
                if (!excluded) out.push_back(p);
                if (out.size() >= req.max_results) break;
            }
            return out;
        }
        return {};
    }

    std::vector<SearchRequest> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

private:
    std::vector<Rule> rules_;
    mutable std::mutex mutex_;
    std::vector<SearchRequest> requests_;
};

/// Splits a page into passages of roughly `target_words` words at sentence
/// boundaries. A trailing piece shorter than half the target is merged into
/// the previous passage of the same page.
inline std::vector<std::string> segment_page(std::string_view page_text, std::size_t target_words) {
    std::vector<std::string> passages;
    std::string cur;
    std::size_t cur_words = 0;
    for (auto& sentence : text::split_sentences(page_text)) {
        if (!cur.empty()) cur.push_back(' ');
        cur += sentence;
        cur_words += text::word_count(sentence);
        if (cur_words >= target_words) {
            passages.push_back(std::move(cur));
            cur.clear();
            cur_words = 0;
        }
    }
    if (cur_words > 0) {
        if (cur_words * 2 < target_words && !passages.empty()) passages.back() += " " + cur;
        else passages.push_back(std::move(cur));
    }
    return passages;
}

inline std::string passage_id(std::string_view url, std::string_view passage) {
    auto h = text::fnv1a64(url);
    h = text::fnv1a64("\n", h);
    h = text::fnv1a64(passage, h);
    return "psg_" + text::hex64(h);
}

/// Segments pages into passages, then drops passages from excluded urls, exact
/// duplicates (case/whitespace-insensitive) and any passage whose shingle
/// Jaccard with an already retained passage exceeds the threshold.
inline std::vector<Document> segment_and_dedup(const std::vector<WebPage>& pages, const MiningConfig& config) {
    config.check();
    std::vector<Document> kept;
    std::vector<std::unordered_set<std::string>> kept_shingles;
    std::unordered_set<std::string> exact;
    for (const auto& page : pages) {
        if (config.excluded_urls.count(page.url)) continue;
        for (auto& passage : segment_page(page.text, config.passage_target_len)) {
            auto tokens = text::tokenize(passage);
            if (tokens.empty()) continue;
            std::string key;
            for (const auto& t : tokens) key += t + ' ';
            if (!exact.insert(key).second) continue;
            auto sh = text::shingles(tokens, 3);
            bool near_dup = false;
            for (const auto& other : kept_shingles) {
                if (text::jaccard(sh, other) > config.overlap_threshold) {
                    near_dup = true;
                    break;
                }
            }
            if (near_dup) continue;
            Document d;
            d.doc_id = passage_id(page.url, passage);
            d.domain = config.domain;
            d.text = std::move(passage);
            d.source_url = page.url;
            d.is_positive = false;
            kept.push_back(std::move(d));
            kept_shingles.push_back(std::move(sh));
        }
    }
    return kept;
}

struct MiningResult {
    std::vector<std::string> queries;
    std::vector<Document> documents;
    std::size_t search_failures = 0;
    std::string diagnostic;
};

/// Query-based hard-negative mining: the LLM proposes related-but-unhelpful
/// queries, search results (minus the source's positive urls) are segmented
/// and deduplicated across all queries, and every survivor is flagged negative.
inline MiningResult mine_hard_negatives(const SourceRecord& source, llm::Gateway& gateway, SearchClient& search,
                                        MiningConfig config) {
    config.check();
    if (source.documents.empty()) throw PreconditionError("source '" + source.source_id + "' has no positive documents");
    std::set<std::string> positive_urls;
    for (const auto& d : source.documents)
        if (d.source_url) positive_urls.insert(*d.source_url);

    MiningResult result;
    auto reply = gateway.complete_structured(llm::prompt_ids::negative_queries,
                                             {{"num_queries", std::to_string(config.queries_per_source)},
                                              {"query", source.query},
                                              {"gold_answer", source.gold_answer}});
    for (const auto& q : reply.parsed["queries"]) {
        if (result.queries.size() >= config.queries_per_source) break;
        auto s = text::trim(q.get<std::string>());
        if (!s.empty()) result.queries.push_back(std::move(s));
    }

    SearchRequest req;
    req.max_results = config.max_results;
    req.exclude_urls.assign(positive_urls.begin(), positive_urls.end());
    for (const auto& u : config.excluded_urls)
        if (!positive_urls.count(u)) req.exclude_urls.push_back(u);

    std::vector<WebPage> pages;
    for (const auto& q : result.queries) {
        req.query = q;
        try {
            for (auto& p : search.search(req))
                if (!positive_urls.count(p.url)) pages.push_back(std::move(p));
        } catch (const ServiceError& e) {
            ++result.search_failures;
            spdlog::warn("search failed for '{}': {}", q, e.what());
        }
    }

    config.excluded_urls.insert(positive_urls.begin(), positive_urls.end());
    if (config.domain.empty()) config.domain = source.domain;
    result.documents = segment_and_dedup(pages, config);
    if (result.documents.empty())
        result.diagnostic = "no passages survived for source '" + source.source_id + "' (" +
                            std::to_string(pages.size()) + " pages fetched, " +
                            std::to_string(result.search_failures) + " search failures)";
    return result;
}

}  // namespace convbench::corpus
