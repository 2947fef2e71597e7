#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"
#include "convbench/text.hpp"

namespace convbench::retrieval {

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;
};

/// Orders by score descending, then doc_id ascending.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

struct IndexConfig {
    double k1 = 0.9;
    double b = 0.4;

    void check() const {
        if (!(k1 > 0.0)) throw PreconditionError("k1 must be positive");
        if (!(b >= 0.0 && b <= 1.0)) throw PreconditionError("b must be in [0, 1]");
    }
};

/// Okapi BM25 over lowercase unicode word tokens. Immutable after build, so
/// concurrent searches need no locking.
class Bm25Index {
public:
    static Bm25Index build(const corpus::Corpus& corpus, IndexConfig config = {}) {
        std::vector<std::pair<std::string, std::string>> docs;
        docs.reserve(corpus.size());
        for (const auto& d : corpus) docs.emplace_back(d.doc_id, d.text);
        return build(docs, config);
    }

    /// (doc_id, text) pairs; doc ids must be unique.
    static Bm25Index build(const std::vector<std::pair<std::string, std::string>>& docs, IndexConfig config = {}) {
        config.check();
        if (docs.empty()) throw PreconditionError("cannot index an empty corpus");
        Bm25Index idx;
        idx.config_ = config;
        idx.ids_.reserve(docs.size());
        idx.lengths_.reserve(docs.size());
        double total = 0.0;
        std::unordered_map<std::string, std::uint32_t> tf;
        for (std::uint32_t i = 0; i < docs.size(); ++i) {
            idx.ids_.push_back(docs[i].first);
            auto tokens = text::tokenize(docs[i].second);
            idx.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
            total += static_cast<double>(tokens.size());
            tf.clear();
            for (auto& t : tokens) ++tf[std::move(t)];
            for (auto& [term, count] : tf) {
                auto [it, fresh] = idx.terms_.try_emplace(term, static_cast<std::uint32_t>(idx.postings_.size()));
                if (fresh) idx.postings_.emplace_back();
                idx.postings_[it->second].push_back({i, count});
            }
        }
        idx.avg_length_ = total / static_cast<double>(docs.size());
        idx.by_id_.resize(docs.size());
        for (std::uint32_t i = 0; i < docs.size(); ++i) idx.by_id_[i] = i;
        std::sort(idx.by_id_.begin(), idx.by_id_.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return idx.ids_[a] < idx.ids_[b]; });
        for (std::size_t i = 1; i < idx.by_id_.size(); ++i)
            if (idx.ids_[idx.by_id_[i]] == idx.ids_[idx.by_id_[i - 1]])
                throw ConflictError(idx.ids_[idx.by_id_[i]]);
        return idx;
    }

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t vocabulary_size() const noexcept { return terms_.size(); }
    double average_length() const noexcept { return avg_length_; }
    const IndexConfig& config() const noexcept { return config_; }

    std::size_t document_frequency(const std::string& term) const {
        auto it = terms_.find(term);
        return it == terms_.end() ? 0 : postings_[it->second].size();
    }

    double idf(std::size_t df) const {
        const double n = static_cast<double>(ids_.size());
        const double d = static_cast<double>(df);
        return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
    }

    /// Top-k by BM25; when fewer than k documents match, the remainder is
    /// filled with zero-score documents in doc_id order.
    std::vector<ScoredDoc> search(std::string_view query, std::size_t k) const {
        if (k == 0) throw PreconditionError("k must be >= 1");
        std::map<std::string, int> qtf;
        for (auto& t : text::tokenize(query)) ++qtf[std::move(t)];

        std::vector<double> acc(ids_.size(), 0.0);
        std::vector<std::uint32_t> touched;
        for (const auto& [term, qcount] : qtf) {
            auto it = terms_.find(term);
            if (it == terms_.end()) continue;
            const auto& plist = postings_[it->second];
            const double w = qcount * idf(plist.size());
            for (const auto& p : plist) {
                const double tf = p.tf;
                const double norm = config_.k1 * (1.0 - config_.b + config_.b * lengths_[p.doc] / avg_length_);
                if (acc[p.doc] == 0.0) touched.push_back(p.doc);
                acc[p.doc] += w * tf * (config_.k1 + 1.0) / (tf + norm);
            }
        }

        std::vector<ScoredDoc> hits;
        hits.reserve(touched.size());
        for (auto d : touched) hits.push_back({ids_[d], acc[d]});
        const std::size_t top = std::min(k, hits.size());
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top), hits.end(), ranks_before);
        hits.resize(top);
        for (std::size_t i = 0; i < by_id_.size() && hits.size() < k; ++i)
            if (acc[by_id_[i]] == 0.0) hits.push_back({ids_[by_id_[i]], 0.0});
        return hits;
    }

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    IndexConfig config_;
    std::vector<std::string> ids_;
    std::vector<std::uint32_t> lengths_;
    std::vector<std::uint32_t> by_id_;
    double avg_length_ = 0.0;
    std::unordered_map<std::string, std::uint32_t> terms_;
    std::vector<std::vector<Posting>> postings_;
};

}  // namespace convbench::retrieval
