#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "convbench/corpus.hpp"
#include "convbench/errors.hpp"
#include "convbench/retrieval/bm25.hpp"
#include "convbench/text.hpp"

namespace convbench::retrieval {

/// Embedding service contract: {texts} -> {vectors, dim}.
class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;
    /// Throws ServiceError when the service cannot be reached or replies badly.
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic offline embedder: feature-hashed term counts with a salt so
/// that differently named mock encoders disagree a little.
class HashingEmbeddingClient : public EmbeddingClient {
public:
    explicit HashingEmbeddingClient(std::string salt = {}, std::size_t dim = 256) : salt_(std::move(salt)), dim_(dim) {
        if (dim_ == 0) throw PreconditionError("embedding dimension must be positive");
    }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        std::vector<std::vector<double>> out;
        out.reserve(texts.size());
        for (const auto& t : texts) {
            std::vector<double> v(dim_, 0.0);
            for (const auto& tok : text::tokenize(t)) {
                auto h = text::fnv1a64(tok, text::fnv1a64(salt_));
                v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
            }
            out.push_back(std::move(v));
        }
        return out;
    }

private:
    std::string salt_;
    std::size_t dim_;
};

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ServiceError("embedding dimensions differ", "embedding");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

class Retriever {
public:
    virtual ~Retriever() = default;
    virtual const std::string& id() const = 0;
    virtual std::vector<ScoredDoc> search(const std::string& query, std::size_t k) = 0;
};

class Bm25Retriever : public Retriever {
public:
    Bm25Retriever(std::string id, std::shared_ptr<const Bm25Index> index) : id_(std::move(id)), index_(std::move(index)) {}
    const std::string& id() const override { return id_; }
    std::vector<ScoredDoc> search(const std::string& query, std::size_t k) override { return index_->search(query, k); }

private:
    std::string id_;
    std::shared_ptr<const Bm25Index> index_;
};

/// Exact cosine top-k over service-produced document vectors.
class DenseRetriever : public Retriever {
public:
    DenseRetriever(std::string id, std::shared_ptr<EmbeddingClient> client)
        : id_(std::move(id)), client_(std::move(client)) {
        if (!client_) throw PreconditionError("dense retriever '" + id_ + "' needs an embedding client");
    }

    void build(const corpus::Corpus& corpus, std::size_t batch_size = 64) {
        if (corpus.size() == 0) throw PreconditionError("cannot index an empty corpus");
        ids_.clear();
        vectors_.clear();
        std::vector<std::string> batch;
        auto flush = [&] {
            if (batch.empty()) return;
            auto vs = embed(batch);
            if (vs.size() != batch.size()) throw ServiceError("embedding count mismatch", id_);
            for (auto& v : vs) vectors_.push_back(std::move(v));
            batch.clear();
        };
        for (const auto& d : corpus) {
            ids_.push_back(d.doc_id);
            batch.push_back(d.text);
            if (batch.size() == batch_size) flush();
        }
        flush();
    }

    const std::string& id() const override { return id_; }

    std::vector<ScoredDoc> search(const std::string& query, std::size_t k) override {
        if (k == 0) throw PreconditionError("k must be >= 1");
        if (ids_.empty()) throw PreconditionError("dense retriever '" + id_ + "' has not been built");
        auto q = embed({query});
        if (q.size() != 1) throw ServiceError("embedding count mismatch", id_);
        std::vector<ScoredDoc> all;
        all.reserve(ids_.size());
        for (std::size_t i = 0; i < ids_.size(); ++i) all.push_back({ids_[i], cosine(q[0], vectors_[i])});
        const std::size_t top = std::min(k, all.size());
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(top), all.end(), ranks_before);
        all.resize(top);
        return all;
    }

private:
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) {
        try {
            return client_->embed(texts);
        } catch (const ServiceError& e) {
            throw ServiceError(std::string(e.what()), id_);
        }
    }

    std::string id_;
    std::shared_ptr<EmbeddingClient> client_;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> vectors_;
};

}  // namespace convbench::retrieval
