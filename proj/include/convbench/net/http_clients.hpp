#pragma once

// Requires the vendored cpp-httplib on the include path. Define
// CPPHTTPLIB_OPENSSL_SUPPORT (and link OpenSSL) for https endpoints.

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "convbench/errors.hpp"
#include "convbench/gen_eval.hpp"
#include "convbench/llm/gateway.hpp"
#include "convbench/mining.hpp"
#include "convbench/retrieval/dense.hpp"

namespace convbench::net {

struct Endpoint {
    std::string url;  // scheme://host[:port]/path
    std::string api_key;
    std::chrono::seconds timeout{120};
};

struct SplitUrl {
    std::string origin;
    std::string path;
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw PreconditionError("endpoint '" + url + "' lacks a scheme");
    auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

/// POSTs a JSON body and parses a JSON reply; any transport, status or
/// parse problem becomes a ServiceError naming `service`.
inline nlohmann::json post_json(const Endpoint& ep, const nlohmann::json& body, const std::string& service) {
    auto [origin, path] = split_url(ep.url);
    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(ep.timeout);
    client.set_write_timeout(ep.timeout);
    httplib::Headers headers;
    if (!ep.api_key.empty()) headers.emplace("Authorization", "Bearer " + ep.api_key);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) throw ServiceError("request to " + ep.url + " failed: " + httplib::to_string(res.error()), service);
    if (res->status < 200 || res->status >= 300)
        throw ServiceError("HTTP " + std::to_string(res->status) + " from " + ep.url, service);
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw ServiceError("non-JSON reply from " + ep.url, service);
    return j;
}

inline std::string text_field(const nlohmann::json& j, const std::string& service) {
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string())
        throw ServiceError("reply lacks a string 'text' field", service);
    return j["text"].get<std::string>();
}

/// LLM provider: {model_name, prompt_text, temperature, max_tokens} -> {text}.
class HttpProvider : public llm::Provider {
public:
    explicit HttpProvider(Endpoint ep) : ep_(std::move(ep)) {}
    std::string complete(const llm::ProviderRequest& r) override {
        return text_field(post_json(ep_,
                                    {{"model_name", r.model_name},
                                     {"prompt_text", r.prompt_text},
                                     {"temperature", r.temperature},
                                     {"max_tokens", r.max_tokens}},
                                    "llm"),
                          "llm");
    }

private:
    Endpoint ep_;
};

/// Answer generator: {prompt} -> {text}.
class HttpGenerator : public llm::Provider {
public:
    explicit HttpGenerator(Endpoint ep) : ep_(std::move(ep)) {}
    std::string complete(const llm::ProviderRequest& r) override {
        return text_field(post_json(ep_, {{"prompt", r.prompt_text}}, "generator"), "generator");
    }

private:
    Endpoint ep_;
};

inline std::vector<std::vector<double>> parse_vectors(const nlohmann::json& j, std::size_t expected,
                                                      const std::string& service) {
    if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array())
        throw ServiceError("reply lacks 'vectors'", service);
    std::vector<std::vector<double>> out;
    try {
        out = j["vectors"].get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception&) {
        throw ServiceError("'vectors' is not a list of number arrays", service);
    }
    if (out.size() != expected)
        throw ServiceError("expected " + std::to_string(expected) + " vectors, got " + std::to_string(out.size()), service);
    if (j.contains("dim") && j["dim"].is_number_integer()) {
        auto dim = j["dim"].get<std::size_t>();
        for (const auto& v : out)
            if (v.size() != dim) throw ServiceError("vector length differs from dim", service);
    }
    return out;
}

/// Embedding service: {texts} -> {vectors, dim}.
class HttpEmbeddingClient : public retrieval::EmbeddingClient {
public:
    explicit HttpEmbeddingClient(Endpoint ep) : ep_(std::move(ep)) {}
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        return parse_vectors(post_json(ep_, {{"texts", texts}}, "embedding"), texts.size(), "embedding");
    }

private:
    Endpoint ep_;
};

/// External lexical scorer, same wire shape as embeddings: the candidate and
/// reference go in as two texts, one [meteor, bertscore] vector comes back.
class HttpScorerClient : public gen::ScorerClient {
public:
    explicit HttpScorerClient(Endpoint ep) : ep_(std::move(ep)) {}
    Scores score(const std::string& candidate, const std::string& reference) override {
        auto v = parse_vectors(post_json(ep_, {{"texts", {candidate, reference}}}, "scorer"), 1, "scorer");
        if (v[0].size() < 2) throw ServiceError("scorer vector needs [meteor, bertscore]", "scorer");
        return {v[0][0], v[0][1]};
    }

private:
    Endpoint ep_;
};

/// Web search: {query, max_results, exclude_urls} -> [{url, text}] (or {results: [...]}).
class HttpSearchClient : public corpus::SearchClient {
public:
    explicit HttpSearchClient(Endpoint ep) : ep_(std::move(ep)) {}
    std::vector<corpus::WebPage> search(const corpus::SearchRequest& req) override {
        auto j = post_json(ep_, {{"query", req.query}, {"max_results", req.max_results}, {"exclude_urls", req.exclude_urls}},
                           "search");
        const auto& list = j.is_object() && j.contains("results") ? j["results"] : j;
        if (!list.is_array()) throw ServiceError("reply is not a result list", "search");
        std::vector<corpus::WebPage> out;
        for (const auto& p : list) {
            if (!p.is_object() || !p.contains("url") || !p.contains("text"))
                throw ServiceError("result lacks url/text", "search");
            out.push_back({p["url"].get<std::string>(), p["text"].get<std::string>()});
        }
        return out;
    }

private:
    Endpoint ep_;
};

}  // namespace convbench::net
