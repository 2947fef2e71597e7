#include <atomic>
#include <chrono>
#include <thread>

#include <gtest/gtest.h>

#include "convbench/llm/gateway.hpp"
#include "convbench/llm/mock_provider.hpp"
#include "convbench/parallel.hpp"
#include "test_support.hpp"

using namespace convbench;
using namespace convbench::llm;
using testing_support::MockGateway;

TEST(Template, RendersPlaceholdersAndKeepsJsonBraces) {
    PromptTemplate t("t", "Hello {name}!\n{\n  \"k\": \"{ not a var }\"\n}");
    EXPECT_EQ(t.placeholders(), (std::vector<std::string>{"name"}));
    EXPECT_EQ(t.render({{"name", "Ada"}}), "Hello Ada!\n{\n  \"k\": \"{ not a var }\"\n}");
}

TEST(Template, UnboundPlaceholderThrows) {
    PromptTemplate t("t", "{a} and {b}");
    try {
        t.render({{"a", "x"}});
        FAIL();
    } catch (const TemplateError& e) {
        EXPECT_NE(std::string(e.what()).find("{b}"), std::string::npos);
    }
}

TEST(Template, SubstitutedValuesAreNotRescanned) {
    PromptTemplate t("t", "{a}");
    EXPECT_EQ(t.render({{"a", "{b}"}}), "{b}");
}

TEST(Registry, BuiltinHasEveryTemplateInItsGroup) {
    const auto& r = TemplateRegistry::builtin();
    EXPECT_EQ(r.ids(PromptGroup::pipeline).size(), 12u);
    EXPECT_EQ(r.ids(PromptGroup::audit).size(), 6u);
    EXPECT_EQ(r.ids(PromptGroup::auxiliary).size(), 6u);
    EXPECT_THROW(r.get("nope"), TemplateError);
    for (const auto& t : r.all()) EXPECT_FALSE(t.placeholders().empty()) << t.id();
}

TEST(Registry, PipelineTemplatesKeepPublishedOpenings) {
    const auto& r = TemplateRegistry::builtin();
    EXPECT_EQ(r.get(prompt_ids::alignment).body().rfind("You are evaluating whether documents can support an answer.", 0), 0u);
    EXPECT_EQ(r.get(prompt_ids::scoring).body().rfind("Score how well each document helps answer the sub-question.", 0), 0u);
    EXPECT_EQ(r.get(prompt_ids::naturalness).body().rfind("Evaluate whether this conversation sounds like NATURAL HUMAN SPEECH.", 0),
              0u);
    EXPECT_NE(r.get(prompt_ids::scoring).body().find("score = 0.5 × S_s + 0.3 × S_c + 0.15 × S_l − 0.05 × S_m"),
              std::string::npos);
}

TEST(Registry, DuplicateIdConflicts) {
    TemplateRegistry r;
    r.add(PromptTemplate("x", "a"));
    EXPECT_THROW(r.add(PromptTemplate("x", "b")), ConflictError);
}

TEST(Schema, ValidatesKindsEnumsAndNesting) {
    Schema s{{detail::str("name"), detail::one_of("kind", {"a", "b"}), detail::nullable_str("maybe"),
              detail::object_list("items", {detail::integer("n")}), detail::boolean("flag", false)}};
    EXPECT_FALSE(validate(json{{"name", "x"}, {"kind", "a"}, {"maybe", nullptr}, {"items", {{{"n", 1}}}}}, s));
    EXPECT_TRUE(validate(json{{"name", 1}, {"kind", "a"}, {"maybe", nullptr}, {"items", json::array()}}, s));
    EXPECT_TRUE(validate(json{{"name", "x"}, {"kind", "c"}, {"maybe", nullptr}, {"items", json::array()}}, s));
    EXPECT_TRUE(validate(json{{"name", "x"}, {"kind", "a"}, {"maybe", nullptr}, {"items", {{{"n", 1.5}}}}}, s));
    EXPECT_TRUE(validate(json{{"kind", "a"}, {"maybe", nullptr}, {"items", json::array()}}, s));
    EXPECT_TRUE(validate(json::array(), s));
}

TEST(Gateway, ParsesFencedJson) {
    std::string err;
    auto j = parse_reply("```json\n{\"a\": 1}\n```", err);
    ASSERT_TRUE(j);
    EXPECT_EQ((*j)["a"], 1);
    EXPECT_FALSE(parse_reply("sure! here it is", err));
}

TEST(Gateway, RetriesMalformedReplyThenSucceeds) {
    MockGateway m;
    m.mock->add(prompt_ids::query_rewrite, {json("not json"), json{{"wrong", 1}}, json{{"rewritten_query", "ok"}}});
    auto r = m.gateway.complete_structured(prompt_ids::query_rewrite, {{"history", "h"}, {"query", "q"}});
    EXPECT_EQ(r.parsed["rewritten_query"], "ok");
    EXPECT_EQ(r.attempts, 3);
}

TEST(Gateway, ValidationErrorAfterRetryBudget) {
    MockGateway m(GatewayConfig{"m", 0.0, 100, 1, 4});
    m.mock->add(prompt_ids::query_rewrite, {json{{"wrong", 1}}});
    try {
        m.gateway.complete_structured(prompt_ids::query_rewrite, {{"history", "h"}, {"query", "q"}});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.attempts(), 2);
        EXPECT_NE(e.raw().find("wrong"), std::string::npos);
    }
    EXPECT_EQ(m.mock->call_count(prompt_ids::query_rewrite), 2u);
}

TEST(Gateway, RepairNoteAndRetryNoteReachProvider) {
    MockGateway m;
    std::vector<std::string> prompts;
    m.mock->on(prompt_ids::search_rationale, [&](const ProviderRequest& r) {
        prompts.push_back(r.prompt_text);
        return prompts.size() == 1 ? std::string("{}") : std::string("{\"rationale\": \"r\"}");
    });
    m.gateway.complete_structured(prompt_ids::search_rationale, {{"history", "h"}, {"query", "q"}}, "NOTE-XYZ");
    ASSERT_EQ(prompts.size(), 2u);
    EXPECT_NE(prompts[0].find("NOTE-XYZ"), std::string::npos);
    EXPECT_NE(prompts[1].find("could not be used"), std::string::npos);
}

TEST(Gateway, ServiceErrorPropagatesAfterRetries) {
    MockGateway m;
    m.mock->on(prompt_ids::search_rationale, [](const ProviderRequest&) -> std::string { throw ServiceError("down", "p"); });
    EXPECT_THROW(m.gateway.complete_structured(prompt_ids::search_rationale, {{"history", "h"}, {"query", "q"}}),
                 ServiceError);
    EXPECT_EQ(m.gateway.total_calls(), 3u);
}

TEST(Gateway, TemplateErrorForMissingVariable) {
    MockGateway m;
    EXPECT_THROW(m.gateway.complete_structured(prompt_ids::query_rewrite, {{"history", "h"}}), TemplateError);
    EXPECT_EQ(m.gateway.total_calls(), 0u);
}

TEST(Gateway, InFlightCapIsHonored) {
    MockGateway m(GatewayConfig{"m", 0.0, 100, 0, 2});
    m.mock->add(prompt_ids::search_rationale, {json{{"rationale", "r"}}});
    m.mock->set_delay(std::chrono::milliseconds(20));
    parallel_map(8, 8, [&](std::size_t i) {
        return m.gateway.complete_structured(prompt_ids::search_rationale, {{"history", "h"}, {"query", std::to_string(i)}});
    });
    EXPECT_LE(m.gateway.peak_in_flight(), 2);
    EXPECT_GE(m.gateway.peak_in_flight(), 1);
}

TEST(Gateway, VariableHashIgnoresInsertionOrder) {
    Variables a{{"x", "1"}, {"y", "2"}};
    Variables b;
    b["y"] = "2";
    b["x"] = "1";
    EXPECT_EQ(hash_variables(a), hash_variables(b));
    EXPECT_NE(hash_variables(a), hash_variables({{"x", "1"}, {"y", "3"}}));
}

TEST(MockProvider, KeyedRulesBeatContainsRulesAndSequencesAdvance) {
    auto mock = std::make_shared<MockProvider>();
    Variables vars{{"history", "h"}, {"query", "special"}};
    mock->add(MockRule{prompt_ids::query_rewrite, hash_variables(vars), {},
                       {json{{"rewritten_query", "first"}}, json{{"rewritten_query", "second"}}}});
    mock->add(prompt_ids::query_rewrite, {json{{"rewritten_query", "echo {{query}}"}}});
    Gateway g(mock);
    EXPECT_EQ(g.complete_structured(prompt_ids::query_rewrite, vars).parsed["rewritten_query"], "first");
    EXPECT_EQ(g.complete_structured(prompt_ids::query_rewrite, vars).parsed["rewritten_query"], "second");
    EXPECT_EQ(g.complete_structured(prompt_ids::query_rewrite, vars).parsed["rewritten_query"], "second");
    EXPECT_EQ(g.complete_structured(prompt_ids::query_rewrite, {{"history", "h"}, {"query", "other"}}).parsed["rewritten_query"],
              "echo other");
}

TEST(MockProvider, NoRuleIsServiceError) {
    MockGateway m(GatewayConfig{"m", 0.0, 100, 0, 1});
    EXPECT_THROW(m.gateway.complete_structured(prompt_ids::query_rewrite, {{"history", "h"}, {"query", "q"}}), ServiceError);
}

TEST(MockProvider, LoadsFixtureDirectory) {
    auto mock = MockProvider::from_directory(testing_support::fixtures() / "evolution" / "mock");
    Gateway g(mock);
    auto r = g.complete_structured(prompt_ids::overlap,
                                   {{"aspect_name", "a"}, {"aspect_type", "detail"}, {"excerpt", "e"}, {"existing_aspects_text", "x"}});
    EXPECT_FALSE(r.parsed["has_overlap"].get<bool>());
    EXPECT_THROW(MockProvider::from_directory("/nonexistent/dir"), ParseError);
}

TEST(Parallel, PreservesOrderAndRethrows) {
    auto out = parallel_map(50, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], i * i);
    EXPECT_THROW(parallel_map(10, 3,
                              [](std::size_t i) {
                                  if (i == 7) throw PreconditionError("boom");
                                  return i;
                              }),
                 PreconditionError);
}
