#include <gtest/gtest.h>

#include "convbench/turn_forge.hpp"
#include "test_support.hpp"

using namespace convbench;
using namespace convbench::forge;
using nlohmann::json;
using testing_support::MockGateway;

namespace {

std::vector<corpus::Document> docs() {
    return {{"A", "Bio", "First passage.", {}, true}, {"B", "Bio", "Second passage.", {}, true},
            {"C", "Bio", "Third passage.", {}, true}};
}

json score(const std::string& id, double s, double c, double l, double m) {
    return {{"doc_id", id}, {"support_score", s}, {"completeness_score", c}, {"clarity_score", l}, {"misleading_score", m},
            {"final_score", 99}, {"reasoning", "r"}};
}

}  // namespace

TEST(CombineScores, WeightedSumIsExact) {
    EXPECT_EQ(combine_scores(8, 7, 7, 0), 7.15);
    EXPECT_EQ(combine_scores(6, 5, 6, 0), 5.40);
    EXPECT_EQ(combine_scores(4, 3, 5, 0), 3.65);
    EXPECT_EQ(combine_scores(10, 10, 10, 0), 9.5);
    EXPECT_EQ(combine_scores(0, 0, 0, 10), -0.5);
}

TEST(CombineScores, ExhaustiveGridMatchesWeights) {
    for (int s = 0; s <= 10; ++s)
        for (int c = 0; c <= 10; ++c)
            for (int l = 0; l <= 10; ++l)
                for (int m = 0; m <= 10; ++m)
                    ASSERT_NEAR(combine_scores(s, c, l, m), 0.5 * s + 0.3 * c + 0.15 * l - 0.05 * m, 1e-12);
}

TEST(Scoring, FinalScoreIsRecomputedAndClamped) {
    MockGateway m;
    m.mock->add(llm::prompt_ids::scoring, {json{{"document_scores", {score("A", 8, 7, 7, 0), score("B", 12, 5.4, 4, -1)}}}});
    auto s = score_documents("sq", "r", {"f"}, docs(), m.gateway);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].final_score, 7.15);
    EXPECT_EQ(s[1].support, 10);
    EXPECT_EQ(s[1].completeness, 5);
    EXPECT_EQ(s[1].misleading, 0);
    EXPECT_EQ(s[2].final_score, 0.0);
    EXPECT_EQ(s[2].rationale, "not scored");
}

TEST(Selection, ThresholdIsInclusiveAndOrdered) {
    std::vector<DocScore> scores{{"Evolution", 6, 5, 6, 0, 5.40, ""},
                                 {"Aging", 8, 7, 7, 0, 7.15, ""},
                                 {"Genetics", 4, 3, 5, 0, 3.65, ""},
                                 {"Edge", 0, 0, 0, 0, 5.0, ""}};
    EXPECT_EQ(select_documents(scores, 5.0), (std::vector<std::string>{"Aging", "Evolution", "Edge"}));
    EXPECT_EQ(select_documents(scores, 7.5), std::vector<std::string>{});
    EXPECT_THROW(select_documents({}, 5.0), PreconditionError);
}

TEST(Selection, TiesBreakByDocId) {
    std::vector<DocScore> scores{{"z", 0, 0, 0, 0, 6.0, ""}, {"a", 0, 0, 0, 0, 6.0, ""}};
    EXPECT_EQ(select_documents(scores, 5.0), (std::vector<std::string>{"a", "z"}));
}

TEST(Naturalize, FirstTurnUsesOpeningTemplate) {
    MockGateway m;
    m.mock->add(llm::prompt_ids::turn1, {json{{"conversational_query", "How do cells age?"}}});
    auto q = naturalize_query("What causes aging?", {}, 1, {}, "topic", m.gateway);
    EXPECT_EQ(q.conversational_query, "How do cells age?");
    EXPECT_EQ(m.mock->call_count(llm::prompt_ids::followup), 0u);
    EXPECT_THROW(naturalize_query("x", {{"q", "a"}}, 1, {}, "t", m.gateway), PreconditionError);
    EXPECT_THROW(naturalize_query("x", {}, 2, {}, "t", m.gateway), PreconditionError);
}

TEST(Naturalize, RepeatedOpenerIsRegeneratedOnce) {
    MockGateway m;
    m.mock->add(llm::prompt_ids::followup,
                {json{{"conversational_query", "What about mice?"}}, json{{"conversational_query", "Do mice differ?"}}});
    auto q = naturalize_query("sq", {{"What is aging?", "a"}}, 2, {"What"}, "t", m.gateway);
    EXPECT_TRUE(q.retried);
    EXPECT_EQ(q.conversational_query, "Do mice differ?");
    EXPECT_EQ(m.mock->call_count(llm::prompt_ids::followup), 2u);
}

TEST(Naturalize, FailureFallsBackToSubQuestion) {
    MockGateway m(llm::GatewayConfig{"m", 0.0, 100, 0, 1});
    auto q = naturalize_query("raw sub-question?", {{"q", "a"}}, 2, {}, "t", m.gateway);
    EXPECT_TRUE(q.fell_back);
    EXPECT_EQ(q.conversational_query, "raw sub-question?");
}

TEST(MetaReference, LexicalCheck) {
    EXPECT_TRUE(has_meta_reference("According to the documents, cells divide."));
    EXPECT_TRUE(has_meta_reference("The passage says so."));
    EXPECT_TRUE(has_meta_reference("As the text explains, yes."));
    EXPECT_FALSE(has_meta_reference("Cells divide until telomeres run short."));
    EXPECT_FALSE(has_meta_reference("Textbooks disagree on this."));
}

TEST(GroundedAnswer, MetaReferenceIsRetriedThenDropped) {
    MockGateway m;
    m.mock->add(llm::prompt_ids::answer, {json{{"answer", "The documents say yes."}}, json{{"answer", "Yes, it does."}}});
    auto a = generate_grounded_answer("q", {}, docs(), m.gateway);
    ASSERT_TRUE(a.answer);
    EXPECT_TRUE(a.retried);
    EXPECT_EQ(*a.answer, "Yes, it does.");

    MockGateway bad;
    bad.mock->add(llm::prompt_ids::answer, {json{{"answer", "The passage covers it."}}});
    EXPECT_FALSE(generate_grounded_answer("q", {}, docs(), bad.gateway).answer);
    EXPECT_EQ(bad.mock->call_count(llm::prompt_ids::answer), 2u);
    EXPECT_THROW(generate_grounded_answer("q", {}, {}, bad.gateway), PreconditionError);
}

TEST(Diversity, RepetitiveMeansNoValue) {
    MockGateway m;
    EXPECT_TRUE(check_turn_diversity("a", {}, m.gateway).adds_value);
    EXPECT_EQ(m.gateway.total_calls(), 0u);
    m.mock->add(llm::prompt_ids::diversity, {json{{"adds_value", true}, {"value_type", "repetitive"}, {"reason", "r"}}});
    EXPECT_FALSE(check_turn_diversity("a", {{"q", "a"}}, m.gateway).adds_value);
}

TEST(RetrievalReasoning, EmptySignalsAreFlaggedAfterRetry) {
    MockGateway m;
    m.mock->add(llm::prompt_ids::retrieval_reasoning,
                {json{{"target", "t"}, {"relevance_signals", {" "}}, {"irrelevance_signals", json::array()}}});
    auto r = annotate_retrieval_reasoning("sq", docs(), m.gateway);
    EXPECT_TRUE(r.flagged);
    EXPECT_EQ(m.mock->call_count(llm::prompt_ids::retrieval_reasoning), 2u);

    MockGateway ok;
    ok.mock->add(llm::prompt_ids::retrieval_reasoning,
                 {json{{"target", "t"}, {"relevance_signals", {"telomere"}}, {"irrelevance_signals", {"mice"}}}});
    auto good = annotate_retrieval_reasoning("sq", docs(), ok.gateway);
    EXPECT_FALSE(good.flagged);
    EXPECT_EQ(good.reasoning.irrelevance_signals, std::vector<std::string>{"mice"});
}

TEST(ConversationProblem, DetectsStructuralFaults) {
    auto c = testing_support::make_conversation("c", "Biology", {"one", "two", "three"});
    EXPECT_FALSE(conversation_problem(c));
    auto dup = c;
    dup.turns[2].conversational_query = "ONE";
    EXPECT_EQ(*conversation_problem(dup), "turn 3 repeats an earlier query");
    auto gap = c;
    gap.turns[1].turn_index = 5;
    EXPECT_TRUE(conversation_problem(gap));
    auto nodocs = c;
    nodocs.turns[0].selected_docs.clear();
    EXPECT_TRUE(conversation_problem(nodocs));
    auto noanswer = c;
    noanswer.turns[0].answer = " ";
    EXPECT_TRUE(conversation_problem(noanswer));
}

TEST(Assembly, RejectsTooShortConversation) {
    SourceRecord s;
    s.source_id = "s";
    s.query = "q?";
    s.gold_answer = "a.";
    s.documents = docs();
    std::vector<decompose::Aspect> aspects{{"x", decompose::AspectType::detail, "a", {}, 0}};
    facts::FactReport dead;
    MockGateway m;
    auto r = assemble_conversation(s, aspects, {dead}, m.gateway);
    ASSERT_TRUE(r.rejection);
    EXPECT_EQ(*r.rejection, RejectReason::too_short);
    EXPECT_EQ(r.skipped, std::vector<std::string>{"x: no verified facts"});
    EXPECT_THROW(assemble_conversation(s, aspects, {}, m.gateway), PreconditionError);
}
