#include <gtest/gtest.h>

#include "convbench/conversation_io.hpp"
#include "convbench/retrieval/analysis.hpp"
#include "convbench/retrieval/run.hpp"
#include "test_support.hpp"

using namespace convbench;
using namespace convbench::retrieval;
using nlohmann::json;
using testing_support::MockGateway;

namespace {

void rationale_rules(MockGateway& m) {
    m.mock->add(llm::prompt_ids::search_rationale, {json{{"rationale", "look for {{query}}"}}});
    m.mock->add(llm::prompt_ids::query_rewrite, {json{{"rewritten_query", "standalone {{query}}"}}});
}

/// Fixed ranking, independent of the query.
class FixedRetriever : public Retriever {
public:
    explicit FixedRetriever(std::string id, bool hit) : id_(std::move(id)), hit_(hit) {}
    const std::string& id() const override { return id_; }
    std::vector<ScoredDoc> search(const std::string&, std::size_t k) override {
        std::vector<ScoredDoc> out;
        if (hit_) out.push_back({"hit", 1.0});
        out.push_back({"filler", 0.5});
        if (out.size() > k) out.resize(k);
        return out;
    }

private:
    std::string id_;
    bool hit_;
};

}  // namespace

TEST(Strategy, TurnOneIdentities) {
    MockGateway m;
    rationale_rules(m);
    QueryBuilder builder(&m.gateway);
    auto conv = testing_support::make_conversation("c1", "Law", {"What is a tort?", "And negligence?", "Examples?"});
    auto base = builder.build(conv, 1, Strategy::baseline).query_text;
    EXPECT_EQ(builder.build(conv, 1, Strategy::history).query_text, base);
    EXPECT_EQ(builder.build(conv, 1, Strategy::rewrite).query_text, base);
    auto reasoning = builder.build(conv, 1, Strategy::reasoning).query_text;
    EXPECT_EQ(reasoning.rfind(base, 0), 0u);
    EXPECT_GT(reasoning.size(), base.size());
    EXPECT_EQ(m.mock->call_count(llm::prompt_ids::query_rewrite), 0u);
}

TEST(Strategy, LaterTurnsUseHistoryAndCache) {
    MockGateway m;
    rationale_rules(m);
    QueryBuilder builder(&m.gateway);
    auto conv = testing_support::make_conversation("c1", "Law", {"What is a tort?", "And negligence?"});
    auto hist = builder.build(conv, 2, Strategy::history).query_text;
    EXPECT_NE(hist.find("What is a tort?"), std::string::npos);
    EXPECT_NE(hist.find("answer about What is a tort?"), std::string::npos);
    EXPECT_EQ(hist.substr(hist.size() - std::string("And negligence?").size()), "And negligence?");
    EXPECT_EQ(builder.build(conv, 2, Strategy::rewrite).query_text, "standalone And negligence?");
    auto hr = builder.build(conv, 2, Strategy::history_reasoning).query_text;
    EXPECT_EQ(hr, hist + "\nlook for And negligence?");
    builder.build(conv, 2, Strategy::reasoning);
    EXPECT_EQ(m.mock->call_count(llm::prompt_ids::search_rationale), 1u);
    EXPECT_EQ(builder.build(conv, 2, Strategy::baseline).turn_ref, "c1_t2");
}

TEST(Strategy, Preconditions) {
    QueryBuilder offline;
    auto conv = testing_support::make_conversation("c1", "Law", {"q1", "q2"});
    EXPECT_EQ(offline.build(conv, 2, Strategy::history).query_text.empty(), false);
    EXPECT_THROW(offline.build(conv, 1, Strategy::reasoning), PreconditionError);
    EXPECT_THROW(offline.build(conv, 3, Strategy::baseline), PreconditionError);
    EXPECT_THROW(offline.build(conv, 0, Strategy::baseline), PreconditionError);
    EXPECT_THROW(parse_strategy("hybrid"), PreconditionError);
    for (auto s : all_strategies()) EXPECT_EQ(parse_strategy(to_string(s)), s);
}

TEST(RunFile, RoundTrip) {
    RunResult run;
    run.retriever_id = "dense-hash";
    run.strategy = Strategy::history_reasoning;
    run.rankings["q1"] = {{"d1", 2.5}, {"d2", 1.25}};
    run.rankings["q2"] = {{"d9", 0.0}};
    auto dir = testing_support::scratch_dir("runfile");
    write_run(dir / "r.run", run);
    auto back = read_run(dir / "r.run");
    EXPECT_EQ(back.tag(), run.tag());
    ASSERT_EQ(back.rankings.size(), 2u);
    EXPECT_EQ(back.rankings["q1"][1].doc_id, "d2");
    EXPECT_DOUBLE_EQ(back.rankings["q1"][1].score, 1.25);
}

TEST(RunFile, MalformedLinesAreReported) {
    auto dir = testing_support::scratch_dir("runfile_bad");
    {
        std::ofstream(dir / "a.run") << "q1 d1 1 0.5 bm25.baseline\nq1 d2 1 0.4 bm25.baseline\n";
        std::ofstream(dir / "b.run") << "q1 d1 one 0.5 bm25.baseline\n";
        std::ofstream(dir / "c.run") << "q1 d1 1 0.5 bm25.baseline\nq2 d1 1 0.5 bm25.history\n";
    }
    try {
        read_run(dir / "a.run");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(read_run(dir / "b.run"), ParseError);
    EXPECT_THROW(read_run(dir / "c.run"), ParseError);
}

TEST(Runs, FullShapeObservationCount) {
    auto convs = testing_support::table2_dataset();
    auto qrels = forge::qrels_from_conversations(convs);
    MockGateway m;
    rationale_rules(m);
    QueryBuilder builder(&m.gateway);
    std::vector<std::shared_ptr<Retriever>> retrievers;
    for (int i = 0; i < 8; ++i) retrievers.push_back(std::make_shared<FixedRetriever>("r" + std::to_string(i), i % 2 == 0));
    auto runs = execute_runs(convs, retrievers, {Strategy::baseline, Strategy::history_reasoning}, builder, 10, 1);
    ASSERT_EQ(runs.size(), 16u);
    auto scores = score_runs(runs, qrels, convs);
    EXPECT_EQ(scores.size(), 2u * 8u * 2971u);
    auto t = compare_strategies(scores, Strategy::history_reasoning, Strategy::baseline);
    EXPECT_EQ(t.n, 23768u);
    EXPECT_EQ(m.mock->call_count(llm::prompt_ids::search_rationale), 2971u);
}

TEST(Runs, ExecuteAndScoreSmallCollection) {
    std::vector<forge::Conversation> convs{testing_support::make_conversation("c", "Law", {"alpha one", "beta two", "gamma three"})};
    auto qrels = forge::qrels_from_conversations(convs);
    auto index = std::make_shared<Bm25Index>(Bm25Index::build({{"c_doc1", "alpha"}, {"c_doc2", "beta"}, {"c_doc3", "gamma"}}));
    std::vector<std::shared_ptr<Retriever>> rs{std::make_shared<Bm25Retriever>("bm25", index)};
    QueryBuilder builder;
    auto runs = execute_runs(convs, rs, {Strategy::baseline, Strategy::history}, builder, 3, 2);
    auto scores = score_runs(runs, qrels, convs);
    ASSERT_EQ(scores.size(), 6u);
    for (const auto& s : scores)
        if (s.strategy == Strategy::baseline) EXPECT_DOUBLE_EQ(s.metrics.ndcg_at_10, 1.0);
    auto macro = macro_for(scores, "bm25", Strategy::baseline);
    EXPECT_DOUBLE_EQ(macro.macro.mrr, 1.0);
}

namespace {

QueryScore qs(const std::string& r, Strategy s, const std::string& q, int turn, int aspects, double ndcg) {
    QueryScore x;
    x.retriever_id = r;
    x.strategy = s;
    x.query_id = q;
    x.conv_id = q.substr(0, q.find('_'));
    x.domain = "Law";
    x.turn_index = turn;
    x.aspect_count = aspects;
    x.metrics.ndcg_at_10 = ndcg;
    return x;
}

}  // namespace

TEST(Analysis, TurnPositionBuckets) {
    std::vector<QueryScore> s{qs("a", Strategy::baseline, "c_t1", 1, 4, 0.8), qs("a", Strategy::baseline, "c_t2", 2, 4, 0.4),
                              qs("a", Strategy::baseline, "c_t6", 6, 4, 0.2), qs("a", Strategy::baseline, "c_t7", 7, 4, 0.4)};
    auto rows = turn_position_analysis(s);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(*rows[0].mean_ndcg[0], 0.8);
    EXPECT_FALSE(rows[0].mean_ndcg[2]);
    EXPECT_NEAR(*rows[0].mean_ndcg[4], 0.3, 1e-15);
    EXPECT_EQ(rows[0].count[4], 2u);
}

TEST(Analysis, ComplexityUsesBestRetrieverAndSkipsFirstTurn) {
    std::vector<QueryScore> s{qs("a", Strategy::history, "x_t1", 1, 3, 1.0), qs("a", Strategy::history, "x_t2", 2, 3, 0.2),
                              qs("b", Strategy::history, "x_t2", 2, 3, 0.6), qs("a", Strategy::history, "y_t2", 2, 8, 0.1),
                              qs("a", Strategy::history, "z_t2", 2, 2, 0.9)};
    auto rows = complexity_analysis(s);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(*rows[0].mean_ndcg[0], 0.6);
    EXPECT_FALSE(rows[0].mean_ndcg[1]);
    EXPECT_DOUBLE_EQ(*rows[0].mean_ndcg[2], 0.1);
    EXPECT_EQ(rows[0].turns[0], 1u);
    EXPECT_EQ(complexity_of(4), Complexity::low);
    EXPECT_EQ(complexity_of(5), Complexity::medium);
    EXPECT_EQ(complexity_of(7), Complexity::high);
    EXPECT_FALSE(complexity_of(2));
}

TEST(Analysis, FailureBuckets) {
    EXPECT_EQ(failure_bucket(0.8), 0u);
    EXPECT_EQ(failure_bucket(0.79), 1u);
    EXPECT_EQ(failure_bucket(0.3), 2u);
    EXPECT_EQ(failure_bucket(0.0), 3u);
    std::vector<QueryScore> s{qs("a", Strategy::history_reasoning, "c_t1", 1, 4, 0.1),
                              qs("a", Strategy::history_reasoning, "c_t2", 2, 4, 0.9),
                              qs("a", Strategy::history_reasoning, "d_t1", 1, 4, 0.2),
                              qs("a", Strategy::history_reasoning, "d_t2", 2, 4, 0.25)};
    auto r = failure_analysis(s);
    EXPECT_EQ(r.total, 4u);
    EXPECT_EQ(r.counts[3], 3u);
    EXPECT_EQ(r.bottom_first_turn, 2u);
    EXPECT_DOUBLE_EQ(r.first_turn_share(), 0.5);
    EXPECT_THROW(parse_analysis_kind("speed"), PreconditionError);
    EXPECT_EQ(analyze_results(s, AnalysisKind::failure).rows.size(), 6u);
}
