#include <gtest/gtest.h>

#include <random>

#include "convbench/retrieval/metrics.hpp"
#include "oracles.hpp"

using namespace convbench;
using namespace convbench::retrieval;

TEST(Metrics, HandCase) {
    auto m = compute_metrics({"x", "a", "y", "b"}, {{"a", 2}, {"b", 1}, {"c", 1}});
    ASSERT_TRUE(m);
    EXPECT_NEAR(m->ndcg_at_10, 0.562455901550729, 1e-12);
    EXPECT_NEAR(m->map_at_10, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(m->recall_at_10, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(m->mrr, 0.5, 1e-12);
}

TEST(Metrics, MatchBruteForceOracle) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pool_size(3, 30), grade(0, 3), rank_len(0, 25);
    for (int c = 0; c < 200; ++c) {
        int pool = pool_size(rng);
        std::map<std::string, int> rel;
        for (int i = 0; i < pool; ++i) {
            int g = grade(rng);
            if (g || i % 3 == 0) rel["d" + std::to_string(i)] = g;
        }
        rel["d0"] = 1 + (c % 3);
        std::vector<std::string> ranking;
        std::uniform_int_distribution<int> pick(0, pool + 5);
        for (int i = rank_len(rng); i > 0; --i) ranking.push_back("d" + std::to_string(pick(rng)));
        auto got = compute_metrics(ranking, rel, 10);
        auto want = oracle::metrics_bruteforce(ranking, rel, 10);
        ASSERT_TRUE(got);
        EXPECT_NEAR(got->ndcg_at_10, want.ndcg, 1e-12) << c;
        EXPECT_NEAR(got->map_at_10, want.map, 1e-12) << c;
        EXPECT_NEAR(got->recall_at_10, want.recall, 1e-12) << c;
        EXPECT_NEAR(got->mrr, want.mrr, 1e-12) << c;
    }
}

TEST(Metrics, CutoffAppliesToMrr) {
    std::vector<std::string> ranking;
    for (int i = 0; i < 10; ++i) ranking.push_back("n" + std::to_string(i));
    ranking.push_back("r");
    auto m = compute_metrics(ranking, {{"r", 1}}, 10);
    EXPECT_EQ(m->mrr, 0.0);
    EXPECT_EQ(m->ndcg_at_10, 0.0);
}

TEST(Metrics, PerfectRankingScoresOne) {
    auto m = compute_metrics({"a", "b"}, {{"a", 3}, {"b", 1}});
    EXPECT_DOUBLE_EQ(m->ndcg_at_10, 1.0);
    EXPECT_DOUBLE_EQ(m->map_at_10, 1.0);
    EXPECT_DOUBLE_EQ(m->recall_at_10, 1.0);
    EXPECT_DOUBLE_EQ(m->mrr, 1.0);
}

TEST(Metrics, NoRelevantJudgmentsIsUndefined) {
    EXPECT_FALSE(compute_metrics({"a"}, {{"a", 0}}));
    EXPECT_FALSE(compute_metrics({"a"}, {}));
    EXPECT_THROW(compute_metrics({"a"}, {{"a", 1}}, 0), PreconditionError);
}

TEST(Metrics, LinearGain) {
    auto m = compute_metrics({"b", "a"}, {{"a", 2}, {"b", 1}}, 10, Gain::linear);
    double dcg = 1.0 + 2.0 / std::log2(3.0);
    double idcg = 2.0 + 1.0 / std::log2(3.0);
    EXPECT_NEAR(m->ndcg_at_10, dcg / idcg, 1e-12);
}

TEST(MacroAverage, DomainsWeighEqually) {
    MetricVector one{1, 1, 1, 1}, zero{};
    auto r = macro_average({{"Law", one}, {"Law", one}, {"Law", one}, {"Biology", zero}});
    EXPECT_EQ(r.domains.at("Law").count, 3u);
    EXPECT_DOUBLE_EQ(r.domains.at("Law").mean.ndcg_at_10, 1.0);
    EXPECT_DOUBLE_EQ(r.macro.ndcg_at_10, 0.5);
    EXPECT_DOUBLE_EQ(r.macro.mrr, 0.5);
    EXPECT_THROW(macro_average({}), PreconditionError);
}

TEST(MacroAverage, TwoDomainExample) {
    auto r = macro_average({{"A", MetricVector{0.2, 0, 0, 0}}, {"B", MetricVector{0.4, 0, 0, 0}}});
    EXPECT_EQ(r.macro.ndcg_at_10, (0.2 + 0.4) / 2.0);
    EXPECT_NEAR(r.macro.ndcg_at_10, 0.3, 1e-15);
}

TEST(MacroAverage, DuplicatingADomainLeavesMacroUnchanged) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<std::string, MetricVector>> rows;
    for (int i = 0; i < 60; ++i)
        rows.push_back({"dom" + std::to_string(i % 4), MetricVector{u(rng), u(rng), u(rng), u(rng)}});
    auto before = macro_average(rows);
    auto doubled = rows;
    for (const auto& r : rows)
        if (r.first == "dom2") doubled.push_back(r);
    auto after = macro_average(doubled);
    EXPECT_NEAR(after.macro.ndcg_at_10, before.macro.ndcg_at_10, 1e-12);
    EXPECT_NEAR(after.macro.map_at_10, before.macro.map_at_10, 1e-12);
    EXPECT_NEAR(after.macro.recall_at_10, before.macro.recall_at_10, 1e-12);
    EXPECT_NEAR(after.macro.mrr, before.macro.mrr, 1e-12);
    EXPECT_EQ(after.domains.at("dom2").count, 2 * before.domains.at("dom2").count);
}
