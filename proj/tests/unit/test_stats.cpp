#include <gtest/gtest.h>

#include "convbench/dataset_stats.hpp"
#include "test_support.hpp"

using namespace convbench;

TEST(Stats, PublishedDomainShapeIsReproduced) {
    auto convs = testing_support::table2_dataset();
    auto s = compute_stats(convs);
    EXPECT_EQ(s.total.conversations, 707u);
    EXPECT_EQ(s.total.turns, 2971u);
    EXPECT_EQ(fixed(s.total.avg_turns(), 2), "4.20");
    EXPECT_EQ(fixed(s.total.avg_aspects(), 2), "5.87");
    EXPECT_EQ(fixed(s.total.avg_docs_per_turn(), 2), "2.01");
    EXPECT_DOUBLE_EQ(s.total.avg_turns(), 2971.0 / 707.0);
    EXPECT_EQ(s.total.min_turns, 3u);
    EXPECT_LE(s.total.max_turns, 12u);

    const std::map<std::string, std::array<const char*, 3>> want{
        {"Drones", {"3.84", "4.76", "2.36"}},      {"Hardware", {"4.09", "5.20", "2.10"}},
        {"Law", {"4.60", "7.00", "2.55"}},         {"Medical Sci.", {"4.16", "6.18", "2.23"}},
        {"Politics", {"4.95", "7.42", "2.49"}},    {"Biology", {"4.26", "5.89", "1.56"}},
        {"Earth Sci.", {"4.63", "6.23", "1.58"}},  {"Economics", {"3.89", "5.62", "2.28"}},
        {"Psychology", {"3.96", "5.65", "2.16"}},  {"Robotics", {"3.81", "4.94", "1.76"}},
        {"Sust. Living", {"4.09", "5.79", "1.88"}}};
    ASSERT_EQ(s.domains.size(), 11u);
    for (const auto& [d, w] : want) {
        const auto& r = s.domains.at(d);
        EXPECT_EQ(fixed(r.avg_turns(), 2), w[0]) << d;
        EXPECT_EQ(fixed(r.avg_aspects(), 2), w[1]) << d;
        EXPECT_EQ(fixed(r.avg_docs_per_turn(), 2), w[2]) << d;
    }
    auto table = stats_table(s).to_text();
    EXPECT_NE(table.find("4.20"), std::string::npos);
}

TEST(Stats, SingleConversation) {
    auto c = testing_support::make_conversation("x", "Biology", {"one two", "three", "four", "five", "six"}, 6);
    auto s = compute_stats({c});
    EXPECT_EQ(s.total.conversations, 1u);
    EXPECT_EQ(s.total.turns, 5u);
    EXPECT_EQ(s.total.avg_turns(), 5.0);
    EXPECT_EQ(s.later_turns, 4u);
    EXPECT_EQ(s.query_words, 6u);
    auto j = to_json(s);
    EXPECT_EQ(j["total"]["avg_turns"], 5.0);
    EXPECT_EQ(j["domains"]["Biology"]["turns"], 5);
}

TEST(Stats, EmptyDatasetIsAllZero) {
    auto s = compute_stats({});
    EXPECT_EQ(s.total.avg_turns(), 0.0);
    EXPECT_TRUE(s.domains.empty());
}
