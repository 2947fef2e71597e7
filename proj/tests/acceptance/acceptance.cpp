// Acceptance checks: one PASS/FAIL line per criterion. The process exits 0
// when every failure is listed in known_failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "convbench/conversation_io.hpp"
#include "convbench/dataset_stats.hpp"
#include "convbench/gen_eval.hpp"
#include "convbench/pipeline.hpp"
#include "convbench/quality_audit.hpp"
#include "convbench/retrieval/bm25.hpp"
#include "convbench/retrieval/metrics.hpp"
#include "convbench/retrieval/run.hpp"
#include "convbench/retrieval/strategy.hpp"
#include "convbench/retrieval/ttest.hpp"
#include "full_run.hpp"
#include "oracles.hpp"
#include "scripted.hpp"
#include "test_support.hpp"

using namespace convbench;
using nlohmann::json;

namespace {

// Pearson on the published per-domain pairs is -0.27, not the stated 0.42.
const std::set<int> known_failures{10};

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Outcome table5_scoring() {
    Outcome o;
    using forge::DocScore;
    std::vector<DocScore> s{{"Aging_theory_12.txt", 8, 7, 7, 0, forge::combine_scores(8, 7, 7, 0), ""},
                            {"Evolution_38.txt", 6, 5, 6, 0, forge::combine_scores(6, 5, 6, 0), ""},
                            {"Genetics_91.txt", 4, 3, 5, 0, forge::combine_scores(4, 3, 5, 0), ""}};
    o.require(near(s[0].final_score, 7.15, 1e-9), "7.15 got " + num(s[0].final_score));
    o.require(near(s[1].final_score, 5.40, 1e-9), "5.40 got " + num(s[1].final_score));
    o.require(near(s[2].final_score, 3.65, 1e-9), "3.65 got " + num(s[2].final_score));
    auto sel = forge::select_documents(s, 5.0);
    o.require(sel == std::vector<std::string>{"Aging_theory_12.txt", "Evolution_38.txt"}, "selection column differs");
    return o;
}

Outcome entropy() {
    Outcome o;
    double dep = audit::normalized_entropy({1028, 859, 707, 326, 41, 10}, 6);
    double pat = audit::normalized_entropy({571, 486, 465, 432, 411, 329, 206, 50, 21}, 9);
    o.require(near(dep, 0.77, 0.01), "dependency entropy " + num(dep));
    o.require(near(pat, 0.91, 0.01), "pattern entropy " + num(pat));
    o.detail = "dependency " + num(dep) + ", pattern " + num(pat) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome metric_oracle() {
    Outcome o;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pool_size(1, 20), grade(0, 3), rank_len(0, 20);
    int checked = 0;
    while (checked < 200) {
        int pool = pool_size(rng);
        std::map<std::string, int> rel;
        for (int i = 0; i < pool; ++i) rel["d" + std::to_string(i)] = grade(rng);
        bool any = false;
        for (const auto& [d, g] : rel) any = any || g > 0;
        if (!any) continue;
        std::vector<std::string> ranking;
        std::uniform_int_distribution<int> pick(0, 19);
        for (int i = rank_len(rng); i > 0; --i) ranking.push_back("d" + std::to_string(pick(rng)));
        auto got = retrieval::compute_metrics(ranking, rel, 10);
        auto want = oracle::metrics_bruteforce(ranking, rel, 10);
        bool ok = got && near(got->ndcg_at_10, want.ndcg, 1e-9) && near(got->map_at_10, want.map, 1e-9) &&
                  near(got->recall_at_10, want.recall, 1e-9) && near(got->mrr, want.mrr, 1e-9);
        o.require(ok, "instance " + std::to_string(checked));
        ++checked;
    }
    if (o.pass) o.detail = "200 instances";
    return o;
}

Outcome bm25_exhaustive() {
    Outcome o;
    std::mt19937_64 rng(20240611);
    std::vector<std::pair<std::string, std::string>> docs;
    std::uniform_int_distribution<std::size_t> len(5, 60), qlen(1, 6);
    auto join = [](const std::vector<std::string>& w) {
        std::string s;
        for (const auto& x : w) s += (s.empty() ? "" : " ") + x;
        return s;
    };
    for (int i = 0; i < 1000; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "doc%04d", i);
        docs.emplace_back(id, join(oracle::random_words(rng, len(rng), 300)));
    }
    auto idx = retrieval::Bm25Index::build(docs);
    for (int q = 0; q < 50; ++q) {
        auto query = join(oracle::random_words(rng, qlen(rng), 320));
        auto got = idx.search(query, 10);
        auto want = oracle::bm25_exhaustive(docs, query, 10);
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i)
            same = got[i].doc_id == want[i].id && near(got[i].score, want[i].score, 1e-9);
        o.require(same, "query " + std::to_string(q) + " '" + query + "'");
    }
    if (o.pass) o.detail = "1000 docs, 50 queries";
    return o;
}

Outcome macro_property() {
    Outcome o;
    using retrieval::MetricVector;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<std::string, MetricVector>> rows;
    for (int i = 0; i < 50; ++i) rows.push_back({"dom" + std::to_string(i % 5), MetricVector{u(rng), u(rng), u(rng), u(rng)}});
    auto before = retrieval::macro_average(rows).macro;
    auto doubled = rows;
    for (const auto& r : rows)
        if (r.first == "dom3") doubled.push_back(r);
    auto after = retrieval::macro_average(doubled).macro;
    o.require(near(before.ndcg_at_10, after.ndcg_at_10, 1e-12) && near(before.map_at_10, after.map_at_10, 1e-12) &&
                  near(before.recall_at_10, after.recall_at_10, 1e-12) && near(before.mrr, after.mrr, 1e-12),
              "duplication changed the macro score");
    auto two = retrieval::macro_average({{"A", MetricVector{0.2, 0, 0, 0}}, {"B", MetricVector{0.4, 0, 0, 0}}}).macro;
    o.require(two.ndcg_at_10 == (0.2 + 0.4) / 2.0 && near(two.ndcg_at_10, 0.3, 1e-15), "two-domain macro " + num(two.ndcg_at_10));
    return o;
}

Outcome strategy_identity(const std::vector<forge::Conversation>& convs) {
    Outcome o;
    auto mock = llm::MockProvider::from_directory(testing_support::fixtures() / "evolution" / "mock");
    llm::Gateway gw(mock, {});
    retrieval::QueryBuilder builder(&gw);
    for (const auto& c : convs) {
        auto base = builder.build(c, 1, retrieval::Strategy::baseline).query_text;
        auto hist = builder.build(c, 1, retrieval::Strategy::history).query_text;
        auto reas = builder.build(c, 1, retrieval::Strategy::reasoning).query_text;
        o.require(hist == base, c.conv_id + ": history differs from baseline at turn 1");
        o.require(reas.size() > base.size() && reas.compare(0, base.size(), base) == 0,
                  c.conv_id + ": reasoning is not a strict extension of baseline");
    }
    o.require(!convs.empty(), "no fixture conversations");
    if (o.pass) o.detail = std::to_string(convs.size()) + " fixture conversation(s)";
    return o;
}

Outcome ttest() {
    Outcome o;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::uniform_int_distribution<int> size(3, 60);
    for (int f = 0; f < 20; ++f) {
        int n = size(rng);
        std::vector<double> a, b;
        for (int i = 0; i < n; ++i) {
            double base = noise(rng);
            a.push_back(base + 0.02 + noise(rng));
            b.push_back(base);
        }
        auto got = retrieval::paired_t_test(a, b);
        auto want = oracle::paired_t(a, b);
        o.require(near(got.t_statistic, want.t, 1e-6) && near(got.p_value, want.p, 1e-6), "fixture " + std::to_string(f));
    }
    auto zero = retrieval::paired_t_test({1.0, 2.0, 3.0}, {0.5, 1.5, 2.5});
    o.require(zero.t_statistic == 0.0 && zero.p_value == 1.0, "zero-variance case");

    auto convs = testing_support::table2_dataset();
    auto qrels = forge::qrels_from_conversations(convs);
    std::vector<retrieval::QueryScore> scores;
    for (int r = 0; r < 8; ++r)
        for (const auto& ref : retrieval::all_turns(convs))
            for (auto s : {retrieval::Strategy::baseline, retrieval::Strategy::history_reasoning}) {
                retrieval::QueryScore q;
                q.retriever_id = "r" + std::to_string(r);
                q.strategy = s;
                q.query_id = ref.query_id;
                q.metrics.ndcg_at_10 = (s == retrieval::Strategy::baseline ? 0.4 : 0.5) + 0.001 * (ref.turn_index % 7) * (r + 1);
                scores.push_back(q);
            }
    auto cmp = retrieval::compare_strategies(scores, retrieval::Strategy::history_reasoning, retrieval::Strategy::baseline);
    o.require(cmp.n == 23768, "observation count " + std::to_string(cmp.n));
    if (o.pass) o.detail = "20 fixtures, n=" + std::to_string(cmp.n);
    return o;
}

Outcome evolution_synthesis() {
    Outcome o;
    auto dir = testing_support::fixtures() / "evolution";
    auto corpus = corpus::Corpus::ingest(dir / "corpus.jsonl", corpus::Format::jsonl);
    auto sources = load_sources(dir / "sources.jsonl", &corpus);
    auto mock = llm::MockProvider::from_directory(dir / "mock");
    llm::Gateway gw(mock, {});
    SynthesisConfig cfg;
    cfg.workers = 1;
    auto out = synthesize(sources.at(0), gw, cfg);
    o.require(out.aspects.size() == 6, "aspects " + std::to_string(out.aspects.size()));
    if (!out.conversation) {
        o.require(false, "no conversation: " + out.rejection);
        return o;
    }
    const auto& conv = *out.conversation;
    o.require(conv.turns.size() == 5, "turns " + std::to_string(conv.turns.size()));
    o.require(!forge::conversation_problem(conv), "conversation invariants violated");
    for (const auto& t : conv.turns) {
        o.require(!t.selected_docs.empty() && !forge::has_meta_reference(t.answer) &&
                      !t.retrieval_reasoning.relevance_signals.empty(),
                  "turn " + std::to_string(t.turn_index) + " invariants");
        for (std::size_t i = 0; i < out.aspects.size(); ++i) {
            if (out.aspects[i].aspect_name != t.aspect_ref) continue;
            for (const auto& f : out.fact_reports[i].extracted) {
                if (!f.is_supported) continue;
                bool traced = false;
                for (const auto& d : t.selected_docs) traced = traced || d.doc_id == *f.supporting_doc_id;
                o.require(traced, "fact not traceable: " + f.fact);
            }
        }
    }
    auto summary = facts::support_summary(out.fact_reports);
    o.require(summary.supported == 7 && summary.total == 9, std::to_string(summary.supported) + "/" + std::to_string(summary.total));
    o.require(near(summary.verification_rate, 0.778, 5e-4), "rate " + num(summary.verification_rate));
    if (o.pass) o.detail = "5 turns, facts 7/9 = " + num(summary.verification_rate);
    return o;
}

Outcome length_gate() {
    Outcome o;
    for (std::size_t n = 1; n <= 14; ++n)
        for (std::size_t surviving = 0; surviving <= n; ++surviving) {
            auto mock = std::make_shared<llm::MockProvider>();
            scripted::install(*mock, n, surviving);
            llm::Gateway gw(mock, {});
            SynthesisConfig cfg;
            cfg.target_aspects = n;
            cfg.workers = 1;
            auto out = synthesize(scripted::source(n), gw, cfg);
            if (out.conversation) {
                auto t = out.conversation->turns.size();
                o.require(t >= 3 && t <= 12, "accepted " + std::to_string(t) + " turns");
            } else {
                o.require(surviving < 3 || surviving > 12, "rejected valid n=" + std::to_string(n) + " s=" + std::to_string(surviving));
            }
        }
    auto dir = testing_support::fixtures() / "too_short";
    auto mock = llm::MockProvider::from_directory(dir / "mock");
    llm::Gateway gw(mock, {});
    SynthesisConfig cfg;
    cfg.workers = 1;
    auto out = synthesize(load_sources(dir / "sources.jsonl", nullptr).at(0), gw, cfg);
    o.require(!out.conversation && out.rejection.rfind("too_short", 0) == 0, "two-aspect fixture: " + out.rejection);
    return o;
}

Outcome pearson() {
    Outcome o;
    std::vector<double> nd{.733, .732, .572, .682, .488, .455, .540, .499, .587, .582, .694};
    std::vector<double> judge{.856, .856, .867, .858, .857, .851, .851, .848, .843, .843, .740};
    double r = gen::pearson_correlation(nd, judge);
    o.require(near(r, 0.42, 0.03), "expected 0.42 +/- 0.03");
    o.detail = "r = " + num(r) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome rouge() {
    Outcome o;
    o.require(gen::rouge_l("the cat sat", "the cat sat").f1 == 1.0, "identical");
    o.require(gen::rouge_l("dogs bark", "the cat sat").f1 == 0.0, "disjoint");
    o.require(gen::rouge_l("the cat sat", "the cat ran").f1 == 2.0 / 3.0, "partial overlap");
    return o;
}

Outcome human_alignment() {
    Outcome o;
    auto r = audit::human_alignment_report(
        {{"naturalness", 4.34}, {"turn_coherence", 4.97}, {"question_quality", 4.42}, {"groundedness", 4.73}},
        {{"naturalness", 4.20}, {"turn_coherence", 4.62}, {"question_quality", 4.21}, {"groundedness", 4.45}}, 0.5);
    std::map<std::string, double> want{{"naturalness", 0.14}, {"turn_coherence", 0.35}, {"question_quality", 0.21},
                                       {"groundedness", 0.28}};
    for (const auto& row : r.rows) o.require(near(row.delta, want.at(row.dimension), 1e-9), row.dimension + " " + num(row.delta));
    o.require(r.pass, "overall verdict");
    return o;
}

Outcome determinism() {
    Outcome o;
    auto a = testing_support::full_pipeline(testing_support::scratch_dir("acceptance_a"));
    auto b = testing_support::full_pipeline(testing_support::scratch_dir("acceptance_b"));
    o.require(a.ok() && b.ok(), "pipeline failed: " + a.errors + b.errors);
    o.require(a.files.size() == b.files.size(), "different file sets");
    for (const auto& [name, content] : a.files) {
        auto it = b.files.find(name);
        o.require(it != b.files.end() && it->second == content, name + " differs");
    }
    o.require(a.files.count("conversations.jsonl") && a.files.count("retrieval_report.txt"), "expected outputs missing");
    if (o.pass) o.detail = std::to_string(a.files.size()) + " files identical";
    return o;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);

    std::vector<forge::Conversation> fixture_convs;
    {
        auto dir = testing_support::scratch_dir("acceptance_fixture");
        if (testing_support::full_pipeline(dir).ok()) fixture_convs = forge::read_conversations(dir / "conversations.jsonl");
    }

    std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, table5_scoring},
        {2, entropy},
        {3, metric_oracle},
        {4, bm25_exhaustive},
        {5, macro_property},
        {6, [&] { return strategy_identity(fixture_convs); }},
        {7, ttest},
        {8, evolution_synthesis},
        {9, length_gate},
        {10, pearson},
        {11, rouge},
        {12, human_alignment},
        {13, determinism},
    };

    std::vector<int> unexpected;
    for (const auto& [id, check] : criteria) {
        Outcome o;
        auto start = std::chrono::steady_clock::now();
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d: %s (%lld ms)%s%s\n", id, o.pass ? "PASS" : "FAIL", static_cast<long long>(ms),
                    o.detail.empty() ? "" : " - ", o.detail.c_str());
        if (!o.pass && !known_failures.count(id)) unexpected.push_back(id);
    }
    if (unexpected.empty()) {
        std::printf("all failures are known (criterion 10: published pairs give r = -0.27)\n");
        return 0;
    }
    std::printf("unexpected failures:");
    for (int id : unexpected) std::printf(" %d", id);
    std::printf("\n");
    return 1;
}
