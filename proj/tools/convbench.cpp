#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convbench/cli.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = convbench::text::trim(item); !t.empty()) out.push_back(t);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversational retrieval benchmark workbench"};
    app.require_subcommand(1);

    std::string config_path, strategies, retrievers, out;
    bool mock = false;
    long long seed = -1;
    long long k = 0;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_flag("--mock", mock, "use bundled mock providers instead of network services");
    app.add_option("--seed", seed, "run seed recorded in the manifest");
    app.add_option("--strategies", strategies, "comma-separated query strategies");
    app.add_option("--retrievers", retrievers, "comma-separated retrievers (bm25, dense:<name>)");
    app.add_option("--k", k, "retrieval depth");
    app.add_option("--out", out, "output directory");

    std::string command;
    for (const char* name : {"synthesize", "eval-retrieval", "eval-generation", "audit", "stats", "report"})
        app.add_subcommand(name)->callback([&command, name] { command = name; });
    app.get_subcommand("synthesize")->description("generate conversations and qrels from source records");
    app.get_subcommand("eval-retrieval")->description("run retrieval strategies and compute metrics and analyses");
    app.get_subcommand("eval-generation")->description("generate and judge answers per retrieval mode");
    app.get_subcommand("audit")->description("LLM quality audit, dependency and question-pattern labels");
    app.get_subcommand("stats")->description("dataset statistics");
    app.get_subcommand("report")->description("consolidate existing reports");
    app.fallthrough();

    CLI11_PARSE(app, argc, argv);

    convbench::cli::RunConfig config;
    try {
        if (!config_path.empty()) config = convbench::cli::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"level", "error"}, {"command", command}, {"type", "parse"}, {"message", e.what()}}.dump()
                  << std::endl;
        return 2;
    }
    convbench::cli::apply_env(config);
    if (mock) config.mock = true;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!strategies.empty()) config.strategies = split_list(strategies);
    if (!retrievers.empty()) config.retrievers = split_list(retrievers);
    if (k > 0) config.k = static_cast<std::size_t>(k);
    if (!out.empty()) config.out = out;

    return convbench::cli::execute(convbench::cli::parse_command(command), config);
}
