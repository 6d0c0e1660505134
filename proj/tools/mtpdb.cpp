#include "mtpdb/cli.hpp"

#include <CLI11.hpp>

#include <iostream>


int main(int argc, char **argv)
{
    using namespace mtpdb;

    CLI::App app{"Probabilistic database queries under open-world and mean-tuple-probability assumptions"};
    RunConfig config;
    std::string mode = "eval", output = "text", mtp;
    bool no_timings = false;

    app.add_option("--mode", mode, "analyze | eval | interval | exact | greedy | oracle | demo3dm | verify")
        ->capture_default_str();
    app.add_option("--db", config.db_dir, "database directory (schema.txt, domain.txt, PRED.csv, constraints.txt)");
    app.add_option("--query", config.query, "UCQ text, e.g. \"S(x), CoA(x,y) | S(Einstein)\"");
    app.add_option("--query-file", config.query_file, "file holding the query");
    app.add_option("--lambda", config.lambda, "open-world threshold (overrides constraints.txt)");
    app.add_option("--mtp", mtp, "REL=MEAN, or REL alone together with --budget");
    app.add_option("--budget", config.budget_override, "use this budget instead of the derived one");
    app.add_option("--output", output, "text | json")->capture_default_str();
    app.add_option("--seed", config.seed, "seed of the property suites")->capture_default_str();
    app.add_option("--trials", config.trials, "trials per property suite")->capture_default_str();
    app.add_option("--instance", config.instance_file, "3DM instance file for demo3dm");
    app.add_option("--cap-worlds", config.cap_worlds, "most possible worlds enumerated")->capture_default_str();
    app.add_option("--cap-subsets", config.cap_subsets, "most completions tried by the oracle")->capture_default_str();
    app.add_flag("--force", config.force, "run greedy on queries with self-joins");
    app.add_flag("--no-timings", no_timings, "omit timings so that output is reproducible byte for byte");
    CLI11_PARSE(app, argc, argv);

    const auto parsed = parse_mode(mode);
    if (not parsed) {
        std::cerr << "error: unknown mode '" << mode << "'\n";
        return kExitInput;
    }
    config.mode = *parsed;
    if (output == "json") config.output = OutputFormat::Json;
    else if (output != "text") {
        std::cerr << "error: unknown output format '" << output << "'\n";
        return kExitInput;
    }
    if (not mtp.empty()) {
        const auto eq = mtp.find('=');
        config.mtp_relation = mtp.substr(0, eq);
        if (eq != std::string::npos) {
            try {
                std::size_t used = 0;
                config.mtp_mean = std::stod(mtp.substr(eq + 1), &used);
                if (used != mtp.size() - eq - 1) throw std::invalid_argument("trailing text");
            } catch (const std::exception &) {
                std::cerr << "error: --mtp expects REL=MEAN\n";
                return kExitInput;
            }
        }
    }
    config.timings = not no_timings;
    return run(config, std::cout, std::cerr);
}
