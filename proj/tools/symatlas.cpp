// Command-line entry point. Every stage takes the same three options: the
// JSON config, an optional seed override, and the run directory. `all` runs
// the config's stage list in order. Exit codes: 0 success, 2 when the config
// or an input fails validation (including usage errors), 1 otherwise.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "symatlas/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"symbolic-family atlas pipeline"};
    app.set_version_flag("--version", std::string(symatlas::kPipelineVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    static const std::vector<std::pair<const char*, const char*>> commands = {
        {"ingest", "parse the corpus and poet table into the run store"},
        {"families", "induce symbolic families from the stored corpus"},
        {"atlas", "score and gate the three-layer family atlas"},
        {"communities", "partition the core layer and label fields"},
        {"trends", "classify per-family temporal trajectories"},
        {"dynamics", "build per-bin snapshots and the robustness sweep"},
        {"poets", "profile, pool, and cluster poets"},
        {"report", "emit the table and plot-data files"},
        {"all", "run the config's stage list in order"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "pipeline config JSON")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_dir, "run directory (default: out)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        symatlas::PipelineConfig cfg = symatlas::load_config(config_path);
        if (sub->count("--seed")) cfg.seed = seed;
        symatlas::Pipeline pipeline(cfg, out_dir);

        std::vector<std::string> stages;
        if (sub->get_name() == "all") stages = pipeline.config().stages;
        else stages.push_back(sub->get_name());

        for (const std::string& stage : stages) {
            double ms = pipeline.run_stage(stage);
            std::fprintf(stderr, "%s: %.1f ms\n", stage.c_str(), ms);
        }
    } catch (const symatlas::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
