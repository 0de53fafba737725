// cadejo: fetch Salvadoran news feeds, cluster the day's stories, tag them
// with LDA topics and publish a static digest blog.
//
//   cadejo run|fetch|analyze|publish --config PATH
//          [--now RFC3339] [--seed N] [--dry-run] [--verbose]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cadejo/config.hpp"
#include "cadejo/pipeline.hpp"

namespace {

struct cli_args {
    std::string config_path;
    std::string now_text;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    bool verbose = false;
};

void add_common(CLI::App* cmd, cli_args& args) {
    cmd->add_option("--config", args.config_path, "configuration file (JSON)")
        ->required();
    cmd->add_option("--now", args.now_text,
                    "clock injection, RFC 3339 (default: system time)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.seed = v; },
        "override the LDA seed");
    cmd->add_flag("--dry-run", args.dry_run, "compute counts, write nothing");
    cmd->add_flag("--verbose", args.verbose, "log INFO events to stderr");
}

int run_command(const std::string& stage, const cli_args& args) {
    cadejo::config cfg;
    try {
        cfg = cadejo::load_config(args.config_path);
    } catch (const cadejo::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    }

    cadejo::pipeline_options opts;
    opts.seed_override = args.seed;
    opts.dry_run = args.dry_run;
    opts.verbose = args.verbose;
    if (args.now_text.empty()) {
        opts.now = std::chrono::time_point_cast<std::chrono::seconds>(
            std::chrono::system_clock::now());
    } else {
        auto t = cadejo::parse_rfc3339(args.now_text);
        if (!t) {
            std::fprintf(stderr, "config error: --now is not RFC 3339: %s\n",
                         args.now_text.c_str());
            return 1;
        }
        opts.now = *t;
    }

    try {
        cadejo::store st(cfg.data_dir, !opts.dry_run);
        cadejo::store_lock lock;
        if (!opts.dry_run) lock = st.acquire_lock();
        cadejo::pipeline_state state;
        cadejo::run_record record;
        if (stage == "run") {
            state.standalone = false;
            cadejo::stage_fetch(cfg, opts, st, state);
            cadejo::stage_analyze(cfg, opts, st, state);
            record = cadejo::stage_publish(cfg, opts, st, state);
        } else if (stage == "fetch") {
            cadejo::stage_fetch(cfg, opts, st, state);
            record = state.record;
        } else if (stage == "analyze") {
            cadejo::stage_analyze(cfg, opts, st, state);
            record = state.record;
        } else {
            record = cadejo::stage_publish(cfg, opts, st, state);
        }
        std::printf("%s\n", cadejo::run_record_to_json(record).dump().c_str());
        return 0;
    } catch (const cadejo::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"news digest pipeline"};
    app.require_subcommand(1);

    cli_args args;
    const char* stages[] = {"run", "fetch", "analyze", "publish"};
    const char* help[] = {
        "full pipeline: fetch, analyze, publish",
        "fetch feeds and extract new articles",
        "cluster the pending batch and assign topics",
        "publish pending posts and re-render the site"};
    for (int i = 0; i < 4; ++i) add_common(app.add_subcommand(stages[i], help[i]), args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    for (const char* stage : stages)
        if (app.got_subcommand(stage)) return run_command(stage, args);
    return 1;
}
