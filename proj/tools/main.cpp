#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dsw/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dsw: screen for depression from timed two-speaker interview transcripts"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    unsigned parallelism = 0;
    std::uint64_t seed = 0;
    auto* opt_config = app.add_option("--config", config_path, "run-configuration JSON");
    auto* opt_out = app.add_option("--out", out_dir,
                                   "output directory (the run directory for `report`)");
    auto* opt_parallelism =
        app.add_option("--parallelism", parallelism, "worker threads (default: all cores)");
    auto* opt_seed = app.add_option("--seed", seed, "override the split seed and every search seed");

    auto* ingest = app.add_subcommand("ingest", "parse, clean, validate and label the corpus");
    auto* extract = app.add_subcommand("extract", "ingest, then write the full feature matrix");
    auto* search = app.add_subcommand("search", "extract, split, and run every configured search");

    auto* report = app.add_subcommand("report", "summarize a finished run directory");
    std::size_t top_k = 10;
    report->add_option("--top", top_k, "rows to show per leaderboard");

    auto* synth = app.add_subcommand("synth", "generate a synthetic fixture corpus");
    dsw::cli::SynthOptions synth_options;
    synth->add_option("--sessions", synth_options.sessions, "number of sessions");
    synth->add_option("--positive-fraction", synth_options.positive_fraction,
                      "fraction of depressed sessions");
    synth->add_option("--signal", synth_options.signal, "planted signal strength (0 = none)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed() || extract->parsed() || search->parsed()) {
            if (opt_config->count() == 0) {
                std::cerr << "error: --config is required\n";
                return dsw::cli::kExitValidation;
            }
            dsw::cli::GlobalOptions opts;
            if (opt_out->count() > 0) opts.out_dir = out_dir;
            if (opt_parallelism->count() > 0) opts.parallelism = parallelism;
            if (opt_seed->count() > 0) opts.seed = seed;
            const dsw::cli::RunConfig config = dsw::cli::load_run_config(config_path, opts);
            if (ingest->parsed()) return dsw::cli::cmd_ingest(config);
            if (extract->parsed()) return dsw::cli::cmd_extract(config);
            return dsw::cli::cmd_search(config);
        }
        if (report->parsed()) {
            if (opt_out->count() == 0) {
                std::cerr << "error: report needs --out <run directory>\n";
                return dsw::cli::kExitValidation;
            }
            return dsw::cli::cmd_report(out_dir, top_k, std::cout);
        }
        // synth
        if (opt_out->count() == 0) {
            std::cerr << "error: synth needs --out <directory>\n";
            return dsw::cli::kExitValidation;
        }
        if (opt_seed->count() > 0) synth_options.seed = seed;
        synth_options.out_dir = out_dir;
        return dsw::cli::cmd_synth(synth_options);
    } catch (const dsw::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dsw::cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dsw::cli::kExitRuntime;
    }
}
