#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsw/corpus.hpp"
#include "dsw/features.hpp"
#include "dsw/search.hpp"

namespace dsw::cli {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct SplitSettings {
    std::optional<std::string> plan_path;  // explicit plan wins over ratio/seed
    double ratio = 0.8;
    std::uint64_t seed = 0;
};

struct RunConfig {
    std::string corpus_dir;
    std::string labels_path;
    corpus::CleaningPolicy cleaning = corpus::CleaningPolicy::defaults();
    std::optional<std::string> question_registry_path;
    std::string polarity_path;
    std::string pos_path;
    std::string stopwords_path;
    std::string first_person_path;
    SplitSettings split;
    std::vector<search::SearchSpec> searches;
    std::string output_dir = "out";
    unsigned parallelism = 0;  // 0 = hardware concurrency

    nlohmann::ordered_json resolved;  // effective config, embedded in the manifest
};

struct GlobalOptions {
    std::optional<std::string> out_dir;
    std::optional<unsigned> parallelism;
    std::optional<std::uint64_t> seed;  // overrides split seed and every search seed
};

// Parses and validates a JSON run configuration. Relative paths resolve
// against the config file's directory. Throws Error (BadSpec/IoError) on
// missing files or malformed content.
RunConfig load_run_config(const std::string& path, const GlobalOptions& opts = {});

int cmd_ingest(const RunConfig& config);
int cmd_extract(const RunConfig& config);
int cmd_search(const RunConfig& config);
int cmd_report(const std::string& run_dir, std::size_t top_k, std::ostream& out);

struct SynthOptions {
    std::size_t sessions = 189;
    double positive_fraction = 0.3;
    double signal = 2.0;
    std::uint64_t seed = 1;
    std::string out_dir;
};

int cmd_synth(const SynthOptions& options);

// maps an Error to the documented exit codes (1 validation, 2 runtime)
int exit_code_for(const Error& error);

}  // namespace dsw::cli
