#include "dsw/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "dsw/rng.hpp"

#ifndef DSW_DATA_DIR
#define DSW_DATA_DIR "data"
#endif

namespace dsw::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string resolve_path(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute()) return path.lexically_normal().string();
    return (base / path).lexically_normal().string();
}

void require_file(const std::string& path, const std::string& what) {
    if (!fs::exists(path)) throw Error(Errc::BadSpec, what + " does not exist: " + path);
}

void require_dir(const std::string& path, const std::string& what) {
    if (!fs::is_directory(path)) throw Error(Errc::BadSpec, what + " is not a directory: " + path);
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out << content;
    if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

search::ParamValue param_value_from_json(const ordered_json& j, const std::string& name) {
    if (j.is_number_integer()) return search::ParamValue{j.get<std::int64_t>()};
    if (j.is_number_float()) return search::ParamValue{j.get<double>()};
    if (j.is_string()) return search::ParamValue{j.get<std::string>()};
    throw Error(Errc::BadSpec, "grid value for '" + name + "' must be a number or string");
}

ordered_json param_value_to_json(const search::ParamValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
    if (const auto* d = std::get_if<double>(&value)) return *d;
    return std::get<std::string>(value);
}

void reject_unknown_keys(const ordered_json& object, const std::vector<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error(Errc::BadSpec, "unknown key '" + key + "' in " + where);
    }
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? "search" : out;
}

std::uint64_t fnv1a(const std::string& blob) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : blob) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

search::SearchSpec parse_search_spec(const ordered_json& j, std::uint64_t seed_override,
                                     bool has_seed_override) {
    reject_unknown_keys(j, {"name", "estimator", "feature_pool", "subset_size", "grid",
                            "sample_limit", "seed"},
                        "search spec");
    search::SearchSpec spec;
    spec.name = j.value("name", "search");
    if (!j.contains("estimator")) throw Error(Errc::BadSpec, "search spec needs an estimator");
    spec.estimator = search::estimator_from_name(j.at("estimator").get<std::string>());
    if (!j.contains("feature_pool") || !j.at("feature_pool").is_array() ||
        j.at("feature_pool").empty())
        throw Error(Errc::BadSpec, "search spec needs a non-empty feature_pool array");
    for (const auto& key : j.at("feature_pool"))
        spec.feature_pool.push_back(key.get<std::string>());
    if (!j.contains("subset_size"))
        throw Error(Errc::BadSpec, "search spec needs subset_size");
    spec.subset_size = j.at("subset_size").get<int>();
    if (j.contains("grid")) {
        if (!j.at("grid").is_object()) throw Error(Errc::BadSpec, "grid must be an object");
        for (const auto& [name, values] : j.at("grid").items()) {
            if (!values.is_array() || values.empty())
                throw Error(Errc::BadSpec, "grid entry '" + name + "' must be a non-empty array");
            std::vector<search::ParamValue> list;
            for (const auto& value : values) list.push_back(param_value_from_json(value, name));
            spec.param_grid.emplace_back(name, std::move(list));
        }
    }
    if (j.contains("sample_limit") && !j.at("sample_limit").is_null()) {
        spec.sample_limit = j.at("sample_limit").get<std::uint64_t>();
        if (*spec.sample_limit == 0) throw Error(Errc::BadSpec, "sample_limit must be positive");
    }
    spec.seed = j.value("seed", 0ULL);
    if (has_seed_override) spec.seed = seed_override;
    return spec;
}

}  // namespace

namespace {

RunConfig interpret_run_config(const ordered_json& j, const fs::path& base,
                               const GlobalOptions& opts);

}  // namespace

RunConfig load_run_config(const std::string& path, const GlobalOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open config " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::BadSpec, std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return interpret_run_config(j, fs::path(path).parent_path(), opts);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::BadSpec, std::string("config field has the wrong type: ") + e.what());
    }
}

namespace {

RunConfig interpret_run_config(const ordered_json& j, const fs::path& base,
                               const GlobalOptions& opts) {
    reject_unknown_keys(j, {"corpus_dir", "labels_path", "output_dir", "parallelism", "cleaning",
                            "question_registry", "lexicons", "split", "searches"},
                        "run config");

    RunConfig config;
    if (!j.contains("corpus_dir")) throw Error(Errc::BadSpec, "config needs corpus_dir");
    if (!j.contains("labels_path")) throw Error(Errc::BadSpec, "config needs labels_path");
    config.corpus_dir = resolve_path(base, j.at("corpus_dir").get<std::string>());
    config.labels_path = resolve_path(base, j.at("labels_path").get<std::string>());
    config.output_dir = resolve_path(base, j.value("output_dir", "out"));
    config.parallelism = j.value("parallelism", 0u);

    if (j.contains("cleaning")) {
        const ordered_json& c = j.at("cleaning");
        reject_unknown_keys(c, {"lowercase", "punctuation", "markers"}, "cleaning");
        config.cleaning.lowercase = c.value("lowercase", true);
        if (c.contains("punctuation"))
            config.cleaning.punctuation = c.at("punctuation").get<std::string>();
        if (c.contains("markers")) {
            config.cleaning.marker_delimiters.clear();
            for (const auto& m : c.at("markers")) {
                const std::string pair = m.get<std::string>();
                if (pair.size() != 2)
                    throw Error(Errc::BadSpec, "marker '" + pair + "' must be two characters");
                config.cleaning.marker_delimiters.emplace_back(pair[0], pair[1]);
            }
        }
    }

    if (j.contains("question_registry") && !j.at("question_registry").is_null())
        config.question_registry_path = resolve_path(base, j.at("question_registry").get<std::string>());

    const fs::path data_dir(DSW_DATA_DIR);
    config.polarity_path = (data_dir / "lexicons" / "polarity.tsv").string();
    config.pos_path = (data_dir / "lexicons" / "pos.tsv").string();
    config.stopwords_path = (data_dir / "lexicons" / "stopwords.txt").string();
    config.first_person_path = (data_dir / "lexicons" / "first_person.txt").string();
    if (j.contains("lexicons")) {
        const ordered_json& l = j.at("lexicons");
        reject_unknown_keys(l, {"polarity", "pos", "stopwords", "first_person"}, "lexicons");
        if (l.contains("polarity"))
            config.polarity_path = resolve_path(base, l.at("polarity").get<std::string>());
        if (l.contains("pos")) config.pos_path = resolve_path(base, l.at("pos").get<std::string>());
        if (l.contains("stopwords"))
            config.stopwords_path = resolve_path(base, l.at("stopwords").get<std::string>());
        if (l.contains("first_person"))
            config.first_person_path = resolve_path(base, l.at("first_person").get<std::string>());
    }

    if (j.contains("split")) {
        const ordered_json& s = j.at("split");
        reject_unknown_keys(s, {"plan", "ratio", "seed"}, "split");
        if (s.contains("plan")) {
            config.split.plan_path = resolve_path(base, s.at("plan").get<std::string>());
        } else {
            config.split.ratio = s.value("ratio", 0.8);
            config.split.seed = s.value("seed", 0ULL);
        }
    }

    if (!j.contains("searches") || !j.at("searches").is_array() || j.at("searches").empty())
        throw Error(Errc::BadSpec, "config needs at least one search spec");
    for (const auto& spec : j.at("searches"))
        config.searches.push_back(
            parse_search_spec(spec, opts.seed.value_or(0), opts.seed.has_value()));
    {
        std::vector<std::string> names;
        for (const auto& spec : config.searches) names.push_back(sanitize_name(spec.name));
        std::sort(names.begin(), names.end());
        if (std::adjacent_find(names.begin(), names.end()) != names.end())
            throw Error(Errc::BadSpec, "search spec names must be distinct");
    }

    if (opts.out_dir) config.output_dir = *opts.out_dir;
    if (opts.parallelism) config.parallelism = *opts.parallelism;
    if (opts.seed) config.split.seed = *opts.seed;

    require_dir(config.corpus_dir, "corpus_dir");
    require_file(config.labels_path, "labels_path");
    require_file(config.polarity_path, "polarity lexicon");
    require_file(config.pos_path, "POS lexicon");
    require_file(config.stopwords_path, "stopword list");
    require_file(config.first_person_path, "first-person list");
    if (config.question_registry_path) require_file(*config.question_registry_path, "question registry");
    if (config.split.plan_path) require_file(*config.split.plan_path, "split plan");

    // effective configuration, embedded verbatim in the run manifest
    ordered_json r;
    r["corpus_dir"] = config.corpus_dir;
    r["labels_path"] = config.labels_path;
    r["output_dir"] = config.output_dir;
    r["parallelism"] = config.parallelism;
    r["cleaning"] = {{"lowercase", config.cleaning.lowercase},
                     {"punctuation", config.cleaning.punctuation}};
    r["cleaning"]["markers"] = ordered_json::array();
    for (const auto& [open_c, close_c] : config.cleaning.marker_delimiters)
        r["cleaning"]["markers"].push_back(std::string{open_c, close_c});
    r["question_registry"] =
        config.question_registry_path ? ordered_json(*config.question_registry_path) : ordered_json();
    r["lexicons"] = {{"polarity", config.polarity_path},
                     {"pos", config.pos_path},
                     {"stopwords", config.stopwords_path},
                     {"first_person", config.first_person_path}};
    if (config.split.plan_path) {
        r["split"] = {{"plan", *config.split.plan_path}};
    } else {
        r["split"] = {{"ratio", config.split.ratio}, {"seed", config.split.seed}};
    }
    r["searches"] = ordered_json::array();
    for (const auto& spec : config.searches) {
        ordered_json s;
        s["name"] = spec.name;
        s["estimator"] = search::estimator_name(spec.estimator);
        s["feature_pool"] = spec.feature_pool;
        s["subset_size"] = spec.subset_size;
        ordered_json grid;
        for (const auto& [name, values] : spec.param_grid) {
            ordered_json list = ordered_json::array();
            for (const auto& value : values) list.push_back(param_value_to_json(value));
            grid[name] = std::move(list);
        }
        s["grid"] = std::move(grid);
        s["sample_limit"] = spec.sample_limit ? ordered_json(*spec.sample_limit) : ordered_json();
        s["seed"] = spec.seed;
        r["searches"].push_back(std::move(s));
    }
    config.resolved = std::move(r);
    return config;
}

}  // namespace

namespace {

struct IngestOutcome {
    corpus::Corpus accepted;
    corpus::LabelSet labels;
    std::vector<std::pair<std::string, std::string>> rejected;  // id, reason
    std::vector<std::string> row_notes;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

IngestOutcome do_ingest(const RunConfig& config) {
    IngestOutcome out;
    out.labels = corpus::load_labels_file(config.labels_path);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config.corpus_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".tsv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    out.accepted.provenance = corpus::Provenance::Real;
    for (const fs::path& file : files) {
        const std::string id = file.stem().string();
        corpus::ParseResult parsed =
            corpus::parse_transcript_file(file.string(), id, corpus::RowPolicy::DropBadRows);
        for (const corpus::RowIssue& issue : parsed.dropped_rows) {
            out.row_notes.push_back(id + " row " + std::to_string(issue.row) + ": " + issue.detail);
        }
        corpus::Session cleaned = corpus::clean_session(parsed.session, config.cleaning);
        const corpus::RejectReason reason = corpus::validate_session(cleaned);
        if (reason != corpus::RejectReason::None) {
            out.rejected.emplace_back(id, corpus::reject_reason_name(reason));
            continue;
        }
        const auto label = out.labels.by_session.find(id);
        if (label == out.labels.by_session.end()) {
            out.rejected.emplace_back(id, "NoLabel");
            continue;
        }
        cleaned.label = label->second;
        if (label->second == 1) ++out.positives;
        else ++out.negatives;
        out.accepted.sessions.push_back(std::move(cleaned));
    }
    return out;
}

std::string ingest_summary(const IngestOutcome& outcome) {
    std::ostringstream os;
    os << outcome.accepted.sessions.size() << " accepted, " << outcome.rejected.size()
       << " rejected";
    if (!outcome.rejected.empty()) {
        os << " (";
        for (std::size_t i = 0; i < outcome.rejected.size(); ++i) {
            if (i > 0) os << ", ";
            os << outcome.rejected[i].second;
        }
        os << ")";
    }
    return os.str();
}

void write_ingest_report(const RunConfig& config, const IngestOutcome& outcome) {
    std::ostringstream os;
    os << ingest_summary(outcome) << "\n";
    os << "corpus_dir: " << config.corpus_dir << "\n";
    os << "labels: " << outcome.labels.by_session.size() << " ("
       << outcome.labels.positives << " positive, " << outcome.labels.negatives << " negative)\n";
    os << "accepted: " << outcome.accepted.sessions.size() << " (" << outcome.positives
       << " positive, " << outcome.negatives << " negative)\n";
    os << "rejected: " << outcome.rejected.size() << "\n";
    for (const auto& [id, reason] : outcome.rejected) os << "  " << id << ": " << reason << "\n";
    os << "dropped_rows: " << outcome.row_notes.size() << "\n";
    for (const std::string& note : outcome.row_notes) os << "  " << note << "\n";
    write_text_file(fs::path(config.output_dir) / "ingest_report.txt", os.str());
}

struct ExtractOutcome {
    features::QuestionRegistry registry;
    features::Lexica lexica;
    features::FeatureMatrix matrix;  // all feature keys, corpus order
};

ExtractOutcome do_extract(const RunConfig& config, const corpus::Corpus& accepted) {
    ExtractOutcome out;
    out.registry = config.question_registry_path
                       ? features::QuestionRegistry::load(*config.question_registry_path)
                       : features::QuestionRegistry::defaults();
    out.lexica.polarity = text::PolarityLexicon::load(config.polarity_path);
    out.lexica.pos = text::PosLexicon::load(config.pos_path);
    out.lexica.stopwords = text::StopwordSet::load(config.stopwords_path);
    out.lexica.first_person = text::FirstPersonSet::load(config.first_person_path);
    out.matrix = features::build_matrix(accepted, out.registry, out.lexica,
                                        features::feature_keys(out.registry));
    return out;
}

void write_features_csv(const RunConfig& config, const features::FeatureMatrix& matrix) {
    std::ostringstream os;
    features::write_matrix_csv(matrix, os);
    write_text_file(fs::path(config.output_dir) / "features.csv", os.str());
}

}  // namespace

int exit_code_for(const Error& error) {
    switch (error.code()) {
        case Errc::MalformedHeader:
        case Errc::UnknownSpeaker:
        case Errc::BadTimestamp:
        case Errc::MissingColumn:
        case Errc::NonBinaryLabel:
        case Errc::DuplicateSession:
        case Errc::UnlabeledSession:
        case Errc::BadSpec:
        case Errc::BadArgs:
        case Errc::UnknownFeatureKey:
        case Errc::MissingManifest:
            return kExitValidation;
        default:
            return kExitRuntime;
    }
}

int cmd_ingest(const RunConfig& config) {
    fs::create_directories(config.output_dir);
    const IngestOutcome outcome = do_ingest(config);
    write_ingest_report(config, outcome);
    std::cout << ingest_summary(outcome) << "\n";
    if (outcome.accepted.sessions.empty()) {
        std::cerr << "error: no sessions accepted\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_extract(const RunConfig& config) {
    fs::create_directories(config.output_dir);
    const IngestOutcome outcome = do_ingest(config);
    write_ingest_report(config, outcome);
    if (outcome.accepted.sessions.empty()) {
        std::cerr << "error: no sessions accepted\n";
        return kExitValidation;
    }
    const ExtractOutcome extracted = do_extract(config, outcome.accepted);
    write_features_csv(config, extracted.matrix);
    std::cout << "wrote features for " << extracted.matrix.rows.size() << " sessions ("
              << extracted.matrix.feature_keys.size() << " columns)\n";
    return kExitOk;
}

int cmd_search(const RunConfig& config) {
    fs::create_directories(config.output_dir);
    const IngestOutcome outcome = do_ingest(config);
    write_ingest_report(config, outcome);
    if (outcome.accepted.sessions.empty()) {
        std::cerr << "error: no sessions accepted\n";
        return kExitValidation;
    }
    const ExtractOutcome extracted = do_extract(config, outcome.accepted);
    write_features_csv(config, extracted.matrix);

    corpus::SplitPlan plan;
    if (config.split.plan_path) {
        std::ifstream in(*config.split.plan_path);
        if (!in) throw Error(Errc::IoError, "cannot open split plan " + *config.split.plan_path);
        plan = corpus::load_split_plan(in);
    } else {
        plan = corpus::split_corpus(outcome.accepted, config.split.ratio, config.split.seed);
    }
    {
        std::ostringstream os;
        corpus::save_split_plan(plan, os);
        write_text_file(fs::path(config.output_dir) / "split_plan.tsv", os.str());
    }

    const features::FeatureMatrix train = features::filter_rows(extracted.matrix, plan.train_ids);
    const features::FeatureMatrix test = features::filter_rows(extracted.matrix, plan.test_ids);
    if (train.rows.empty()) throw Error(Errc::EmptyTrainingSet, "split produced no training rows");
    if (test.rows.empty()) throw Error(Errc::EmptyTestSet, "split produced no test rows");

    const double baseline0 = search::baseline_accuracy(test.labels, 0);
    const double baseline1 = search::baseline_accuracy(test.labels, 1);
    {
        std::ostringstream os;
        os << "test sessions: " << test.labels.size() << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "constant 0 accuracy: %.6f\n", baseline0);
        os << buf;
        std::snprintf(buf, sizeof(buf), "constant 1 accuracy: %.6f\n", baseline1);
        os << buf;
        write_text_file(fs::path(config.output_dir) / "baseline.txt", os.str());
    }

    const unsigned parallelism =
        config.parallelism > 0 ? config.parallelism
                               : std::max(1u, std::thread::hardware_concurrency());

    ordered_json manifest;
    manifest["tool"] = "dsw";
    manifest["manifest_version"] = 1;
    manifest["config_digest"] = hex64(fnv1a(config.resolved.dump()));
    manifest["config"] = config.resolved;
    manifest["corpus"] = {{"accepted", outcome.accepted.sessions.size()},
                          {"rejected", outcome.rejected.size()},
                          {"positives", outcome.positives},
                          {"negatives", outcome.negatives},
                          {"dropped_rows", outcome.row_notes.size()}};
    manifest["split"] = {{"ratio", plan.ratio},
                         {"seed", plan.seed},
                         {"train", plan.train_ids.size()},
                         {"test", plan.test_ids.size()},
                         {"plan_file", "split_plan.tsv"}};
    manifest["baseline"] = {{"constant_0", baseline0},
                            {"constant_1", baseline1},
                            {"test_size", test.labels.size()}};
    manifest["searches"] = ordered_json::array();

    for (const search::SearchSpec& spec : config.searches) {
        const std::string safe = sanitize_name(spec.name);
        const auto t0 = std::chrono::steady_clock::now();
        search::ProgressFn progress;
        search::ConfigEnumerator probe(spec);
        if (probe.stream_size() >= 1000) {
            progress = [&](std::uint64_t done, std::uint64_t total) {
                std::cerr << '\r' << spec.name << ": " << done << '/' << total << std::flush;
            };
        }
        const search::Leaderboard board = search::run_search(spec, train, test, parallelism, progress);
        if (progress) std::cerr << '\n';
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();

        const std::string csv_name = "leaderboard_" + safe + ".csv";
        const std::string top_name = "top_" + safe + ".txt";
        {
            std::ostringstream os;
            search::write_leaderboard_csv(board, os);
            write_text_file(fs::path(config.output_dir) / csv_name, os.str());
        }
        {
            std::ostringstream os;
            search::write_top_table(board, spec.name, 10, os);
            write_text_file(fs::path(config.output_dir) / top_name, os.str());
        }
        if (board.failures > 0) {
            std::ostringstream os;
            os << "ordinal,error\n";
            for (const search::EvalResult& r : board.results) {
                if (r.failed) os << r.ordinal << ',' << r.error << '\n';
            }
            write_text_file(fs::path(config.output_dir) / ("failures_" + safe + ".csv"), os.str());
        }

        ordered_json entry;
        entry["name"] = spec.name;
        entry["estimator"] = search::estimator_name(spec.estimator);
        entry["spec_digest"] = board.spec_digest;
        entry["total"] = board.total;
        entry["evaluated"] = board.evaluated;
        entry["failures"] = board.failures;
        entry["seed"] = spec.seed;
        entry["leaderboard_csv"] = csv_name;
        entry["top_table"] = top_name;
        const auto best = std::find_if(board.results.begin(), board.results.end(),
                                       [](const search::EvalResult& r) { return !r.failed; });
        if (best != board.results.end()) {
            ordered_json b;
            b["ordinal"] = best->ordinal;
            b["accuracy"] = best->accuracy;
            b["features"] = best->features;
            ordered_json params;
            for (const auto& [name, value] : best->params) params[name] = param_value_to_json(value);
            b["params"] = std::move(params);
            entry["best"] = std::move(b);
        } else {
            entry["best"] = ordered_json();
        }
        manifest["searches"].push_back(std::move(entry));

        std::cout << spec.name << ": evaluated " << board.evaluated << " configs in " << elapsed
                  << " ms, " << board.failures << " failures\n";
    }

    write_text_file(fs::path(config.output_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "run manifest: " << (fs::path(config.output_dir) / "manifest.json").string()
              << "\n";
    return kExitOk;
}

int cmd_report(const std::string& run_dir, std::size_t top_k, std::ostream& out) {
    const fs::path manifest_path = fs::path(run_dir) / "manifest.json";
    if (!fs::exists(manifest_path))
        throw Error(Errc::MissingManifest, "no manifest.json in " + run_dir);
    std::ifstream in(manifest_path);
    ordered_json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::MissingManifest, std::string("unreadable manifest: ") + e.what());
    }

    out << "run: " << run_dir << "\n";
    out << "config digest: " << manifest.value("config_digest", "?") << "\n";
    const auto& baseline = manifest.at("baseline");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "baselines on %llu test sessions: constant 0 -> %.1f%%, constant 1 -> %.1f%%\n",
                  static_cast<unsigned long long>(baseline.at("test_size").get<std::uint64_t>()),
                  100.0 * baseline.at("constant_0").get<double>(),
                  100.0 * baseline.at("constant_1").get<double>());
    out << buf << "\n";

    for (const auto& entry : manifest.at("searches")) {
        const std::string csv_name = entry.at("leaderboard_csv").get<std::string>();
        std::ifstream csv(fs::path(run_dir) / csv_name);
        if (!csv) throw Error(Errc::IoError, "cannot open leaderboard " + csv_name);
        search::Leaderboard board = search::read_leaderboard_csv(csv);
        const std::string title =
            entry.at("name").get<std::string>() + " (" + entry.at("estimator").get<std::string>() + ")";
        search::write_top_table(board, title, top_k, out);
        out << "\n";
    }
    return kExitOk;
}

int cmd_synth(const SynthOptions& options) {
    corpus::SynthSpec spec;
    spec.n_sessions = options.sessions;
    spec.positive_fraction = options.positive_fraction;
    spec.signal_strength = options.signal;
    spec.seed = options.seed;
    const corpus::SynthResult result = corpus::generate_synthetic_corpus(spec);

    const fs::path out_dir(options.out_dir);
    fs::create_directories(out_dir / "transcripts");
    for (const corpus::Session& session : result.corpus.sessions) {
        std::ostringstream os;
        corpus::serialize_transcript(session, os);
        write_text_file(out_dir / "transcripts" / (session.session_id + ".tsv"), os.str());
    }
    {
        std::ostringstream os;
        os << "session_id,phq8_binary\n";
        for (const auto& [id, label] : result.labels.by_session) os << id << ',' << label << '\n';
        write_text_file(out_dir / "labels.csv", os.str());
    }
    std::cout << "wrote " << result.corpus.sessions.size() << " sessions ("
              << result.labels.positives << " positive, " << result.labels.negatives
              << " negative) to " << out_dir.string() << "\n";
    return kExitOk;
}

}  // namespace dsw::cli
