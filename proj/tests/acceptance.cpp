// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "dsw/cli.hpp"
#include "dsw/corpus.hpp"
#include "dsw/features.hpp"
#include "dsw/models.hpp"
#include "dsw/search.hpp"
#include "feature_oracle.hpp"
#include "fixture_corpus.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace dsw;

namespace {

struct Check {
    std::string name;
    double budget_ms;  // runtime bound the criterion states
    std::function<void(std::ostringstream& why)> run;  // throws or appends to why on failure
};

struct CoutCapture {
    CoutCapture() : old(std::cout.rdbuf(buffer.rdbuf())) {}
    ~CoutCapture() { std::cout.rdbuf(old); }
    std::ostringstream buffer;
    std::streambuf* old;
};

#define EXPECT(cond)                                                    \
    do {                                                                \
        if (!(cond)) why << "  failed: " << #cond << "\n";              \
    } while (0)

features::Lexica shipped_lexica() {
    features::Lexica lex;
    lex.polarity = text::PolarityLexicon::load(testutil::data_path("lexicons/polarity.tsv"));
    lex.pos = text::PosLexicon::load(testutil::data_path("lexicons/pos.tsv"));
    lex.stopwords = text::StopwordSet::load(testutil::data_path("lexicons/stopwords.txt"));
    lex.first_person = text::FirstPersonSet::load(testutil::data_path("lexicons/first_person.txt"));
    return lex;
}

std::vector<std::string> pool_of(std::size_t n) {
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < n; ++i) pool.push_back("f" + std::to_string(i));
    return pool;
}

void criterion_enumeration_counts(std::ostringstream& why) {
    using search::ConfigEnumerator;
    using search::SearchSpec;
    EXPECT(search::count_subsets(17, 4) == 2380);
    EXPECT(search::count_subsets(19, 5) == 11628);
    EXPECT(search::count_subsets(20, 10) == 184756);

    SearchSpec xgb;
    xgb.estimator = search::Estimator::Boost;
    xgb.feature_pool = pool_of(17);
    xgb.subset_size = 4;
    xgb.param_grid = {{"n_estimators", {std::int64_t{100}, std::int64_t{300}, std::int64_t{500}}}};
    EXPECT(ConfigEnumerator(xgb).total() == 7140);

    SearchSpec svm17;
    svm17.estimator = search::Estimator::Svm;
    svm17.feature_pool = pool_of(17);
    svm17.subset_size = 4;
    svm17.param_grid = {{"gamma", {1.0, 0.1, 0.01, 0.001, std::string("auto")}},
                        {"kernel", {std::string("rbf"), std::string("linear")}}};
    EXPECT(ConfigEnumerator(svm17).total() == 23800);

    SearchSpec svm19 = svm17;
    svm19.feature_pool = pool_of(19);
    svm19.subset_size = 5;
    EXPECT(ConfigEnumerator(svm19).total() == 116280);

    SearchSpec wide;
    wide.estimator = search::Estimator::Svm;
    wide.feature_pool = pool_of(20);
    wide.subset_size = 10;
    wide.param_grid = {{"C", {1.0, 5.0, 10.0}},
                       {"kernel", {std::string("rbf")}},
                       {"gamma", {1.0, std::string("auto")}}};
    const ConfigEnumerator en(wide);
    EXPECT(en.total() == 1108536);

    // boundary unranking stays consistent with the totals
    EXPECT(en.at(0).ordinal == 0);
    EXPECT(en.at(0).subset == std::vector<std::size_t>({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
    SearchSpec last = wide;
    const search::Config tail = ConfigEnumerator(last).at(1108535);
    EXPECT(tail.subset == std::vector<std::size_t>({10, 11, 12, 13, 14, 15, 16, 17, 18, 19}));
}

void criterion_accuracy_quantization(std::ostringstream& why) {
    EXPECT(std::abs(31.0 / 37.0 - 0.8378378378378378) < 1e-15);
    EXPECT(std::abs(26.0 / 37.0 - 0.7027027027027027) < 1e-15);
    EXPECT(std::abs(24.0 / 37.0 - 0.6486486486486487) < 1e-15);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * 31.0 / 37.0);
    EXPECT(std::string(buf) == "83.8");
    std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * 26.0 / 37.0);
    EXPECT(std::string(buf) == "70.3");
    // 24/37 = 64.86...%; the 64.8 headline figure comes from truncation, not rounding
    std::snprintf(buf, sizeof(buf), "%.4f", 24.0 / 37.0);
    EXPECT(std::string(buf) == "0.6486");

    // a real search over a 37-session test split only ever produces k/37
    const corpus::SynthResult synth = corpus::generate_synthetic_corpus({189, 0.3, 1.0, 2});
    corpus::Corpus cleaned;
    const corpus::CleaningPolicy policy = corpus::CleaningPolicy::defaults();
    for (const auto& raw : synth.corpus.sessions)
        cleaned.sessions.push_back(corpus::clean_session(raw, policy));
    const corpus::SplitPlan plan = corpus::split_corpus(cleaned, 0.8, 4);
    EXPECT(plan.test_ids.size() == 37);

    const features::QuestionRegistry reg = features::QuestionRegistry::defaults();
    const features::Lexica lexica = shipped_lexica();
    const features::FeatureMatrix all =
        features::build_matrix(cleaned, reg, lexica, features::feature_keys(reg));
    const features::FeatureMatrix train = features::filter_rows(all, plan.train_ids);
    const features::FeatureMatrix test = features::filter_rows(all, plan.test_ids);

    search::SearchSpec spec;
    spec.estimator = search::Estimator::Forest;
    spec.feature_pool = {"avg_response_time", "speech_speed", "avg_sentiment", "avg_characters",
                         "fp_avg"};
    spec.subset_size = 2;
    spec.param_grid = {{"n_trees", {std::int64_t{15}}}};
    spec.seed = 6;
    const search::Leaderboard board = search::run_search(spec, train, test, 2);
    EXPECT(board.failures == 0);
    for (const auto& r : board.results) {
        const auto correct = r.tp + r.tn;
        EXPECT(r.tp + r.fp + r.tn + r.fn == 37);
        EXPECT(r.accuracy == static_cast<double>(correct) / 37.0);
    }
}

void criterion_feature_oracles(std::ostringstream& why) {
    const features::QuestionRegistry reg = features::QuestionRegistry::defaults();
    const features::Lexica lexica = shipped_lexica();
    const corpus::Corpus fixture = fixture::ten_session_fixture();
    EXPECT(fixture.sessions.size() == 10);
    for (const auto& session : fixture.sessions) {
        const features::FeatureVector fv = features::extract_features(session, reg, lexica);
        const std::vector<double> expected = oracle::extract_all(session, reg, lexica);
        EXPECT(fv.values.size() == 30);
        EXPECT(expected.size() == 30);
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (!(std::abs(fv.values[i] - expected[i]) <= 1e-9)) {
                why << "  feature " << fv.keys[i] << " of " << session.session_id << ": got "
                    << fv.values[i] << ", oracle " << expected[i] << "\n";
            }
        }
    }

    // frozen hand computation on a two-question session with a tiny lexicon
    features::Lexica tiny;
    tiny.polarity.entries = {{"good", 0.7}, {"pilot", 0.2}};
    tiny.polarity.negators = text::PolarityLexicon::default_negators();
    tiny.pos.word_tags = {{"read", text::PosTag::Verb},
                          {"books", text::PosTag::Noun},
                          {"pilot", text::PosTag::Noun}};
    tiny.pos.suffix_rules = text::PosLexicon::default_suffix_rules();
    tiny.stopwords.words = {"i", "a"};
    tiny.first_person.words = {"i", "we", "us"};
    const corpus::Session& s01 = fixture.sessions[0];  // fx01
    const features::FeatureVector fv = features::extract_features(s01, reg, tiny);
    EXPECT(std::abs(fv.at("q_sent_dream_job") - 0.2) <= 1e-9);
    EXPECT(std::abs(fv.at("q_sent_relax") - 0.7) <= 1e-9);
    EXPECT(fv.at("q_sent_introvert") == 0.0);
    EXPECT(std::abs(fv.at("avg_sentiment") - 0.45) <= 1e-9);
    EXPECT(std::abs(fv.at("avg_response_time") - 1.0) <= 1e-9);
    EXPECT(std::abs(fv.at("speech_speed") - 1.4) <= 1e-9);
    EXPECT(std::abs(fv.at("avg_unique_frequency") - 1.0) <= 1e-9);
    EXPECT(std::abs(fv.at("avg_sw_frequency") - 0.375) <= 1e-9);
    EXPECT(std::abs(fv.at("avg_characters") - 3.25) <= 1e-9);
    EXPECT(std::abs(fv.at("avg_nouns") - 0.875) <= 1e-9);
    EXPECT(std::abs(fv.at("avg_verbs") - 0.125) <= 1e-9);
    EXPECT(fv.at("adj_freq") == 0.0);
    EXPECT(fv.at("avg_adv") == 0.0);
    EXPECT(std::abs(fv.at("fp_avg") - 0.125) <= 1e-9);
}

void criterion_classifier_sanity(std::ostringstream& why) {
    using namespace dsw::models;

    // split choice equals exhaustive enumeration on <=20-row fixtures
    std::mt19937 gen(515);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 2 + gen() % 19;
        const std::size_t d = 1 + gen() % 3;
        Matrix X;
        Labels y;
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row;
            for (std::size_t f = 0; f < d; ++f) row.push_back(static_cast<double>(gen() % 5));
            X.push_back(std::move(row));
            y.push_back(static_cast<int>(gen() % 2));
            (y.back() ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;

        // oracle: brute force with exact rational comparison
        bool found = false;
        int best_f = -1;
        double best_thr = 0.0;
        unsigned long long best_num = 0, best_den = 1;
        for (std::size_t f = 0; f < d; ++f) {
            std::vector<double> values;
            for (const auto& row : X) values.push_back(row[f]);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t v = 0; v + 1 < values.size(); ++v) {
                const double thr = (values[v] + values[v + 1]) / 2.0;
                unsigned long long pl = 0, nl = 0, pr = 0, nr = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (X[i][f] <= thr) (y[i] ? pl : nl) += 1;
                    else (y[i] ? pr : nr) += 1;
                }
                const unsigned long long n_left = pl + nl, n_right = pr + nr;
                if (n_left == 0 || n_right == 0) continue;
                const unsigned long long num =
                    (pl * pl + nl * nl) * n_right + (pr * pr + nr * nr) * n_left;
                const unsigned long long den = n_left * n_right;
                if (!found || static_cast<unsigned __int128>(num) * best_den >
                                  static_cast<unsigned __int128>(best_num) * den) {
                    found = true;
                    best_f = static_cast<int>(f);
                    best_thr = thr;
                    best_num = num;
                    best_den = den;
                }
            }
        }
        const FittedModel model = fit_tree(X, y, {1, 2, 0});
        const auto& root = std::get<TreeModel>(model.impl).tree.nodes[0];
        if (found) {
            EXPECT(root.feature == best_f);
            EXPECT(root.threshold == best_thr);
        } else {
            EXPECT(root.feature == -1);
        }
    }

    // boosting logloss is non-increasing round over round
    {
        Matrix X;
        Labels y;
        std::normal_distribution<double> noise(0.0, 1.0);
        for (int i = 0; i < 60; ++i) {
            const int label = i % 2;
            X.push_back({noise(gen) + 1.6 * label, noise(gen)});
            y.push_back(label);
        }
        for (double lr : {0.05, 0.3, 1.0}) {
            BoostParams params;
            params.n_estimators = 40;
            params.learning_rate = lr;
            params.max_depth = 3;
            const FittedModel model = fit_boost(X, y, params);
            const auto& log = std::get<BoostModel>(model.impl).metric_log;
            for (std::size_t r = 1; r < log.size(); ++r)
                EXPECT(log[r] <= log[r - 1] + 1e-12);
        }
    }

    // SVM dual feasibility at termination
    {
        Matrix X;
        Labels y;
        std::normal_distribution<double> noise(0.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const int label = i % 2;
            X.push_back({noise(gen) + label, noise(gen) - label});
            y.push_back(label);
        }
        SvmParams params;
        params.kernel = Kernel::Rbf;
        params.gamma = 0.7;
        params.C = 1.5;
        const FittedModel model = fit_svm(X, y, params);
        const auto& svm = std::get<SvmModel>(model.impl);
        double sum = 0.0;
        for (double coef : svm.coefficients) {
            EXPECT(std::abs(coef) <= params.C + 1e-12);
            sum += coef;
        }
        EXPECT(std::abs(sum) <= 1e-6);
    }

    // XOR: linear capped at 0.75, rbf gamma=1 reaches 1.0
    {
        const Matrix X = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        const Labels y = {0, 1, 1, 0};
        SvmParams linear;
        linear.kernel = Kernel::Linear;
        linear.gamma = 1.0;
        linear.C = 10.0;
        const Labels lp = fit_svm(X, y, linear).predict(X);
        std::size_t linear_correct = 0;
        for (std::size_t i = 0; i < y.size(); ++i) linear_correct += lp[i] == y[i] ? 1 : 0;
        EXPECT(linear_correct <= 3);

        SvmParams rbf;
        rbf.kernel = Kernel::Rbf;
        rbf.gamma = 1.0;
        rbf.C = 10.0;
        EXPECT(fit_svm(X, y, rbf).predict(X) == y);
    }
}

void criterion_end_to_end(std::ostringstream& why) {
    const fs::path dir = testutil::fresh_dir("acceptance_e2e");

    cli::SynthOptions synth;
    synth.sessions = 189;
    synth.positive_fraction = 0.3;
    synth.signal = 2.0;
    synth.seed = 1;
    synth.out_dir = (dir / "fixture").string();
    {
        CoutCapture mute;
        if (cli::cmd_synth(synth) != cli::kExitOk) {
            why << "  synth failed\n";
            return;
        }
    }

    const features::QuestionRegistry reg = features::QuestionRegistry::defaults();
    const std::vector<std::string> scalars = {
        "avg_sentiment", "avg_response_time", "speech_speed", "avg_unique_frequency",
        "avg_sw_frequency", "avg_characters", "avg_nouns", "avg_verbs", "adj_freq",
        "avg_adv", "fp_avg"};
    std::vector<std::string> pool17 = scalars;
    for (std::size_t i = 0; i < 6; ++i) pool17.push_back("q_sent_" + reg.entries[i].key);

    auto write_config = [&](const std::string& name, unsigned parallelism) {
        std::ostringstream config;
        config << "{\n  \"corpus_dir\": \"fixture/transcripts\",\n"
               << "  \"labels_path\": \"fixture/labels.csv\",\n"
               << "  \"output_dir\": \"" << name << "\",\n"
               << "  \"parallelism\": " << parallelism << ",\n"
               << "  \"lexicons\": {\n"
               << "    \"polarity\": \"" << testutil::data_path("lexicons/polarity.tsv") << "\",\n"
               << "    \"pos\": \"" << testutil::data_path("lexicons/pos.tsv") << "\",\n"
               << "    \"stopwords\": \"" << testutil::data_path("lexicons/stopwords.txt")
               << "\",\n"
               << "    \"first_person\": \"" << testutil::data_path("lexicons/first_person.txt")
               << "\"\n  },\n"
               << "  \"split\": {\"ratio\": 0.8, \"seed\": 5},\n"
               << "  \"searches\": [{\n    \"name\": \"rf_full\",\n"
               << "    \"estimator\": \"forest\",\n    \"feature_pool\": [";
        for (std::size_t i = 0; i < pool17.size(); ++i)
            config << (i ? ", " : "") << '"' << pool17[i] << '"';
        config << "],\n    \"subset_size\": 4,\n"
               << "    \"grid\": {\"n_trees\": [100], \"max_depth\": [12]},\n"
               << "    \"seed\": 13\n  }]\n}\n";
        return testutil::write_file(dir / (name + ".json"), config.str());
    };

    const auto t0 = std::chrono::steady_clock::now();
    {
        CoutCapture mute;
        const cli::RunConfig config =
            cli::load_run_config(write_config("run_p2", 2).string(), {});
        if (cli::cmd_search(config) != cli::kExitOk) {
            why << "  search (parallelism 2) failed\n";
            return;
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT(seconds < 300.0);

    {
        CoutCapture mute;
        const cli::RunConfig config =
            cli::load_run_config(write_config("run_p1", 1).string(), {});
        if (cli::cmd_search(config) != cli::kExitOk) {
            why << "  search (parallelism 1) failed\n";
            return;
        }
    }

    const std::string board_p2 = testutil::read_file(dir / "run_p2" / "leaderboard_rf_full.csv");
    const std::string board_p1 = testutil::read_file(dir / "run_p1" / "leaderboard_rf_full.csv");
    EXPECT(!board_p2.empty());
    EXPECT(board_p2 == board_p1);

    std::ifstream manifest_in(dir / "run_p2" / "manifest.json");
    nlohmann::ordered_json manifest;
    manifest_in >> manifest;
    EXPECT(manifest.at("searches")[0].at("total").get<std::uint64_t>() == 2380);
    EXPECT(manifest.at("searches")[0].at("evaluated").get<std::uint64_t>() == 2380);
    EXPECT(manifest.at("searches")[0].at("failures").get<std::uint64_t>() == 0);
    EXPECT(manifest.at("split").at("test").get<std::uint64_t>() == 37);

    const double best = manifest.at("searches")[0].at("best").at("accuracy").get<double>();
    const double baseline0 = manifest.at("baseline").at("constant_0").get<double>();
    const double baseline1 = manifest.at("baseline").at("constant_1").get<double>();
    EXPECT(best > baseline0);
    EXPECT(best > baseline1);
}

void criterion_determinism(std::ostringstream& why) {
    using namespace dsw::models;

    // synth: byte-identical repeat
    const corpus::SynthResult a = corpus::generate_synthetic_corpus({25, 0.4, 1.0, 31});
    const corpus::SynthResult b = corpus::generate_synthetic_corpus({25, 0.4, 1.0, 31});
    for (std::size_t i = 0; i < a.corpus.sessions.size(); ++i) {
        std::ostringstream sa, sb;
        corpus::serialize_transcript(a.corpus.sessions[i], sa);
        corpus::serialize_transcript(b.corpus.sessions[i], sb);
        EXPECT(sa.str() == sb.str());
    }

    // split: identical plans under one seed
    corpus::Corpus cleaned;
    const corpus::CleaningPolicy policy = corpus::CleaningPolicy::defaults();
    for (const auto& raw : a.corpus.sessions)
        cleaned.sessions.push_back(corpus::clean_session(raw, policy));
    const corpus::SplitPlan p1 = corpus::split_corpus(cleaned, 0.8, 9);
    const corpus::SplitPlan p2 = corpus::split_corpus(cleaned, 0.8, 9);
    EXPECT(p1.train_ids == p2.train_ids);
    EXPECT(p1.test_ids == p2.test_ids);

    // fits: identical predictions on a probe set
    std::mt19937 gen(77);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix X, probe;
    Labels y;
    for (int i = 0; i < 40; ++i) {
        const int label = i % 2;
        X.push_back({noise(gen) + 2.0 * label, noise(gen)});
        y.push_back(label);
        probe.push_back({noise(gen), noise(gen)});
    }
    ForestParams forest;
    forest.n_trees = 25;
    forest.seed = 3;
    EXPECT(fit_forest(X, y, forest).predict(probe) == fit_forest(X, y, forest).predict(probe));
    BoostParams boost;
    boost.n_estimators = 15;
    boost.learning_rate = 0.3;
    boost.seed = 3;
    EXPECT(fit_boost(X, y, boost).predict(probe) == fit_boost(X, y, boost).predict(probe));
    SvmParams svm;
    svm.seed = 3;
    EXPECT(fit_svm(X, y, svm).predict(probe) == fit_svm(X, y, svm).predict(probe));

    // search: leaderboards agree across parallelism levels
    features::FeatureMatrix train, test;
    train.feature_keys = test.feature_keys = {"x", "y"};
    for (int i = 0; i < 30; ++i) {
        const int label = i % 2;
        const std::vector<double> row = {noise(gen) + 2.0 * label, noise(gen)};
        if (i < 20) {
            train.session_ids.push_back("tr" + std::to_string(i));
            train.rows.push_back(row);
            train.labels.push_back(label);
        } else {
            test.session_ids.push_back("te" + std::to_string(i));
            test.rows.push_back(row);
            test.labels.push_back(label);
        }
    }
    search::SearchSpec spec;
    spec.estimator = search::Estimator::Forest;
    spec.feature_pool = {"x", "y"};
    spec.subset_size = 1;
    spec.param_grid = {{"n_trees", {std::int64_t{9}}}};
    spec.seed = 15;
    std::ostringstream csv1, csv8;
    search::write_leaderboard_csv(search::run_search(spec, train, test, 1), csv1);
    search::write_leaderboard_csv(search::run_search(spec, train, test, 8), csv8);
    EXPECT(csv1.str() == csv8.str());
}

void criterion_baseline_contract(std::ostringstream& why) {
    std::mt19937 gen(2718);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + gen() % 120;
        std::vector<int> labels;
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(static_cast<int>(gen() % 2));
            ones += static_cast<std::size_t>(labels.back());
        }
        const double want1 = static_cast<double>(ones) / static_cast<double>(n);
        const double want0 = static_cast<double>(n - ones) / static_cast<double>(n);
        if (search::baseline_accuracy(labels, 1) != want1)
            why << "  constant-1 mismatch at n=" << n << "\n";
        if (search::baseline_accuracy(labels, 0) != want0)
            why << "  constant-0 mismatch at n=" << n << "\n";
    }
}

}  // namespace

int main() {
    const std::vector<Check> checks = {
        {"enumeration-counts", 1000.0, criterion_enumeration_counts},
        {"accuracy-quantization", 1000.0, criterion_accuracy_quantization},
        {"feature-oracles", 5000.0, criterion_feature_oracles},
        {"classifier-sanity", 30000.0, criterion_classifier_sanity},
        {"end-to-end-search", 300000.0, criterion_end_to_end},
        {"determinism", 60000.0, criterion_determinism},
        {"baseline-contract", 5000.0, criterion_baseline_contract},
    };

    int failures = 0;
    for (const Check& check : checks) {
        std::ostringstream why;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            check.run(why);
        } catch (const std::exception& e) {
            why << "  exception: " << e.what() << "\n";
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (ms > check.budget_ms)
            why << "  over budget: " << ms << " ms > " << check.budget_ms << " ms\n";
        const bool ok = why.str().empty();
        failures += ok ? 0 : 1;
        std::printf("[%s] %-24s (%.0f ms)\n", ok ? "PASS" : "FAIL", check.name.c_str(), ms);
        if (!ok) std::fputs(why.str().c_str(), stdout);
    }
    return failures == 0 ? 0 : 1;
}
