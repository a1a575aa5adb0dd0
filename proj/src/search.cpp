#include "dsw/search.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "dsw/error.hpp"
#include "dsw/rng.hpp"

namespace dsw::search {

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::int64_t as_int(const ParamValue& value, const std::string& name) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
    throw Error(Errc::BadSpec, "parameter '" + name + "' must be an integer");
}

double as_double(const ParamValue& value, const std::string& name) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&value)) return *d;
    throw Error(Errc::BadSpec, "parameter '" + name + "' must be numeric");
}

std::string as_string(const ParamValue& value, const std::string& name) {
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    throw Error(Errc::BadSpec, "parameter '" + name + "' must be a string");
}

struct ResolvedParams {
    models::ForestParams forest;
    models::BoostParams boost;
    models::SvmParams svm;
};

void apply_param(ResolvedParams& out, Estimator estimator, const std::string& name,
                 const ParamValue& value) {
    switch (estimator) {
        case Estimator::Forest:
            if (name == "n_trees") out.forest.n_trees = static_cast<int>(as_int(value, name));
            else if (name == "max_depth") out.forest.max_depth = static_cast<int>(as_int(value, name));
            else if (name == "features_per_split")
                out.forest.features_per_split = static_cast<int>(as_int(value, name));
            else throw Error(Errc::BadSpec, "unknown forest parameter '" + name + "'");
            return;
        case Estimator::Boost:
            if (name == "n_estimators") out.boost.n_estimators = static_cast<int>(as_int(value, name));
            else if (name == "learning_rate") out.boost.learning_rate = as_double(value, name);
            else if (name == "max_depth") out.boost.max_depth = static_cast<int>(as_int(value, name));
            else if (name == "leaf_regularization")
                out.boost.leaf_regularization = as_double(value, name);
            else if (name == "eval_metric")
                out.boost.eval_metric = models::eval_metric_from_name(as_string(value, name));
            else throw Error(Errc::BadSpec, "unknown boost parameter '" + name + "'");
            return;
        case Estimator::Svm:
            if (name == "kernel") out.svm.kernel = models::kernel_from_name(as_string(value, name));
            else if (name == "gamma") {
                if (const auto* s = std::get_if<std::string>(&value)) {
                    if (*s != "auto")
                        throw Error(Errc::BadSpec, "gamma must be a number or 'auto'");
                    out.svm.gamma.reset();
                } else {
                    out.svm.gamma = as_double(value, name);
                }
            } else if (name == "C") out.svm.C = as_double(value, name);
            else if (name == "tolerance") out.svm.tolerance = as_double(value, name);
            else if (name == "max_passes") out.svm.max_passes = static_cast<int>(as_int(value, name));
            else throw Error(Errc::BadSpec, "unknown svm parameter '" + name + "'");
            return;
    }
    throw Error(Errc::BadSpec, "unknown estimator");
}

}  // namespace

const char* estimator_name(Estimator estimator) {
    switch (estimator) {
        case Estimator::Forest: return "forest";
        case Estimator::Boost: return "boost";
        case Estimator::Svm: return "svm";
    }
    return "unknown";
}

Estimator estimator_from_name(const std::string& name) {
    if (name == "forest" || name == "rf") return Estimator::Forest;
    if (name == "boost" || name == "xgb") return Estimator::Boost;
    if (name == "svm") return Estimator::Svm;
    throw Error(Errc::BadSpec, "unknown estimator '" + name + "'");
}

std::string param_value_to_string(const ParamValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&value)) return format_double(*d);
    return std::get<std::string>(value);
}

std::uint64_t count_subsets(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw Error(Errc::BadArgs, "cannot choose " + std::to_string(k) + " from " +
                                              std::to_string(n));
    if (k > n - k) k = n - k;
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;  // exact: intermediate is C(n-k+i, i)
        if (c > static_cast<unsigned __int128>(UINT64_MAX))
            throw Error(Errc::BadArgs, "binomial coefficient exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(c);
}

ConfigEnumerator::ConfigEnumerator(const SearchSpec& spec) : spec_(spec) {
    const std::uint64_t n = spec_.feature_pool.size();
    if (n == 0) throw Error(Errc::BadSpec, "empty feature pool");
    if (spec_.subset_size < 1 || static_cast<std::uint64_t>(spec_.subset_size) > n)
        throw Error(Errc::BadSpec, "subset_size must lie in [1, pool size]");
    {
        std::set<std::string> distinct(spec_.feature_pool.begin(), spec_.feature_pool.end());
        if (distinct.size() != spec_.feature_pool.size())
            throw Error(Errc::BadSpec, "feature pool has duplicate keys");
    }

    grid_size_ = 1;
    for (const auto& [name, values] : spec_.param_grid) {
        if (values.empty())
            throw Error(Errc::BadSpec, "parameter '" + name + "' has an empty value list");
        ResolvedParams probe;
        for (const ParamValue& value : values) apply_param(probe, spec_.estimator, name, value);
        grid_size_ *= values.size();
    }

    const auto k = static_cast<std::uint64_t>(spec_.subset_size);
    n_subsets_ = count_subsets(n, k);
    total_ = n_subsets_ * grid_size_;

    // C(v, j) for v <= n, j <= k, for O(1) unranking
    binom_.assign(n + 1, std::vector<std::uint64_t>(k + 1, 0));
    for (std::uint64_t v = 0; v <= n; ++v) {
        binom_[v][0] = 1;
        for (std::uint64_t j = 1; j <= std::min(v, k); ++j)
            binom_[v][j] = j <= v - 1 ? binom_[v - 1][j - 1] + binom_[v - 1][j] : 1;
    }

    if (spec_.sample_limit && *spec_.sample_limit < total_) {
        Rng rng(spec_.seed);
        sampled_ = rng.sample_without_replacement(total_, *spec_.sample_limit);
    }
}

Config ConfigEnumerator::at(std::uint64_t stream_pos) const {
    if (stream_pos >= stream_size())
        throw Error(Errc::BadArgs, "stream position out of range");
    Config config;
    config.ordinal = sampled_.empty() ? stream_pos : sampled_[stream_pos];

    std::uint64_t subset_rank = config.ordinal / grid_size_;
    std::uint64_t grid_index = config.ordinal % grid_size_;

    const std::uint64_t n = spec_.feature_pool.size();
    const auto k = static_cast<std::uint64_t>(spec_.subset_size);
    config.subset.reserve(k);
    std::uint64_t v = 0;
    for (std::uint64_t pos = 0; pos < k; ++pos) {
        for (;; ++v) {
            const std::uint64_t c = binom_[n - 1 - v][k - 1 - pos];
            if (subset_rank < c) break;
            subset_rank -= c;
        }
        config.subset.push_back(static_cast<std::size_t>(v));
        ++v;
    }

    // odometer: last declared parameter varies fastest
    config.params.resize(spec_.param_grid.size());
    for (std::size_t p = spec_.param_grid.size(); p-- > 0;) {
        const auto& [name, values] = spec_.param_grid[p];
        config.params[p] = {name, values[static_cast<std::size_t>(grid_index % values.size())]};
        grid_index /= values.size();
    }
    return config;
}

double baseline_accuracy(const std::vector<int>& labels, int constant) {
    if (labels.empty()) throw Error(Errc::EmptyTestSet, "baseline needs a non-empty label array");
    if (constant != 0 && constant != 1)
        throw Error(Errc::BadArgs, "baseline constant must be 0 or 1");
    std::size_t matches = 0;
    for (int label : labels) matches += label == constant ? 1 : 0;
    return static_cast<double>(matches) / static_cast<double>(labels.size());
}

EvalResult evaluate_config(const Config& config, const SearchSpec& spec,
                           const features::FeatureMatrix& train,
                           const features::FeatureMatrix& test) {
    EvalResult result;
    result.ordinal = config.ordinal;
    result.params = config.params;
    for (std::size_t pool_idx : config.subset)
        result.features.push_back(spec.feature_pool[pool_idx]);

    try {
        std::vector<std::size_t> train_cols;
        std::vector<std::size_t> test_cols;
        for (const std::string& key : result.features) {
            train_cols.push_back(train.column_index(key));
            test_cols.push_back(test.column_index(key));
        }
        auto take = [](const features::FeatureMatrix& m, const std::vector<std::size_t>& cols) {
            models::Matrix X;
            X.reserve(m.rows.size());
            for (const auto& row : m.rows) {
                std::vector<double> r;
                r.reserve(cols.size());
                for (std::size_t c : cols) r.push_back(row[c]);
                X.push_back(std::move(r));
            }
            return X;
        };
        const models::Matrix train_X = take(train, train_cols);
        const models::Matrix test_X = take(test, test_cols);

        ResolvedParams params;
        for (const auto& [name, value] : config.params)
            apply_param(params, spec.estimator, name, value);
        const std::uint64_t model_seed = derive_seed(spec.seed, config.ordinal);

        models::FittedModel model = [&] {
            switch (spec.estimator) {
                case Estimator::Forest:
                    params.forest.seed = model_seed;
                    return models::fit_forest(train_X, train.labels, params.forest, result.features);
                case Estimator::Boost:
                    params.boost.seed = model_seed;
                    return models::fit_boost(train_X, train.labels, params.boost, result.features);
                default:
                    params.svm.seed = model_seed;
                    return models::fit_svm(train_X, train.labels, params.svm, result.features);
            }
        }();

        const models::Labels predictions = model.predict(test_X);
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            if (predictions[i] == 1) {
                if (test.labels[i] == 1) ++result.tp;
                else ++result.fp;
            } else {
                if (test.labels[i] == 0) ++result.tn;
                else ++result.fn;
            }
        }
        result.accuracy =
            static_cast<double>(result.correct()) / static_cast<double>(predictions.size());
    } catch (const std::exception& e) {
        result.failed = true;
        result.error = "ordinal " + std::to_string(config.ordinal) + ": " + e.what();
        result.tp = result.fp = result.tn = result.fn = 0;
        result.accuracy = 0.0;
    }
    return result;
}

std::string spec_digest(const SearchSpec& spec) {
    std::string blob = spec.name;
    blob += '|';
    blob += estimator_name(spec.estimator);
    blob += '|';
    for (const std::string& key : spec.feature_pool) {
        blob += key;
        blob += ',';
    }
    blob += '|';
    blob += std::to_string(spec.subset_size);
    blob += '|';
    for (const auto& [name, values] : spec.param_grid) {
        blob += name;
        blob += '=';
        for (const ParamValue& value : values) {
            blob += param_value_to_string(value);
            blob += ',';
        }
        blob += ';';
    }
    blob += '|';
    blob += spec.sample_limit ? std::to_string(*spec.sample_limit) : "none";
    blob += '|';
    blob += std::to_string(spec.seed);

    std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : blob) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), hash, 16);
    std::string hex(buf, ptr);
    while (hex.size() < 16) hex.insert(hex.begin(), '0');
    return hex;
}

Leaderboard run_search(const SearchSpec& spec, const features::FeatureMatrix& train,
                       const features::FeatureMatrix& test, unsigned parallelism,
                       const ProgressFn& progress) {
    const ConfigEnumerator enumerator(spec);
    if (train.feature_keys != test.feature_keys)
        throw Error(Errc::DimensionMismatch, "train and test matrices disagree on feature keys");
    if (train.rows.empty()) throw Error(Errc::EmptyTrainingSet, "empty training matrix");
    if (test.rows.empty()) throw Error(Errc::EmptyTestSet, "empty test matrix");
    for (const std::string& key : spec.feature_pool)
        train.column_index(key);  // throws UnknownFeatureKey
    {
        const bool has_pos = std::find(train.labels.begin(), train.labels.end(), 1) != train.labels.end();
        const bool has_neg = std::find(train.labels.begin(), train.labels.end(), 0) != train.labels.end();
        if (!has_pos || !has_neg)
            throw Error(Errc::SingleClassTraining, "training split has a single class");
    }

    const std::uint64_t stream = enumerator.stream_size();
    std::vector<EvalResult> results(static_cast<std::size_t>(stream));

    const unsigned workers =
        std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(std::min<std::uint64_t>(
                                                         stream, 256))));
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> done{0};

    auto work = [&] {
        for (;;) {
            const std::uint64_t pos = next.fetch_add(1);
            if (pos >= stream) return;
            results[static_cast<std::size_t>(pos)] =
                evaluate_config(enumerator.at(pos), spec, train, test);
            done.fetch_add(1);
        }
    };

    if (workers == 1) {
        work();
        if (progress) progress(stream, stream);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        while (done.load() < stream) {
            if (progress) progress(done.load(), stream);
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
        }
        for (std::thread& t : pool) t.join();
        if (progress) progress(stream, stream);
    }

    // rank: most correct predictions first, enumeration ordinal breaks ties;
    // failed evaluations sink to the bottom
    std::sort(results.begin(), results.end(), [](const EvalResult& a, const EvalResult& b) {
        const long a_correct = a.failed ? -1 : static_cast<long>(a.correct());
        const long b_correct = b.failed ? -1 : static_cast<long>(b.correct());
        if (a_correct != b_correct) return a_correct > b_correct;
        return a.ordinal < b.ordinal;
    });

    Leaderboard board;
    board.spec_digest = spec_digest(spec);
    board.total = enumerator.total();
    board.evaluated = stream;
    board.failures = static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const EvalResult& r) { return r.failed; }));
    board.results = std::move(results);
    return board;
}

void write_leaderboard_csv(const Leaderboard& board, std::ostream& out) {
    out << "rank,ordinal,accuracy,tp,fp,tn,fn,features,params\n";
    std::size_t rank = 0;
    for (const EvalResult& r : board.results) {
        if (r.failed) continue;
        ++rank;
        out << rank << ',' << r.ordinal << ',' << format_double(r.accuracy) << ',' << r.tp << ','
            << r.fp << ',' << r.tn << ',' << r.fn << ',';
        for (std::size_t i = 0; i < r.features.size(); ++i) {
            if (i > 0) out << '|';
            out << r.features[i];
        }
        out << ',';
        for (std::size_t i = 0; i < r.params.size(); ++i) {
            if (i > 0) out << '|';
            out << r.params[i].first << '=' << param_value_to_string(r.params[i].second);
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, begin);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(begin));
            return fields;
        }
        fields.push_back(line.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

}  // namespace

Leaderboard read_leaderboard_csv(std::istream& in) {
    Leaderboard board;
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::MalformedHeader, "empty leaderboard CSV");
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_on(line, ',');
        if (fields.size() != 9)
            throw Error(Errc::BadSpec, "leaderboard row must have 9 fields", row);
        EvalResult r;
        try {
            r.ordinal = std::stoull(fields[1]);
            r.accuracy = std::stod(fields[2]);
            r.tp = std::stoull(fields[3]);
            r.fp = std::stoull(fields[4]);
            r.tn = std::stoull(fields[5]);
            r.fn = std::stoull(fields[6]);
        } catch (const std::exception&) {
            throw Error(Errc::BadSpec, "unreadable number in leaderboard row", row);
        }
        if (!fields[7].empty()) r.features = split_on(fields[7], '|');
        if (!fields[8].empty()) {
            for (const std::string& pair : split_on(fields[8], '|')) {
                const std::size_t eq = pair.find('=');
                if (eq == std::string::npos) continue;
                r.params.emplace_back(pair.substr(0, eq), ParamValue{pair.substr(eq + 1)});
            }
        }
        board.results.push_back(std::move(r));
    }
    board.evaluated = board.results.size();
    board.total = board.results.size();
    return board;
}

void write_top_table(const Leaderboard& board, const std::string& title, std::size_t top_k,
                     std::ostream& out) {
    out << title << ": top " << std::min<std::size_t>(top_k, board.results.size()) << " of "
        << board.evaluated << " evaluated (" << board.failures << " failed)\n";
    out << "rank  accuracy  features; params\n";
    std::size_t rank = 0;
    for (const EvalResult& r : board.results) {
        if (r.failed) continue;
        if (++rank > top_k) break;
        const double pct = 100.0 * r.accuracy;
        char pct_buf[16];
        std::snprintf(pct_buf, sizeof(pct_buf), "%5.1f%%", pct);
        out << rank << (rank < 10 ? "     " : "    ") << pct_buf << "  ";
        for (std::size_t i = 0; i < r.features.size(); ++i) {
            if (i > 0) out << ", ";
            out << r.features[i];
        }
        if (!r.params.empty()) {
            out << "; ";
            for (std::size_t i = 0; i < r.params.size(); ++i) {
                if (i > 0) out << ", ";
                out << r.params[i].first << '=' << param_value_to_string(r.params[i].second);
            }
        }
        out << '\n';
    }
}

}  // namespace dsw::search
