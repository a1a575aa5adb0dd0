#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dsw/features.hpp"
#include "dsw/models.hpp"

namespace dsw::search {

enum class Estimator { Forest, Boost, Svm };

const char* estimator_name(Estimator estimator);
Estimator estimator_from_name(const std::string& name);

using ParamValue = std::variant<std::int64_t, double, std::string>;

std::string param_value_to_string(const ParamValue& value);

struct SearchSpec {
    std::string name = "search";
    Estimator estimator = Estimator::Forest;
    std::vector<std::string> feature_pool;  // ordered, distinct keys
    int subset_size = 1;
    // declared order is significant: assignments run in odometer order with
    // the last parameter varying fastest
    std::vector<std::pair<std::string, std::vector<ParamValue>>> param_grid;
    std::optional<std::uint64_t> sample_limit;
    std::uint64_t seed = 0;
};

// exact binomial coefficient; throws BadArgs on k > n or 64-bit overflow
std::uint64_t count_subsets(std::uint64_t n, std::uint64_t k);

struct Config {
    std::uint64_t ordinal = 0;
    std::vector<std::size_t> subset;  // pool indices, ascending
    std::vector<std::pair<std::string, ParamValue>> params;
};

// The full stream is: subsets in lexicographic pool-index order, each crossed
// with the parameter grid; ordinal = position. With sample_limit set, the
// stream is a seeded without-replacement sample of ordinals, ascending.
class ConfigEnumerator {
public:
    explicit ConfigEnumerator(const SearchSpec& spec);  // validates, throws BadSpec

    std::uint64_t total() const { return total_; }
    std::uint64_t grid_size() const { return grid_size_; }
    std::uint64_t stream_size() const {
        return sampled_.empty() ? total_ : static_cast<std::uint64_t>(sampled_.size());
    }
    Config at(std::uint64_t stream_pos) const;

private:
    SearchSpec spec_;
    std::uint64_t n_subsets_ = 0;
    std::uint64_t grid_size_ = 0;
    std::uint64_t total_ = 0;
    std::vector<std::vector<std::uint64_t>> binom_;  // [v][j] = C(v, j)
    std::vector<std::uint64_t> sampled_;             // empty when not sampling
};

// fraction of labels equal to `constant`
double baseline_accuracy(const std::vector<int>& labels, int constant);

struct EvalResult {
    std::uint64_t ordinal = 0;
    std::vector<std::string> features;
    std::vector<std::pair<std::string, ParamValue>> params;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    bool failed = false;
    std::string error;

    std::size_t correct() const { return tp + tn; }
};

EvalResult evaluate_config(const Config& config, const SearchSpec& spec,
                           const features::FeatureMatrix& train,
                           const features::FeatureMatrix& test);

struct Leaderboard {
    std::vector<EvalResult> results;  // accuracy desc, ordinal asc; failures last
    std::string spec_digest;
    std::uint64_t total = 0;      // full enumeration length
    std::uint64_t evaluated = 0;  // stream length actually run
    std::size_t failures = 0;
};

using ProgressFn = std::function<void(std::uint64_t done, std::uint64_t total)>;

// Evaluates the whole stream. Results are keyed by stream position before
// ranking, so the leaderboard is identical for any parallelism level.
Leaderboard run_search(const SearchSpec& spec, const features::FeatureMatrix& train,
                       const features::FeatureMatrix& test, unsigned parallelism,
                       const ProgressFn& progress = {});

std::string spec_digest(const SearchSpec& spec);

// CSV: rank,ordinal,accuracy,tp,fp,tn,fn,features,params (failures omitted)
void write_leaderboard_csv(const Leaderboard& board, std::ostream& out);
Leaderboard read_leaderboard_csv(std::istream& in);

// human-readable top-K table
void write_top_table(const Leaderboard& board, const std::string& title, std::size_t top_k,
                     std::ostream& out);

}  // namespace dsw::search
