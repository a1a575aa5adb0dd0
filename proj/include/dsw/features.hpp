#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsw/corpus.hpp"
#include "dsw/textproc.hpp"

namespace dsw::features {

// Interviewer questions whose answer sentiment becomes one feature each.
// Patterns are lowercase substrings matched against cleaned bot turns.
struct QuestionRegistry {
    struct Entry {
        std::string key;
        std::vector<std::string> patterns;
    };
    std::vector<Entry> entries;

    // The 19 shipped questions.
    static QuestionRegistry defaults();

    // File format: one `key<TAB>pattern1|pattern2|...` per line.
    static QuestionRegistry load(const std::string& path);

    const Entry* find(const std::string& key) const;
};

// First registry entry (in registry order) with any pattern occurring as a
// substring of the cleaned bot turn.
std::optional<std::string> match_question(const std::string& bot_text, const QuestionRegistry& reg);

// Space-joined participant turns strictly between each bot turn matching
// `key` and the next bot turn; occurrences concatenate. "" if never asked.
std::string collect_answer(const corpus::Session& session, const std::string& key,
                           const QuestionRegistry& reg);

struct Lexica {
    text::PolarityLexicon polarity;
    text::PosLexicon pos;
    text::StopwordSet stopwords;
    text::FirstPersonSet first_person;
};

// One sentiment per registry entry, in registry order; unasked questions are 0.
std::vector<double> question_sentiment_features(const corpus::Session& session,
                                                const QuestionRegistry& reg,
                                                const text::PolarityLexicon& lex);

double avg_sentiment(const corpus::Session& session, const text::PolarityLexicon& lex);
double avg_response_time(const corpus::Session& session);
double speech_speed(const corpus::Session& session);
double avg_unique_frequency(const corpus::Session& session);
double avg_sw_frequency(const corpus::Session& session, const text::StopwordSet& sw);
double avg_characters(const corpus::Session& session);

struct PosFrequencies {
    double nouns = 0.0;
    double verbs = 0.0;
    double adjectives = 0.0;
    double adverbs = 0.0;
};
PosFrequencies pos_frequencies(const corpus::Session& session, const text::PosLexicon& lex);

double fp_avg(const corpus::Session& session, const text::FirstPersonSet& fp);

// Key order shared by every vector of a run: q_sent_<key> for each registry
// entry, then the 11 scalar features.
std::vector<std::string> feature_keys(const QuestionRegistry& reg);

struct FeatureVector {
    std::string session_id;
    std::vector<std::string> keys;
    std::vector<double> values;

    double at(const std::string& key) const;  // throws UnknownFeatureKey
};

FeatureVector extract_features(const corpus::Session& session, const QuestionRegistry& reg,
                               const Lexica& lexica);

struct FeatureMatrix {
    std::vector<std::string> feature_keys;
    std::vector<std::string> session_ids;
    std::vector<std::vector<double>> rows;  // row per session, aligned with session_ids
    std::vector<int> labels;                // aligned 0/1

    std::size_t column_index(const std::string& key) const;  // throws UnknownFeatureKey
};

// Rows in corpus order, columns in selected_keys order. Sessions must be
// validated and labeled.
FeatureMatrix build_matrix(const corpus::Corpus& corpus, const QuestionRegistry& reg,
                           const Lexica& lexica, const std::vector<std::string>& selected_keys);

FeatureMatrix build_matrix(const std::vector<FeatureVector>& vectors, const std::vector<int>& labels,
                           const std::vector<std::string>& selected_keys);

// Keeps key order; filters rows to the given session ids.
FeatureMatrix filter_rows(const FeatureMatrix& matrix, const std::set<std::string>& session_ids);

// CSV with header `session_id,label,<feature keys...>`.
void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& out);
FeatureMatrix read_matrix_csv(std::istream& in);

}  // namespace dsw::features
