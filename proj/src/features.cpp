#include "dsw/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

namespace dsw::features {

namespace {

using corpus::Session;
using corpus::Speaker;
using corpus::Utterance;

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

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// mean of fn(tokens) over participant turns with at least one token
template <typename Fn>
double per_comment_average(const Session& session, Fn&& fn) {
    double sum = 0.0;
    std::size_t comments = 0;
    for (const Utterance& u : session.utterances) {
        if (u.speaker != Speaker::Participant) continue;
        const text::TokenList tokens = text::tokenize(u.text);
        if (tokens.empty()) continue;
        sum += fn(tokens);
        ++comments;
    }
    return comments == 0 ? 0.0 : sum / static_cast<double>(comments);
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

QuestionRegistry QuestionRegistry::defaults() {
    QuestionRegistry reg;
    reg.entries = {
        {"dream_job", {"what's your dream job", "your dream job"}},
        {"introvert", {"do you consider yourself an introvert", "yourself an introvert"}},
        {"relax", {"what do you do to relax", "do to relax"}},
        {"controlling_temper", {"how are you at controlling your temper", "controlling your temper"}},
        {"last_argued", {"the last time you argued", "last time you argued"}},
        {"close_to_family", {"how close are you to your family", "close to your family"}},
        {"regrets", {"do you have any regrets", "any regrets"}},
        {"memorable_experiences",
         {"one of your most memorable experiences", "memorable experiences"}},
        {"living_situation", {"how do you like your living situation", "your living situation"}},
        {"dont_sleep_well", {"when you don't sleep well", "don't sleep well"}},
        {"feel_down", {"do you feel down", "you feel down"}},
        {"last_felt_happy",
         {"the last time you felt really happy", "last time you felt really happy",
          "felt really happy"}},
        {"where_from", {"where are you from originally", "you from originally"}},
        {"feeling_lately", {"how have you been feeling lately", "been feeling lately"}},
        {"positive_influence",
         {"positive influence in your life", "been a positive influence"}},
        {"proud_of", {"what are you most proud of", "most proud of"}},
        {"best_friend", {"how would your best friend describe you", "best friend describe you"}},
        {"advice_younger_self",
         {"what advice would you give to yourself", "advice would you give to yourself"}},
        {"travel", {"do you travel a lot", "travel a lot"}},
    };
    return reg;
}

QuestionRegistry QuestionRegistry::load(const std::string& path) {
    QuestionRegistry reg;
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open question registry " + path);
    std::string line;
    long row = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t tab = s.find('\t');
        if (tab == std::string::npos)
            throw Error(Errc::BadSpec, "question registry line has no tab in " + path, row);
        Entry entry;
        entry.key = strip(s.substr(0, tab));
        if (entry.key.empty() || !seen.insert(entry.key).second)
            throw Error(Errc::BadSpec, "empty or duplicate question key in " + path, row);
        for (const std::string& pattern : split_on(s.substr(tab + 1), '|')) {
            const std::string p = strip(pattern);
            if (!p.empty()) entry.patterns.push_back(p);
        }
        if (entry.patterns.empty())
            throw Error(Errc::BadSpec, "question '" + entry.key + "' has no patterns", row);
        reg.entries.push_back(std::move(entry));
    }
    return reg;
}

const QuestionRegistry::Entry* QuestionRegistry::find(const std::string& key) const {
    for (const Entry& entry : entries) {
        if (entry.key == key) return &entry;
    }
    return nullptr;
}

std::optional<std::string> match_question(const std::string& bot_text, const QuestionRegistry& reg) {
    for (const auto& entry : reg.entries) {
        for (const std::string& pattern : entry.patterns) {
            if (bot_text.find(pattern) != std::string::npos) return entry.key;
        }
    }
    return std::nullopt;
}

std::string collect_answer(const Session& session, const std::string& key,
                           const QuestionRegistry& reg) {
    std::string answer;
    bool collecting = false;
    for (const Utterance& u : session.utterances) {
        if (u.speaker == Speaker::Bot) {
            collecting = match_question(u.text, reg) == key;
            continue;
        }
        if (!collecting) continue;
        if (!answer.empty()) answer += ' ';
        answer += u.text;
    }
    return answer;
}

std::vector<double> question_sentiment_features(const Session& session, const QuestionRegistry& reg,
                                                const text::PolarityLexicon& lex) {
    std::vector<double> values;
    values.reserve(reg.entries.size());
    for (const auto& entry : reg.entries) {
        const std::string answer = collect_answer(session, entry.key, reg);
        values.push_back(text::polarity(text::tokenize(answer), lex));
    }
    return values;
}

double avg_sentiment(const Session& session, const text::PolarityLexicon& lex) {
    text::TokenList all;
    for (const Utterance& u : session.utterances) {
        if (u.speaker != Speaker::Participant) continue;
        for (std::string& token : text::tokenize(u.text)) all.push_back(std::move(token));
    }
    return text::polarity(all, lex);
}

double avg_response_time(const Session& session) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 1; i < session.utterances.size(); ++i) {
        const Utterance& prev = session.utterances[i - 1];
        const Utterance& cur = session.utterances[i];
        if (prev.speaker != Speaker::Bot || cur.speaker != Speaker::Participant) continue;
        sum += std::max(0.0, cur.start_time - prev.stop_time);
        ++pairs;
    }
    return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

double speech_speed(const Session& session) {
    double sum = 0.0;
    std::size_t comments = 0;
    for (const Utterance& u : session.utterances) {
        if (u.speaker != Speaker::Participant) continue;
        const double duration = u.stop_time - u.start_time;
        if (!(duration > 0.0)) continue;
        sum += static_cast<double>(text::tokenize(u.text).size()) / duration;
        ++comments;
    }
    return comments == 0 ? 0.0 : sum / static_cast<double>(comments);
}

double avg_unique_frequency(const Session& session) {
    return per_comment_average(session, [](const text::TokenList& tokens) {
        const std::set<std::string> distinct(tokens.begin(), tokens.end());
        return static_cast<double>(distinct.size()) / static_cast<double>(tokens.size());
    });
}

double avg_sw_frequency(const Session& session, const text::StopwordSet& sw) {
    return per_comment_average(session, [&](const text::TokenList& tokens) {
        return static_cast<double>(text::count_stopwords(tokens, sw)) /
               static_cast<double>(tokens.size());
    });
}

double avg_characters(const Session& session) {
    return per_comment_average(session, [](const text::TokenList& tokens) {
        std::size_t chars = 0;
        for (const std::string& token : tokens) chars += token.size();
        return static_cast<double>(chars) / static_cast<double>(tokens.size());
    });
}

PosFrequencies pos_frequencies(const Session& session, const text::PosLexicon& lex) {
    double nouns = 0.0, verbs = 0.0, adjectives = 0.0, adverbs = 0.0;
    std::size_t comments = 0;
    for (const Utterance& u : session.utterances) {
        if (u.speaker != Speaker::Participant) continue;
        const text::TokenList tokens = text::tokenize(u.text);
        if (tokens.empty()) continue;
        const auto tags = text::pos_tag(tokens, lex);
        const double n = static_cast<double>(tokens.size());
        nouns += static_cast<double>(std::count(tags.begin(), tags.end(), text::PosTag::Noun)) / n;
        verbs += static_cast<double>(std::count(tags.begin(), tags.end(), text::PosTag::Verb)) / n;
        adjectives += static_cast<double>(std::count(tags.begin(), tags.end(), text::PosTag::Adj)) / n;
        adverbs += static_cast<double>(std::count(tags.begin(), tags.end(), text::PosTag::Adv)) / n;
        ++comments;
    }
    PosFrequencies out;
    if (comments > 0) {
        const double c = static_cast<double>(comments);
        out.nouns = nouns / c;
        out.verbs = verbs / c;
        out.adjectives = adjectives / c;
        out.adverbs = adverbs / c;
    }
    return out;
}

double fp_avg(const Session& session, const text::FirstPersonSet& fp) {
    return per_comment_average(session, [&](const text::TokenList& tokens) {
        return static_cast<double>(text::count_first_person(tokens, fp)) /
               static_cast<double>(tokens.size());
    });
}

std::vector<std::string> feature_keys(const QuestionRegistry& reg) {
    std::vector<std::string> keys;
    keys.reserve(reg.entries.size() + 11);
    for (const auto& entry : reg.entries) keys.push_back("q_sent_" + entry.key);
    for (const char* scalar :
         {"avg_sentiment", "avg_response_time", "speech_speed", "avg_unique_frequency",
          "avg_sw_frequency", "avg_characters", "avg_nouns", "avg_verbs", "adj_freq", "avg_adv",
          "fp_avg"}) {
        keys.push_back(scalar);
    }
    return keys;
}

double FeatureVector::at(const std::string& key) const {
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i] == key) return values[i];
    }
    throw Error(Errc::UnknownFeatureKey, "no feature '" + key + "' in vector for " + session_id);
}

FeatureVector extract_features(const Session& session, const QuestionRegistry& reg,
                               const Lexica& lexica) {
    FeatureVector fv;
    fv.session_id = session.session_id;
    fv.keys = feature_keys(reg);
    fv.values = question_sentiment_features(session, reg, lexica.polarity);
    const PosFrequencies pos = pos_frequencies(session, lexica.pos);
    fv.values.push_back(avg_sentiment(session, lexica.polarity));
    fv.values.push_back(avg_response_time(session));
    fv.values.push_back(speech_speed(session));
    fv.values.push_back(avg_unique_frequency(session));
    fv.values.push_back(avg_sw_frequency(session, lexica.stopwords));
    fv.values.push_back(avg_characters(session));
    fv.values.push_back(pos.nouns);
    fv.values.push_back(pos.verbs);
    fv.values.push_back(pos.adjectives);
    fv.values.push_back(pos.adverbs);
    fv.values.push_back(fp_avg(session, lexica.first_person));
    for (double v : fv.values) {
        if (!std::isfinite(v))
            throw Error(Errc::BadSpec, "non-finite feature for session " + session.session_id);
    }
    return fv;
}

std::size_t FeatureMatrix::column_index(const std::string& key) const {
    for (std::size_t i = 0; i < feature_keys.size(); ++i) {
        if (feature_keys[i] == key) return i;
    }
    throw Error(Errc::UnknownFeatureKey, "no feature column '" + key + "'");
}

FeatureMatrix build_matrix(const std::vector<FeatureVector>& vectors, const std::vector<int>& labels,
                           const std::vector<std::string>& selected_keys) {
    if (vectors.size() != labels.size())
        throw Error(Errc::DimensionMismatch, "labels not aligned with feature vectors");
    FeatureMatrix matrix;
    matrix.feature_keys = selected_keys;
    matrix.labels = labels;
    matrix.session_ids.reserve(vectors.size());
    matrix.rows.reserve(vectors.size());
    for (const FeatureVector& fv : vectors) {
        std::vector<double> row;
        row.reserve(selected_keys.size());
        for (const std::string& key : selected_keys) row.push_back(fv.at(key));
        matrix.session_ids.push_back(fv.session_id);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

FeatureMatrix build_matrix(const corpus::Corpus& corpus, const QuestionRegistry& reg,
                           const Lexica& lexica, const std::vector<std::string>& selected_keys) {
    std::vector<FeatureVector> vectors;
    std::vector<int> labels;
    vectors.reserve(corpus.sessions.size());
    for (const auto& session : corpus.sessions) {
        if (!session.label.has_value())
            throw Error(Errc::UnlabeledSession, "session " + session.session_id + " has no label");
        vectors.push_back(extract_features(session, reg, lexica));
        labels.push_back(*session.label);
    }
    return build_matrix(vectors, labels, selected_keys);
}

FeatureMatrix filter_rows(const FeatureMatrix& matrix, const std::set<std::string>& session_ids) {
    FeatureMatrix out;
    out.feature_keys = matrix.feature_keys;
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        if (!session_ids.count(matrix.session_ids[i])) continue;
        out.session_ids.push_back(matrix.session_ids[i]);
        out.rows.push_back(matrix.rows[i]);
        out.labels.push_back(matrix.labels[i]);
    }
    return out;
}

void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& out) {
    out << "session_id,label";
    for (const std::string& key : matrix.feature_keys) out << ',' << key;
    out << '\n';
    for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
        out << matrix.session_ids[i] << ',' << matrix.labels[i];
        for (double v : matrix.rows[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

FeatureMatrix read_matrix_csv(std::istream& in) {
    FeatureMatrix matrix;
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::MalformedHeader, "empty feature matrix CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cols = split_on(line, ',');
    if (cols.size() < 2 || cols[0] != "session_id" || cols[1] != "label")
        throw Error(Errc::MalformedHeader, "feature matrix CSV must start with session_id,label");
    matrix.feature_keys.assign(cols.begin() + 2, cols.end());
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (strip(line).empty()) continue;
        const std::vector<std::string> fields = split_on(line, ',');
        if (fields.size() != cols.size())
            throw Error(Errc::DimensionMismatch, "feature matrix row width mismatch", row);
        matrix.session_ids.push_back(fields[0]);
        matrix.labels.push_back(fields[1] == "1" ? 1 : 0);
        std::vector<double> values;
        values.reserve(fields.size() - 2);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            double v = 0.0;
            const std::string field = strip(fields[i]);
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw Error(Errc::BadSpec, "bad feature value '" + field + "'", row);
            values.push_back(v);
        }
        matrix.rows.push_back(std::move(values));
    }
    return matrix;
}

}  // namespace dsw::features
