#include "dsw/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dsw/rng.hpp"

namespace dsw::corpus {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string strip(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

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

bool parse_time(const std::string& field, double& out) {
    const std::string s = strip(field);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) return false;
    return std::isfinite(out) && out >= 0.0;
}

std::string format_time(double t) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), t);
    return std::string(buf, ptr);
}

std::string pop_line(std::istream& in, bool& ok) {
    std::string line;
    ok = static_cast<bool>(std::getline(in, line));
    if (ok && !line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

CleaningPolicy CleaningPolicy::defaults() {
    CleaningPolicy p;
    p.lowercase = true;
    // Apostrophes are kept so contractions like "i'm" survive cleaning.
    p.punctuation = ",.[]()?!;:\"";
    p.marker_delimiters = {{'<', '>'}, {'[', ']'}, {'(', ')'}};
    return p;
}

ParseResult parse_transcript(std::istream& in, const std::string& session_id, RowPolicy policy) {
    ParseResult result;
    result.session.session_id = session_id;

    bool ok = false;
    const std::string header = pop_line(in, ok);
    if (!ok) throw Error(Errc::MalformedHeader, "empty transcript for session " + session_id);
    const std::vector<std::string> cols = split_on(header, '\t');
    if (cols.size() != 4 || lower(strip(cols[0])) != "start_time" ||
        lower(strip(cols[1])) != "stop_time" || lower(strip(cols[2])) != "speaker" ||
        lower(strip(cols[3])) != "value") {
        throw Error(Errc::MalformedHeader,
                    "expected 'start_time\\tstop_time\\tspeaker\\tvalue' in session " + session_id);
    }

    auto reject = [&](long row, Errc code, const std::string& detail) {
        if (policy == RowPolicy::Strict) throw Error(code, detail + " in session " + session_id, row);
        result.dropped_rows.push_back({row, code, detail});
    };

    long row = 0;
    for (;;) {
        const std::string line = pop_line(in, ok);
        if (!ok) break;
        if (strip(line).empty()) continue;
        ++row;
        const std::vector<std::string> fields = split_on(line, '\t');
        if (fields.size() < 4) {
            reject(row, Errc::BadTimestamp, "row has fewer than 4 fields");
            continue;
        }
        Utterance u;
        if (!parse_time(fields[0], u.start_time) || !parse_time(fields[1], u.stop_time) ||
            u.stop_time < u.start_time) {
            reject(row, Errc::BadTimestamp,
                   "bad time pair '" + strip(fields[0]) + "','" + strip(fields[1]) + "'");
            continue;
        }
        const std::string speaker = lower(strip(fields[2]));
        if (speaker == "ellie" || speaker == "bot") {
            u.speaker = Speaker::Bot;
        } else if (speaker == "participant") {
            u.speaker = Speaker::Participant;
        } else {
            reject(row, Errc::UnknownSpeaker, "unknown speaker '" + strip(fields[2]) + "'");
            continue;
        }
        // value is everything after the third tab
        std::string value = fields[3];
        for (std::size_t i = 4; i < fields.size(); ++i) {
            value += '\t';
            value += fields[i];
        }
        u.text = value;
        result.session.utterances.push_back(std::move(u));
    }

    std::stable_sort(result.session.utterances.begin(), result.session.utterances.end(),
                     [](const Utterance& a, const Utterance& b) { return a.start_time < b.start_time; });
    return result;
}

ParseResult parse_transcript_file(const std::string& path, const std::string& session_id,
                                  RowPolicy policy) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open transcript " + path);
    return parse_transcript(in, session_id, policy);
}

void serialize_transcript(const Session& session, std::ostream& out) {
    out << "start_time\tstop_time\tspeaker\tvalue\n";
    for (const Utterance& u : session.utterances) {
        out << format_time(u.start_time) << '\t' << format_time(u.stop_time) << '\t'
            << (u.speaker == Speaker::Bot ? "Ellie" : "Participant") << '\t' << u.text << '\n';
    }
}

std::string clean_utterance(const std::string& text, const CleaningPolicy& policy) {
    // 1) remove marker spans, single left-to-right pass, no nesting
    std::string no_markers;
    no_markers.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        char close = 0;
        for (const auto& [open_c, close_c] : policy.marker_delimiters) {
            if (text[i] == open_c) {
                close = close_c;
                break;
            }
        }
        if (close != 0) {
            const std::size_t end = text.find(close, i + 1);
            if (end != std::string::npos) {
                i = end + 1;
                continue;
            }
        }
        no_markers.push_back(text[i]);
        ++i;
    }

    // 2) drop punctuation, 3) lowercase, 4) collapse whitespace
    std::string out;
    out.reserve(no_markers.size());
    bool pending_space = false;
    for (char c : no_markers) {
        if (policy.punctuation.find(c) != std::string::npos) continue;
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(policy.lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                                       : c);
    }
    return out;
}

Session clean_session(const Session& session, const CleaningPolicy& policy) {
    Session out;
    out.session_id = session.session_id;
    out.label = session.label;
    out.utterances.reserve(session.utterances.size());
    for (const Utterance& u : session.utterances) {
        std::string text = clean_utterance(u.text, policy);
        if (text.empty()) continue;
        Utterance cleaned = u;
        cleaned.text = std::move(text);
        out.utterances.push_back(std::move(cleaned));
    }
    return out;
}

const char* reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::None: return "Accepted";
        case RejectReason::NoBotUtterances: return "NoBotUtterances";
        case RejectReason::NoParticipantUtterances: return "NoParticipantUtterances";
    }
    return "Accepted";
}

RejectReason validate_session(const Session& session) {
    bool has_bot = false;
    bool has_participant = false;
    for (const Utterance& u : session.utterances) {
        if (u.speaker == Speaker::Bot) has_bot = true;
        else has_participant = true;
    }
    if (!has_bot) return RejectReason::NoBotUtterances;
    if (!has_participant) return RejectReason::NoParticipantUtterances;
    return RejectReason::None;
}

LabelSet load_labels(std::istream& in) {
    LabelSet labels;
    bool ok = false;
    const std::string header = pop_line(in, ok);
    if (!ok) throw Error(Errc::MissingColumn, "empty labels file");
    const std::vector<std::string> cols = split_on(header, ',');
    long id_col = -1;
    long label_col = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string name = lower(strip(cols[i]));
        if (name == "session_id") id_col = static_cast<long>(i);
        if (name == "phq8_binary") label_col = static_cast<long>(i);
    }
    if (id_col < 0) throw Error(Errc::MissingColumn, "labels file lacks 'session_id' column");
    if (label_col < 0) throw Error(Errc::MissingColumn, "labels file lacks 'phq8_binary' column");

    long row = 0;
    for (;;) {
        const std::string line = pop_line(in, ok);
        if (!ok) break;
        if (strip(line).empty()) continue;
        ++row;
        const std::vector<std::string> fields = split_on(line, ',');
        if (static_cast<long>(fields.size()) <= std::max(id_col, label_col))
            throw Error(Errc::MissingColumn, "labels row has too few fields", row);
        const std::string id = strip(fields[static_cast<std::size_t>(id_col)]);
        const std::string value = strip(fields[static_cast<std::size_t>(label_col)]);
        int label = -1;
        if (value == "0") label = 0;
        else if (value == "1") label = 1;
        else throw Error(Errc::NonBinaryLabel, "phq8_binary '" + value + "' for session " + id, row);
        if (labels.by_session.count(id))
            throw Error(Errc::DuplicateSession, "session " + id + " labeled twice", row);
        labels.by_session[id] = label;
        if (label == 1) ++labels.positives;
        else ++labels.negatives;
    }
    return labels;
}

LabelSet load_labels_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open labels " + path);
    return load_labels(in);
}

void apply_labels(Corpus& corpus, const LabelSet& labels, bool require_all) {
    for (Session& session : corpus.sessions) {
        const auto it = labels.by_session.find(session.session_id);
        if (it != labels.by_session.end()) {
            session.label = it->second;
        } else if (require_all) {
            throw Error(Errc::UnlabeledSession, "session " + session.session_id + " has no label");
        }
    }
}

SplitPlan split_corpus(const Corpus& corpus, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(Errc::BadArgs, "split ratio must lie in (0,1)");
    std::vector<std::string> ids;
    ids.reserve(corpus.sessions.size());
    for (const Session& session : corpus.sessions) {
        if (!session.label.has_value())
            throw Error(Errc::UnlabeledSession, "session " + session.session_id + " has no label");
        ids.push_back(session.session_id);
    }

    Rng rng(seed);
    rng.shuffle(ids);

    // ceil(ratio*n) with a small backoff so exact products such as 0.8*185
    // do not round up through representation error
    const double t = ratio * static_cast<double>(ids.size());
    const auto n_train = static_cast<std::size_t>(std::ceil(t - 1e-9));

    SplitPlan plan;
    plan.ratio = ratio;
    plan.seed = seed;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i < n_train) plan.train_ids.insert(ids[i]);
        else plan.test_ids.insert(ids[i]);
    }
    return plan;
}

SplitPlan load_split_plan(std::istream& in) {
    SplitPlan plan;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t tab = s.find('\t');
        if (tab == std::string::npos)
            throw Error(Errc::BadSpec, "split plan line has no tab", row);
        const std::string id = strip(s.substr(0, tab));
        const std::string which = lower(strip(s.substr(tab + 1)));
        if (which == "train") plan.train_ids.insert(id);
        else if (which == "test") plan.test_ids.insert(id);
        else throw Error(Errc::BadSpec, "split plan side must be train or test, got '" + which + "'", row);
    }
    const std::size_t n = plan.train_ids.size() + plan.test_ids.size();
    plan.ratio = n == 0 ? 0.0 : static_cast<double>(plan.train_ids.size()) / static_cast<double>(n);
    return plan;
}

void save_split_plan(const SplitPlan& plan, std::ostream& out) {
    for (const std::string& id : plan.train_ids) out << id << "\ttrain\n";
    for (const std::string& id : plan.test_ids) out << id << "\ttest\n";
}

}  // namespace dsw::corpus
