#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dsw/error.hpp"

namespace dsw::corpus {

enum class Speaker { Bot, Participant };

struct Utterance {
    double start_time = 0.0;  // seconds, >= 0
    double stop_time = 0.0;   // seconds, >= start_time
    Speaker speaker = Speaker::Bot;
    std::string text;

    bool operator==(const Utterance&) const = default;
};

struct Session {
    std::string session_id;
    std::vector<Utterance> utterances;  // sorted by start_time, ties keep input order
    std::optional<int> label;           // 0 = not depressed, 1 = depressed

    bool operator==(const Session&) const = default;
};

enum class Provenance { Real, Synthetic };

struct Corpus {
    std::vector<Session> sessions;  // session_id values unique
    Provenance provenance = Provenance::Real;
};

// Cleaning order: marker spans removed (delimiters included), punctuation
// characters deleted, lowercased, whitespace collapsed and trimmed.
struct CleaningPolicy {
    bool lowercase = true;
    std::string punctuation;
    std::vector<std::pair<char, char>> marker_delimiters;

    static CleaningPolicy defaults();
};

struct RowIssue {
    long row = 0;  // 1-based data row
    Errc code = Errc::BadTimestamp;
    std::string detail;
};

struct ParseResult {
    Session session;
    std::vector<RowIssue> dropped_rows;  // populated only under DropBadRows
};

enum class RowPolicy { Strict, DropBadRows };

// Transcript format: UTF-8 TSV, header `start_time stop_time speaker value`
// (tab separated), one utterance per row. Speakers map case-insensitively:
// "ellie" -> Bot, "participant" -> Participant. Under Strict, row problems
// throw; under DropBadRows they are collected and the row is skipped.
ParseResult parse_transcript(std::istream& in, const std::string& session_id,
                             RowPolicy policy = RowPolicy::Strict);
ParseResult parse_transcript_file(const std::string& path, const std::string& session_id,
                                  RowPolicy policy = RowPolicy::Strict);

void serialize_transcript(const Session& session, std::ostream& out);

std::string clean_utterance(const std::string& text, const CleaningPolicy& policy);

// clean_utterance over every turn; empties are dropped.
Session clean_session(const Session& session, const CleaningPolicy& policy);

enum class RejectReason { None, NoBotUtterances, NoParticipantUtterances };

const char* reject_reason_name(RejectReason reason);

// None means accepted.
RejectReason validate_session(const Session& session);

struct LabelSet {
    std::map<std::string, int> by_session;
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

// Labels format: UTF-8 CSV, header `session_id,phq8_binary[,...]`, extra
// columns ignored.
LabelSet load_labels(std::istream& in);
LabelSet load_labels_file(const std::string& path);

// Sets session.label from the map; throws UnlabeledSession when require_all.
void apply_labels(Corpus& corpus, const LabelSet& labels, bool require_all = true);

struct SplitPlan {
    std::set<std::string> train_ids;
    std::set<std::string> test_ids;
    double ratio = 0.0;
    std::uint64_t seed = 0;
};

// Seeded shuffle of session ids; first ceil(ratio * n) go to train.
SplitPlan split_corpus(const Corpus& corpus, double ratio, std::uint64_t seed);

// Plan file: one `session_id<TAB>{train|test}` per line.
SplitPlan load_split_plan(std::istream& in);
void save_split_plan(const SplitPlan& plan, std::ostream& out);

struct SynthSpec {
    std::size_t n_sessions = 0;
    double positive_fraction = 0.0;
    double signal_strength = 0.0;  // 0 = classes indistinguishable
    std::uint64_t seed = 0;
};

struct SynthResult {
    Corpus corpus;  // raw (uncleaned) scripted interviews
    LabelSet labels;
};

// Scripted bot-question / participant-answer dialogues. Positive sessions get
// response-time, speech-speed and sentiment distributions shifted by
// signal_strength; at strength >= 2 the response-time shift exceeds the noise
// span, so every positive delay is larger than every negative one.
SynthResult generate_synthetic_corpus(const SynthSpec& spec);

}  // namespace dsw::corpus
