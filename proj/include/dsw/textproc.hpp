#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dsw::text {

using TokenList = std::vector<std::string>;

// Whitespace split of already-cleaned text. No empty tokens, order preserved.
TokenList tokenize(const std::string& text);

enum class PosTag { Noun, Verb, Adj, Adv, Other };

const char* pos_tag_name(PosTag tag);
PosTag pos_tag_from_name(const std::string& name);  // throws BadSpec on unknown tag

// Lexicon scorer with a parity negation rule: a hit is sign-flipped iff the
// number of negator tokens in the `negation_window` tokens before it is odd.
struct PolarityLexicon {
    std::unordered_map<std::string, double> entries;  // token -> score in [-1,1]
    std::unordered_set<std::string> negators;
    int negation_window = 3;

    static const std::unordered_set<std::string>& default_negators();

    // File format: one `token<TAB>score` per line, '#' comments allowed.
    // Scores outside [-1,1] and entries colliding with negators are rejected.
    static PolarityLexicon load(const std::string& path);
};

// Mean score over lexicon hits with negation flips applied; 0 when there are
// no hits. Result clamped to [-1,1].
double polarity(const TokenList& tokens, const PolarityLexicon& lex);

struct PosLexicon {
    std::unordered_map<std::string, PosTag> word_tags;
    std::vector<std::pair<std::string, PosTag>> suffix_rules;  // longest suffix first

    static std::vector<std::pair<std::string, PosTag>> default_suffix_rules();

    // File format: one `token<TAB>TAG` per line; suffix rules are the defaults.
    static PosLexicon load(const std::string& path);
};

// Per token: word_tags lookup, else first matching suffix rule, else NOUN.
std::vector<PosTag> pos_tag(const TokenList& tokens, const PosLexicon& lex);

struct StopwordSet {
    std::unordered_set<std::string> words;

    // One token per line. The filler tokens {uh, um, mm} are always present.
    static StopwordSet load(const std::string& path);
};

std::size_t count_stopwords(const TokenList& tokens, const StopwordSet& sw);

struct FirstPersonSet {
    std::unordered_set<std::string> words;

    // One token per line. {i, we, us} are always present.
    static FirstPersonSet load(const std::string& path);
};

std::size_t count_first_person(const TokenList& tokens, const FirstPersonSet& fp);

}  // namespace dsw::text
