#include "dsw/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dsw/error.hpp"

namespace dsw::text {

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

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    return in;
}

}  // namespace

TokenList tokenize(const std::string& text) {
    TokenList out;
    std::string cur;
    for (char c : text) {
        if (is_space(c)) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

const char* pos_tag_name(PosTag tag) {
    switch (tag) {
        case PosTag::Noun: return "NOUN";
        case PosTag::Verb: return "VERB";
        case PosTag::Adj: return "ADJ";
        case PosTag::Adv: return "ADV";
        case PosTag::Other: return "OTHER";
    }
    return "OTHER";
}

PosTag pos_tag_from_name(const std::string& name) {
    if (name == "NOUN") return PosTag::Noun;
    if (name == "VERB") return PosTag::Verb;
    if (name == "ADJ") return PosTag::Adj;
    if (name == "ADV") return PosTag::Adv;
    if (name == "OTHER") return PosTag::Other;
    throw Error(Errc::BadSpec, "unknown POS tag '" + name + "'");
}

const std::unordered_set<std::string>& PolarityLexicon::default_negators() {
    static const std::unordered_set<std::string> negators = {
        "not", "no", "never", "none", "neither", "nor", "nothing", "nobody",
        "cannot", "can't", "don't", "won't", "didn't", "doesn't", "isn't",
        "wasn't", "aren't", "weren't", "couldn't", "shouldn't", "wouldn't",
        "haven't", "hasn't", "hadn't", "ain't", "without",
    };
    return negators;
}

PolarityLexicon PolarityLexicon::load(const std::string& path) {
    PolarityLexicon lex;
    lex.negators = default_negators();
    std::ifstream in = open_or_throw(path);
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t tab = s.find('\t');
        if (tab == std::string::npos)
            throw Error(Errc::BadSpec, "polarity lexicon line has no tab in " + path, row);
        const std::string token = strip(s.substr(0, tab));
        const std::string score_str = strip(s.substr(tab + 1));
        double score = 0.0;
        try {
            score = std::stod(score_str);
        } catch (const std::exception&) {
            throw Error(Errc::BadSpec, "bad polarity score '" + score_str + "' in " + path, row);
        }
        if (!(score >= -1.0 && score <= 1.0))
            throw Error(Errc::BadSpec, "polarity score out of [-1,1] for '" + token + "' in " + path, row);
        if (lex.negators.count(token))
            throw Error(Errc::BadSpec, "token '" + token + "' is a negator and cannot carry a score", row);
        lex.entries[token] = score;
    }
    return lex;
}

double polarity(const TokenList& tokens, const PolarityLexicon& lex) {
    double sum = 0.0;
    std::size_t hits = 0;
    const std::size_t window = lex.negation_window > 0 ? static_cast<std::size_t>(lex.negation_window) : 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto it = lex.entries.find(tokens[i]);
        if (it == lex.entries.end()) continue;
        std::size_t negations = 0;
        const std::size_t begin = i > window ? i - window : 0;
        for (std::size_t j = begin; j < i; ++j) {
            if (lex.negators.count(tokens[j])) ++negations;
        }
        sum += (negations % 2 == 1) ? -it->second : it->second;
        ++hits;
    }
    if (hits == 0) return 0.0;
    return std::clamp(sum / static_cast<double>(hits), -1.0, 1.0);
}

std::vector<std::pair<std::string, PosTag>> PosLexicon::default_suffix_rules() {
    std::vector<std::pair<std::string, PosTag>> rules = {
        {"ness", PosTag::Noun}, {"ment", PosTag::Noun}, {"tion", PosTag::Noun},
        {"sion", PosTag::Noun}, {"ship", PosTag::Noun}, {"ance", PosTag::Noun},
        {"ence", PosTag::Noun}, {"less", PosTag::Adj},  {"able", PosTag::Adj},
        {"ible", PosTag::Adj},  {"ful", PosTag::Adj},   {"ous", PosTag::Adj},
        {"ive", PosTag::Adj},   {"ize", PosTag::Verb},  {"ise", PosTag::Verb},
        {"ify", PosTag::Verb},  {"ity", PosTag::Noun},  {"ism", PosTag::Noun},
        {"ing", PosTag::Verb},  {"ly", PosTag::Adv},    {"ed", PosTag::Verb},
        {"al", PosTag::Adj},    {"ic", PosTag::Adj},
    };
    std::stable_sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
        return a.first.size() > b.first.size();
    });
    return rules;
}

PosLexicon PosLexicon::load(const std::string& path) {
    PosLexicon lex;
    lex.suffix_rules = default_suffix_rules();
    std::ifstream in = open_or_throw(path);
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t tab = s.find('\t');
        if (tab == std::string::npos)
            throw Error(Errc::BadSpec, "POS lexicon line has no tab in " + path, row);
        const std::string token = strip(s.substr(0, tab));
        lex.word_tags[token] = pos_tag_from_name(strip(s.substr(tab + 1)));
    }
    return lex;
}

std::vector<PosTag> pos_tag(const TokenList& tokens, const PosLexicon& lex) {
    std::vector<PosTag> tags;
    tags.reserve(tokens.size());
    for (const std::string& token : tokens) {
        const auto it = lex.word_tags.find(token);
        if (it != lex.word_tags.end()) {
            tags.push_back(it->second);
            continue;
        }
        PosTag tag = PosTag::Noun;
        for (const auto& [suffix, rule_tag] : lex.suffix_rules) {
            if (token.size() > suffix.size() &&
                token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
                tag = rule_tag;
                break;
            }
        }
        tags.push_back(tag);
    }
    return tags;
}

namespace {

std::unordered_set<std::string> load_word_file(const std::string& path) {
    std::unordered_set<std::string> words;
    std::ifstream in = open_or_throw(path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string s = strip(line);
        if (s.empty() || s[0] == '#') continue;
        words.insert(s);
    }
    return words;
}

}  // namespace

StopwordSet StopwordSet::load(const std::string& path) {
    StopwordSet sw;
    sw.words = load_word_file(path);
    sw.words.insert("uh");
    sw.words.insert("um");
    sw.words.insert("mm");
    return sw;
}

std::size_t count_stopwords(const TokenList& tokens, const StopwordSet& sw) {
    std::size_t count = 0;
    for (const std::string& token : tokens) {
        if (sw.words.count(token)) ++count;
    }
    return count;
}

FirstPersonSet FirstPersonSet::load(const std::string& path) {
    FirstPersonSet fp;
    fp.words = load_word_file(path);
    fp.words.insert("i");
    fp.words.insert("we");
    fp.words.insert("us");
    return fp;
}

std::size_t count_first_person(const TokenList& tokens, const FirstPersonSet& fp) {
    std::size_t count = 0;
    for (const std::string& token : tokens) {
        if (fp.words.count(token)) ++count;
    }
    return count;
}

}  // namespace dsw::text
