#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dsw/corpus.hpp"
#include "dsw/features.hpp"
#include "dsw/rng.hpp"

namespace dsw::corpus {

namespace {

const std::vector<std::string>& positive_words() {
    static const std::vector<std::string> words = {
        "good", "great", "fine", "happy", "nice", "love", "enjoy", "wonderful",
        "relaxed", "calm", "hopeful", "proud", "excited", "grateful",
    };
    return words;
}

const std::vector<std::string>& negative_words() {
    static const std::vector<std::string> words = {
        "bad", "sad", "tired", "stressed", "lonely", "awful", "terrible",
        "worried", "anxious", "empty", "hopeless", "miserable", "exhausted", "upset",
    };
    return words;
}

const std::vector<std::string>& neutral_words() {
    static const std::vector<std::string> words = {
        "i", "think", "really", "just", "like", "you", "know", "well", "so", "it",
        "was", "my", "job", "work", "family", "home", "day", "time", "stuff",
        "things", "maybe", "probably", "sometimes", "usually", "we", "working",
        "talking", "people", "friends", "quiet", "busy", "place", "lately",
    };
    return words;
}

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {"um", "uh", "mm"};
    return words;
}

const std::vector<std::string>& bot_smalltalk() {
    static const std::vector<std::string> lines = {
        "Okay.", "I see.", "That sounds interesting.", "Mhm, tell me more.", "Thanks for sharing that.",
    };
    return lines;
}

std::string pick(Rng& rng, const std::vector<std::string>& pool) {
    return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

std::string session_name(std::size_t index, std::size_t n_sessions) {
    std::size_t width = 3;
    for (std::size_t v = n_sessions; v >= 1000; v /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    while (digits.size() < width) digits.insert(digits.begin(), '0');
    return "synth_" + digits;
}

std::string answer_text(Rng& rng, double p_negative, std::size_t n_words) {
    std::string out;
    auto append = [&](const std::string& word) {
        if (!out.empty()) out += ' ';
        out += word;
    };
    const std::size_t n_sentiment = 1 + rng.below(3);
    for (std::size_t w = 0; w < n_words; ++w) {
        const double roll = rng.unit();
        if (roll < 0.12) {
            append(pick(rng, filler_words()));
        } else if (w < n_sentiment) {
            append(rng.unit() < p_negative ? pick(rng, negative_words())
                                           : pick(rng, positive_words()));
        } else {
            append(pick(rng, neutral_words()));
        }
    }
    // occasional transcript noise the cleaner has to strip
    if (rng.unit() < 0.15) out += " <laughter>";
    if (rng.unit() < 0.1) out += ",";
    else if (rng.unit() < 0.2) out += ".";
    return out;
}

}  // namespace

SynthResult generate_synthetic_corpus(const SynthSpec& spec) {
    if (spec.n_sessions < 2)
        throw Error(Errc::BadSpec, "synthetic corpus needs at least 2 sessions");
    if (!(spec.positive_fraction > 0.0 && spec.positive_fraction < 1.0))
        throw Error(Errc::BadSpec, "positive_fraction must lie in (0,1)");
    if (!(spec.signal_strength >= 0.0))
        throw Error(Errc::BadSpec, "signal_strength must be >= 0");

    const std::size_t n = spec.n_sessions;
    const auto n_pos_raw =
        static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(n)));
    const std::size_t n_pos = std::clamp<std::size_t>(n_pos_raw, 1, n - 1);

    std::vector<int> labels(n, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<long>(n_pos), 1);
    Rng label_rng(derive_seed(spec.seed, 0));
    label_rng.shuffle(labels);

    const features::QuestionRegistry registry = features::QuestionRegistry::defaults();

    SynthResult result;
    result.corpus.provenance = Provenance::Synthetic;
    result.corpus.sessions.reserve(n);

    for (std::size_t s = 0; s < n; ++s) {
        Rng rng(derive_seed(spec.seed, s + 1));
        const int label = labels[s];
        const double shift = label == 1 ? spec.signal_strength : 0.0;

        Session session;
        session.session_id = session_name(s, n);
        session.label = label;

        // distribution shifts for positive sessions: slower to respond,
        // slower speech, more negative vocabulary
        const double p_negative = std::clamp(0.25 + 0.25 * shift, 0.0, 0.9);
        const double words_per_second =
            std::max(0.6, rng.uniform(1.8, 2.6) - std::min(0.25 * shift, 1.2));

        double now = 0.0;
        auto add = [&](Speaker speaker, const std::string& text, double duration) {
            Utterance u;
            u.speaker = speaker;
            u.text = text;
            u.start_time = now;
            u.stop_time = now + duration;
            now = u.stop_time + 0.05;
            session.utterances.push_back(std::move(u));
        };

        add(Speaker::Bot, "Hi, I'm Ellie. Thanks for coming in today.", 3.0);
        now += rng.uniform(0.4, 1.0) + 0.35 * shift;
        add(Speaker::Participant, "hi " + pick(rng, filler_words()) + " hello", 1.2);

        bool asked_any = false;
        for (std::size_t q = 0; q < registry.entries.size(); ++q) {
            const bool last_chance = !asked_any && q + 1 == registry.entries.size();
            if (!last_chance && rng.unit() >= 0.85) continue;
            asked_any = true;
            const auto& entry = registry.entries[q];

            if (rng.unit() < 0.3) add(Speaker::Bot, pick(rng, bot_smalltalk()), 1.0);

            const std::string& pattern = entry.patterns.front();
            add(Speaker::Bot, "So, " + pattern + "?", 0.4 * static_cast<double>(q % 3) + 2.0);

            const std::size_t n_turns = 1 + rng.below(2);
            for (std::size_t t = 0; t < n_turns; ++t) {
                const double delay = rng.uniform(0.4, 1.0) + 0.35 * shift;
                now += t == 0 ? delay : 0.1;
                const std::string text = answer_text(rng, p_negative, 6 + rng.below(10));
                const auto n_words = static_cast<double>(text::tokenize(text).size());
                add(Speaker::Participant, text, std::max(0.5, n_words / words_per_second));
            }
        }
        add(Speaker::Bot, "Okay, that's all I have. Goodbye!", 2.0);

        result.labels.by_session[session.session_id] = label;
        if (label == 1) ++result.labels.positives;
        else ++result.labels.negatives;
        result.corpus.sessions.push_back(std::move(session));
    }
    return result;
}

}  // namespace dsw::corpus
