#include "wmlab/linguistics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wmlab/corpus.hpp"

namespace wmlab {

const std::vector<std::string>& pos_tagset() {
    static const std::vector<std::string> tags = {"NN",  "NNS", "NNP", "DT", "IN", "PRP",
                                                  "VBD", "VBG", "VBZ", "RB", "CC"};
    return tags;
}

namespace {

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::unordered_map<std::string, std::string> embedded_pos_lexicon() {
    const WordLists& wl = embedded_wordlists();
    std::unordered_map<std::string, std::string> lex;
    auto add = [&](const std::vector<std::string>& words, const char* tag) {
        for (const auto& w : words) lex.emplace(w, tag);
    };
    add(wl.determiners, "DT");
    add(wl.prepositions, "IN");
    add(wl.pronouns, "PRP");
    add(wl.conjunctions, "CC");
    add(wl.adverbs, "RB");
    add(wl.nouns, "NN");
    add(wl.verbs_past, "VBD");
    add(wl.verbs_3sg, "VBZ");
    add(wl.verbs_gerund, "VBG");
    add(wl.adjectives_neutral, "JJ");
    add(wl.adjectives_positive, "JJ");
    add(wl.adjectives_negative, "JJ");
    // auxiliaries and negation
    lex["was"] = "VBD";
    lex["were"] = "VBD";
    lex["had"] = "VBD";
    lex["did"] = "VBD";
    lex["is"] = "VBZ";
    lex["has"] = "VBZ";
    lex["does"] = "VBZ";
    lex["are"] = "VBP";
    lex["have"] = "VBP";
    lex["am"] = "VBP";
    lex["be"] = "VB";
    lex["been"] = "VBN";
    lex["not"] = "RB";
    lex["no"] = "DT";
    lex["never"] = "RB";
    lex["without"] = "IN";
    lex["hardly"] = "RB";
    lex["barely"] = "RB";
    lex["scarcely"] = "RB";
    lex["<unk>"] = "NN";
    return lex;
}

bool ends_with(const std::string& s, const char* suffix) {
    std::string_view sv(suffix);
    return s.size() >= sv.size() && s.compare(s.size() - sv.size(), sv.size(), sv) == 0;
}

}  // namespace

PosTagger::PosTagger() : lexicon_(embedded_pos_lexicon()) {}

PosTagger::PosTagger(std::unordered_map<std::string, std::string> lexicon)
    : lexicon_(std::move(lexicon)) {}

const std::string* PosTagger::lexicon_tag(const std::string& lowercased) const {
    auto it = lexicon_.find(lowercased);
    return it == lexicon_.end() ? nullptr : &it->second;
}

std::string PosTagger::tag(const std::string& surface, bool sentence_initial) const {
    const std::string lower = lowercase(surface);
    if (const std::string* t = lexicon_tag(lower)) return *t;

    // ordered suffix rules
    if (lower.size() > 4 && ends_with(lower, "ing")) return "VBG";
    if (lower.size() > 3 && ends_with(lower, "ed")) return "VBD";
    if (lower.size() > 3 && ends_with(lower, "ly")) return "RB";
    if (lower.size() > 2 && ends_with(lower, "s") && !ends_with(lower, "ss")) {
        std::string stem = lower.substr(0, lower.size() - 1);
        const std::string* t = lexicon_tag(stem);
        if (!t && ends_with(lower, "es")) {
            stem = lower.substr(0, lower.size() - 2);
            t = lexicon_tag(stem);
        }
        if (t && *t == "NN") return "NNS";
    }
    if (!sentence_initial && std::isupper(static_cast<unsigned char>(surface[0]))) return "NNP";
    return "NN";
}

std::vector<std::string> PosTagger::tag_tokens(const TokenSequence& tokens) const {
    std::vector<std::string> tags;
    tags.reserve(tokens.surface.size());
    bool sentence_initial = true;
    for (const auto& surface : tokens.surface) {
        if (is_punctuation_token(surface)) {
            tags.emplace_back("");
            if (surface == "." || surface == "!" || surface == "?") sentence_initial = true;
            continue;
        }
        tags.push_back(tag(surface, sentence_initial));
        sentence_initial = false;
    }
    return tags;
}

std::map<std::string, int> PosTagger::pos_tag(const Document& doc) const {
    if (doc.tokens.surface.empty()) throw Error("cannot POS-tag an empty document");
    std::map<std::string, int> counts;
    const auto& tagset = pos_tagset();
    for (const auto& t : tag_tokens(doc.tokens)) {
        if (t.empty()) continue;  // punctuation
        bool tracked = std::find(tagset.begin(), tagset.end(), t) != tagset.end();
        ++counts[tracked ? t : "OTHER"];
    }
    return counts;
}

SentimentResult sentiment(const Document& doc, const SentimentLexicon& lexicon) {
    if (doc.tokens.surface.empty()) throw Error("cannot score sentiment of an empty document");
    const auto& surfaces = doc.tokens.surface;
    auto is_negator = [&](const std::string& lower) {
        return std::find(lexicon.negators.begin(), lexicon.negators.end(), lower) !=
               lexicon.negators.end();
    };

    double total = 0.0;
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        auto it = lexicon.valence.find(lowercase(surfaces[i]));
        if (it == lexicon.valence.end()) continue;
        double v = it->second;
        std::size_t window_begin = i >= 3 ? i - 3 : 0;
        for (std::size_t j = window_begin; j < i; ++j) {
            if (is_negator(lowercase(surfaces[j]))) {
                v = -v;
                break;
            }
        }
        total += v;
    }
    int n_words = count_words(doc.tokens);
    double valence = total / std::sqrt(static_cast<double>(std::max(n_words, 1)));
    SentimentResult r;
    r.valence = valence;
    r.label = valence > 0.05 ? "positive" : (valence < -0.05 ? "negative" : "neutral");
    return r;
}

FeatureVector descriptive_stats(const Document& doc) {
    if (doc.tokens.surface.empty()) throw Error("cannot compute statistics of an empty document");
    FeatureVector fv;
    fv.text_len_chars = static_cast<int>(doc.text.size());

    int sentences = 0;
    const std::string& text = doc.text;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        bool at_end = i + 1 == text.size();
        if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) ++sentences;
    }
    fv.n_sentences = std::max(sentences, 1);

    long long char_sum = 0;
    int words = 0;
    for (const auto& s : doc.tokens.surface) {
        if (is_punctuation_token(s)) continue;
        ++words;
        char_sum += static_cast<long long>(s.size());
    }
    fv.n_words = words;
    fv.avg_word_len_chars = words > 0 ? static_cast<double>(char_sum) / words : 0.0;
    fv.avg_sentence_len_words = static_cast<double>(words) / fv.n_sentences;
    return fv;
}

long long levenshtein_words(const TokenSequence& a, const TokenSequence& b) {
    const auto& x = a.surface.size() <= b.surface.size() ? a.surface : b.surface;
    const auto& y = a.surface.size() <= b.surface.size() ? b.surface : a.surface;
    const std::size_t m = x.size();
    if (m == 0) return static_cast<long long>(y.size());

    std::vector<long long> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<long long>(j);
    for (std::size_t i = 1; i <= y.size(); ++i) {
        cur[0] = static_cast<long long>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            long long sub = prev[j - 1] + (y[i - 1] == x[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

FeatureVector extract_features(const Document& doc, const PosTagger& tagger,
                               const SentimentLexicon& sentiment_lexicon,
                               const Document* source_original) {
    FeatureVector fv = descriptive_stats(doc);
    fv.pos_counts = tagger.pos_tag(doc);
    SentimentResult s = sentiment(doc, sentiment_lexicon);
    fv.sentiment_label = s.label;
    fv.valence = s.valence;
    if (source_original)
        fv.levenshtein_to_source = levenshtein_words(source_original->tokens, doc.tokens);
    return fv;
}

}  // namespace wmlab
