#pragma once
// Quality/style features: POS tag counts, lexicon sentiment, descriptive
// statistics, word-level Levenshtein distance.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmlab/lexicons.hpp"
#include "wmlab/types.hpp"

namespace wmlab {

// Penn subset tracked individually; everything else lands in OTHER.
const std::vector<std::string>& pos_tagset();  // NN NNS NNP DT IN PRP VBD VBG VBZ RB CC

struct FeatureVector {
    std::map<std::string, int> pos_counts;  // tagset plus OTHER
    std::string sentiment_label;            // negative | neutral | positive
    double valence = 0.0;
    double avg_sentence_len_words = 0.0;
    int n_sentences = 0;
    double avg_word_len_chars = 0.0;
    int n_words = 0;
    int text_len_chars = 0;
    std::optional<long long> levenshtein_to_source;
};

// Lexicon + ordered suffix rules + NN default. Total function over tokens.
class PosTagger {
public:
    PosTagger();  // embedded lexicon
    explicit PosTagger(std::unordered_map<std::string, std::string> lexicon);

    // Tag for one token; `sentence_initial` gates the NNP capitalization rule.
    std::string tag(const std::string& surface, bool sentence_initial) const;

    // Per-token tags, punctuation tagged "" (excluded from counts).
    std::vector<std::string> tag_tokens(const TokenSequence& tokens) const;

    // Aggregated tagset counts; empty document is an error.
    std::map<std::string, int> pos_tag(const Document& doc) const;

    bool lexicon_has(const std::string& lowercased) const { return lexicon_.count(lowercased) > 0; }
    const std::string* lexicon_tag(const std::string& lowercased) const;

private:
    std::unordered_map<std::string, std::string> lexicon_;
};

struct SentimentResult {
    std::string label;
    double valence;
};

// Valence sum with negation flip in a 3-token window, normalized by
// sqrt(n_words); labels at +-0.05.
SentimentResult sentiment(const Document& doc, const SentimentLexicon& lexicon);

// Sentence/word/char statistics; a document with no terminal punctuation
// counts as one sentence.
FeatureVector descriptive_stats(const Document& doc);

// Word-level edit distance, case-sensitive exact match, O(min) memory.
long long levenshtein_words(const TokenSequence& a, const TokenSequence& b);

// All of the above for one document (levenshtein filled when source given).
FeatureVector extract_features(const Document& doc, const PosTagger& tagger,
                               const SentimentLexicon& sentiment_lexicon,
                               const Document* source_original = nullptr);

}  // namespace wmlab
