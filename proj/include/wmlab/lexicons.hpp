#pragma once
// Embedded wordlists and the tables derived from them: POS lexicon,
// sentiment valences, synonym classes, bilingual pivot lexicon.
// User TSV files override any table at load time.

#include <string>
#include <unordered_map>
#include <vector>

namespace wmlab {

struct WordLists {
    std::vector<std::string> determiners;
    std::vector<std::string> prepositions;
    std::vector<std::string> pronouns;
    std::vector<std::string> conjunctions;
    std::vector<std::string> adverbs;          // non -ly adverbs included
    std::vector<std::string> nouns;            // singular forms
    std::vector<std::string> verbs_past;       // VBD forms
    std::vector<std::string> verbs_3sg;        // VBZ forms
    std::vector<std::string> verbs_gerund;     // VBG forms
    std::vector<std::string> adjectives_neutral;
    std::vector<std::string> adjectives_positive;
    std::vector<std::string> adjectives_negative;
    std::vector<std::string> negators;
    // Same-POS synonym classes; first member is the class pivot.
    std::vector<std::vector<std::string>> synonym_classes;
};

const WordLists& embedded_wordlists();

// word -> list of alternatives (never contains the word itself)
struct SynonymTable {
    std::unordered_map<std::string, std::vector<std::string>> alts;

    bool covers(const std::string& lowercased) const { return alts.count(lowercased) > 0; }
    static SynonymTable embedded();
    // TSV: word<TAB>alt1,alt2,...
    static SynonymTable from_tsv(const std::string& path);
};

// English -> pivot interlingua and back. Words without a forward entry
// round-trip through themselves (collision-free identity).
struct BilingualLexicon {
    std::unordered_map<std::string, std::string> forward;
    std::unordered_map<std::string, std::vector<std::string>> reverse;

    static BilingualLexicon embedded();
    // TSV: word<TAB>pivot  (reverse table derived by grouping)
    static BilingualLexicon from_tsv(const std::string& path);
    static BilingualLexicon from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);
};

// word -> valence in [-1, 1]
struct SentimentLexicon {
    std::unordered_map<std::string, double> valence;
    std::vector<std::string> negators;

    static SentimentLexicon embedded();
    // TSV: word<TAB>valence
    static SentimentLexicon from_tsv(const std::string& path);
};

}  // namespace wmlab
