#pragma once
// Corpus ingestion, word-level tokenization, vocabulary construction.

#include <cstdint>
#include <string>
#include <vector>

#include "wmlab/types.hpp"

namespace wmlab {

// Whitespace split; leading/trailing punctuation of . , ! ? ; : " ' ( )
// becomes its own token; internal punctuation (don't, e-mail) is kept.
// Surfaces preserve casing, ids use lowercased lookup, OOV -> unk.
TokenSequence tokenize(const std::string& text, const Vocabulary& vocab);

// Surface-only split used before a vocabulary exists.
std::vector<std::string> split_tokens(const std::string& text);

// Re-assigns ids to existing surfaces under a (possibly different) vocabulary.
void assign_ids(TokenSequence& seq, const Vocabulary& vocab);

// Space-joined surfaces. tokenize(detokenize(t)) == t.
std::string detokenize(const TokenSequence& seq);

// Reader-friendly form: no space before closing punctuation, none after '('.
// Tokenizes back to the same sequence.
std::string detokenize_pretty(const TokenSequence& seq);

int count_words(const TokenSequence& seq);

struct CorpusLoadStats {
    int accepted = 0;
    int rejected_length = 0;                          // word count outside bounds
    std::vector<std::pair<int, std::string>> skips;   // (line number, reason)
};

// JSONL, one {"id","text"} object per line. Malformed lines are recorded
// and skipped; zero surviving documents is a hard error.
std::vector<Document> load_corpus(const std::string& path, int min_words, int max_words,
                                  const Vocabulary& vocab, CorpusLoadStats* stats = nullptr);

// Same, but without id assignment (used before the vocabulary is built).
std::vector<Document> load_corpus_raw(const std::string& path, int min_words, int max_words,
                                      CorpusLoadStats* stats = nullptr);

// Frequency-ranked (lexicographic tie-break) vocabulary capped at max_size,
// <unk> always present at id 0. Pure function of corpus bytes and max_size.
Vocabulary build_vocabulary(const std::vector<Document>& corpus, int max_size);

// Deterministic synthetic English-like corpus used for fixtures and demos.
// Documents are templated sentences over the embedded wordlists, 50-300
// words each, formatted as ordinary prose.
std::vector<Document> synthesize_corpus(int n_docs, std::uint64_t seed);

// Writes documents as corpus-format JSONL ({"id","text"} per line).
void write_corpus_jsonl(const std::vector<Document>& docs, const std::string& path);

}  // namespace wmlab
