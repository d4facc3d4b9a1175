#include "wmlab/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wmlab/lexicons.hpp"
#include "wmlab/prf.hpp"

namespace wmlab {

namespace {

bool is_separable_punct(char c) {
    switch (c) {
        case '.': case ',': case '!': case '?': case ';': case ':':
        case '"': case '\'': case '(': case ')':
            return true;
        default:
            return false;
    }
}

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Peels leading/trailing punctuation off one whitespace-delimited chunk.
void emit_chunk(const std::string& chunk, std::vector<std::string>& out) {
    std::size_t begin = 0, end = chunk.size();
    std::size_t lead = begin;
    while (lead < end && is_separable_punct(chunk[lead])) ++lead;
    std::size_t trail = end;
    while (trail > lead && is_separable_punct(chunk[trail - 1])) --trail;
    for (std::size_t i = begin; i < lead; ++i) out.push_back(std::string(1, chunk[i]));
    if (trail > lead) out.push_back(chunk.substr(lead, trail - lead));
    for (std::size_t i = trail; i < end; ++i) out.push_back(std::string(1, chunk[i]));
}

}  // namespace

std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string chunk;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!chunk.empty()) {
                emit_chunk(chunk, out);
                chunk.clear();
            }
        } else {
            chunk.push_back(c);
        }
    }
    if (!chunk.empty()) emit_chunk(chunk, out);
    return out;
}

void assign_ids(TokenSequence& seq, const Vocabulary& vocab) {
    seq.ids.resize(seq.surface.size());
    for (std::size_t i = 0; i < seq.surface.size(); ++i)
        seq.ids[i] = vocab.id_of(lowercase(seq.surface[i]));
}

TokenSequence tokenize(const std::string& text, const Vocabulary& vocab) {
    TokenSequence seq;
    seq.surface = split_tokens(text);
    assign_ids(seq, vocab);
    return seq;
}

std::string detokenize(const TokenSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.surface.size(); ++i) {
        if (i) out.push_back(' ');
        out += seq.surface[i];
    }
    return out;
}

std::string detokenize_pretty(const TokenSequence& seq) {
    std::string out;
    bool suppress_space = false;
    for (std::size_t i = 0; i < seq.surface.size(); ++i) {
        const std::string& s = seq.surface[i];
        bool closing = s.size() == 1 && is_separable_punct(s[0]) && s != "(" && s != "\"" && s != "'";
        if (i && !closing && !suppress_space) out.push_back(' ');
        out += s;
        suppress_space = (s == "(");
    }
    return out;
}

int count_words(const TokenSequence& seq) {
    int n = 0;
    for (const auto& s : seq.surface)
        if (!is_punctuation_token(s)) ++n;
    return n;
}

namespace {

std::vector<Document> load_corpus_impl(const std::string& path, int min_words, int max_words,
                                       const Vocabulary* vocab, CorpusLoadStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file: " + path);

    CorpusLoadStats local;
    CorpusLoadStats& st = stats ? *stats : local;
    std::vector<Document> docs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            st.skips.emplace_back(line_no, std::string("malformed JSON: ") + e.what());
            continue;
        }
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("text") ||
            !obj["id"].is_string() || !obj["text"].is_string()) {
            st.skips.emplace_back(line_no, "missing required string fields id/text");
            continue;
        }
        Document doc;
        doc.id = obj["id"].get<std::string>();
        doc.text = obj["text"].get<std::string>();
        doc.tokens.surface = split_tokens(doc.text);
        if (vocab) assign_ids(doc.tokens, *vocab);
        doc.word_count = count_words(doc.tokens);
        doc.provenance = Provenance::original;
        doc.source_id = doc.id;
        if (doc.word_count < min_words || doc.word_count > max_words) {
            ++st.rejected_length;
            continue;
        }
        docs.push_back(std::move(doc));
        ++st.accepted;
    }
    if (docs.empty()) throw Error("empty corpus: no documents survived loading " + path);
    return docs;
}

}  // namespace

std::vector<Document> load_corpus(const std::string& path, int min_words, int max_words,
                                  const Vocabulary& vocab, CorpusLoadStats* stats) {
    return load_corpus_impl(path, min_words, max_words, &vocab, stats);
}

std::vector<Document> load_corpus_raw(const std::string& path, int min_words, int max_words,
                                      CorpusLoadStats* stats) {
    return load_corpus_impl(path, min_words, max_words, nullptr, stats);
}

Vocabulary build_vocabulary(const std::vector<Document>& corpus, int max_size) {
    if (corpus.empty()) throw Error("build_vocabulary: empty corpus");
    if (max_size < 2) throw Error("build_vocabulary: max_size must be >= 2");

    std::map<std::string, std::uint64_t> freq;  // ordered: lexicographic ties for free
    for (const auto& doc : corpus)
        for (const auto& s : doc.tokens.surface) ++freq[lowercase(s)];
    freq.erase(Vocabulary::kUnkToken);

    std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    std::vector<std::string> tokens;
    tokens.reserve(static_cast<std::size_t>(max_size));
    tokens.push_back(Vocabulary::kUnkToken);
    for (const auto& [tok, n] : ranked) {
        if (static_cast<int>(tokens.size()) >= max_size) break;
        tokens.push_back(tok);
    }
    return Vocabulary(std::move(tokens));
}

namespace {

const std::string& pick(SplitMix& rng, const std::vector<std::string>& pool) {
    return pool[rng.next_below(pool.size())];
}

std::string capitalize(std::string w) {
    if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
}

// One templated sentence; noun-heavy declarative prose.
std::string synth_sentence(SplitMix& rng, const WordLists& wl) {
    std::vector<std::string> words;
    auto adj = [&]() -> const std::string& {
        std::uint64_t r = rng.next_below(3);
        if (r == 0) return pick(rng, wl.adjectives_positive);
        if (r == 1) return pick(rng, wl.adjectives_negative);
        return pick(rng, wl.adjectives_neutral);
    };
    auto noun_phrase = [&](bool allow_pronoun) {
        if (allow_pronoun && rng.next_bernoulli(0.12)) {
            words.push_back(pick(rng, wl.pronouns));
            return;
        }
        words.push_back(pick(rng, wl.determiners));
        if (rng.next_bernoulli(0.45)) words.push_back(adj());
        words.push_back(pick(rng, wl.nouns));
    };
    auto verb_phrase = [&]() {
        if (rng.next_bernoulli(0.18)) words.push_back(pick(rng, wl.adverbs));
        std::uint64_t r = rng.next_below(10);
        if (r < 7) words.push_back(pick(rng, wl.verbs_past));
        else if (r < 9) words.push_back(pick(rng, wl.verbs_3sg));
        else {
            words.push_back("was");
            words.push_back(pick(rng, wl.verbs_gerund));
        }
    };

    noun_phrase(true);
    verb_phrase();
    noun_phrase(false);
    if (rng.next_bernoulli(0.6)) {
        words.push_back(pick(rng, wl.prepositions));
        noun_phrase(false);
    }
    if (rng.next_bernoulli(0.3)) {
        words.push_back(pick(rng, wl.conjunctions));
        noun_phrase(true);
        verb_phrase();
        if (rng.next_bernoulli(0.5)) {
            words.push_back(pick(rng, wl.prepositions));
            noun_phrase(false);
        }
    }
    if (rng.next_bernoulli(0.1)) {
        words.push_back("but");
        words.push_back("it");
        words.push_back("was");
        words.push_back("not");
        words.push_back(adj());
    }

    std::string s = capitalize(words[0]);
    for (std::size_t i = 1; i < words.size(); ++i) {
        s.push_back(' ');
        s += words[i];
    }
    std::uint64_t endings = rng.next_below(20);
    s.push_back(endings == 0 ? '!' : (endings == 1 ? '?' : '.'));
    return s;
}

}  // namespace

std::vector<Document> synthesize_corpus(int n_docs, std::uint64_t seed) {
    const WordLists& wl = embedded_wordlists();
    const Vocabulary empty_vocab;
    std::vector<Document> docs;
    docs.reserve(static_cast<std::size_t>(n_docs));
    for (int d = 0; d < n_docs; ++d) {
        SplitMix rng(prf_absorb(mix64(seed ^ salt::doc), static_cast<std::uint64_t>(d)));
        int target_words = 50 + static_cast<int>(rng.next_below(250));
        std::string text;
        int words = 0;
        while (words < target_words) {
            std::string sentence = synth_sentence(rng, wl);
            if (!text.empty()) text.push_back(' ');
            text += sentence;
            words += static_cast<int>(std::count(sentence.begin(), sentence.end(), ' ')) + 1;
        }
        Document doc;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "doc%05d", d);
        doc.id = idbuf;
        doc.text = std::move(text);
        doc.tokens.surface = split_tokens(doc.text);
        assign_ids(doc.tokens, empty_vocab);
        doc.word_count = count_words(doc.tokens);
        doc.provenance = Provenance::original;
        doc.source_id = doc.id;
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_corpus_jsonl(const std::vector<Document>& docs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open corpus file for writing: " + path);
    for (const auto& doc : docs) {
        nlohmann::ordered_json obj;
        obj["id"] = doc.id;
        obj["text"] = doc.text;
        out << obj.dump() << '\n';
    }
    if (!out) throw Error("error writing corpus file: " + path);
}

}  // namespace wmlab
