#include "wmlab/attack.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "wmlab/corpus.hpp"
#include "wmlab/prf.hpp"

namespace wmlab {

const char* to_string(AttackKind k) {
    switch (k) {
        case AttackKind::sim_paraphrase: return "sim_paraphrase";
        case AttackKind::sim_backtranslate: return "sim_backtranslate";
        case AttackKind::external_paraphrase: return "external_paraphrase";
        case AttackKind::external_backtranslate: return "external_backtranslate";
    }
    return "sim_paraphrase";
}

namespace {

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool starts_upper(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

std::string match_case(std::string word, bool upper) {
    if (upper && !word.empty())
        word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    return word;
}

Document finish_attacked(const Document& src, std::vector<std::string> surfaces,
                         AttackKind kind, const Vocabulary& vocab) {
    Document out;
    out.id = src.id + "." + to_string(kind);
    out.source_id = src.source_id;
    out.scheme = src.scheme;
    out.attack = to_string(kind);
    out.provenance = Provenance::attacked;
    out.tokens.surface = std::move(surfaces);
    assign_ids(out.tokens, vocab);
    out.text = detokenize_pretty(out.tokens);
    out.word_count = count_words(out.tokens);
    return out;
}

const std::unordered_set<std::string>& determiner_set() {
    static const std::unordered_set<std::string> s = [] {
        std::unordered_set<std::string> d;
        for (const auto& w : embedded_wordlists().determiners) d.insert(w);
        return d;
    }();
    return s;
}

}  // namespace

namespace {

// Rewriting aggressiveness varies per document, the way LLM rewriters do.
// Interpolates to the exact rate at both endpoints: 0 stays identity, 1
// stays total.
double document_rate(SplitMix& rng, double strength) {
    double jitter = (2.0 * rng.next_unit() - 1.0) * (1.0 - strength);
    double rate = strength * (1.0 + jitter);
    return std::min(1.0, std::max(0.0, rate));
}

}  // namespace

Document sim_paraphrase(const Document& doc, double strength, std::uint64_t seed,
                        const SynonymTable& table, const Vocabulary& vocab) {
    SplitMix rng(mix64(seed ^ 0x5041524150485231ull));
    std::vector<std::string> surfaces = doc.tokens.surface;
    const double rate = document_rate(rng, strength);

    for (auto& surface : surfaces) {
        if (is_punctuation_token(surface)) continue;
        auto it = table.alts.find(lowercase(surface));
        if (it == table.alts.end() || it->second.empty()) continue;
        if (!rng.next_bernoulli(rate)) continue;
        const auto& alts = it->second;
        surface = match_case(alts[rng.next_below(alts.size())], starts_upper(surface));
    }

    // adjacent clause-internal swaps; non-overlapping
    for (std::size_t i = 0; i + 1 < surfaces.size(); ++i) {
        if (is_punctuation_token(surfaces[i]) || is_punctuation_token(surfaces[i + 1])) continue;
        if (!rng.next_bernoulli(strength / 4.0)) continue;
        std::swap(surfaces[i], surfaces[i + 1]);
        ++i;
    }

    return finish_attacked(doc, std::move(surfaces), AttackKind::sim_paraphrase, vocab);
}

Document sim_backtranslate(const Document& doc, double strength, std::uint64_t seed,
                           const BilingualLexicon& lexicon, const Vocabulary& vocab) {
    SplitMix rng(mix64(seed ^ 0x4241434b54524e53ull));
    const double redraw_rate = document_rate(rng, strength);

    struct PivotTok {
        std::string original;  // surface on the English side
        std::string pivot;     // interlingua token (original when uncovered)
        bool covered;
        bool punct;
        bool determiner;
    };

    std::vector<PivotTok> pivots;
    pivots.reserve(doc.tokens.surface.size());
    for (const auto& surface : doc.tokens.surface) {
        PivotTok pt;
        pt.original = surface;
        pt.punct = is_punctuation_token(surface);
        std::string lower = lowercase(surface);
        pt.determiner = !pt.punct && determiner_set().count(lower) > 0;
        auto it = lexicon.forward.find(lower);
        pt.covered = !pt.punct && it != lexicon.forward.end();
        pt.pivot = pt.covered ? it->second : lower;
        pivots.push_back(std::move(pt));
    }

    // pivot-side determiner drop
    {
        std::vector<PivotTok> kept;
        kept.reserve(pivots.size());
        for (auto& pt : pivots) {
            if (pt.determiner && rng.next_bernoulli(0.4 * strength)) continue;
            kept.push_back(std::move(pt));
        }
        pivots = std::move(kept);
    }

    // clause-internal reorder: rotate the clause left by one, the crude
    // SVO->SOV proxy; every adjacency inside the clause changes
    {
        std::size_t clause_begin = 0;
        auto reorder_clause = [&](std::size_t begin, std::size_t end) {
            if (end - begin < 3) return;
            if (!rng.next_bernoulli(strength)) return;
            std::rotate(pivots.begin() + static_cast<std::ptrdiff_t>(begin),
                        pivots.begin() + static_cast<std::ptrdiff_t>(begin + 1),
                        pivots.begin() + static_cast<std::ptrdiff_t>(end));
        };
        for (std::size_t i = 0; i <= pivots.size(); ++i) {
            if (i == pivots.size() || pivots[i].punct) {
                reorder_clause(clause_begin, i);
                clause_begin = i + 1;
            }
        }
    }

    // pivot-side determiner re-insert (weaker than the drop; the channel
    // shortens on balance, as lossy translation round trips do)
    {
        std::vector<PivotTok> augmented;
        augmented.reserve(pivots.size() + 4);
        for (auto& pt : pivots) {
            bool insert_before = !pt.punct && !pt.determiner && rng.next_bernoulli(0.02 * strength);
            if (insert_before) {
                PivotTok det;
                det.original = "the";
                det.pivot = "the";
                det.covered = false;
                det.punct = false;
                det.determiner = true;
                augmented.push_back(std::move(det));
            }
            augmented.push_back(std::move(pt));
        }
        pivots = std::move(augmented);
    }

    // back to English: collision-class re-draw at the document rate
    std::vector<std::string> surfaces;
    surfaces.reserve(pivots.size());
    for (const auto& pt : pivots) {
        if (pt.punct || !pt.covered || !rng.next_bernoulli(redraw_rate)) {
            surfaces.push_back(pt.original);
            continue;
        }
        auto it = lexicon.reverse.find(pt.pivot);
        if (it == lexicon.reverse.end() || it->second.empty()) {
            surfaces.push_back(pt.original);
            continue;
        }
        const auto& cls = it->second;
        surfaces.push_back(match_case(cls[rng.next_below(cls.size())], starts_upper(pt.original)));
    }

    return finish_attacked(doc, std::move(surfaces), AttackKind::sim_backtranslate, vocab);
}

AttackOutcome external_attack(const Document& doc, const AttackChannel& channel,
                              const Vocabulary& vocab) {
    if (channel.endpoint.empty()) throw Error("external attack channel has no endpoint");
    const char* mode =
        channel.kind == AttackKind::external_backtranslate ? "backtranslate" : "paraphrase";

    nlohmann::json body;
    body["text"] = doc.text;
    body["mode"] = mode;
    body["pivot"] = channel.pivot;
    const std::string payload = body.dump();

    AttackOutcome outcome;
    std::string reply_text;
    std::string last_error;
    bool got_reply = false;
    for (int attempt = 0; attempt < 4 && !got_reply; ++attempt) {
        httplib::Client client(channel.endpoint);
        client.set_connection_timeout(
            std::chrono::milliseconds(static_cast<int>(channel.timeout_seconds * 1000)));
        client.set_read_timeout(
            std::chrono::milliseconds(static_cast<int>(channel.timeout_seconds * 1000)));
        auto res = client.Post("/v1/rewrite", payload, "application/json");
        if (!res) {
            last_error = "rewrite service unreachable";
            continue;
        }
        if (res->status != 200) {
            last_error = "rewrite service returned HTTP " + std::to_string(res->status);
            continue;
        }
        try {
            auto reply = nlohmann::json::parse(res->body);
            if (!reply.contains("text") || !reply["text"].is_string()) {
                last_error = "rewrite reply missing text field";
                continue;
            }
            reply_text = reply["text"].get<std::string>();
            got_reply = true;
        } catch (const nlohmann::json::exception& e) {
            last_error = std::string("rewrite reply malformed: ") + e.what();
        }
    }

    if (!got_reply) {
        outcome.skipped = true;
        outcome.note = last_error;
        outcome.doc = doc;
        return outcome;
    }
    if (reply_text.empty()) {
        outcome.skipped = true;
        outcome.note = "rewrite service returned empty text";
        outcome.doc = doc;
        return outcome;
    }

    Document attacked;
    attacked.id = doc.id + "." + to_string(channel.kind);
    attacked.source_id = doc.source_id;
    attacked.scheme = doc.scheme;
    attacked.attack = to_string(channel.kind);
    attacked.provenance = Provenance::attacked;
    attacked.text = reply_text;
    attacked.tokens = tokenize(reply_text, vocab);
    attacked.word_count = count_words(attacked.tokens);

    double ratio = doc.word_count > 0
                       ? static_cast<double>(attacked.word_count) / doc.word_count
                       : 1.0;
    outcome.length_ratio = ratio;
    if (ratio < 0.5 || ratio > 2.0) {
        outcome.kept_original = true;
        outcome.note = "length ratio out of bounds";
        outcome.doc = doc;
        return outcome;
    }
    outcome.doc = std::move(attacked);
    return outcome;
}

AttackOutcome apply_attack(const Document& doc, const AttackChannel& channel,
                           const Vocabulary& vocab, const SynonymTable& synonyms,
                           const BilingualLexicon& lexicon) {
    AttackOutcome outcome;
    std::uint64_t doc_seed = prf_absorb(channel.rng_seed, hash_bytes(doc.id));
    switch (channel.kind) {
        case AttackKind::sim_paraphrase:
            outcome.doc = sim_paraphrase(doc, channel.strength, doc_seed, synonyms, vocab);
            return outcome;
        case AttackKind::sim_backtranslate:
            outcome.doc = sim_backtranslate(doc, channel.strength, doc_seed, lexicon, vocab);
            return outcome;
        case AttackKind::external_paraphrase:
        case AttackKind::external_backtranslate:
            return external_attack(doc, channel, vocab);
    }
    throw Error("unsupported attack kind");
}

}  // namespace wmlab
