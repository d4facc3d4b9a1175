#pragma once
// Watermark-removal channels: deterministic simulated paraphrase and
// back-translation, and a client for external rewriting services.

#include <cstdint>
#include <string>

#include "wmlab/lexicons.hpp"
#include "wmlab/types.hpp"

namespace wmlab {

enum class AttackKind { sim_paraphrase, sim_backtranslate, external_paraphrase, external_backtranslate };

const char* to_string(AttackKind k);

struct AttackChannel {
    AttackKind kind = AttackKind::sim_paraphrase;
    double strength = 0.3;        // 0 => identity for simulated kinds
    std::uint64_t rng_seed = 0;
    std::string endpoint;         // external kinds only
    std::string pivot = "fr";     // external backtranslation pivot
    double timeout_seconds = 10.0;
    int max_concurrency = 8;
};

// Per content word: replace by a seeded-random synonym with p = strength;
// swap adjacent non-punctuation pairs with p = strength/4. Word count is
// preserved.
Document sim_paraphrase(const Document& doc, double strength, std::uint64_t seed,
                        const SynonymTable& table, const Vocabulary& vocab);

// Lossy round trip through the pivot interlingua: collision-class
// re-draws at a per-document rate centered on strength, determiner drop
// (0.4*strength) and sparse re-insert (0.02*strength), clause rotation
// (p = strength per clause). Net effect shortens text slightly, the way
// lossy round trips do.
Document sim_backtranslate(const Document& doc, double strength, std::uint64_t seed,
                           const BilingualLexicon& lexicon, const Vocabulary& vocab);

struct AttackOutcome {
    Document doc;
    bool skipped = false;          // document dropped after retries
    bool kept_original = false;    // length-ratio violation, original kept
    double length_ratio = 1.0;     // attacked words / original words
    std::string note;
};

// POST {endpoint}/v1/rewrite {"text","mode","pivot"} -> {"text"}.
// HTTP failure retries 3x then skips with a record; a word-count ratio
// outside [0.5, 2.0] keeps the original, flagged.
AttackOutcome external_attack(const Document& doc, const AttackChannel& channel,
                              const Vocabulary& vocab);

// Dispatch on channel.kind; simulated kinds use the embedded tables.
AttackOutcome apply_attack(const Document& doc, const AttackChannel& channel,
                           const Vocabulary& vocab, const SynonymTable& synonyms,
                           const BilingualLexicon& lexicon);

}  // namespace wmlab
