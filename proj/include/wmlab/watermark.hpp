#pragma once
// The four watermark schemes as generator/detector pairs sharing one
// keyed PRF: green-list logit biasing (KGW), semantic-projection logits
// (SIR), distribution-preserving reweighting (Unbiased), and
// entropy-weighted detection (EWD).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wmlab/langmodel.hpp"
#include "wmlab/prf.hpp"
#include "wmlab/types.hpp"

namespace wmlab {

struct WatermarkKey {
    std::uint64_t secret = 0;
    int context_width = 1;  // h

    std::string fingerprint() const;  // safe to print; never the secret
};

struct KgwConfig {
    double gamma = 0.5;
    double delta = 2.0;
    double z_threshold = 4.0;
};

struct SirConfig {
    int embed_dim = 16;
    double bias_scale = 1.5;
    std::uint64_t projection_seed = 0x5349525345454431ull;
    double z_threshold = 4.0;
    // Tokens of trailing context embedded at each step. Bounded so that
    // per-position logits decorrelate across a document, which the
    // detector's null centering relies on.
    int context_window = 16;
};

struct EwdConfig {
    double gamma = 0.5;
    double delta = 2.0;
    double weight_floor = 0.0;
    double z_threshold = 4.0;
};

struct UnbiasedConfig {
    double z_threshold = 4.0;
};

struct TokenDiag {
    int token_id;
    double contribution;  // indicator, weight*indicator, logit, or +-1 score
};

struct DetectionReport {
    double score = 0.0;  // scheme-specific raw statistic
    double z = 0.0;
    bool verdict = false;
    int tokens_scored = 0;
    std::vector<TokenDiag> per_token;
};

// Keyed pseudorandom vocabulary partition for one context. Expected green
// fraction is gamma; exactly reproducible for (key, context).
class GreenPartition {
public:
    GreenPartition(const WatermarkKey& key, std::span<const int> context_last_h,
                   int vocab_size, double gamma);

    bool is_green(int token) const {
        return (mix64(seed_ ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(token))) &
                0xffffffffull) < threshold_;
    }
    int count_green() const;
    int vocab_size() const { return vocab_size_; }

private:
    std::uint64_t seed_;
    std::uint64_t threshold_;
    int vocab_size_;
};

// Last h ids of a prefix, left-padded with the reserved begin token.
std::uint64_t green_seed(const WatermarkKey& key, std::span<const int> prefix);

// --- generation -----------------------------------------------------------

struct GenerateOptions {
    int length = 200;
    std::uint64_t seed = 0;       // per-document seed; step streams derive from it
    double temperature = 1.0;
    std::string doc_id;           // output document id
    std::string source_id;        // original document this derives from
};

// delta = 0 reduces to the plain model (same seed, same token ids).
Document kgw_generate(const LanguageModel& model, const TokenSequence& prompt,
                      const KgwConfig& cfg, const WatermarkKey& key,
                      const Vocabulary& vocab, const GenerateOptions& opt);

// Generation side of EWD is KGW's.
Document ewd_generate(const LanguageModel& model, const TokenSequence& prompt,
                      const EwdConfig& cfg, const WatermarkKey& key,
                      const Vocabulary& vocab, const GenerateOptions& opt);

Document sir_generate(const LanguageModel& model, const TokenSequence& prompt,
                      const SirConfig& cfg, const WatermarkKey& key,
                      const Vocabulary& vocab, const GenerateOptions& opt);

Document unbiased_generate(const LanguageModel& model, const TokenSequence& prompt,
                           const UnbiasedConfig& cfg, const WatermarkKey& key,
                           const Vocabulary& vocab, const GenerateOptions& opt);

// Unwatermarked baseline; bit-identical to kgw_generate with delta = 0.
Document plain_generate(const LanguageModel& model, const TokenSequence& prompt,
                        const Vocabulary& vocab, const GenerateOptions& opt);

// --- detection ------------------------------------------------------------
// All detectors score token positions h..n-1 of the (prompt-truncated)
// document and raise "text too short to score" when none remain.

// z = (|s|_G - gamma*T) / sqrt(T*gamma*(1-gamma))
DetectionReport kgw_detect(const TokenSequence& text, const KgwConfig& cfg,
                           const WatermarkKey& key);
double kgw_z(double green_count, double tokens_scored, double gamma);

// Context embedding: L2-normalized feature hash of all prior ids into
// embed_dim; logits = bias_scale * tanh(W2 * tanh(W1 * e)).
std::vector<double> sir_watermark_logits(const WatermarkKey& key, const SirConfig& cfg,
                                         std::span<const int> context, int vocab_size);

// m = mean logit of observed tokens, centered by the cross-position mean
// of the observed-token logit set (exact null offset removal); z =
// (m - null_mean)*sqrt(T)/sigma, sigma pooled across-vocabulary std of
// per-position logits (0/0 -> z = 0). The vocabulary size must match
// generation's.
DetectionReport sir_detect(const TokenSequence& text, const SirConfig& cfg,
                           const WatermarkKey& key, int vocab_size);

// Keyed permutation reweighting; expectation over keys equals the input.
NextTokenDistribution unbiased_reweight(const NextTokenDistribution& dist,
                                        const WatermarkKey& key,
                                        std::span<const int> context);

// Rank-half +-1 surrogate score, centered by its exact null mean.
DetectionReport unbiased_detect(const TokenSequence& text, const UnbiasedConfig& cfg,
                                const WatermarkKey& key, int vocab_size);

// w_i = max(H_i - floor, 0); z = (sum w g - gamma sum w) /
// sqrt(gamma(1-gamma) sum w^2). All-zero weights is an error.
DetectionReport ewd_detect(const TokenSequence& text, const EwdConfig& cfg,
                           const WatermarkKey& key, const LanguageModel& model);
double ewd_z(std::span<const double> weights, std::span<const int> green, double gamma);

}  // namespace wmlab
