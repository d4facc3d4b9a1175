#pragma once
// Next-token distributions: built-in smoothed n-gram model with stupid
// backoff, plus an HTTP adapter for an external model service.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wmlab/types.hpp"

namespace wmlab {

struct NextTokenDistribution {
    std::vector<double> logits;  // log-scores, arbitrary shift
    std::vector<double> probs;   // softmax(logits), sums to 1

    static NextTokenDistribution from_logits(std::vector<double> logits);
    static NextTokenDistribution from_probs(std::vector<double> probs);

    double entropy() const;  // Shannon entropy of probs, nats
    int size() const { return static_cast<int>(probs.size()); }
};

class LanguageModel {
public:
    virtual ~LanguageModel() = default;
    virtual int vocab_size() const = 0;
    // Full-support distribution over the vocabulary given a (possibly
    // longer than needed) context; models truncate internally.
    virtual NextTokenDistribution next_distribution(std::span<const int> context) const = 0;
};

// Counting model, order in {1,2,3}. Scores: maximum likelihood at the
// highest order whose n-gram was observed, multiplied by backoff 0.4 per
// level skipped, floored at an add-k (k=0.1) smoothed unigram.
class TrigramModel final : public LanguageModel {
public:
    static constexpr double kAddK = 0.1;
    static constexpr double kBackoff = 0.4;

    TrigramModel(const std::vector<Document>& corpus, const Vocabulary& vocab, int order);

    int order() const { return order_; }
    int vocab_size() const override { return vocab_size_; }
    NextTokenDistribution next_distribution(std::span<const int> context) const override;

private:
    int order_;
    int vocab_size_;
    std::vector<double> unigram_;                       // add-k smoothed, sums to 1
    std::vector<std::uint64_t> unigram_counts_;
    std::uint64_t total_tokens_ = 0;
    // context id -> sorted (token, count) continuations, plus context totals
    std::unordered_map<std::uint64_t, std::vector<std::pair<int, std::uint32_t>>> bigram_;
    std::unordered_map<std::uint64_t, std::uint64_t> ctx1_total_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<int, std::uint32_t>>> trigram_;
    std::unordered_map<std::uint64_t, std::uint64_t> ctx2_total_;
};

// POST {endpoint}/v1/next {"context_ids":[...]} -> {"logits":[...]} of
// length exactly |V|. Connection problems raise TransientError; malformed
// or wrong-length responses are hard errors.
class ExternalModel final : public LanguageModel {
public:
    ExternalModel(std::string endpoint, int vocab_size, double timeout_seconds = 10.0);
    ~ExternalModel() override;

    int vocab_size() const override { return vocab_size_; }
    NextTokenDistribution next_distribution(std::span<const int> context) const override;

private:
    std::string endpoint_;
    int vocab_size_;
    double timeout_seconds_;
};

// Average per-token perplexity of the model over documents (all tokens,
// position 0 conditioned on the empty context).
double perplexity(const LanguageModel& model, const std::vector<Document>& docs);

// Inverse-CDF sampling: the seed's 53-bit uniform picks the smallest
// token whose cumulative probability exceeds it. Same seed, same token.
int sample(const NextTokenDistribution& dist, std::uint64_t rng_seed);

// Divides logits by temperature (1.0 = identity).
NextTokenDistribution apply_temperature(const NextTokenDistribution& dist, double temperature);

}  // namespace wmlab
