#include "wmlab/langmodel.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "wmlab/prf.hpp"

namespace wmlab {

NextTokenDistribution NextTokenDistribution::from_logits(std::vector<double> logits) {
    if (logits.empty()) throw Error("empty logit vector");
    NextTokenDistribution d;
    d.probs.resize(logits.size());
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        d.probs[i] = std::exp(logits[i] - mx);
        sum += d.probs[i];
    }
    for (double& p : d.probs) p /= sum;
    d.logits = std::move(logits);
    return d;
}

NextTokenDistribution NextTokenDistribution::from_probs(std::vector<double> probs) {
    if (probs.empty()) throw Error("empty probability vector");
    NextTokenDistribution d;
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw Error("negative probability");
        sum += p;
    }
    if (sum <= 0.0) throw Error("probability vector sums to zero");
    d.probs = std::move(probs);
    d.logits.resize(d.probs.size());
    for (std::size_t i = 0; i < d.probs.size(); ++i) {
        d.probs[i] /= sum;
        d.logits[i] = d.probs[i] > 0.0 ? std::log(d.probs[i])
                                       : -std::numeric_limits<double>::infinity();
    }
    return d;
}

double NextTokenDistribution::entropy() const {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

namespace {

inline std::uint64_t ctx1_key(int a) { return static_cast<std::uint64_t>(a); }
inline std::uint64_t ctx2_key(int a, int b, int vocab) {
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(vocab) +
           static_cast<std::uint64_t>(b);
}

}  // namespace

TrigramModel::TrigramModel(const std::vector<Document>& corpus, const Vocabulary& vocab, int order)
    : order_(order), vocab_size_(vocab.size()) {
    if (order < 1 || order > 3) throw Error("builtin model order must be in {1,2,3}");
    if (corpus.empty()) throw Error("cannot train on an empty corpus");

    unigram_counts_.assign(static_cast<std::size_t>(vocab_size_), 0);
    std::unordered_map<std::uint64_t, std::unordered_map<int, std::uint32_t>> big, tri;

    for (const auto& doc : corpus) {
        const auto& ids = doc.tokens.ids;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ++unigram_counts_[static_cast<std::size_t>(ids[i])];
            ++total_tokens_;
            if (order_ >= 2 && i + 1 < ids.size()) ++big[ctx1_key(ids[i])][ids[i + 1]];
            if (order_ >= 3 && i + 2 < ids.size())
                ++tri[ctx2_key(ids[i], ids[i + 1], vocab_size_)][ids[i + 2]];
        }
    }

    unigram_.resize(static_cast<std::size_t>(vocab_size_));
    double denom = static_cast<double>(total_tokens_) + kAddK * vocab_size_;
    for (int t = 0; t < vocab_size_; ++t)
        unigram_[static_cast<std::size_t>(t)] =
            (static_cast<double>(unigram_counts_[static_cast<std::size_t>(t)]) + kAddK) / denom;

    auto compact = [](auto& src, auto& dst, auto& totals) {
        for (auto& [ctx, conts] : src) {
            std::vector<std::pair<int, std::uint32_t>> v(conts.begin(), conts.end());
            std::sort(v.begin(), v.end());
            std::uint64_t total = 0;
            for (const auto& [tok, n] : v) total += n;
            totals[ctx] = total;
            dst[ctx] = std::move(v);
        }
    };
    compact(big, bigram_, ctx1_total_);
    compact(tri, trigram_, ctx2_total_);
}

NextTokenDistribution TrigramModel::next_distribution(std::span<const int> context) const {
    const std::size_t V = static_cast<std::size_t>(vocab_size_);
    std::vector<double> score(unigram_);  // level 0: add-k unigram

    int use = std::min<int>(order_ - 1, static_cast<int>(context.size()));
    std::span<const int> ctx = context.subspan(context.size() - static_cast<std::size_t>(use));

    if (use >= 1) {
        // level 1: MLE over observed bigram continuations, backoff to unigram
        for (double& s : score) s *= kBackoff;
        auto it = bigram_.find(ctx1_key(ctx[ctx.size() - 1]));
        if (it != bigram_.end()) {
            double total = static_cast<double>(ctx1_total_.at(it->first));
            for (const auto& [tok, n] : it->second)
                score[static_cast<std::size_t>(tok)] = static_cast<double>(n) / total;
        }
    }
    if (use >= 2) {
        for (double& s : score) s *= kBackoff;
        auto it = trigram_.find(ctx2_key(ctx[ctx.size() - 2], ctx[ctx.size() - 1], vocab_size_));
        if (it != trigram_.end()) {
            double total = static_cast<double>(ctx2_total_.at(it->first));
            for (const auto& [tok, n] : it->second)
                score[static_cast<std::size_t>(tok)] = static_cast<double>(n) / total;
        }
    }

    std::vector<double> logits(V);
    for (std::size_t i = 0; i < V; ++i) logits[i] = std::log(score[i]);
    return NextTokenDistribution::from_logits(std::move(logits));
}

ExternalModel::ExternalModel(std::string endpoint, int vocab_size, double timeout_seconds)
    : endpoint_(std::move(endpoint)), vocab_size_(vocab_size), timeout_seconds_(timeout_seconds) {
    if (vocab_size_ <= 0) throw Error("external model requires a positive vocabulary size");
    if (endpoint_.empty()) throw Error("external model requires an endpoint");
}

ExternalModel::~ExternalModel() = default;

NextTokenDistribution ExternalModel::next_distribution(std::span<const int> context) const {
    httplib::Client client(endpoint_);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<int>(timeout_seconds_ * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(static_cast<int>(timeout_seconds_ * 1000)));

    nlohmann::json body;
    body["context_ids"] = std::vector<int>(context.begin(), context.end());
    auto res = client.Post("/v1/next", body.dump(), "application/json");
    if (!res) throw TransientError("model service unreachable: " + endpoint_);
    if (res->status != 200)
        throw TransientError("model service returned HTTP " + std::to_string(res->status));

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model service returned malformed JSON: ") + e.what());
    }
    if (!reply.contains("logits") || !reply["logits"].is_array())
        throw Error("model service reply missing logits array");
    std::vector<double> logits = reply["logits"].get<std::vector<double>>();
    if (static_cast<int>(logits.size()) != vocab_size_)
        throw Error("model service logits length " + std::to_string(logits.size()) +
                    " does not match vocabulary size " + std::to_string(vocab_size_));
    return NextTokenDistribution::from_logits(std::move(logits));
}

double perplexity(const LanguageModel& model, const std::vector<Document>& docs) {
    double log_sum = 0.0;
    std::uint64_t n = 0;
    for (const auto& doc : docs) {
        const auto& ids = doc.tokens.ids;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            auto dist = model.next_distribution(std::span<const int>(ids.data(), i));
            log_sum += std::log(dist.probs[static_cast<std::size_t>(ids[i])]);
            ++n;
        }
    }
    if (n == 0) throw Error("perplexity over zero tokens");
    return std::exp(-log_sum / static_cast<double>(n));
}

int sample(const NextTokenDistribution& dist, std::uint64_t rng_seed) {
    double u = static_cast<double>(mix64(rng_seed ^ salt::sample) >> 11) * 0x1.0p-53;
    double cum = 0.0;
    int last_positive = -1;
    for (int t = 0; t < dist.size(); ++t) {
        double p = dist.probs[static_cast<std::size_t>(t)];
        if (p > 0.0) last_positive = t;
        cum += p;
        if (u < cum) return t;
    }
    // rounding left u just above the accumulated total
    if (last_positive < 0) throw Error("cannot sample from an all-zero distribution");
    return last_positive;
}

NextTokenDistribution apply_temperature(const NextTokenDistribution& dist, double temperature) {
    if (temperature <= 0.0) throw Error("temperature must be positive");
    if (temperature == 1.0) return dist;
    std::vector<double> logits = dist.logits;
    for (double& l : logits) l /= temperature;
    return NextTokenDistribution::from_logits(std::move(logits));
}

}  // namespace wmlab
