#include "wmlab/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include "wmlab/corpus.hpp"

namespace wmlab {

std::string WatermarkKey::fingerprint() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(mix64(secret ^ salt::fingerprint)));
    return buf;
}

std::uint64_t green_seed(const WatermarkKey& key, std::span<const int> prefix) {
    std::uint64_t state = mix64(key.secret ^ salt::green);
    int h = key.context_width;
    int pad = h - static_cast<int>(prefix.size());
    for (int i = 0; i < pad; ++i) state = prf_absorb(state, kBeginToken);
    std::size_t take = static_cast<std::size_t>(std::max(0, h - std::max(0, pad)));
    for (std::size_t i = prefix.size() - take; i < prefix.size(); ++i)
        state = prf_absorb(state, static_cast<std::uint64_t>(static_cast<std::uint32_t>(prefix[i])));
    return state;
}

GreenPartition::GreenPartition(const WatermarkKey& key, std::span<const int> context_last_h,
                               int vocab_size, double gamma)
    : seed_(green_seed(key, context_last_h)),
      threshold_(static_cast<std::uint64_t>(gamma * 4294967296.0)),
      vocab_size_(vocab_size) {
    if (gamma < 0.0 || gamma > 1.0) throw Error("gamma must lie in [0, 1]");
    if (gamma >= 1.0) threshold_ = 1ull << 32;
}

int GreenPartition::count_green() const {
    if (vocab_size_ <= 0) throw Error("green partition was built without a vocabulary size");
    int n = 0;
    for (int t = 0; t < vocab_size_; ++t) n += is_green(t) ? 1 : 0;
    return n;
}

// --- generation core --------------------------------------------------------

namespace {

using StepTransform =
    std::function<void(std::span<const int> full_prefix, std::size_t continuation_begin,
                       NextTokenDistribution& dist)>;

Document generate_core(const LanguageModel& model, const TokenSequence& prompt,
                       const Vocabulary& vocab, const GenerateOptions& opt,
                       const StepTransform& transform, Provenance provenance,
                       const std::string& scheme) {
    if (opt.length < 1) throw Error("generation length must be >= 1");
    if (model.vocab_size() != vocab.size())
        throw Error("model and vocabulary disagree on size");

    std::vector<int> prefix = prompt.ids;
    const std::size_t continuation_begin = prefix.size();
    prefix.reserve(continuation_begin + static_cast<std::size_t>(opt.length));

    for (int step = 0; step < opt.length; ++step) {
        NextTokenDistribution dist = model.next_distribution(prefix);
        if (opt.temperature != 1.0) dist = apply_temperature(dist, opt.temperature);
        if (transform) transform(prefix, continuation_begin, dist);
        int tok = sample(dist, prf_absorb(opt.seed, static_cast<std::uint64_t>(step)));
        prefix.push_back(tok);
    }

    Document doc;
    doc.id = opt.doc_id;
    doc.source_id = opt.source_id;
    doc.provenance = provenance;
    doc.scheme = scheme;
    doc.tokens.ids.assign(prefix.begin() + static_cast<std::ptrdiff_t>(continuation_begin),
                          prefix.end());
    doc.tokens.surface.reserve(doc.tokens.ids.size());
    for (int id : doc.tokens.ids) doc.tokens.surface.push_back(vocab.token(id));
    doc.text = detokenize_pretty(doc.tokens);
    doc.word_count = count_words(doc.tokens);
    return doc;
}

std::span<const int> last_h(std::span<const int> prefix, int h) {
    std::size_t take = std::min<std::size_t>(prefix.size(), static_cast<std::size_t>(h));
    return prefix.subspan(prefix.size() - take);
}

}  // namespace

Document plain_generate(const LanguageModel& model, const TokenSequence& prompt,
                        const Vocabulary& vocab, const GenerateOptions& opt) {
    return generate_core(model, prompt, vocab, opt, nullptr, Provenance::original, "");
}

Document kgw_generate(const LanguageModel& model, const TokenSequence& prompt,
                      const KgwConfig& cfg, const WatermarkKey& key,
                      const Vocabulary& vocab, const GenerateOptions& opt) {
    StepTransform transform;
    if (cfg.delta != 0.0) {
        transform = [&cfg, &key](std::span<const int> prefix, std::size_t,
                                 NextTokenDistribution& dist) {
            GreenPartition green(key, last_h(prefix, key.context_width),
                                 static_cast<int>(dist.probs.size()), cfg.gamma);
            std::vector<double> logits = dist.logits;
            for (int t = 0; t < static_cast<int>(logits.size()); ++t)
                if (green.is_green(t)) logits[static_cast<std::size_t>(t)] += cfg.delta;
            dist = NextTokenDistribution::from_logits(std::move(logits));
        };
    }
    return generate_core(model, prompt, vocab, opt, transform, Provenance::watermarked, "kgw");
}

Document ewd_generate(const LanguageModel& model, const TokenSequence& prompt,
                      const EwdConfig& cfg, const WatermarkKey& key,
                      const Vocabulary& vocab, const GenerateOptions& opt) {
    KgwConfig as_kgw{cfg.gamma, cfg.delta, cfg.z_threshold};
    Document doc = kgw_generate(model, prompt, as_kgw, key, vocab, opt);
    doc.scheme = "ewd";
    return doc;
}

// --- KGW detection ----------------------------------------------------------

double kgw_z(double green_count, double tokens_scored, double gamma) {
    if (tokens_scored <= 0.0) throw Error("text too short to score");
    if (gamma <= 0.0 || gamma >= 1.0) throw Error("gamma must lie in (0, 1) for detection");
    return (green_count - gamma * tokens_scored) /
           std::sqrt(tokens_scored * gamma * (1.0 - gamma));
}

DetectionReport kgw_detect(const TokenSequence& text, const KgwConfig& cfg,
                           const WatermarkKey& key) {
    const int n = static_cast<int>(text.ids.size());
    const int h = key.context_width;
    const int T = n - h;
    if (T <= 0) throw Error("text too short to score");

    DetectionReport report;
    report.tokens_scored = T;
    report.per_token.reserve(static_cast<std::size_t>(T));
    double green_count = 0.0;
    for (int i = h; i < n; ++i) {
        std::span<const int> ctx(text.ids.data() + i - h, static_cast<std::size_t>(h));
        GreenPartition green(key, ctx, 0, cfg.gamma);
        bool g = green.is_green(text.ids[static_cast<std::size_t>(i)]);
        green_count += g ? 1.0 : 0.0;
        report.per_token.push_back({text.ids[static_cast<std::size_t>(i)], g ? 1.0 : 0.0});
    }
    report.score = green_count;
    report.z = kgw_z(green_count, static_cast<double>(T), cfg.gamma);
    report.verdict = report.z > cfg.z_threshold;
    return report;
}

// --- SIR --------------------------------------------------------------------

namespace {

// Fixed pseudorandom two-layer tanh projection; matrices materialized once.
class SirProjection {
public:
    SirProjection(const WatermarkKey& key, const SirConfig& cfg, int vocab_size)
        : d_(cfg.embed_dim), vocab_(vocab_size), bias_scale_(cfg.bias_scale) {
        if (d_ < 1) throw Error("sir embed_dim must be >= 1");
        if (vocab_ < 1) throw Error("sir projection needs the vocabulary size");
        const double unit = std::sqrt(3.0);  // U[-sqrt(3), sqrt(3)): unit variance
        SplitMix g1(prf_absorb(prf_absorb(salt::sir_w1, key.secret), cfg.projection_seed));
        w1_.resize(static_cast<std::size_t>(d_) * static_cast<std::size_t>(d_));
        for (double& w : w1_) w = (2.0 * g1.next_unit() - 1.0) * unit;
        SplitMix g2(prf_absorb(prf_absorb(salt::sir_w2, key.secret), cfg.projection_seed));
        const double scale2 = unit / std::sqrt(static_cast<double>(d_));
        w2_.resize(static_cast<std::size_t>(vocab_) * static_cast<std::size_t>(d_));
        for (double& w : w2_) w = (2.0 * g2.next_unit() - 1.0) * scale2;
    }

    // L2-normalized signed feature hash of the context bag of words.
    std::vector<double> embed(std::span<const int> context) const {
        std::vector<double> e(static_cast<std::size_t>(d_), 0.0);
        for (int id : context) {
            std::uint64_t hsh = mix64(salt::embed ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(id)));
            std::size_t bucket = static_cast<std::size_t>(hsh % static_cast<std::uint64_t>(d_));
            e[bucket] += (hsh >> 63) ? 1.0 : -1.0;
        }
        double norm = std::sqrt(std::inner_product(e.begin(), e.end(), e.begin(), 0.0));
        if (norm > 0.0)
            for (double& x : e) x /= norm;
        return e;
    }

    std::vector<double> watermark_logits(std::span<const int> context) const {
        std::vector<double> e = embed(context);
        std::vector<double> hidden(static_cast<std::size_t>(d_));
        for (int i = 0; i < d_; ++i) {
            double acc = 0.0;
            const double* row = &w1_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d_)];
            for (int j = 0; j < d_; ++j) acc += row[j] * e[static_cast<std::size_t>(j)];
            hidden[static_cast<std::size_t>(i)] = std::tanh(acc);
        }
        std::vector<double> logits(static_cast<std::size_t>(vocab_));
        for (int t = 0; t < vocab_; ++t) {
            double acc = 0.0;
            const double* row = &w2_[static_cast<std::size_t>(t) * static_cast<std::size_t>(d_)];
            for (int j = 0; j < d_; ++j) acc += row[j] * hidden[static_cast<std::size_t>(j)];
            logits[static_cast<std::size_t>(t)] = bias_scale_ * std::tanh(acc);
        }
        return logits;
    }

private:
    int d_;
    int vocab_;
    double bias_scale_;
    std::vector<double> w1_;
    std::vector<double> w2_;
};

}  // namespace

std::vector<double> sir_watermark_logits(const WatermarkKey& key, const SirConfig& cfg,
                                         std::span<const int> context, int vocab_size) {
    return SirProjection(key, cfg, vocab_size).watermark_logits(context);
}

namespace {

std::span<const int> sir_context(std::span<const int> continuation, int window) {
    std::size_t take = std::min<std::size_t>(continuation.size(),
                                             static_cast<std::size_t>(std::max(window, 1)));
    return continuation.subspan(continuation.size() - take);
}

}  // namespace

Document sir_generate(const LanguageModel& model, const TokenSequence& prompt,
                      const SirConfig& cfg, const WatermarkKey& key,
                      const Vocabulary& vocab, const GenerateOptions& opt) {
    StepTransform transform;
    SirProjection projection(key, cfg, vocab.size());
    if (cfg.bias_scale != 0.0) {
        // Context is the trailing window of the continuation prefix: the
        // detector never sees the prompt and must recompute the same
        // embeddings from the document alone.
        transform = [&projection, &cfg](std::span<const int> prefix,
                                        std::size_t continuation_begin,
                                        NextTokenDistribution& dist) {
            std::vector<double> wl = projection.watermark_logits(
                sir_context(prefix.subspan(continuation_begin), cfg.context_window));
            std::vector<double> logits = dist.logits;
            for (std::size_t t = 0; t < logits.size(); ++t) logits[t] += wl[t];
            dist = NextTokenDistribution::from_logits(std::move(logits));
        };
    }
    return generate_core(model, prompt, vocab, opt, transform, Provenance::watermarked, "sir");
}

DetectionReport sir_detect(const TokenSequence& text, const SirConfig& cfg,
                           const WatermarkKey& key, int vocab_size) {
    const int n = static_cast<int>(text.ids.size());
    const int h = key.context_width;
    const int T = n - h;
    if (T <= 0) throw Error("text too short to score");
    if (vocab_size < 1) throw Error("sir detection needs the vocabulary size");
    SirProjection projection(key, cfg, vocab_size);

    DetectionReport report;
    report.tokens_scored = T;
    report.per_token.reserve(static_cast<std::size_t>(T));
    double m_sum = 0.0;
    double null_sum = 0.0;  // cross-position mean of observed-token logits
    double var_sum = 0.0;
    for (int i = h; i < n; ++i) {
        std::span<const int> prefix(text.ids.data(), static_cast<std::size_t>(i));
        std::vector<double> wl =
            projection.watermark_logits(sir_context(prefix, cfg.context_window));
        double mean = 0.0;
        for (double v : wl) mean += v;
        mean /= static_cast<double>(wl.size());
        double var = 0.0;
        for (double v : wl) var += (v - mean) * (v - mean);
        var /= static_cast<double>(wl.size());
        var_sum += var;
        double observed = wl[static_cast<std::size_t>(text.ids[static_cast<std::size_t>(i)])];
        m_sum += observed;
        // the document's own token set estimates the null expectation of
        // the observed logit at this position, watermark aside
        double obs_set_mean = 0.0;
        for (int j = h; j < n; ++j)
            obs_set_mean += wl[static_cast<std::size_t>(text.ids[static_cast<std::size_t>(j)])];
        null_sum += obs_set_mean / static_cast<double>(T);
        report.per_token.push_back({text.ids[static_cast<std::size_t>(i)], observed});
    }
    double m = m_sum / static_cast<double>(T);
    double null_mean = null_sum / static_cast<double>(T);
    double sigma = std::sqrt(var_sum / static_cast<double>(T));
    report.score = m;
    report.z = sigma > 0.0 ? (m - null_mean) * std::sqrt(static_cast<double>(T)) / sigma : 0.0;
    report.verdict = report.z > cfg.z_threshold;
    return report;
}

// --- Unbiased ---------------------------------------------------------------

namespace {

std::uint64_t permutation_seed(const WatermarkKey& key, std::span<const int> context) {
    std::uint64_t state = mix64(key.secret ^ salt::permute);
    int pad = key.context_width - static_cast<int>(context.size());
    for (int i = 0; i < pad; ++i) state = prf_absorb(state, kBeginToken);
    for (int id : context)
        state = prf_absorb(state, static_cast<std::uint64_t>(static_cast<std::uint32_t>(id)));
    return state;
}

void fill_permutation(std::uint64_t seed, std::vector<int>& pi) {
    std::iota(pi.begin(), pi.end(), 0);
    SplitMix rng(seed);
    for (std::size_t i = pi.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(pi[i], pi[j]);
    }
}

inline double warp(double x) { return std::max(2.0 * x - 1.0, 0.0); }

}  // namespace

NextTokenDistribution unbiased_reweight(const NextTokenDistribution& dist,
                                        const WatermarkKey& key,
                                        std::span<const int> context) {
    const std::size_t V = dist.probs.size();
    std::vector<int> pi(V);
    fill_permutation(permutation_seed(key, context), pi);

    std::vector<double> out(V, 0.0);
    double cum = 0.0;
    for (std::size_t k = 0; k < V; ++k) {
        double p = dist.probs[static_cast<std::size_t>(pi[k])];
        double lo = warp(cum);
        cum += p;
        out[static_cast<std::size_t>(pi[k])] = warp(cum) - lo;
    }
    return NextTokenDistribution::from_probs(std::move(out));
}

Document unbiased_generate(const LanguageModel& model, const TokenSequence& prompt,
                           const UnbiasedConfig&, const WatermarkKey& key,
                           const Vocabulary& vocab, const GenerateOptions& opt) {
    StepTransform transform = [&key](std::span<const int> prefix, std::size_t,
                                     NextTokenDistribution& dist) {
        dist = unbiased_reweight(dist, key, last_h(prefix, key.context_width));
    };
    return generate_core(model, prompt, vocab, opt, transform, Provenance::watermarked, "unbiased");
}

DetectionReport unbiased_detect(const TokenSequence& text, const UnbiasedConfig& cfg,
                                const WatermarkKey& key, int vocab_size) {
    const int n = static_cast<int>(text.ids.size());
    const int h = key.context_width;
    const int T = n - h;
    if (T <= 0) throw Error("text too short to score");
    if (vocab_size < 2) throw Error("unbiased detection needs a vocabulary of size >= 2");

    const int rank_threshold = (vocab_size + 1) / 2;
    const double p_hi = static_cast<double>(vocab_size - rank_threshold) /
                        static_cast<double>(vocab_size);
    const double null_mean = 2.0 * p_hi - 1.0;
    const double null_sd = 2.0 * std::sqrt(p_hi * (1.0 - p_hi));

    DetectionReport report;
    report.tokens_scored = T;
    report.per_token.reserve(static_cast<std::size_t>(T));
    std::vector<int> pi(static_cast<std::size_t>(vocab_size));
    std::vector<int> rank(static_cast<std::size_t>(vocab_size));
    double sum = 0.0;
    for (int i = h; i < n; ++i) {
        std::span<const int> ctx(text.ids.data() + i - h, static_cast<std::size_t>(h));
        fill_permutation(permutation_seed(key, ctx), pi);
        for (int k = 0; k < vocab_size; ++k) rank[static_cast<std::size_t>(pi[k])] = k;
        int tok = text.ids[static_cast<std::size_t>(i)];
        double s = rank[static_cast<std::size_t>(tok)] >= rank_threshold ? 1.0 : -1.0;
        sum += s;
        report.per_token.push_back({tok, s});
    }
    report.score = sum / static_cast<double>(T);
    report.z = (sum - static_cast<double>(T) * null_mean) /
               (null_sd * std::sqrt(static_cast<double>(T)));
    report.verdict = report.z > cfg.z_threshold;
    return report;
}

// --- EWD --------------------------------------------------------------------

double ewd_z(std::span<const double> weights, std::span<const int> green, double gamma) {
    if (weights.size() != green.size()) throw Error("ewd_z: weight/indicator length mismatch");
    double w_sum = 0.0, wg_sum = 0.0, w2_sum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        w_sum += weights[i];
        w2_sum += weights[i] * weights[i];
        if (green[i]) wg_sum += weights[i];
    }
    if (w2_sum <= 0.0) throw Error("no scoreable entropy");
    return (wg_sum - gamma * w_sum) / std::sqrt(gamma * (1.0 - gamma) * w2_sum);
}

DetectionReport ewd_detect(const TokenSequence& text, const EwdConfig& cfg,
                           const WatermarkKey& key, const LanguageModel& model) {
    const int n = static_cast<int>(text.ids.size());
    const int h = key.context_width;
    const int T = n - h;
    if (T <= 0) throw Error("text too short to score");

    std::vector<double> weights;
    std::vector<int> green_flags;
    weights.reserve(static_cast<std::size_t>(T));
    green_flags.reserve(static_cast<std::size_t>(T));

    DetectionReport report;
    report.tokens_scored = T;
    report.per_token.reserve(static_cast<std::size_t>(T));
    double score = 0.0;
    for (int i = h; i < n; ++i) {
        std::span<const int> ctx(text.ids.data() + i - h, static_cast<std::size_t>(h));
        GreenPartition part(key, ctx, 0, cfg.gamma);
        bool g = part.is_green(text.ids[static_cast<std::size_t>(i)]);
        double entropy = model
                             .next_distribution(std::span<const int>(
                                 text.ids.data(), static_cast<std::size_t>(i)))
                             .entropy();
        double w = std::max(entropy - cfg.weight_floor, 0.0);
        weights.push_back(w);
        green_flags.push_back(g ? 1 : 0);
        score += g ? w : 0.0;
        report.per_token.push_back({text.ids[static_cast<std::size_t>(i)], g ? w : 0.0});
    }
    report.score = score;
    report.z = ewd_z(weights, green_flags, cfg.gamma);
    report.verdict = report.z > cfg.z_threshold;
    return report;
}

}  // namespace wmlab
