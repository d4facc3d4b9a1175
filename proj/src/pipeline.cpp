#include "wmlab/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "wmlab/corpus.hpp"
#include "wmlab/langmodel.hpp"
#include "wmlab/svg.hpp"
#include "wmlab/watermark.hpp"

namespace fs = std::filesystem;

namespace wmlab {

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string artifact_path(const PipelineContext& ctx, const char* name) {
    return (fs::path(ctx.out_dir) / name).string();
}

void require_artifact(const PipelineContext& ctx, const char* name, const char* producing_stage) {
    if (!fs::exists(fs::path(ctx.out_dir) / name))
        throw Error(std::string("missing upstream artifact ") + name + " in " + ctx.out_dir +
                    "; run the '" + producing_stage + "' stage first");
}

std::string now_utc() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

class StageTimer {
public:
    StageTimer(PipelineContext& ctx, const char* stage)
        : ctx_(ctx), stage_(stage), begin_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        auto end = std::chrono::steady_clock::now();
        ctx_.manifest.timings_ms[stage_] =
            std::chrono::duration<double, std::milli>(end - begin_).count();
    }

private:
    PipelineContext& ctx_;
    std::string stage_;
    std::chrono::steady_clock::time_point begin_;
};

void save_manifest(PipelineContext& ctx) {
    ctx.manifest.config_hash = ctx.cfg.config_hash;
    ctx.manifest.tool_version = kToolVersion;
    if (ctx.manifest.created_utc.empty()) ctx.manifest.created_utc = now_utc();
    ctx.manifest.save(artifact_path(ctx, "manifest.json"));
}

struct CorpusBundle {
    std::vector<Document> docs;
    Vocabulary vocab;
    CorpusLoadStats stats;
};

// Generate-side load: builds the vocabulary from the corpus and persists it.
CorpusBundle load_corpus_and_build_vocab(PipelineContext& ctx) {
    CorpusBundle bundle;
    bundle.docs = load_corpus_raw(ctx.cfg.corpus_path, ctx.cfg.min_words, ctx.cfg.max_words,
                                  &bundle.stats);
    bundle.vocab = build_vocabulary(bundle.docs, ctx.cfg.vocab_cap);
    for (auto& doc : bundle.docs) assign_ids(doc.tokens, bundle.vocab);
    ctx.manifest.stage_counts["corpus_accepted"] = bundle.stats.accepted;
    ctx.manifest.stage_counts["corpus_rejected_length"] = bundle.stats.rejected_length;
    ctx.manifest.stage_counts["corpus_skipped_lines"] = static_cast<int>(bundle.stats.skips.size());
    for (const auto& [line, reason] : bundle.stats.skips)
        ctx.manifest.skips.push_back({"corpus", "line " + std::to_string(line), reason});
    return bundle;
}

std::unique_ptr<LanguageModel> make_model(const RunConfig& cfg,
                                          const std::vector<Document>& corpus,
                                          const Vocabulary& vocab) {
    if (cfg.model_kind == "external")
        return std::make_unique<ExternalModel>(cfg.endpoint, vocab.size(), cfg.timeout_seconds);
    return std::make_unique<TrigramModel>(corpus, vocab, cfg.order);
}

int effective_workers(const RunConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto body = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// --- manifest ---------------------------------------------------------------

void RunManifest::save(const std::string& path) const {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["created_utc"] = created_utc;
    j["stage_counts"] = stage_counts;
    j["timings_ms"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : timings_ms) j["timings_ms"][k] = v;
    j["skips"] = nlohmann::ordered_json::array();
    for (const auto& s : skips)
        j["skips"].push_back({{"stage", s.stage}, {"doc_id", s.doc_id}, {"reason", s.reason}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open manifest: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    RunManifest m;
    m.config_hash = j.value("config_hash", "");
    m.tool_version = j.value("tool_version", "");
    m.created_utc = j.value("created_utc", "");
    if (j.contains("stage_counts"))
        for (const auto& [k, v] : j["stage_counts"].items()) m.stage_counts[k] = v.get<int>();
    if (j.contains("timings_ms"))
        for (const auto& [k, v] : j["timings_ms"].items()) m.timings_ms[k] = v.get<double>();
    if (j.contains("skips"))
        for (const auto& s : j["skips"])
            m.skips.push_back({s.value("stage", ""), s.value("doc_id", ""), s.value("reason", "")});
    return m;
}

// --- staged document JSONL ---------------------------------------------------

void write_documents_jsonl(const std::string& path, const std::vector<StagedDocument>& docs,
                           const std::string& artifact, const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write artifact: " + path);
    nlohmann::ordered_json meta;
    meta["_meta"] = {{"artifact", artifact},
                     {"config_hash", config_hash},
                     {"tool_version", kToolVersion}};
    out << meta.dump() << '\n';
    for (const auto& staged : docs) {
        const Document& d = staged.doc;
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["source_id"] = d.source_id;
        j["provenance"] = to_string(d.provenance);
        j["scheme"] = d.scheme;
        j["attack"] = d.attack;
        j["condition"] = staged.condition;
        j["text"] = d.text;
        out << j.dump() << '\n';
    }
    if (!out) throw Error("error writing artifact: " + path);
}

std::vector<StagedDocument> read_documents_jsonl(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open artifact: " + path);
    std::vector<StagedDocument> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("_meta")) continue;
        StagedDocument staged;
        Document& d = staged.doc;
        d.id = j.at("id").get<std::string>();
        d.source_id = j.at("source_id").get<std::string>();
        d.provenance = provenance_from_string(j.at("provenance").get<std::string>());
        d.scheme = j.at("scheme").get<std::string>();
        d.attack = j.at("attack").get<std::string>();
        d.text = j.at("text").get<std::string>();
        d.tokens = tokenize(d.text, vocab);
        d.word_count = count_words(d.tokens);
        staged.condition = j.at("condition").get<std::string>();
        docs.push_back(std::move(staged));
    }
    return docs;
}

// --- generate ----------------------------------------------------------------

void stage_generate(PipelineContext& ctx) {
    StageTimer timer(ctx, "generate");
    fs::create_directories(ctx.out_dir);

    CorpusBundle corpus = load_corpus_and_build_vocab(ctx);
    corpus.vocab.save(artifact_path(ctx, "vocab.txt"));
    auto model = make_model(ctx.cfg, corpus.docs, corpus.vocab);

    const int n_prompts = std::min<int>(ctx.cfg.num_prompts, static_cast<int>(corpus.docs.size()));
    const int variants = 1 + static_cast<int>(ctx.cfg.schemes.size());

    struct Slot {
        std::vector<Document> docs;
        std::string error;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(n_prompts));

    parallel_for(n_prompts, effective_workers(ctx.cfg), [&](int i) {
        const Document& prompt_doc = corpus.docs[static_cast<std::size_t>(i)];
        Slot& slot = slots[static_cast<std::size_t>(i)];
        try {
            TokenSequence prompt;
            std::size_t take = std::min<std::size_t>(prompt_doc.tokens.size(),
                                                     static_cast<std::size_t>(ctx.cfg.prompt_tokens));
            prompt.ids.assign(prompt_doc.tokens.ids.begin(),
                              prompt_doc.tokens.ids.begin() + static_cast<std::ptrdiff_t>(take));
            prompt.surface.assign(prompt_doc.tokens.surface.begin(),
                                  prompt_doc.tokens.surface.begin() + static_cast<std::ptrdiff_t>(take));

            GenerateOptions opt;
            opt.length = ctx.cfg.gen_length;
            opt.temperature = ctx.cfg.temperature;
            opt.seed = prf_absorb(mix64(ctx.cfg.seed ^ salt::doc), hash_bytes(prompt_doc.id));
            opt.source_id = prompt_doc.id;

            opt.doc_id = prompt_doc.id + ".orig";
            slot.docs.push_back(plain_generate(*model, prompt, corpus.vocab, opt));
            for (const auto& scheme : ctx.cfg.schemes) {
                opt.doc_id = prompt_doc.id + "." + scheme;
                if (scheme == "kgw")
                    slot.docs.push_back(
                        kgw_generate(*model, prompt, ctx.cfg.kgw, ctx.cfg.key, corpus.vocab, opt));
                else if (scheme == "sir")
                    slot.docs.push_back(
                        sir_generate(*model, prompt, ctx.cfg.sir, ctx.cfg.key, corpus.vocab, opt));
                else if (scheme == "unbiased")
                    slot.docs.push_back(unbiased_generate(*model, prompt, ctx.cfg.unbiased,
                                                          ctx.cfg.key, corpus.vocab, opt));
                else if (scheme == "ewd")
                    slot.docs.push_back(
                        ewd_generate(*model, prompt, ctx.cfg.ewd, ctx.cfg.key, corpus.vocab, opt));
                else
                    throw Error("unknown scheme: " + scheme);
            }
        } catch (const std::exception& e) {
            slot.docs.clear();
            slot.error = e.what();
        }
    });

    std::vector<StagedDocument> out;
    out.reserve(static_cast<std::size_t>(n_prompts * variants));
    int skipped = 0;
    for (int i = 0; i < n_prompts; ++i) {
        Slot& slot = slots[static_cast<std::size_t>(i)];
        if (!slot.error.empty()) {
            ++skipped;
            ctx.manifest.skips.push_back(
                {"generate", corpus.docs[static_cast<std::size_t>(i)].id, slot.error});
            continue;
        }
        for (auto& d : slot.docs) out.push_back({std::move(d), "clean"});
    }
    if (skipped * 10 > n_prompts)
        throw Error("generation skipped " + std::to_string(skipped) + " of " +
                    std::to_string(n_prompts) + " prompts (> 10%); failing the run");

    write_documents_jsonl(artifact_path(ctx, "generated.jsonl"), out, "generated",
                          ctx.cfg.config_hash);
    ctx.manifest.stage_counts["generate_prompts"] = n_prompts;
    ctx.manifest.stage_counts["generate_documents"] = static_cast<int>(out.size());
    save_manifest(ctx);
}

// --- attack -------------------------------------------------------------------

void stage_attack(PipelineContext& ctx) {
    StageTimer timer(ctx, "attack");
    require_artifact(ctx, "generated.jsonl", "generate");
    require_artifact(ctx, "vocab.txt", "generate");

    Vocabulary vocab = Vocabulary::load(artifact_path(ctx, "vocab.txt"));
    std::vector<StagedDocument> generated =
        read_documents_jsonl(artifact_path(ctx, "generated.jsonl"), vocab);

    SynonymTable synonyms = ctx.cfg.synonym_tsv.empty()
                                ? SynonymTable::embedded()
                                : SynonymTable::from_tsv(ctx.cfg.synonym_tsv);
    BilingualLexicon lexicon = ctx.cfg.bilingual_tsv.empty()
                                   ? BilingualLexicon::embedded()
                                   : BilingualLexicon::from_tsv(ctx.cfg.bilingual_tsv);

    std::vector<StagedDocument> out;
    for (const auto& channel : ctx.cfg.attacks) {
        const std::string condition = to_string(channel.kind);
        const int n = static_cast<int>(generated.size());
        std::vector<AttackOutcome> outcomes(static_cast<std::size_t>(n));
        std::vector<std::string> errors(static_cast<std::size_t>(n));
        bool external = channel.kind == AttackKind::external_paraphrase ||
                        channel.kind == AttackKind::external_backtranslate;
        int workers = effective_workers(ctx.cfg);
        if (external) workers = std::min(workers, channel.max_concurrency);
        parallel_for(n, workers, [&](int i) {
            try {
                outcomes[static_cast<std::size_t>(i)] =
                    apply_attack(generated[static_cast<std::size_t>(i)].doc, channel, vocab,
                                 synonyms, lexicon);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        });
        int produced = 0;
        for (int i = 0; i < n; ++i) {
            const auto& src = generated[static_cast<std::size_t>(i)].doc;
            if (!errors[static_cast<std::size_t>(i)].empty()) {
                ctx.manifest.skips.push_back(
                    {"attack." + condition, src.id, errors[static_cast<std::size_t>(i)]});
                continue;
            }
            AttackOutcome& oc = outcomes[static_cast<std::size_t>(i)];
            if (oc.skipped) {
                ctx.manifest.skips.push_back({"attack." + condition, src.id, oc.note});
                continue;
            }
            if (oc.kept_original) {
                ctx.manifest.skips.push_back(
                    {"attack." + condition, src.id,
                     "kept original (" + oc.note + ", ratio " + fmt6(oc.length_ratio) + ")"});
                Document kept = src;
                kept.id = src.id + "." + condition;
                out.push_back({std::move(kept), condition});
                ++produced;
                continue;
            }
            out.push_back({std::move(oc.doc), condition});
            ++produced;
        }
        ctx.manifest.stage_counts["attack_" + condition] = produced;
    }

    write_documents_jsonl(artifact_path(ctx, "attacked.jsonl"), out, "attacked",
                          ctx.cfg.config_hash);
    ctx.manifest.stage_counts["attack_inputs"] = static_cast<int>(generated.size());
    ctx.manifest.stage_counts["attack_documents"] = static_cast<int>(out.size());
    save_manifest(ctx);
}

// --- detect -------------------------------------------------------------------

namespace {

void write_detections_jsonl(const PipelineContext& ctx, const std::string& path,
                            const std::vector<PredictionRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write artifact: " + path);
    nlohmann::ordered_json meta;
    meta["_meta"] = {{"artifact", "detections"},
                     {"config_hash", ctx.cfg.config_hash},
                     {"tool_version", kToolVersion},
                     {"key_fingerprint", ctx.cfg.key.fingerprint()}};
    out << meta.dump() << '\n';
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["doc_id"] = r.doc_id;
        j["scheme"] = r.scheme;
        j["condition"] = r.condition;
        j["truth"] = r.truth;
        j["score"] = r.score;
        j["verdict"] = r.verdict;
        j["correct"] = r.correct;
        out << j.dump() << '\n';
    }
}

std::vector<PredictionRecord> read_detections_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open artifact: " + path);
    std::vector<PredictionRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("_meta")) continue;
        PredictionRecord r;
        r.doc_id = j.at("doc_id").get<std::string>();
        r.scheme = j.at("scheme").get<std::string>();
        r.condition = j.at("condition").get<std::string>();
        r.truth = j.at("truth").get<bool>();
        r.score = j.at("score").get<double>();
        r.verdict = j.at("verdict").get<bool>();
        r.correct = j.at("correct").get<bool>();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

void stage_detect(PipelineContext& ctx) {
    StageTimer timer(ctx, "detect");
    require_artifact(ctx, "generated.jsonl", "generate");
    require_artifact(ctx, "vocab.txt", "generate");
    require_artifact(ctx, "attacked.jsonl", "attack");

    Vocabulary vocab = Vocabulary::load(artifact_path(ctx, "vocab.txt"));
    std::vector<StagedDocument> docs =
        read_documents_jsonl(artifact_path(ctx, "generated.jsonl"), vocab);
    {
        auto attacked = read_documents_jsonl(artifact_path(ctx, "attacked.jsonl"), vocab);
        docs.insert(docs.end(), std::make_move_iterator(attacked.begin()),
                    std::make_move_iterator(attacked.end()));
    }

    // EWD needs model entropies at detection time.
    std::unique_ptr<LanguageModel> model;
    bool needs_model = std::find(ctx.cfg.schemes.begin(), ctx.cfg.schemes.end(), "ewd") !=
                       ctx.cfg.schemes.end();
    if (needs_model) {
        std::vector<Document> corpus = load_corpus_raw(ctx.cfg.corpus_path, ctx.cfg.min_words,
                                                       ctx.cfg.max_words);
        for (auto& d : corpus) assign_ids(d.tokens, vocab);
        model = make_model(ctx.cfg, corpus, vocab);
    }

    std::vector<PredictionRecord> records;
    for (const auto& scheme : ctx.cfg.schemes) {
        std::vector<const StagedDocument*> targets;
        for (const auto& staged : docs)
            if (staged.doc.scheme == scheme || staged.doc.scheme.empty())
                targets.push_back(&staged);

        const int n = static_cast<int>(targets.size());
        std::vector<PredictionRecord> recs(static_cast<std::size_t>(n));
        std::vector<std::string> errors(static_cast<std::size_t>(n));
        parallel_for(n, effective_workers(ctx.cfg), [&](int i) {
            const StagedDocument& staged = *targets[static_cast<std::size_t>(i)];
            try {
                DetectionReport report;
                if (scheme == "kgw")
                    report = kgw_detect(staged.doc.tokens, ctx.cfg.kgw, ctx.cfg.key);
                else if (scheme == "sir")
                    report = sir_detect(staged.doc.tokens, ctx.cfg.sir, ctx.cfg.key, vocab.size());
                else if (scheme == "unbiased")
                    report = unbiased_detect(staged.doc.tokens, ctx.cfg.unbiased, ctx.cfg.key,
                                             vocab.size());
                else if (scheme == "ewd")
                    report = ewd_detect(staged.doc.tokens, ctx.cfg.ewd, ctx.cfg.key, *model);
                else
                    throw Error("unknown scheme: " + scheme);
                PredictionRecord r;
                r.doc_id = staged.doc.id;
                r.scheme = scheme;
                r.condition = staged.condition;
                r.truth = !staged.doc.scheme.empty();
                r.score = report.z;
                r.verdict = report.verdict;
                r.correct = r.verdict == r.truth;
                recs[static_cast<std::size_t>(i)] = std::move(r);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        });
        for (int i = 0; i < n; ++i) {
            if (!errors[static_cast<std::size_t>(i)].empty()) {
                ctx.manifest.skips.push_back({"detect." + scheme,
                                              targets[static_cast<std::size_t>(i)]->doc.id,
                                              errors[static_cast<std::size_t>(i)]});
                continue;
            }
            records.push_back(std::move(recs[static_cast<std::size_t>(i)]));
        }
    }

    write_detections_jsonl(ctx, artifact_path(ctx, "detections.jsonl"), records);
    ctx.manifest.stage_counts["detect_inputs"] = static_cast<int>(docs.size());
    ctx.manifest.stage_counts["detect_records"] = static_cast<int>(records.size());
    save_manifest(ctx);
}

// --- analyze ------------------------------------------------------------------

namespace {

const std::vector<std::string>& feature_csv_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {"doc_id", "source_id", "scheme", "condition", "provenance"};
        for (const auto& t : pos_tagset()) c.push_back(t);
        c.push_back("OTHER");
        c.insert(c.end(), {"sentiment_label", "valence", "avg_sentence_len_words", "n_sentences",
                           "avg_word_len_chars", "n_words", "text_len_chars",
                           "levenshtein_to_source"});
        return c;
    }();
    return cols;
}

struct AnalyzedRow {
    std::string doc_id, source_id, scheme, condition, provenance;
    FeatureVector fv;
};

void write_features_csv(const std::string& path, const std::vector<AnalyzedRow>& rows,
                        const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write artifact: " + path);
    out << "# artifact=features config_hash=" << config_hash << " tool_version=" << kToolVersion
        << '\n';
    const auto& cols = feature_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& row : rows) {
        out << row.doc_id << ',' << row.source_id << ',' << row.scheme << ',' << row.condition
            << ',' << row.provenance;
        for (const auto& tag : pos_tagset()) {
            auto it = row.fv.pos_counts.find(tag);
            out << ',' << (it == row.fv.pos_counts.end() ? 0 : it->second);
        }
        auto other = row.fv.pos_counts.find("OTHER");
        out << ',' << (other == row.fv.pos_counts.end() ? 0 : other->second);
        out << ',' << row.fv.sentiment_label << ',' << fmt6(row.fv.valence) << ','
            << fmt6(row.fv.avg_sentence_len_words) << ',' << row.fv.n_sentences << ','
            << fmt6(row.fv.avg_word_len_chars) << ',' << row.fv.n_words << ','
            << row.fv.text_len_chars << ',';
        if (row.fv.levenshtein_to_source) out << *row.fv.levenshtein_to_source;
        out << '\n';
    }
}

std::vector<AnalyzedRow> read_features_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open artifact: " + path);
    std::vector<AnalyzedRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        while (fields.size() < feature_csv_columns().size()) fields.emplace_back();
        AnalyzedRow row;
        std::size_t k = 0;
        row.doc_id = fields[k++];
        row.source_id = fields[k++];
        row.scheme = fields[k++];
        row.condition = fields[k++];
        row.provenance = fields[k++];
        for (const auto& tag : pos_tagset()) row.fv.pos_counts[tag] = std::stoi(fields[k++]);
        row.fv.pos_counts["OTHER"] = std::stoi(fields[k++]);
        row.fv.sentiment_label = fields[k++];
        row.fv.valence = std::stod(fields[k++]);
        row.fv.avg_sentence_len_words = std::stod(fields[k++]);
        row.fv.n_sentences = std::stoi(fields[k++]);
        row.fv.avg_word_len_chars = std::stod(fields[k++]);
        row.fv.n_words = std::stoi(fields[k++]);
        row.fv.text_len_chars = std::stoi(fields[k++]);
        if (!fields[k].empty()) row.fv.levenshtein_to_source = std::stoll(fields[k]);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void stage_analyze(PipelineContext& ctx) {
    StageTimer timer(ctx, "analyze");
    require_artifact(ctx, "generated.jsonl", "generate");
    require_artifact(ctx, "vocab.txt", "generate");
    require_artifact(ctx, "attacked.jsonl", "attack");

    Vocabulary vocab = Vocabulary::load(artifact_path(ctx, "vocab.txt"));
    std::vector<StagedDocument> docs =
        read_documents_jsonl(artifact_path(ctx, "generated.jsonl"), vocab);
    {
        auto attacked = read_documents_jsonl(artifact_path(ctx, "attacked.jsonl"), vocab);
        docs.insert(docs.end(), std::make_move_iterator(attacked.begin()),
                    std::make_move_iterator(attacked.end()));
    }

    // paired clean original continuations, for Levenshtein distances
    std::unordered_map<std::string, const Document*> originals;
    for (const auto& staged : docs)
        if (staged.doc.provenance == Provenance::original && staged.condition == "clean")
            originals[staged.doc.source_id] = &staged.doc;

    PosTagger tagger;
    SentimentLexicon sentiment_lexicon = ctx.cfg.sentiment_tsv.empty()
                                             ? SentimentLexicon::embedded()
                                             : SentimentLexicon::from_tsv(ctx.cfg.sentiment_tsv);

    const int n = static_cast<int>(docs.size());
    std::vector<AnalyzedRow> rows(static_cast<std::size_t>(n));
    parallel_for(n, effective_workers(ctx.cfg), [&](int i) {
        const StagedDocument& staged = docs[static_cast<std::size_t>(i)];
        AnalyzedRow& row = rows[static_cast<std::size_t>(i)];
        row.doc_id = staged.doc.id;
        row.source_id = staged.doc.source_id;
        row.scheme = staged.doc.scheme;
        row.condition = staged.condition;
        row.provenance = to_string(staged.doc.provenance);
        const Document* source = nullptr;
        bool is_clean_original =
            staged.doc.provenance == Provenance::original && staged.condition == "clean";
        if (!is_clean_original) {
            auto it = originals.find(staged.doc.source_id);
            if (it != originals.end()) source = it->second;
        }
        row.fv = extract_features(staged.doc, tagger, sentiment_lexicon, source);
    });

    write_features_csv(artifact_path(ctx, "features.csv"), rows, ctx.cfg.config_hash);
    ctx.manifest.stage_counts["analyze_documents"] = n;
    save_manifest(ctx);
}

// --- evaluate -----------------------------------------------------------------

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write artifact: " + path);
    out << content;
}

nlohmann::ordered_json correlation_json(const CorrelationMatrix& m) {
    nlohmann::ordered_json j;
    j["n"] = m.n;
    j["entries"] = nlohmann::ordered_json::object();
    for (const auto& [name, r] : m.entries) j["entries"][name] = r;
    j["dropped_constant_columns"] = m.dropped;
    return j;
}

}  // namespace

EvalReport stage_evaluate(PipelineContext& ctx) {
    StageTimer timer(ctx, "evaluate");
    require_artifact(ctx, "detections.jsonl", "detect");
    require_artifact(ctx, "features.csv", "analyze");

    std::vector<PredictionRecord> records =
        read_detections_jsonl(artifact_path(ctx, "detections.jsonl"));
    std::vector<AnalyzedRow> analyzed = read_features_csv(artifact_path(ctx, "features.csv"));

    EvalReport report = summarize_run(records);

    std::vector<FeatureRow> feature_rows;
    feature_rows.reserve(analyzed.size());
    for (const auto& row : analyzed) feature_rows.push_back({row.doc_id, row.fv});

    CorrelationMatrix combined;
    bool have_correlation = false;
    try {
        combined = correlate_features(feature_rows, records);
        have_correlation = true;
    } catch (const Error& e) {
        report.warnings.push_back(std::string("correlation unavailable: ") + e.what());
    }
    if (have_correlation && combined.entries.empty())
        report.warnings.push_back("correlation matrix empty: all feature columns constant");
    for (const auto& col : combined.dropped)
        report.warnings.push_back("correlation column dropped (constant): " + col);

    std::map<std::string, CorrelationMatrix> per_scheme;
    if (ctx.cfg.per_scheme_correlation && have_correlation) {
        for (const auto& scheme : ctx.cfg.schemes) {
            std::vector<PredictionRecord> subset;
            for (const auto& r : records)
                if (r.scheme == scheme) subset.push_back(r);
            try {
                per_scheme[scheme] = correlate_features(feature_rows, subset);
            } catch (const Error& e) {
                report.warnings.push_back("per-scheme correlation (" + scheme +
                                          ") unavailable: " + e.what());
            }
        }
    }

    // eval_report.json
    {
        nlohmann::ordered_json j;
        j["config_hash"] = ctx.cfg.config_hash;
        j["tool_version"] = kToolVersion;
        j["notes"] = {
            "correlations are point-biserial Pearson of per-document features against "
            "correctness (incorrect=0, correct=1), combined across schemes",
            "sir detection normalizes by per-document pooled across-vocabulary logit variance"};
        j["cells"] = nlohmann::ordered_json::array();
        for (const auto& cell : report.cells) {
            nlohmann::ordered_json c;
            c["scheme"] = cell.scheme;
            c["condition"] = cell.condition;
            if (cell.auc) c["auc"] = *cell.auc;
            c["tpr"] = cell.tpr;
            c["fpr"] = cell.fpr;
            c["n_pos"] = cell.n_pos;
            c["n_neg"] = cell.n_neg;
            c["roc"] = nlohmann::ordered_json::array();
            for (const auto& p : cell.roc) c["roc"].push_back({p.fpr, p.tpr});
            j["cells"].push_back(std::move(c));
        }
        if (have_correlation) j["correlation"] = correlation_json(combined);
        if (!per_scheme.empty()) {
            j["correlation_per_scheme"] = nlohmann::ordered_json::object();
            for (const auto& [scheme, m] : per_scheme)
                j["correlation_per_scheme"][scheme] = correlation_json(m);
        }
        j["warnings"] = report.warnings;
        write_text_file(artifact_path(ctx, "eval_report.json"), j.dump(2) + "\n");
    }

    // eval_report.csv
    {
        std::ostringstream csv;
        csv << "# artifact=eval config_hash=" << ctx.cfg.config_hash << '\n';
        csv << "scheme,condition,auc,tpr,fpr,n_pos,n_neg\n";
        for (const auto& cell : report.cells) {
            csv << cell.scheme << ',' << cell.condition << ','
                << (cell.auc ? fmt6(*cell.auc) : "") << ',' << fmt6(cell.tpr) << ','
                << fmt6(cell.fpr) << ',' << cell.n_pos << ',' << cell.n_neg << '\n';
        }
        write_text_file(artifact_path(ctx, "eval_report.csv"), csv.str());
    }

    const std::string comment = "config_hash=" + ctx.cfg.config_hash;

    // ROC plots, one per (scheme, condition) cell with a defined curve
    for (const auto& cell : report.cells) {
        if (!cell.auc) continue;
        std::string title = "ROC " + cell.scheme + " / " + cell.condition + " (AUC " +
                            fmt6(*cell.auc) + ")";
        write_text_file(artifact_path(ctx, ("roc_" + cell.scheme + "_" + cell.condition + ".svg")
                                               .c_str()),
                        svg::roc_chart(title, cell.roc, comment));
    }

    // Levenshtein bars: mean distance per scheme, clean condition
    {
        std::ostringstream csv;
        csv << "# artifact=levenshtein config_hash=" << ctx.cfg.config_hash << '\n';
        csv << "scheme,mean_levenshtein,n\n";
        std::vector<svg::BarGroup> groups;
        for (const auto& scheme : ctx.cfg.schemes) {
            double sum = 0.0;
            int n = 0;
            for (const auto& row : analyzed) {
                if (row.scheme != scheme || row.condition != "clean") continue;
                if (!row.fv.levenshtein_to_source) continue;
                sum += static_cast<double>(*row.fv.levenshtein_to_source);
                ++n;
            }
            double mean = n ? sum / n : 0.0;
            csv << scheme << ',' << fmt6(mean) << ',' << n << '\n';
            groups.push_back({scheme, {mean}});
        }
        write_text_file(artifact_path(ctx, "levenshtein_bars.csv"), csv.str());
        write_text_file(artifact_path(ctx, "levenshtein_bars.svg"),
                        svg::bar_chart("Levenshtein distance to the paired original",
                                       {"mean word-level edits"}, groups, comment));
    }

    // POS distribution table: mean per-document counts per method, clean docs
    {
        std::vector<std::string> methods = {"original"};
        for (const auto& s : ctx.cfg.schemes) methods.push_back(s);
        auto method_of = [](const AnalyzedRow& row) {
            return row.scheme.empty() ? std::string("original") : row.scheme;
        };
        std::ostringstream csv;
        csv << "# artifact=pos_distribution config_hash=" << ctx.cfg.config_hash << '\n';
        csv << "tag";
        for (const auto& m : methods) csv << ',' << m;
        csv << '\n';
        std::vector<svg::BarGroup> groups;
        for (const auto& tag : pos_tagset()) {
            csv << tag;
            svg::BarGroup group{tag, {}};
            for (const auto& method : methods) {
                double sum = 0.0;
                int n = 0;
                for (const auto& row : analyzed) {
                    if (row.condition != "clean" || method_of(row) != method) continue;
                    auto it = row.fv.pos_counts.find(tag);
                    sum += it == row.fv.pos_counts.end() ? 0.0 : it->second;
                    ++n;
                }
                double mean = n ? sum / n : 0.0;
                csv << ',' << fmt6(mean);
                group.values.push_back(mean);
            }
            csv << '\n';
            groups.push_back(std::move(group));
        }
        write_text_file(artifact_path(ctx, "pos_distribution.csv"), csv.str());
        write_text_file(artifact_path(ctx, "pos_distribution.svg"),
                        svg::bar_chart("POS tag distribution by method", methods, groups, comment));
    }

    // Sentiment distribution: label percentages per method, clean docs
    {
        std::vector<std::string> methods = {"original"};
        for (const auto& s : ctx.cfg.schemes) methods.push_back(s);
        const std::vector<std::string> labels = {"negative", "neutral", "positive"};
        std::ostringstream csv;
        csv << "# artifact=sentiment_distribution config_hash=" << ctx.cfg.config_hash << '\n';
        csv << "method,negative_pct,neutral_pct,positive_pct\n";
        std::vector<svg::BarGroup> groups;
        for (const auto& method : methods) {
            int counts[3] = {0, 0, 0};
            int total = 0;
            for (const auto& row : analyzed) {
                if (row.condition != "clean") continue;
                std::string m = row.scheme.empty() ? "original" : row.scheme;
                if (m != method) continue;
                for (std::size_t k = 0; k < labels.size(); ++k)
                    if (row.fv.sentiment_label == labels[k]) ++counts[k];
                ++total;
            }
            svg::BarGroup group{method, {}};
            csv << method;
            for (int k = 0; k < 3; ++k) {
                double pct = total ? 100.0 * counts[k] / total : 0.0;
                csv << ',' << fmt6(pct);
                group.values.push_back(pct);
            }
            csv << '\n';
            groups.push_back(std::move(group));
        }
        write_text_file(artifact_path(ctx, "sentiment_distribution.csv"), csv.str());
        write_text_file(
            artifact_path(ctx, "sentiment_distribution.svg"),
            svg::bar_chart("Sentiment label share by method (%)", labels, groups, comment));
    }

    // Correlation heatmap (one file)
    {
        std::vector<std::string> col_labels = {"combined"};
        for (const auto& [scheme, m] : per_scheme) col_labels.push_back(scheme);
        std::vector<std::string> row_labels;
        std::vector<std::vector<double>> values;
        for (const auto& col : feature_columns()) {
            row_labels.push_back(col);
            std::vector<double> row;
            auto lookup = [&](const CorrelationMatrix& m) {
                for (const auto& [name, r] : m.entries)
                    if (name == col) return r;
                return std::nan("");
            };
            row.push_back(have_correlation ? lookup(combined) : std::nan(""));
            for (const auto& [scheme, m] : per_scheme) row.push_back(lookup(m));
            values.push_back(std::move(row));
        }
        write_text_file(artifact_path(ctx, "correlation_heatmap.svg"),
                        svg::heatmap("Pearson r: features vs prediction correctness", row_labels,
                                     col_labels, values, comment));
    }

    ctx.manifest.stage_counts["evaluate_cells"] = static_cast<int>(report.cells.size());
    save_manifest(ctx);
    return report;
}

EvalReport run_pipeline(PipelineContext& ctx) {
    stage_generate(ctx);
    stage_attack(ctx);
    stage_detect(ctx);
    stage_analyze(ctx);
    return stage_evaluate(ctx);
}

}  // namespace wmlab
