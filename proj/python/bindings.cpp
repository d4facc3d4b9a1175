#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wmlab/attack.hpp"
#include "wmlab/config.hpp"
#include "wmlab/corpus.hpp"
#include "wmlab/evaluation.hpp"
#include "wmlab/langmodel.hpp"
#include "wmlab/linguistics.hpp"
#include "wmlab/pipeline.hpp"
#include "wmlab/watermark.hpp"

namespace py = pybind11;
using namespace wmlab;

namespace {

std::span<const int> as_span(const std::vector<int>& v) {
    return std::span<const int>(v.data(), v.size());
}

py::dict eval_report_to_dict(const EvalReport& report) {
    py::list cells;
    for (const auto& cell : report.cells) {
        py::dict c;
        c["scheme"] = cell.scheme;
        c["condition"] = cell.condition;
        c["auc"] = cell.auc ? py::object(py::float_(*cell.auc)) : py::none();
        c["tpr"] = cell.tpr;
        c["fpr"] = cell.fpr;
        c["n_pos"] = cell.n_pos;
        c["n_neg"] = cell.n_neg;
        cells.append(std::move(c));
    }
    py::dict out;
    out["cells"] = std::move(cells);
    out["warnings"] = report.warnings;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Text watermarking laboratory: generation, attacks, detection, analysis";

    py::register_exception<Error>(m, "WmlabError");

    // --- corpus ---------------------------------------------------------
    py::class_<Vocabulary>(m, "Vocabulary")
        .def(py::init<std::vector<std::string>>())
        .def("id_of", &Vocabulary::id_of)
        .def("token", &Vocabulary::token)
        .def_property_readonly("unk_id", &Vocabulary::unk_id)
        .def_property_readonly("size", &Vocabulary::size)
        .def_property_readonly("tokens", &Vocabulary::tokens)
        .def("save", &Vocabulary::save)
        .def_static("load", &Vocabulary::load);

    py::class_<TokenSequence>(m, "TokenSequence")
        .def(py::init<>())
        .def_readwrite("ids", &TokenSequence::ids)
        .def_readwrite("surface", &TokenSequence::surface)
        .def("__len__", [](const TokenSequence& t) { return t.size(); });

    py::class_<Document>(m, "Document")
        .def(py::init<>())
        .def_readwrite("id", &Document::id)
        .def_readwrite("text", &Document::text)
        .def_readwrite("tokens", &Document::tokens)
        .def_readwrite("scheme", &Document::scheme)
        .def_readwrite("attack", &Document::attack)
        .def_readwrite("source_id", &Document::source_id)
        .def_readwrite("word_count", &Document::word_count)
        .def_property_readonly("provenance",
                               [](const Document& d) { return std::string(to_string(d.provenance)); });

    m.def("tokenize", &tokenize, py::arg("text"), py::arg("vocab"));
    m.def("detokenize", &detokenize);
    m.def("detokenize_pretty", &detokenize_pretty);
    m.def("build_vocabulary", &build_vocabulary, py::arg("corpus"), py::arg("max_size"));
    m.def(
        "load_corpus",
        [](const std::string& path, int min_words, int max_words, const Vocabulary& vocab) {
            CorpusLoadStats stats;
            auto docs = load_corpus(path, min_words, max_words, vocab, &stats);
            return py::make_tuple(docs, stats.accepted, stats.rejected_length,
                                  static_cast<int>(stats.skips.size()));
        },
        py::arg("path"), py::arg("min_words"), py::arg("max_words"), py::arg("vocab"),
        "Returns (documents, accepted, rejected_length, skipped_lines)");
    m.def("load_corpus_raw", [](const std::string& path, int min_words, int max_words) {
        return load_corpus_raw(path, min_words, max_words);
    });
    m.def("synthesize_corpus", &synthesize_corpus, py::arg("n_docs"), py::arg("seed"));
    m.def("write_corpus_jsonl", &write_corpus_jsonl, py::arg("docs"), py::arg("path"));

    // --- language model --------------------------------------------------
    py::class_<NextTokenDistribution>(m, "NextTokenDistribution")
        .def_readonly("logits", &NextTokenDistribution::logits)
        .def_readonly("probs", &NextTokenDistribution::probs)
        .def("entropy", &NextTokenDistribution::entropy)
        .def_static("from_logits", &NextTokenDistribution::from_logits)
        .def_static("from_probs", &NextTokenDistribution::from_probs);

    py::class_<LanguageModel>(m, "LanguageModel");
    py::class_<TrigramModel, LanguageModel>(m, "TrigramModel")
        .def(py::init<const std::vector<Document>&, const Vocabulary&, int>(), py::arg("corpus"),
             py::arg("vocab"), py::arg("order") = 3)
        .def_property_readonly("order", &TrigramModel::order)
        .def_property_readonly("vocab_size", &TrigramModel::vocab_size)
        .def("next_distribution", [](const TrigramModel& model, const std::vector<int>& context) {
            return model.next_distribution(as_span(context));
        });
    py::class_<ExternalModel, LanguageModel>(m, "ExternalModel")
        .def(py::init<std::string, int, double>(), py::arg("endpoint"), py::arg("vocab_size"),
             py::arg("timeout_seconds") = 10.0)
        .def("next_distribution", [](const ExternalModel& model, const std::vector<int>& context) {
            return model.next_distribution(as_span(context));
        });
    m.def("perplexity", &perplexity);
    m.def("sample", &sample, py::arg("dist"), py::arg("rng_seed"));

    // --- watermark --------------------------------------------------------
    py::class_<WatermarkKey>(m, "WatermarkKey")
        .def(py::init([](std::uint64_t secret, int context_width) {
                 return WatermarkKey{secret, context_width};
             }),
             py::arg("secret"), py::arg("context_width") = 1)
        .def_readwrite("secret", &WatermarkKey::secret)
        .def_readwrite("context_width", &WatermarkKey::context_width)
        .def("fingerprint", &WatermarkKey::fingerprint);

    py::class_<KgwConfig>(m, "KgwConfig")
        .def(py::init([](double gamma, double delta, double z_threshold) {
                 return KgwConfig{gamma, delta, z_threshold};
             }),
             py::arg("gamma") = 0.5, py::arg("delta") = 2.0, py::arg("z_threshold") = 4.0)
        .def_readwrite("gamma", &KgwConfig::gamma)
        .def_readwrite("delta", &KgwConfig::delta)
        .def_readwrite("z_threshold", &KgwConfig::z_threshold);

    py::class_<SirConfig>(m, "SirConfig")
        .def(py::init([](int embed_dim, double bias_scale, std::uint64_t projection_seed,
                         double z_threshold) {
                 SirConfig c;
                 c.embed_dim = embed_dim;
                 c.bias_scale = bias_scale;
                 c.projection_seed = projection_seed;
                 c.z_threshold = z_threshold;
                 return c;
             }),
             py::arg("embed_dim") = 16, py::arg("bias_scale") = 1.5,
             py::arg("projection_seed") = SirConfig{}.projection_seed,
             py::arg("z_threshold") = 4.0)
        .def_readwrite("embed_dim", &SirConfig::embed_dim)
        .def_readwrite("bias_scale", &SirConfig::bias_scale)
        .def_readwrite("projection_seed", &SirConfig::projection_seed)
        .def_readwrite("z_threshold", &SirConfig::z_threshold)
        .def_readwrite("context_window", &SirConfig::context_window);

    py::class_<EwdConfig>(m, "EwdConfig")
        .def(py::init([](double gamma, double delta, double weight_floor, double z_threshold) {
                 return EwdConfig{gamma, delta, weight_floor, z_threshold};
             }),
             py::arg("gamma") = 0.5, py::arg("delta") = 2.0, py::arg("weight_floor") = 0.0,
             py::arg("z_threshold") = 4.0)
        .def_readwrite("gamma", &EwdConfig::gamma)
        .def_readwrite("delta", &EwdConfig::delta)
        .def_readwrite("weight_floor", &EwdConfig::weight_floor)
        .def_readwrite("z_threshold", &EwdConfig::z_threshold);

    py::class_<UnbiasedConfig>(m, "UnbiasedConfig")
        .def(py::init([](double z_threshold) { return UnbiasedConfig{z_threshold}; }),
             py::arg("z_threshold") = 4.0)
        .def_readwrite("z_threshold", &UnbiasedConfig::z_threshold);

    py::class_<TokenDiag>(m, "TokenDiag")
        .def_readonly("token_id", &TokenDiag::token_id)
        .def_readonly("contribution", &TokenDiag::contribution);

    py::class_<DetectionReport>(m, "DetectionReport")
        .def_readonly("score", &DetectionReport::score)
        .def_readonly("z", &DetectionReport::z)
        .def_readonly("verdict", &DetectionReport::verdict)
        .def_readonly("tokens_scored", &DetectionReport::tokens_scored)
        .def_readonly("per_token", &DetectionReport::per_token);

    py::class_<GreenPartition>(m, "GreenPartition")
        .def(py::init([](const WatermarkKey& key, const std::vector<int>& context, int vocab_size,
                         double gamma) {
                 return GreenPartition(key, as_span(context), vocab_size, gamma);
             }),
             py::arg("key"), py::arg("context"), py::arg("vocab_size"), py::arg("gamma"))
        .def("is_green", &GreenPartition::is_green)
        .def("count_green", &GreenPartition::count_green);

    py::class_<GenerateOptions>(m, "GenerateOptions")
        .def(py::init([](int length, std::uint64_t seed, double temperature, std::string doc_id,
                         std::string source_id) {
                 GenerateOptions o;
                 o.length = length;
                 o.seed = seed;
                 o.temperature = temperature;
                 o.doc_id = std::move(doc_id);
                 o.source_id = std::move(source_id);
                 return o;
             }),
             py::arg("length") = 200, py::arg("seed") = 0, py::arg("temperature") = 1.0,
             py::arg("doc_id") = "doc", py::arg("source_id") = "doc");

    m.def("plain_generate", &plain_generate);
    m.def("kgw_generate", &kgw_generate);
    m.def("sir_generate", &sir_generate);
    m.def("unbiased_generate", &unbiased_generate);
    m.def("ewd_generate", &ewd_generate);

    m.def("kgw_detect", &kgw_detect, py::arg("text"), py::arg("cfg"), py::arg("key"));
    m.def("kgw_z", &kgw_z);
    m.def("sir_detect", &sir_detect, py::arg("text"), py::arg("cfg"), py::arg("key"),
          py::arg("vocab_size"));
    m.def("sir_watermark_logits",
          [](const WatermarkKey& key, const SirConfig& cfg, const std::vector<int>& context,
             int vocab_size) { return sir_watermark_logits(key, cfg, as_span(context), vocab_size); });
    m.def("unbiased_reweight",
          [](const NextTokenDistribution& dist, const WatermarkKey& key,
             const std::vector<int>& context) { return unbiased_reweight(dist, key, as_span(context)); });
    m.def("unbiased_detect", &unbiased_detect, py::arg("text"), py::arg("cfg"), py::arg("key"),
          py::arg("vocab_size"));
    m.def("ewd_detect", &ewd_detect, py::arg("text"), py::arg("cfg"), py::arg("key"),
          py::arg("model"));

    // --- attacks ----------------------------------------------------------
    py::class_<SynonymTable>(m, "SynonymTable")
        .def_static("embedded", &SynonymTable::embedded)
        .def_static("from_tsv", &SynonymTable::from_tsv)
        .def("covers", &SynonymTable::covers);
    py::class_<BilingualLexicon>(m, "BilingualLexicon")
        .def_static("embedded", &BilingualLexicon::embedded)
        .def_static("from_tsv", &BilingualLexicon::from_tsv);
    m.def("sim_paraphrase", &sim_paraphrase, py::arg("doc"), py::arg("strength"), py::arg("seed"),
          py::arg("table"), py::arg("vocab"));
    m.def("sim_backtranslate", &sim_backtranslate, py::arg("doc"), py::arg("strength"),
          py::arg("seed"), py::arg("lexicon"), py::arg("vocab"));

    // --- linguistics --------------------------------------------------------
    py::class_<SentimentLexicon>(m, "SentimentLexicon")
        .def_static("embedded", &SentimentLexicon::embedded)
        .def_static("from_tsv", &SentimentLexicon::from_tsv);
    py::class_<PosTagger>(m, "PosTagger")
        .def(py::init<>())
        .def("pos_tag", &PosTagger::pos_tag)
        .def("tag_tokens", &PosTagger::tag_tokens);
    py::class_<FeatureVector>(m, "FeatureVector")
        .def_readonly("pos_counts", &FeatureVector::pos_counts)
        .def_readonly("sentiment_label", &FeatureVector::sentiment_label)
        .def_readonly("valence", &FeatureVector::valence)
        .def_readonly("avg_sentence_len_words", &FeatureVector::avg_sentence_len_words)
        .def_readonly("n_sentences", &FeatureVector::n_sentences)
        .def_readonly("avg_word_len_chars", &FeatureVector::avg_word_len_chars)
        .def_readonly("n_words", &FeatureVector::n_words)
        .def_readonly("text_len_chars", &FeatureVector::text_len_chars)
        .def_readonly("levenshtein_to_source", &FeatureVector::levenshtein_to_source);
    m.def("sentiment", [](const Document& doc, const SentimentLexicon& lexicon) {
        SentimentResult r = sentiment(doc, lexicon);
        return py::make_tuple(r.label, r.valence);
    });
    m.def("descriptive_stats", &descriptive_stats);
    m.def("levenshtein_words", &levenshtein_words);
    m.def("extract_features",
          [](const Document& doc, const PosTagger& tagger, const SentimentLexicon& lexicon,
             const Document* source) { return extract_features(doc, tagger, lexicon, source); },
          py::arg("doc"), py::arg("tagger"), py::arg("lexicon"), py::arg("source") = nullptr);

    // --- evaluation -----------------------------------------------------------
    py::class_<RocPoint>(m, "RocPoint")
        .def_readonly("fpr", &RocPoint::fpr)
        .def_readonly("tpr", &RocPoint::tpr);
    py::class_<RocCurve>(m, "RocCurve")
        .def_readonly("points", &RocCurve::points)
        .def_readonly("auc", &RocCurve::auc)
        .def_readonly("n_pos", &RocCurve::n_pos)
        .def_readonly("n_neg", &RocCurve::n_neg);
    m.def("roc_auc", [](const std::vector<double>& pos, const std::vector<double>& neg) {
        return roc_auc(pos, neg);
    });
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
        return pearson(x, y);
    });

    // --- pipeline ---------------------------------------------------------------
    m.def(
        "run_pipeline",
        [](const std::string& config_path, const std::string& out_dir) {
            PipelineContext ctx;
            ctx.cfg = RunConfig::from_file(config_path);
            if (!out_dir.empty()) ctx.cfg.out_dir = out_dir;
            ctx.cfg.validate();
            ctx.out_dir = ctx.cfg.out_dir;
            EvalReport report = run_pipeline(ctx);
            return eval_report_to_dict(report);
        },
        py::arg("config_path"), py::arg("out_dir") = "",
        "Run generate/attack/detect/analyze/evaluate; returns the evaluation summary");
    m.def("validate_config", [](const std::string& config_path) {
        RunConfig cfg = RunConfig::from_file(config_path);
        cfg.validate();
        return cfg.config_hash;
    });

    m.attr("__version__") = kToolVersion;
}
