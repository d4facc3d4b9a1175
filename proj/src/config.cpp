#include "wmlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wmlab/prf.hpp"

namespace wmlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

ConfigTree ConfigTree::parse_string(const std::string& text) {
    ConfigTree tree;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw Error("config line " + std::to_string(line_no) + ": unterminated section");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw Error("config line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = unquote(trim(t.substr(eq + 1)));
        if (key.empty())
            throw Error("config line " + std::to_string(line_no) + ": empty key");
        tree.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return tree;
}

ConfigTree ConfigTree::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

void ConfigTree::apply_env_overrides(const std::vector<std::string>& known_keys) {
    for (const auto& key : known_keys) {
        std::string env_name = "WMLAB_";
        for (char c : key)
            env_name.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (const char* v = std::getenv(env_name.c_str())) entries_[key] = v;
    }
}

bool ConfigTree::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string ConfigTree::get_string(const std::string& key, const std::string& def) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? def : it->second;
}

double ConfigTree::get_double(const std::string& key, double def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw Error("");
        return v;
    } catch (...) {
        throw Error("config key " + key + ": expected a number, got '" + it->second + "'");
    }
}

int ConfigTree::get_int(const std::string& key, int def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    try {
        std::size_t pos = 0;
        int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw Error("");
        return v;
    } catch (...) {
        throw Error("config key " + key + ": expected an integer, got '" + it->second + "'");
    }
}

std::uint64_t ConfigTree::get_u64(const std::string& key, std::uint64_t def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(it->second, &pos, 0);  // accepts 0x...
        if (pos != it->second.size()) throw Error("");
        return v;
    } catch (...) {
        throw Error("config key " + key + ": expected an unsigned integer, got '" + it->second + "'");
    }
}

bool ConfigTree::get_bool(const std::string& key, bool def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error("config key " + key + ": expected a boolean, got '" + it->second + "'");
}

std::string config_hash_hex(const ConfigTree& tree) {
    std::uint64_t h = mix64(0x434f4e4649474831ull);
    for (const auto& [k, v] : tree.entries()) {
        h = prf_absorb(h, hash_bytes(k));
        h = prf_absorb(h, hash_bytes(v));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::vector<std::string>& RunConfig::known_keys() {
    static const std::vector<std::string> keys = {
        "corpus.path", "corpus.min_words", "corpus.max_words", "corpus.vocab_cap",
        "model.kind", "model.order", "model.endpoint", "model.temperature", "model.timeout_s",
        "generate.num_prompts", "generate.prompt_tokens", "generate.length",
        "watermark.secret", "watermark.context_width",
        "watermark.kgw.enabled", "watermark.kgw.gamma", "watermark.kgw.delta",
        "watermark.kgw.z_threshold",
        "watermark.sir.enabled", "watermark.sir.embed_dim", "watermark.sir.bias_scale",
        "watermark.sir.projection_seed", "watermark.sir.z_threshold",
        "watermark.sir.context_window",
        "watermark.unbiased.enabled", "watermark.unbiased.z_threshold",
        "watermark.ewd.enabled", "watermark.ewd.gamma", "watermark.ewd.delta",
        "watermark.ewd.weight_floor", "watermark.ewd.z_threshold",
        "attack.sim_paraphrase.enabled", "attack.sim_paraphrase.strength",
        "attack.sim_paraphrase.seed",
        "attack.sim_backtranslate.enabled", "attack.sim_backtranslate.strength",
        "attack.sim_backtranslate.seed",
        "attack.external_paraphrase.enabled", "attack.external_paraphrase.endpoint",
        "attack.external_paraphrase.timeout_s", "attack.external_paraphrase.max_concurrency",
        "attack.external_backtranslate.enabled", "attack.external_backtranslate.endpoint",
        "attack.external_backtranslate.pivot", "attack.external_backtranslate.timeout_s",
        "attack.external_backtranslate.max_concurrency",
        "attack.synonyms_tsv", "attack.bilingual_tsv",
        "linguistics.sentiment_tsv",
        "eval.min_clean_auc", "eval.per_scheme_correlation",
        "run.seed", "run.workers", "run.out_dir",
    };
    return keys;
}

RunConfig RunConfig::from_tree(ConfigTree tree) {
    tree.apply_env_overrides(known_keys());

    RunConfig cfg;
    cfg.corpus_path = tree.get_string("corpus.path", "");
    cfg.min_words = tree.get_int("corpus.min_words", 50);
    cfg.max_words = tree.get_int("corpus.max_words", 500);
    cfg.vocab_cap = tree.get_int("corpus.vocab_cap", 50000);

    cfg.model_kind = tree.get_string("model.kind", "builtin");
    cfg.order = tree.get_int("model.order", 3);
    cfg.endpoint = tree.get_string("model.endpoint", "");
    cfg.temperature = tree.get_double("model.temperature", 1.0);
    cfg.timeout_seconds = tree.get_double("model.timeout_s", 10.0);

    cfg.num_prompts = tree.get_int("generate.num_prompts", 200);
    cfg.prompt_tokens = tree.get_int("generate.prompt_tokens", 20);
    cfg.gen_length = tree.get_int("generate.length", 200);

    cfg.key.secret = tree.get_u64("watermark.secret", cfg.key.secret);
    cfg.key.context_width = tree.get_int("watermark.context_width", 1);

    cfg.kgw.gamma = tree.get_double("watermark.kgw.gamma", 0.5);
    cfg.kgw.delta = tree.get_double("watermark.kgw.delta", 2.0);
    cfg.kgw.z_threshold = tree.get_double("watermark.kgw.z_threshold", 4.0);
    cfg.sir.embed_dim = tree.get_int("watermark.sir.embed_dim", 16);
    cfg.sir.bias_scale = tree.get_double("watermark.sir.bias_scale", 1.5);
    cfg.sir.projection_seed = tree.get_u64("watermark.sir.projection_seed", cfg.sir.projection_seed);
    cfg.sir.z_threshold = tree.get_double("watermark.sir.z_threshold", 4.0);
    cfg.sir.context_window = tree.get_int("watermark.sir.context_window", 16);
    cfg.unbiased.z_threshold = tree.get_double("watermark.unbiased.z_threshold", 4.0);
    cfg.ewd.gamma = tree.get_double("watermark.ewd.gamma", 0.5);
    cfg.ewd.delta = tree.get_double("watermark.ewd.delta", 2.0);
    cfg.ewd.weight_floor = tree.get_double("watermark.ewd.weight_floor", 0.0);
    cfg.ewd.z_threshold = tree.get_double("watermark.ewd.z_threshold", 4.0);

    for (const char* s : {"kgw", "sir", "unbiased", "ewd"})
        if (tree.get_bool(std::string("watermark.") + s + ".enabled", true))
            cfg.schemes.emplace_back(s);

    auto add_sim_attack = [&](AttackKind kind, const char* name, double default_strength) {
        std::string base = std::string("attack.") + name;
        if (!tree.get_bool(base + ".enabled", true)) return;
        AttackChannel ch;
        ch.kind = kind;
        ch.strength = tree.get_double(base + ".strength", default_strength);
        ch.rng_seed = tree.get_u64(base + ".seed", 0x41545441434b3031ull + cfg.attacks.size());
        cfg.attacks.push_back(ch);
    };
    add_sim_attack(AttackKind::sim_paraphrase, "sim_paraphrase", 0.3);
    add_sim_attack(AttackKind::sim_backtranslate, "sim_backtranslate", 0.5);

    auto add_ext_attack = [&](AttackKind kind, const char* name) {
        std::string base = std::string("attack.") + name;
        if (!tree.get_bool(base + ".enabled", false)) return;
        AttackChannel ch;
        ch.kind = kind;
        ch.strength = 1.0;
        ch.endpoint = tree.get_string(base + ".endpoint", "");
        ch.pivot = tree.get_string(base + ".pivot", "fr");
        ch.timeout_seconds = tree.get_double(base + ".timeout_s", 10.0);
        ch.max_concurrency = tree.get_int(base + ".max_concurrency", 8);
        cfg.attacks.push_back(ch);
    };
    add_ext_attack(AttackKind::external_paraphrase, "external_paraphrase");
    add_ext_attack(AttackKind::external_backtranslate, "external_backtranslate");

    cfg.synonym_tsv = tree.get_string("attack.synonyms_tsv", "");
    cfg.bilingual_tsv = tree.get_string("attack.bilingual_tsv", "");
    cfg.sentiment_tsv = tree.get_string("linguistics.sentiment_tsv", "");

    cfg.min_clean_auc = tree.get_double("eval.min_clean_auc", 0.0);
    cfg.per_scheme_correlation = tree.get_bool("eval.per_scheme_correlation", false);

    cfg.seed = tree.get_u64("run.seed", 42);
    cfg.workers = tree.get_int("run.workers", 0);
    cfg.out_dir = tree.get_string("run.out_dir", "out");

    cfg.config_hash = config_hash_hex(tree);
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_tree(ConfigTree::parse_file(path));
}

void RunConfig::validate() const {
    std::vector<std::string> problems;
    if (corpus_path.empty())
        problems.push_back("corpus.path is required");
    else if (!std::filesystem::exists(corpus_path))
        problems.push_back("corpus.path does not exist: " + corpus_path);
    if (min_words < 0 || max_words < min_words)
        problems.push_back("corpus word bounds must satisfy 0 <= min_words <= max_words");
    if (vocab_cap < 2) problems.push_back("corpus.vocab_cap must be >= 2");
    if (model_kind != "builtin" && model_kind != "external")
        problems.push_back("model.kind must be builtin or external");
    if (model_kind == "builtin" && (order < 1 || order > 3))
        problems.push_back("model.order must be in {1,2,3}");
    if (model_kind == "external" && endpoint.empty())
        problems.push_back("model.endpoint required for an external model");
    if (temperature <= 0.0) problems.push_back("model.temperature must be positive");
    if (num_prompts < 1) problems.push_back("generate.num_prompts must be >= 1");
    if (prompt_tokens < 1) problems.push_back("generate.prompt_tokens must be >= 1");
    if (gen_length < 1) problems.push_back("generate.length must be >= 1");
    if (key.context_width < 1 || key.context_width > 4)
        problems.push_back("watermark.context_width must be in 1..4");
    if (schemes.empty()) problems.push_back("no watermark scheme enabled");
    if (kgw.gamma <= 0.0 || kgw.gamma >= 1.0)
        problems.push_back("watermark.kgw.gamma must lie in (0,1)");
    if (kgw.delta < 0.0) problems.push_back("watermark.kgw.delta must be >= 0");
    if (ewd.gamma <= 0.0 || ewd.gamma >= 1.0)
        problems.push_back("watermark.ewd.gamma must lie in (0,1)");
    if (ewd.weight_floor < 0.0) problems.push_back("watermark.ewd.weight_floor must be >= 0");
    if (sir.embed_dim < 1) problems.push_back("watermark.sir.embed_dim must be >= 1");
    if (sir.bias_scale < 0.0) problems.push_back("watermark.sir.bias_scale must be >= 0");
    if (sir.context_window < 1) problems.push_back("watermark.sir.context_window must be >= 1");
    for (const auto& ch : attacks) {
        if (ch.strength < 0.0 || ch.strength > 1.0)
            problems.push_back(std::string("attack.") + to_string(ch.kind) +
                               ".strength must lie in [0,1]");
        bool external = ch.kind == AttackKind::external_paraphrase ||
                        ch.kind == AttackKind::external_backtranslate;
        if (external && ch.endpoint.empty())
            problems.push_back(std::string("attack.") + to_string(ch.kind) +
                               ".endpoint is required");
    }
    if (!synonym_tsv.empty() && !std::filesystem::exists(synonym_tsv))
        problems.push_back("attack.synonyms_tsv does not exist: " + synonym_tsv);
    if (!bilingual_tsv.empty() && !std::filesystem::exists(bilingual_tsv))
        problems.push_back("attack.bilingual_tsv does not exist: " + bilingual_tsv);
    if (!sentiment_tsv.empty() && !std::filesystem::exists(sentiment_tsv))
        problems.push_back("linguistics.sentiment_tsv does not exist: " + sentiment_tsv);
    if (workers < 0) problems.push_back("run.workers must be >= 0");

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(msg);
    }
}

}  // namespace wmlab
