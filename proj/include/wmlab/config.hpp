#pragma once
// Run configuration: INI-style key-value tree with [dotted.section]
// headers, WMLAB_ environment overrides, and a stable content hash.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmlab/attack.hpp"
#include "wmlab/watermark.hpp"

namespace wmlab {

// Flat view of the parsed file: "section.sub.key" -> raw string value.
class ConfigTree {
public:
    static ConfigTree parse_file(const std::string& path);
    static ConfigTree parse_string(const std::string& text);

    // Applies WMLAB_<PATH_WITH_UNDERSCORES> environment overrides to every
    // known key (call after parsing, before reading values).
    void apply_env_overrides(const std::vector<std::string>& known_keys);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

private:
    std::map<std::string, std::string> entries_;  // sorted: hash-stable
};

struct SchemeSettings {
    bool enabled = true;
    KgwConfig kgw;
    SirConfig sir;
    UnbiasedConfig unbiased;
    EwdConfig ewd;
};

struct RunConfig {
    // [corpus]
    std::string corpus_path;
    int min_words = 50;
    int max_words = 500;
    int vocab_cap = 50000;
    // [model]
    std::string model_kind = "builtin";  // builtin | external
    int order = 3;
    std::string endpoint;
    double temperature = 1.0;
    double timeout_seconds = 10.0;
    // [generate]
    int num_prompts = 200;
    int prompt_tokens = 20;
    int gen_length = 200;
    // [watermark]
    WatermarkKey key{0x57414c4142533031ull, 1};
    std::vector<std::string> schemes;  // enabled, fixed order kgw,sir,unbiased,ewd
    KgwConfig kgw;
    SirConfig sir;
    UnbiasedConfig unbiased;
    EwdConfig ewd;
    // [attack.*]
    std::vector<AttackChannel> attacks;  // enabled channels in file order
    std::string synonym_tsv;             // optional user overrides
    std::string bilingual_tsv;
    std::string sentiment_tsv;
    // [eval]
    double min_clean_auc = 0.0;  // > 0 enables the CI gate (exit code 3)
    bool per_scheme_correlation = false;
    // [run]
    std::uint64_t seed = 42;
    int workers = 0;  // 0 = logical CPUs
    std::string out_dir = "out";

    std::string config_hash;  // hex digest of the effective key-value set

    static RunConfig from_tree(ConfigTree tree);
    static RunConfig from_file(const std::string& path);

    // Known key paths (drives env overrides and validate-config).
    static const std::vector<std::string>& known_keys();

    // Throws Error listing every problem (missing corpus, bad ranges...).
    void validate() const;
};

std::string config_hash_hex(const ConfigTree& tree);

}  // namespace wmlab
