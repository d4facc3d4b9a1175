#pragma once
// Shared domain types: vocabulary, token sequences, documents.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace wmlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// External service failed in a way worth retrying (timeout, connect error).
struct TransientError : Error {
    using Error::Error;
};

// Word-form vocabulary. Ids are dense 0..size-1, <unk> is always id 0.
class Vocabulary {
public:
    static constexpr const char* kUnkToken = "<unk>";

    Vocabulary();
    explicit Vocabulary(std::vector<std::string> tokens);

    int id_of(const std::string& lowercased_token) const;
    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    int unk_id() const { return 0; }
    int size() const { return static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // Plain text, one token per line, line number = id.
    void save(const std::string& path) const;
    static Vocabulary load(const std::string& path);

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

struct TokenSequence {
    std::vector<int> ids;              // vocabulary indices
    std::vector<std::string> surface;  // original forms, casing preserved

    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
};

enum class Provenance { original, watermarked, attacked };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct Document {
    std::string id;
    std::string text;
    TokenSequence tokens;
    Provenance provenance = Provenance::original;
    std::string scheme;     // watermark scheme, empty for plain docs
    std::string attack;     // attack channel, empty unless provenance == attacked
    std::string source_id;  // id of the source original document
    int word_count = 0;     // tokens excluding punctuation-only tokens
};

bool is_punctuation_token(const std::string& surface);

}  // namespace wmlab
