#include "wmlab/types.hpp"

#include <fstream>

namespace wmlab {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{kUnkToken}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty() || tokens_[0] != kUnkToken)
        throw Error("vocabulary must start with the unknown token at id 0");
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        auto [it, inserted] = index_.emplace(tokens_[i], static_cast<int>(i));
        if (!inserted) throw Error("duplicate vocabulary token: " + tokens_[i]);
    }
}

int Vocabulary::id_of(const std::string& lowercased_token) const {
    auto it = index_.find(lowercased_token);
    return it == index_.end() ? unk_id() : it->second;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open vocabulary file for writing: " + path);
    for (const auto& t : tokens_) out << t << '\n';
    if (!out) throw Error("error writing vocabulary file: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open vocabulary file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) tokens.push_back(line);
    if (tokens.empty()) throw Error("empty vocabulary file: " + path);
    return Vocabulary(std::move(tokens));
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::original: return "original";
        case Provenance::watermarked: return "watermarked";
        case Provenance::attacked: return "attacked";
    }
    return "original";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "original") return Provenance::original;
    if (s == "watermarked") return Provenance::watermarked;
    if (s == "attacked") return Provenance::attacked;
    throw Error("unknown provenance: " + s);
}

bool is_punctuation_token(const std::string& surface) {
    if (surface.empty()) return false;
    for (char c : surface) {
        switch (c) {
            case '.': case ',': case '!': case '?': case ';': case ':':
            case '"': case '\'': case '(': case ')':
                continue;
            default:
                return false;
        }
    }
    return true;
}

}  // namespace wmlab
