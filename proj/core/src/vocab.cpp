#include "neurocap/vocab.hpp"

#include <fstream>

#include "neurocap/error.hpp"
#include "neurocap/text.hpp"

namespace neurocap {

namespace {
const std::vector<std::string> kReserved = {"<bos>", "<eos>", "<pad>", "<unk>"};
}

Vocabulary::Vocabulary() : tokens_(kReserved) { index(); }

void Vocabulary::index() {
    ids_.clear();
    for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) ids_[tokens_[i]] = i;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& captions) {
    Vocabulary v;
    for (const auto& caption : captions) {
        for (const auto& w : normalize_words(caption)) {
            if (!v.ids_.count(w)) {
                v.ids_[w] = static_cast<int>(v.tokens_.size());
                v.tokens_.push_back(w);
            }
        }
    }
    return v;
}

Vocabulary Vocabulary::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCategory::io, "cannot open vocabulary file " + file.string());
    Vocabulary v;
    v.tokens_.clear();
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        v.tokens_.push_back(line);
    }
    if (v.tokens_.size() < kReserved.size())
        throw Error(ErrorCategory::data, "vocabulary file " + file.string() + " lacks reserved entries");
    for (std::size_t i = 0; i < kReserved.size(); ++i) {
        if (v.tokens_[i] != kReserved[i])
            throw Error(ErrorCategory::data,
                        "vocabulary line " + std::to_string(i) + " must be " + kReserved[i] +
                            ", got " + v.tokens_[i]);
    }
    v.index();
    if (v.ids_.size() != v.tokens_.size())
        throw Error(ErrorCategory::data, "vocabulary file " + file.string() + " has duplicate tokens");
    return v;
}

void Vocabulary::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorCategory::io, "cannot write vocabulary file " + file.string());
    for (const auto& t : tokens_) out << t << '\n';
}

CaptionTokens Vocabulary::encode(const std::string& text, bool allow_unknown) const {
    CaptionTokens ids;
    for (const auto& w : normalize_words(text)) {
        auto it = ids_.find(w);
        if (it == ids_.end()) {
            if (!allow_unknown)
                throw Error(ErrorCategory::data, "unknown token in caption: '" + w + "'");
            ids.push_back(kUnk);
        } else {
            ids.push_back(it->second);
        }
    }
    return ids;
}

std::string Vocabulary::decode(const CaptionTokens& tokens) const {
    std::vector<std::string> words;
    for (int id : tokens) {
        if (id == kBos || id == kEos || id == kPad) continue;
        words.push_back(token_of(id));
    }
    return join_words(words);
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? -1 : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || id >= size())
        throw Error(ErrorCategory::data, "token id " + std::to_string(id) + " out of range");
    return tokens_[static_cast<std::size_t>(id)];
}

}  // namespace neurocap
