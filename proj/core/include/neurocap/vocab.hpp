#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace neurocap {

using CaptionTokens = std::vector<int>;

// Word-level vocabulary with ids 0..3 reserved for <bos> <eos> <pad> <unk>.
class Vocabulary {
  public:
    static constexpr int kBos = 0;
    static constexpr int kEos = 1;
    static constexpr int kPad = 2;
    static constexpr int kUnk = 3;

    Vocabulary();

    // Builds from a caption corpus: normalized words in first-seen order
    // after the reserved entries.
    static Vocabulary build(const std::vector<std::string>& captions);

    static Vocabulary load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    // Encodes a caption string. Unknown words are an error when
    // allow_unknown is false, otherwise they map to <unk>.
    CaptionTokens encode(const std::string& text, bool allow_unknown = false) const;
    // Joins the tokens back into canonical text, skipping reserved ids.
    std::string decode(const CaptionTokens& tokens) const;

    int id_of(const std::string& token) const;  // -1 when absent
    const std::string& token_of(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;

    void index();
};

}  // namespace neurocap
