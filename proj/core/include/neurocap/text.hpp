#pragma once

#include <string>
#include <vector>

namespace neurocap {

// Lowercases ASCII letters, strips punctuation, splits on whitespace.
// Shared by vocabulary construction and the captioning metrics so both
// see the same token stream.
std::vector<std::string> normalize_words(const std::string& text);

std::string join_words(const std::vector<std::string>& words);

}  // namespace neurocap
