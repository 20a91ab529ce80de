#include "neurocap/text.hpp"

#include <cctype>

namespace neurocap {

std::vector<std::string> normalize_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isspace(uc)) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else if (std::ispunct(uc)) {
            continue;
        } else {
            cur.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out.push_back(' ');
        out += words[i];
    }
    return out;
}

}  // namespace neurocap
