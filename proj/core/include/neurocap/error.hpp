#pragma once

#include <stdexcept>
#include <string>

namespace neurocap {

// Coarse failure categories surfaced verbatim by the CLI exit path.
enum class ErrorCategory { usage, io, config, data, model, train };

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::usage: return "usage";
        case ErrorCategory::io: return "io";
        case ErrorCategory::config: return "config";
        case ErrorCategory::data: return "data";
        case ErrorCategory::model: return "model";
        case ErrorCategory::train: return "train";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }

  private:
    ErrorCategory category_;
};

}  // namespace neurocap
