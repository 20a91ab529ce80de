#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "neurocap/params.hpp"

namespace neurocap {

// Single-file checkpoint: magic line, 8-byte little-endian header length,
// JSON header describing named tensors (row-major float32 blobs) plus
// free-form metadata, then the raw data section.
struct Checkpoint {
    nn::ParamStore params;
    std::map<std::string, std::string> meta;  // kind, frozen, fingerprints, config json, ...
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

// Serialized float32 image of the store; frozen-contract tests compare
// these byte strings.
std::string tensor_bytes(const nn::ParamStore& params);

}  // namespace neurocap
