#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neurocap/autodiff.hpp"
#include "neurocap/vocab.hpp"

namespace neurocap {

struct RoiSpec {
    std::string name;
    int voxel_count = 0;
};

// Canonical ROI order: V1 V2 V3 V4 LOC FFA PPA.
const std::vector<std::string>& canonical_roi_names();

enum class RoiSubset { LVC, HVC, VC };

RoiSubset parse_roi_subset(const std::string& s);
std::string to_string(RoiSubset subset);
// Pretty row label, e.g. "LVC (V1 + V2 + V3)".
std::string subset_label(RoiSubset subset);
bool subset_contains(RoiSubset subset, const std::string& roi_name);

// Per-ROI voxel rows flattened and right-padded to a common width H.
struct ROISequence {
    nn::Mat values;                       // rows x H
    int pad_width = 0;                    // H
    std::vector<int> valid_lengths;       // per row
    std::vector<std::string> roi_names;   // per row

    int rows() const { return static_cast<int>(roi_names.size()); }
    long long total_valid() const;
};

struct FmriSample {
    std::string sample_id;
    std::string stimulus_id;
    std::string category;
    int repetition_index = 0;  // -1 means "averaged over repetitions"
    ROISequence rois;
    CaptionTokens caption;
    std::optional<Eigen::VectorXd> proxy_embedding;
    // Flattened G*G patch-cell rows, each of dim d_proxy; cell (i,j) is row i*G+j.
    std::optional<nn::Mat> patch_embeddings;
    int patch_grid = 0;
    // Synthetic ground truth when present: row, col, size of the planted block.
    std::optional<std::array<int, 3>> salient_block;
};

struct Dataset {
    std::string split;  // "train" or "test"
    std::vector<FmriSample> samples;
    std::vector<RoiSpec> roi_specs;
    Vocabulary vocabulary;
    int d_proxy = 0;
    int patch_grid = 0;
    std::string normalization;  // "none" or "zscore_per_roi"
    std::map<std::string, std::vector<CaptionTokens>> category_caption_pool;

    int pad_width() const;
    long long total_voxels(RoiSubset subset) const;
};

using RoiArrays = std::vector<std::pair<std::string, std::vector<double>>>;

ROISequence flatten_and_pad(const RoiArrays& raw, double pad_value);

ROISequence select_roi_subset(const ROISequence& rois, RoiSubset subset);
FmriSample select_roi_subset(const FmriSample& sample, RoiSubset subset);

// Element-wise mean over repetitions of one stimulus. Inputs are
// canonicalized by (repetition_index, sample_id) so the result does not
// depend on list order; metadata comes from the canonical first sample.
FmriSample average_repetitions(const std::vector<FmriSample>& repetitions);

// Groups samples by stimulus_id (keeping first-seen order) and averages
// each group. Single-repetition groups pass through averaging unchanged.
std::vector<FmriSample> average_by_stimulus(const std::vector<FmriSample>& samples);

Dataset load_dataset(const std::filesystem::path& manifest_path);

struct SynthConfig {
    int n_categories = 0;
    int samples_per_category = 0;       // train stimuli per category
    int test_samples_per_category = 0;  // test stimuli per category
    int train_repetitions = 1;
    int test_repetitions = 1;
    std::vector<RoiSpec> roi_specs;     // exactly the 7 canonical ROIs
    int d_proxy = 0;
    int patch_grid = 0;                 // G
    int salient_block_size = 2;
    double noise_sigma = 0.05;          // voxel observation noise
    double proxy_noise_sigma = 0.05;
    int captions_per_category = 3;
    // ROIs whose voxels carry the category signal; the rest are pure noise.
    // Empty means all 7.
    std::vector<std::string> signal_rois;
};

struct SynthOutput {
    std::filesystem::path train_manifest;
    std::filesystem::path test_manifest;
    std::filesystem::path ground_truth;  // checkpoint with W and centroids
};

// Writes train/ and test/ manifests plus arrays under out_dir. Byte-identical
// for identical (config, seed).
SynthOutput generate_synthetic_dataset(const SynthConfig& config, std::uint64_t seed,
                                       const std::filesystem::path& out_dir);

}  // namespace neurocap
