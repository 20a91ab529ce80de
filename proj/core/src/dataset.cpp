#include "neurocap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "neurocap/checkpoint.hpp"
#include "neurocap/error.hpp"
#include "neurocap/rng.hpp"

namespace neurocap {

namespace {

using json = nlohmann::json;

constexpr const char* kLvcRois[] = {"V1", "V2", "V3"};
constexpr const char* kHvcRois[] = {"LOC", "FFA", "PPA"};

double to_f32(double x) { return static_cast<double>(static_cast<float>(x)); }

std::vector<double> read_f32_file(const std::filesystem::path& file, std::size_t expected_len,
                                  const std::string& what) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCategory::io, "missing array file for " + what + ": " + file.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected_len * 4)
        throw Error(ErrorCategory::data,
                    "array length mismatch for " + what + ": expected " +
                        std::to_string(expected_len) + " float32 values, file " + file.string() +
                        " holds " + std::to_string(bytes.size() / 4));
    std::vector<double> out(expected_len);
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t i = 0; i < expected_len; ++i, p += 4) {
        std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                          (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
        float f;
        std::memcpy(&f, &u, 4);
        out[i] = static_cast<double>(f);
    }
    return out;
}

void write_f32_file(const std::filesystem::path& file, const std::vector<double>& values) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorCategory::io, "cannot write array file " + file.string());
    for (double x : values) {
        const float f = static_cast<float>(x);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        char b[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                     static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
        out.write(b, 4);
    }
}

std::vector<double> zscore(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);
    std::vector<double> out(x.size());
    const double inv = sd < 1e-12 ? 1.0 : 1.0 / sd;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * inv;
    return out;
}

}  // namespace

const std::vector<std::string>& canonical_roi_names() {
    static const std::vector<std::string> names = {"V1", "V2", "V3", "V4", "LOC", "FFA", "PPA"};
    return names;
}

RoiSubset parse_roi_subset(const std::string& s) {
    if (s == "LVC") return RoiSubset::LVC;
    if (s == "HVC") return RoiSubset::HVC;
    if (s == "VC") return RoiSubset::VC;
    throw Error(ErrorCategory::config, "unknown ROI subset '" + s + "' (expected LVC, HVC, or VC)");
}

std::string to_string(RoiSubset subset) {
    switch (subset) {
        case RoiSubset::LVC: return "LVC";
        case RoiSubset::HVC: return "HVC";
        case RoiSubset::VC: return "VC";
    }
    return "?";
}

std::string subset_label(RoiSubset subset) {
    switch (subset) {
        case RoiSubset::LVC: return "LVC (V1 + V2 + V3)";
        case RoiSubset::HVC: return "HVC (LOC + FFA + PPA)";
        case RoiSubset::VC: return "VC (V4 + LVC + HVC)";
    }
    return "?";
}

bool subset_contains(RoiSubset subset, const std::string& roi_name) {
    switch (subset) {
        case RoiSubset::VC:
            return true;
        case RoiSubset::LVC:
            return std::find(std::begin(kLvcRois), std::end(kLvcRois), roi_name) !=
                   std::end(kLvcRois);
        case RoiSubset::HVC:
            return std::find(std::begin(kHvcRois), std::end(kHvcRois), roi_name) !=
                   std::end(kHvcRois);
    }
    return false;
}

long long ROISequence::total_valid() const {
    long long n = 0;
    for (int v : valid_lengths) n += v;
    return n;
}

int Dataset::pad_width() const {
    int h = 0;
    for (const auto& spec : roi_specs) h = std::max(h, spec.voxel_count);
    return h;
}

long long Dataset::total_voxels(RoiSubset subset) const {
    long long n = 0;
    for (const auto& spec : roi_specs)
        if (subset_contains(subset, spec.name)) n += spec.voxel_count;
    return n;
}

ROISequence flatten_and_pad(const RoiArrays& raw, double pad_value) {
    if (raw.empty()) throw Error(ErrorCategory::data, "flatten_and_pad: no ROI arrays given");
    std::size_t h = 0;
    for (const auto& [name, values] : raw) {
        if (values.empty())
            throw Error(ErrorCategory::data, "flatten_and_pad: ROI " + name + " is empty");
        for (double v : values)
            if (!std::isfinite(v))
                throw Error(ErrorCategory::data, "non-finite voxel value in ROI " + name);
        h = std::max(h, values.size());
    }
    ROISequence seq;
    seq.pad_width = static_cast<int>(h);
    seq.values = nn::Mat::Constant(static_cast<Eigen::Index>(raw.size()),
                                   static_cast<Eigen::Index>(h), pad_value);
    for (std::size_t r = 0; r < raw.size(); ++r) {
        const auto& [name, values] = raw[r];
        seq.roi_names.push_back(name);
        seq.valid_lengths.push_back(static_cast<int>(values.size()));
        for (std::size_t j = 0; j < values.size(); ++j)
            seq.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = values[j];
    }
    return seq;
}

ROISequence select_roi_subset(const ROISequence& rois, RoiSubset subset) {
    if (subset == RoiSubset::VC) return rois;
    ROISequence out;
    out.pad_width = rois.pad_width;
    std::vector<Eigen::Index> keep;
    for (std::size_t r = 0; r < rois.roi_names.size(); ++r) {
        if (subset_contains(subset, rois.roi_names[r])) {
            keep.push_back(static_cast<Eigen::Index>(r));
            out.roi_names.push_back(rois.roi_names[r]);
            out.valid_lengths.push_back(rois.valid_lengths[r]);
        }
    }
    out.values = nn::Mat(static_cast<Eigen::Index>(keep.size()), rois.values.cols());
    for (std::size_t i = 0; i < keep.size(); ++i)
        out.values.row(static_cast<Eigen::Index>(i)) = rois.values.row(keep[i]);
    return out;
}

FmriSample select_roi_subset(const FmriSample& sample, RoiSubset subset) {
    if (subset == RoiSubset::VC) return sample;
    FmriSample out = sample;
    out.rois = select_roi_subset(sample.rois, subset);
    return out;
}

FmriSample average_repetitions(const std::vector<FmriSample>& repetitions) {
    if (repetitions.empty())
        throw Error(ErrorCategory::data, "average_repetitions: empty repetition list");
    std::vector<const FmriSample*> sorted;
    sorted.reserve(repetitions.size());
    for (const auto& s : repetitions) sorted.push_back(&s);
    std::sort(sorted.begin(), sorted.end(), [](const FmriSample* a, const FmriSample* b) {
        if (a->repetition_index != b->repetition_index)
            return a->repetition_index < b->repetition_index;
        return a->sample_id < b->sample_id;
    });
    const FmriSample& first = *sorted.front();
    for (const FmriSample* s : sorted) {
        if (s->stimulus_id != first.stimulus_id)
            throw Error(ErrorCategory::data, "average_repetitions: mixed stimulus ids " +
                                                 first.stimulus_id + " and " + s->stimulus_id);
        if (s->rois.values.rows() != first.rois.values.rows() ||
            s->rois.values.cols() != first.rois.values.cols())
            throw Error(ErrorCategory::data,
                        "average_repetitions: mismatched ROI shapes for " + s->sample_id);
    }
    FmriSample out = first;
    out.sample_id = first.stimulus_id;
    out.repetition_index = -1;
    nn::Mat acc = nn::Mat::Zero(first.rois.values.rows(), first.rois.values.cols());
    for (const FmriSample* s : sorted) acc += s->rois.values;
    out.rois.values = acc / static_cast<double>(sorted.size());
    return out;
}

std::vector<FmriSample> average_by_stimulus(const std::vector<FmriSample>& samples) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<FmriSample>> groups;
    for (const auto& s : samples) {
        if (!groups.count(s.stimulus_id)) order.push_back(s.stimulus_id);
        groups[s.stimulus_id].push_back(s);
    }
    std::vector<FmriSample> out;
    out.reserve(order.size());
    for (const auto& id : order) out.push_back(average_repetitions(groups[id]));
    return out;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
    if (!std::filesystem::exists(manifest_path))
        throw Error(ErrorCategory::io, "manifest not found: " + manifest_path.string());
    std::ifstream in(manifest_path);
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw Error(ErrorCategory::data,
                    "invalid manifest json " + manifest_path.string() + ": " + e.what());
    }
    const auto dir = manifest_path.parent_path();

    Dataset ds;
    try {
        ds.split = m.at("split").get<std::string>();
        if (ds.split != "train" && ds.split != "test")
            throw Error(ErrorCategory::data, "manifest split must be train or test");
        ds.d_proxy = m.at("d_proxy").get<int>();
        ds.patch_grid = m.value("patch_grid", 0);
        ds.normalization = m.value("normalization", std::string("none"));
        if (ds.normalization != "none" && ds.normalization != "zscore_per_roi")
            throw Error(ErrorCategory::data,
                        "unknown normalization '" + ds.normalization + "' in manifest");

        const auto& specs = m.at("roi_specs");
        if (specs.size() != canonical_roi_names().size())
            throw Error(ErrorCategory::data, "roi count mismatch: expected 7, got " +
                                                 std::to_string(specs.size()));
        std::set<std::string> seen;
        for (const auto& sj : specs) {
            RoiSpec spec{sj.at("name").get<std::string>(), sj.at("voxel_count").get<int>()};
            if (std::find(canonical_roi_names().begin(), canonical_roi_names().end(), spec.name) ==
                canonical_roi_names().end())
                throw Error(ErrorCategory::data, "unknown ROI name " + spec.name);
            if (!seen.insert(spec.name).second)
                throw Error(ErrorCategory::data, "duplicate ROI name " + spec.name);
            if (spec.voxel_count < 1)
                throw Error(ErrorCategory::data, "voxel_count must be >= 1 for ROI " + spec.name);
            ds.roi_specs.push_back(std::move(spec));
        }

        ds.vocabulary = Vocabulary::load(dir / m.at("vocabulary").get<std::string>());

        std::set<std::string> sample_ids;
        for (const auto& sj : m.at("samples")) {
            FmriSample s;
            s.sample_id = sj.at("sample_id").get<std::string>();
            if (!sample_ids.insert(s.sample_id).second)
                throw Error(ErrorCategory::data, "duplicate sample_id " + s.sample_id);
            s.stimulus_id = sj.at("stimulus_id").get<std::string>();
            s.category = sj.at("category").get<std::string>();
            s.repetition_index = sj.at("repetition_index").get<int>();

            const auto& files = sj.at("voxel_files");
            RoiArrays raw;
            for (const auto& spec : ds.roi_specs) {
                if (!files.contains(spec.name))
                    throw Error(ErrorCategory::data,
                                "sample " + s.sample_id + " lacks voxel file for ROI " + spec.name);
                auto values = read_f32_file(dir / files.at(spec.name).get<std::string>(),
                                            static_cast<std::size_t>(spec.voxel_count),
                                            s.sample_id + "/" + spec.name);
                if (ds.normalization == "zscore_per_roi") values = zscore(values);
                raw.emplace_back(spec.name, std::move(values));
            }
            s.rois = flatten_and_pad(raw, 0.0);

            const std::string caption = sj.at("caption").get<std::string>();
            try {
                s.caption = ds.vocabulary.encode(caption, false);
            } catch (const Error& e) {
                throw Error(ErrorCategory::data,
                            std::string(e.what()) + " (sample " + s.sample_id + ")");
            }
            if (s.caption.empty())
                throw Error(ErrorCategory::data, "empty caption for sample " + s.sample_id);

            if (sj.contains("proxy_file")) {
                auto v = read_f32_file(dir / sj.at("proxy_file").get<std::string>(),
                                       static_cast<std::size_t>(ds.d_proxy),
                                       s.sample_id + "/proxy");
                s.proxy_embedding = Eigen::Map<Eigen::VectorXd>(v.data(),
                                                                static_cast<Eigen::Index>(v.size()));
            }
            if (sj.contains("patch_file")) {
                const std::size_t cells =
                    static_cast<std::size_t>(ds.patch_grid) * static_cast<std::size_t>(ds.patch_grid);
                auto v = read_f32_file(dir / sj.at("patch_file").get<std::string>(),
                                       cells * static_cast<std::size_t>(ds.d_proxy),
                                       s.sample_id + "/patches");
                nn::Mat p(static_cast<Eigen::Index>(cells), ds.d_proxy);
                for (std::size_t i = 0; i < cells; ++i)
                    for (int j = 0; j < ds.d_proxy; ++j)
                        p(static_cast<Eigen::Index>(i), j) =
                            v[i * static_cast<std::size_t>(ds.d_proxy) + static_cast<std::size_t>(j)];
                s.patch_embeddings = std::move(p);
                s.patch_grid = ds.patch_grid;
            }
            if (sj.contains("salient_block")) {
                auto b = sj.at("salient_block");
                s.salient_block = std::array<int, 3>{b.at(0).get<int>(), b.at(1).get<int>(),
                                                     b.at(2).get<int>()};
            }
            ds.samples.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCategory::data,
                    "manifest " + manifest_path.string() + " malformed: " + e.what());
    }

    for (const auto& s : ds.samples) {
        auto& pool = ds.category_caption_pool[s.category];
        if (std::find(pool.begin(), pool.end(), s.caption) == pool.end()) pool.push_back(s.caption);
    }
    return ds;
}

namespace {

const std::vector<std::string>& synth_nouns() {
    static const std::vector<std::string> nouns = {
        "dog",    "cat",   "car",    "tree",   "bird",  "boat",  "house", "fish",
        "horse",  "plane", "train",  "flower", "chair", "clock", "piano", "whale",
        "guitar", "bridge", "apple", "robot",  "truck", "lamp",  "bottle", "shoe",
        "kite",   "drum",  "castle", "tiger",  "spoon", "ladder", "wheel", "bell"};
    return nouns;
}

const std::vector<std::string>& synth_patterns() {
    static const std::vector<std::string> patterns = {
        "a @ in the park",          "the @ on the green grass", "a photo of a @",
        "a small @ near the water", "the big @ under a blue sky", "a @ beside a gray rock",
        "the @ in front of a wall", "a white @ on the road"};
    return patterns;
}

std::string instantiate(const std::string& pattern, const std::string& noun) {
    std::string out = pattern;
    const auto at = out.find('@');
    out.replace(at, 1, noun);
    return out;
}

Eigen::VectorXd gaussian_vec(int dim, Rng& rng, double sigma = 1.0) {
    std::normal_distribution<double> dist(0.0, sigma);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = dist(rng);
    return v;
}

Eigen::VectorXd unit_orthogonal_to(const Eigen::VectorXd& mu, Rng& rng) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXd g = gaussian_vec(static_cast<int>(mu.size()), rng);
        g -= g.dot(mu) * mu;
        const double n = g.norm();
        if (n > 1e-8) return g / n;
    }
    throw Error(ErrorCategory::data, "failed to draw orthogonal direction");
}

void validate(const SynthConfig& cfg) {
    auto fail = [](const std::string& msg) { throw Error(ErrorCategory::config, msg); };
    if (cfg.n_categories < 1) fail("synthetic config: n_categories must be >= 1");
    if (cfg.samples_per_category < 1) fail("synthetic config: samples_per_category must be >= 1");
    if (cfg.test_samples_per_category < 0)
        fail("synthetic config: test_samples_per_category must be >= 0");
    if (cfg.train_repetitions < 1 || cfg.test_repetitions < 1)
        fail("synthetic config: repetitions must be >= 1");
    if (cfg.patch_grid < 1) fail("synthetic config: patch_grid must be >= 1");
    if (cfg.salient_block_size < 1 || cfg.salient_block_size > cfg.patch_grid)
        fail("synthetic config: salient_block_size must be in [1, patch_grid]");
    if (cfg.d_proxy < 2) fail("synthetic config: d_proxy must be >= 2");
    if (cfg.captions_per_category < 1 ||
        cfg.captions_per_category > static_cast<int>(synth_patterns().size()))
        fail("synthetic config: captions_per_category must be in [1, " +
             std::to_string(synth_patterns().size()) + "]");
    if (cfg.noise_sigma < 0 || cfg.proxy_noise_sigma < 0)
        fail("synthetic config: noise sigmas must be >= 0");
    if (cfg.roi_specs.size() != canonical_roi_names().size())
        fail("synthetic config: roi_specs must list the 7 canonical ROIs");
    std::set<std::string> names;
    for (const auto& spec : cfg.roi_specs) {
        if (spec.voxel_count < 1) fail("synthetic config: voxel_count must be >= 1");
        if (std::find(canonical_roi_names().begin(), canonical_roi_names().end(), spec.name) ==
            canonical_roi_names().end())
            fail("synthetic config: unknown ROI " + spec.name);
        names.insert(spec.name);
    }
    if (names.size() != canonical_roi_names().size())
        fail("synthetic config: roi_specs must name each canonical ROI once");
    for (const auto& roi : cfg.signal_rois)
        if (!names.count(roi)) fail("synthetic config: signal ROI " + roi + " not in roi_specs");
}

}  // namespace

SynthOutput generate_synthetic_dataset(const SynthConfig& cfg, std::uint64_t seed,
                                       const std::filesystem::path& out_dir) {
    validate(cfg);
    SeedStreams streams(seed);

    // Category names double as caption nouns.
    std::vector<std::string> categories;
    std::vector<std::vector<std::string>> templates;
    std::vector<std::string> all_captions;
    for (int c = 0; c < cfg.n_categories; ++c) {
        const auto& nouns = synth_nouns();
        std::string noun = nouns[static_cast<std::size_t>(c) % nouns.size()];
        if (c >= static_cast<int>(nouns.size()))
            noun += std::to_string(c / static_cast<int>(nouns.size()));
        categories.push_back(noun);
        std::vector<std::string> caps;
        for (int k = 0; k < cfg.captions_per_category; ++k) {
            caps.push_back(instantiate(synth_patterns()[static_cast<std::size_t>(k)], noun));
            all_captions.push_back(caps.back());
        }
        templates.push_back(std::move(caps));
    }
    const Vocabulary vocab = Vocabulary::build(all_captions);

    Rng rng_centroid = streams.stream("synth.centroids");
    std::vector<Eigen::VectorXd> mu;
    for (int c = 0; c < cfg.n_categories; ++c) {
        Eigen::VectorXd v = gaussian_vec(cfg.d_proxy, rng_centroid);
        mu.push_back(v / v.norm());
    }

    long long total_voxels = 0;
    for (const auto& spec : cfg.roi_specs) total_voxels += spec.voxel_count;
    const bool all_signal = cfg.signal_rois.empty();
    auto roi_has_signal = [&](const std::string& name) {
        return all_signal || std::find(cfg.signal_rois.begin(), cfg.signal_rois.end(), name) !=
                                 cfg.signal_rois.end();
    };

    Rng rng_w = streams.stream("synth.w");
    nn::Mat w(total_voxels, cfg.d_proxy);
    {
        std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(cfg.d_proxy));
        Eigen::Index row = 0;
        for (const auto& spec : cfg.roi_specs) {
            for (int i = 0; i < spec.voxel_count; ++i, ++row) {
                for (int j = 0; j < cfg.d_proxy; ++j)
                    w(row, j) = roi_has_signal(spec.name) ? to_f32(dist(rng_w)) : 0.0;
                if (!roi_has_signal(spec.name)) {
                    // Burn the draws so signal-ROI layouts stay comparable
                    // across configs with the same seed.
                    for (int j = 0; j < cfg.d_proxy; ++j) (void)dist(rng_w);
                }
            }
        }
    }

    SynthOutput result;
    result.ground_truth = out_dir / "ground_truth.ckpt";
    std::filesystem::create_directories(out_dir);

    for (const std::string split : {"train", "test"}) {
        const bool is_train = split == std::string("train");
        const int stimuli_per_cat = is_train ? cfg.samples_per_category
                                             : cfg.test_samples_per_category;
        const int reps = is_train ? cfg.train_repetitions : cfg.test_repetitions;
        const auto dir = out_dir / split;
        std::filesystem::create_directories(dir / "arrays");
        vocab.save(dir / "vocab.txt");

        Rng rng_sample = streams.stream(std::string("synth.samples.") + split);
        Rng rng_caption = streams.stream(std::string("synth.captions.") + split);
        Rng rng_patch = streams.stream(std::string("synth.patches.") + split);

        json samples = json::array();
        for (int c = 0; c < cfg.n_categories; ++c) {
            for (int s = 0; s < stimuli_per_cat; ++s) {
                const std::string stim = split + std::string("_") + categories[c] + "_" +
                                         std::to_string(s);

                Eigen::VectorXd proxy =
                    mu[c] + gaussian_vec(cfg.d_proxy, rng_sample, cfg.proxy_noise_sigma);
                std::vector<double> proxy_vals(static_cast<std::size_t>(cfg.d_proxy));
                for (int j = 0; j < cfg.d_proxy; ++j) {
                    proxy_vals[static_cast<std::size_t>(j)] = to_f32(proxy(j));
                    proxy(j) = proxy_vals[static_cast<std::size_t>(j)];
                }
                const std::string proxy_file = "arrays/" + stim + ".proxy.f32";
                write_f32_file(dir / proxy_file, proxy_vals);

                std::uniform_int_distribution<int> cap_dist(0, cfg.captions_per_category - 1);
                const std::string caption = templates[c][static_cast<std::size_t>(cap_dist(rng_caption))];

                const int g = cfg.patch_grid;
                std::uniform_int_distribution<int> pos_dist(0, g - cfg.salient_block_size);
                const int br = pos_dist(rng_patch);
                const int bc = pos_dist(rng_patch);
                std::normal_distribution<double> mag_dist(1.0, 0.1);
                std::vector<double> patch_vals(static_cast<std::size_t>(g) * g *
                                               static_cast<std::size_t>(cfg.d_proxy));
                for (int i = 0; i < g; ++i) {
                    for (int j = 0; j < g; ++j) {
                        const bool in_block = i >= br && i < br + cfg.salient_block_size &&
                                              j >= bc && j < bc + cfg.salient_block_size;
                        Eigen::VectorXd u = unit_orthogonal_to(mu[c], rng_patch);
                        Eigen::VectorXd cell = in_block ? (mu[c] + 0.3 * u).eval() : u;
                        cell *= std::abs(mag_dist(rng_patch));
                        for (int k = 0; k < cfg.d_proxy; ++k)
                            patch_vals[(static_cast<std::size_t>(i) * g + j) *
                                           static_cast<std::size_t>(cfg.d_proxy) +
                                       static_cast<std::size_t>(k)] = to_f32(cell(k));
                    }
                }
                const std::string patch_file = "arrays/" + stim + ".patches.f32";
                write_f32_file(dir / patch_file, patch_vals);

                for (int r = 0; r < reps; ++r) {
                    const std::string sample_id = stim + "_r" + std::to_string(r);
                    Eigen::VectorXd voxels = w * proxy;
                    voxels += gaussian_vec(static_cast<int>(total_voxels), rng_sample,
                                           cfg.noise_sigma);

                    json voxel_files = json::object();
                    Eigen::Index row = 0;
                    for (const auto& spec : cfg.roi_specs) {
                        std::vector<double> vals(static_cast<std::size_t>(spec.voxel_count));
                        for (int i = 0; i < spec.voxel_count; ++i, ++row)
                            vals[static_cast<std::size_t>(i)] = to_f32(voxels(row));
                        const std::string file = "arrays/" + sample_id + "." + spec.name + ".f32";
                        write_f32_file(dir / file, vals);
                        voxel_files[spec.name] = file;
                    }

                    json sj;
                    sj["sample_id"] = sample_id;
                    sj["stimulus_id"] = stim;
                    sj["category"] = categories[c];
                    sj["repetition_index"] = r;
                    sj["caption"] = caption;
                    sj["voxel_files"] = voxel_files;
                    sj["proxy_file"] = proxy_file;
                    sj["patch_file"] = patch_file;
                    sj["salient_block"] = {br, bc, cfg.salient_block_size};
                    samples.push_back(std::move(sj));
                }
            }
        }

        json manifest;
        manifest["split"] = split;
        manifest["normalization"] = "none";
        manifest["d_proxy"] = cfg.d_proxy;
        manifest["patch_grid"] = cfg.patch_grid;
        manifest["vocabulary"] = "vocab.txt";
        json specs = json::array();
        for (const auto& spec : cfg.roi_specs)
            specs.push_back({{"name", spec.name}, {"voxel_count", spec.voxel_count}});
        manifest["roi_specs"] = specs;
        manifest["samples"] = samples;

        const auto manifest_path = dir / "manifest.json";
        std::ofstream mf(manifest_path, std::ios::binary);
        if (!mf) throw Error(ErrorCategory::io, "cannot write manifest " + manifest_path.string());
        mf << manifest.dump(2) << '\n';
        if (is_train)
            result.train_manifest = manifest_path;
        else
            result.test_manifest = manifest_path;
    }

    Checkpoint gt;
    gt.params.add("synth.w", w);
    nn::Mat centroids(cfg.n_categories, cfg.d_proxy);
    for (int c = 0; c < cfg.n_categories; ++c) centroids.row(c) = mu[c].transpose();
    gt.params.add("synth.centroids", centroids);
    std::string cat_list;
    for (std::size_t i = 0; i < categories.size(); ++i) {
        if (i) cat_list += ",";
        cat_list += categories[i];
    }
    gt.meta["kind"] = "synthetic_ground_truth";
    gt.meta["categories"] = cat_list;
    save_checkpoint(gt, result.ground_truth);

    return result;
}

}  // namespace neurocap
