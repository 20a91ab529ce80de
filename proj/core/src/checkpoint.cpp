#include "neurocap/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "neurocap/error.hpp"

namespace neurocap {

namespace {

using json = nlohmann::json;

constexpr char kMagic[] = "NEUROCAP-CKPT-1\n";

void append_f32_le(std::string& out, const nn::Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const float f = static_cast<float>(m(i, j));
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            out.push_back(static_cast<char>(u & 0xff));
            out.push_back(static_cast<char>((u >> 8) & 0xff));
            out.push_back(static_cast<char>((u >> 16) & 0xff));
            out.push_back(static_cast<char>((u >> 24) & 0xff));
        }
    }
}

float read_f32_le(const unsigned char* p) {
    const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                            (static_cast<std::uint32_t>(p[1]) << 8) |
                            (static_cast<std::uint32_t>(p[2]) << 16) |
                            (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

}  // namespace

std::string tensor_bytes(const nn::ParamStore& params) {
    std::string out;
    for (const auto& name : params.names()) append_f32_le(out, params.at(name));
    return out;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
    json header;
    header["meta"] = ckpt.meta;
    json tensors = json::array();
    std::uint64_t offset = 0;
    for (const auto& name : ckpt.params.names()) {
        const nn::Mat& m = ckpt.params.at(name);
        const std::uint64_t count = static_cast<std::uint64_t>(m.size());
        tensors.push_back({{"name", name},
                           {"rows", m.rows()},
                           {"cols", m.cols()},
                           {"offset", offset}});
        offset += count * 4;
    }
    header["tensors"] = tensors;

    const std::string header_str = header.dump();
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorCategory::io, "cannot write checkpoint " + file.string());
    out.write(kMagic, sizeof(kMagic) - 1);
    std::uint64_t hlen = header_str.size();
    char lenbuf[8];
    for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<char>((hlen >> (8 * i)) & 0xff);
    out.write(lenbuf, 8);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    const std::string data = tensor_bytes(ckpt.params);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCategory::io, "short write on checkpoint " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCategory::io, "cannot open checkpoint " + file.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t magic_len = sizeof(kMagic) - 1;
    if (content.size() < magic_len + 8 || content.compare(0, magic_len, kMagic) != 0)
        throw Error(ErrorCategory::data, "not a checkpoint file: " + file.string());
    std::uint64_t hlen = 0;
    for (int i = 0; i < 8; ++i)
        hlen |= static_cast<std::uint64_t>(static_cast<unsigned char>(content[magic_len + i]))
                << (8 * i);
    if (content.size() < magic_len + 8 + hlen)
        throw Error(ErrorCategory::data, "truncated checkpoint header: " + file.string());
    json header;
    try {
        header = json::parse(content.substr(magic_len + 8, hlen));
    } catch (const json::exception& e) {
        throw Error(ErrorCategory::data, "bad checkpoint header: " + std::string(e.what()));
    }

    Checkpoint ckpt;
    if (header.contains("meta"))
        ckpt.meta = header["meta"].get<std::map<std::string, std::string>>();
    const std::size_t data_start = magic_len + 8 + hlen;
    for (const auto& tj : header["tensors"]) {
        const std::string name = tj["name"].get<std::string>();
        const Eigen::Index rows = tj["rows"].get<Eigen::Index>();
        const Eigen::Index cols = tj["cols"].get<Eigen::Index>();
        const std::uint64_t offset = tj["offset"].get<std::uint64_t>();
        const std::uint64_t bytes = static_cast<std::uint64_t>(rows) * cols * 4;
        if (data_start + offset + bytes > content.size())
            throw Error(ErrorCategory::data,
                        "checkpoint tensor " + name + " exceeds file size in " + file.string());
        nn::Mat m(rows, cols);
        const auto* p = reinterpret_cast<const unsigned char*>(content.data() + data_start + offset);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j, p += 4) m(i, j) = read_f32_le(p);
        ckpt.params.add(name, std::move(m));
    }
    return ckpt;
}

}  // namespace neurocap
