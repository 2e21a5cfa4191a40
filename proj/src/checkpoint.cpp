#include "onb/nn/checkpoint.hpp"

#include "onb/io.hpp"

namespace onb {

namespace {
constexpr char kMagic[] = "ONETCKPT";  // 8 chars, no terminator stored
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    const std::string header = ck.header.dump();
    std::string bytes;
    bytes.reserve(12 + header.size() + ck.values.size() * 8);
    bytes.append(kMagic, 8);
    const std::uint32_t len = static_cast<std::uint32_t>(header.size());
    for (int b = 0; b < 4; ++b)
        bytes.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
    bytes += header;
    bytes += doubles_to_le_bytes(ck.values.data(), ck.values.size());
    atomic_write_file(path, bytes);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string bytes = read_file_bytes(path);
    if (bytes.size() < 12 || bytes.compare(0, 8, kMagic, 8) != 0)
        throw IoError("not a checkpoint file: " + path.string());
    std::uint32_t len = 0;
    for (int b = 0; b < 4; ++b)
        len |= static_cast<std::uint32_t>(
                   static_cast<unsigned char>(bytes[8 + b]))
               << (8 * b);
    if (bytes.size() < 12 + static_cast<std::size_t>(len))
        throw IoError("truncated checkpoint header: " + path.string());
    Checkpoint ck;
    ck.header = nlohmann::json::parse(bytes.substr(12, len));
    ck.values = doubles_from_le_bytes(bytes.substr(12 + len));
    if (ck.header.contains("param_count") &&
        ck.values.size() != ck.header["param_count"].get<std::size_t>())
        throw IoError("checkpoint blob length disagrees with header: " +
                      path.string());
    return ck;
}

nlohmann::json mlp_header(const MlpParams& p) {
    nlohmann::json h;
    h["layer_sizes"] = p.layer_sizes;
    std::vector<std::string> acts;
    acts.reserve(p.layers.size());
    for (const auto& layer : p.layers) acts.push_back(to_string(layer.activation));
    h["activations"] = acts;
    return h;
}

void append_mlp_values(const MlpParams& p, std::vector<double>& out) {
    for (const auto& layer : p.layers) {
        for (Index r = 0; r < layer.weights.rows(); ++r)
            for (Index c = 0; c < layer.weights.cols(); ++c)
                out.push_back(layer.weights(r, c));
        for (Index i = 0; i < layer.bias.size(); ++i) out.push_back(layer.bias(i));
    }
}

MlpParams mlp_from_header(const nlohmann::json& h,
                          const std::vector<double>& values,
                          std::size_t& cursor) {
    MlpParams p;
    p.layer_sizes = h.at("layer_sizes").get<std::vector<Index>>();
    const auto acts = h.at("activations").get<std::vector<std::string>>();
    if (acts.size() + 1 != p.layer_sizes.size())
        throw IoError("checkpoint header: activation count mismatch");
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        DenseLayer layer;
        const Index rows = p.layer_sizes[l + 1];
        const Index cols = p.layer_sizes[l];
        if (cursor + static_cast<std::size_t>(rows * cols + rows) > values.size())
            throw IoError("checkpoint blob shorter than declared layers");
        layer.weights.resize(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c) layer.weights(r, c) = values[cursor++];
        layer.bias.resize(rows);
        for (Index i = 0; i < rows; ++i) layer.bias(i) = values[cursor++];
        layer.activation = activation_from_string(acts[l]);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

}  // namespace onb
