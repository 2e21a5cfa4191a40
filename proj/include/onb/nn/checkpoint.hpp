#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <vector>

#include "onb/nn/dense.hpp"

namespace onb {

/// Checkpoint container: 8-byte magic "ONETCKPT", u32 little-endian header
/// length, JSON header, then all parameters as a little-endian f64 blob in
/// declared layer order (per layer: weights row-major, then bias).
struct Checkpoint {
    nlohmann::json header;
    std::vector<double> values;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// MLP <-> header/blob helpers shared by the model-level checkpoints.
nlohmann::json mlp_header(const MlpParams& p);
void append_mlp_values(const MlpParams& p, std::vector<double>& out);
MlpParams mlp_from_header(const nlohmann::json& h, const std::vector<double>& values,
                          std::size_t& cursor);

}  // namespace onb
