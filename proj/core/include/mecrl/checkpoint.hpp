#pragma once

// JSON checkpoints for network parameters:
//   {"format": "mecrl-mlp/1",
//    "layers": {"w1": {"shape": [r, c], "data": [...]}, "b1": ..., "w2": ..., "b2": ...}}
// Matrices are flattened row-major. Every float is written in its shortest
// round-trip decimal form, so load(save(p)) == p bit for bit.

#include <filesystem>
#include <string>

#include "mecrl/neural.hpp"

namespace mecrl::nn {

std::string to_checkpoint_json(const MlpParams& p);
MlpParams from_checkpoint_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const MlpParams& p);
MlpParams load_checkpoint(const std::filesystem::path& path);

// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace mecrl::nn
