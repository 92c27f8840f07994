#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vtag/tensor.hpp"

namespace vtag {

// Versioned binary checkpoint: a JSON manifest (the resolved run
// configuration), the data-order RNG state, the iteration counter, and a
// directory of named f64 tensors (parameters, BN population statistics,
// optimizer moments). Fields are little-endian; saving a loaded checkpoint
// reproduces it byte for byte.
struct CheckpointMeta {
  std::uint32_t version = 1;
  std::uint64_t iteration = 0;
  std::array<std::uint64_t, 4> rng_state{};
  std::string manifest;  // JSON string
};

void save_checkpoint(const std::string& path, const CheckpointMeta& meta,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors);

// Reads the meta block only (for inspecting the manifest before building
// the model).
CheckpointMeta read_checkpoint_meta(const std::string& path);

// Loads into the given slots; names and shapes must match the file exactly,
// otherwise CheckpointError.
CheckpointMeta load_checkpoint(const std::string& path,
                               const std::vector<std::pair<std::string, Tensor*>>& tensors);

}  // namespace vtag
