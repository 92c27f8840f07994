#pragma once

#include <string>
#include <vector>

#include "vtag/tensor.hpp"

namespace vtag {

// Trainable tensor with its gradient slot.
struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

// Non-trainable state carried in checkpoints (BN population statistics,
// optimizer moments).
struct StateRef {
  std::string name;
  Tensor* value;
};

inline std::string join_name(const std::string& prefix, const std::string& leaf) {
  return prefix.empty() ? leaf : prefix + "." + leaf;
}

}  // namespace vtag
