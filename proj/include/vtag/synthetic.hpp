#pragma once

#include <cstdint>

#include "vtag/data.hpp"
#include "vtag/tensor.hpp"

namespace vtag {

// Desk-scale stand-in for the video-level dataset. Every label owns a latent
// prototype vector; a video's feature is the mean of its labels' prototypes
// plus Gaussian noise, so the label set is recoverable from the pooled
// feature by construction.
struct SyntheticTaskSpec {
  std::size_t vocab = 50;
  std::size_t feat_dim = 64;
  double mean_tags = 3.4;  // 1 + Poisson(mean_tags - 1), capped below
  std::size_t max_tags = 30;
  double noise = 0.1;  // stddev of the additive feature noise
  std::uint64_t seed = 1;
};

// Label prototypes [vocab x feat_dim], a pure function of the spec.
Tensor synthetic_prototypes(const SyntheticTaskSpec& spec);

// Example `index` of the dataset; deterministic in (spec, index).
VideoExample synthesize_example(const SyntheticTaskSpec& spec,
                                const Tensor& prototypes, std::size_t index);

// Examples [start, start + count) of the task; disjoint ranges of the same
// spec share the prototypes and so form train/validation splits.
Dataset generate_synthetic(const SyntheticTaskSpec& spec, std::size_t count,
                           std::size_t start = 0);

// Schema matching the generated records: the full feature sits in the rgb
// key and the audio half is empty.
ExampleSchema synthetic_schema(const SyntheticTaskSpec& spec);

}  // namespace vtag
