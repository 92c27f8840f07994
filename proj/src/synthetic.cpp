#include "vtag/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

namespace {

void validate(const SyntheticTaskSpec& spec) {
  if (spec.vocab == 0 || spec.feat_dim == 0)
    throw DomainError("synthetic spec: vocab and feat_dim must be positive");
  if (spec.max_tags == 0 || spec.max_tags > spec.vocab)
    throw DomainError("synthetic spec: max_tags must lie in [1, vocab]");
  if (spec.mean_tags < 1.0)
    throw DomainError("synthetic spec: mean_tags must be >= 1");
  if (spec.noise < 0.0)
    throw DomainError("synthetic spec: noise must be >= 0");
}

// Knuth's product method; lambda stays small here.
std::size_t poisson(Rng& rng, double lambda) {
  const double limit = std::exp(-lambda);
  std::size_t k = 0;
  double prod = rng.uniform();
  while (prod > limit) {
    ++k;
    prod *= rng.uniform();
  }
  return k;
}

}  // namespace

Tensor synthetic_prototypes(const SyntheticTaskSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, 0));
  return Tensor::randn({spec.vocab, spec.feat_dim}, rng);
}

VideoExample synthesize_example(const SyntheticTaskSpec& spec,
                                const Tensor& prototypes, std::size_t index) {
  Rng rng(derive_seed(spec.seed, index + 1));

  std::size_t tags = 1 + poisson(rng, spec.mean_tags - 1.0);
  tags = std::min(tags, spec.max_tags);

  // Partial Fisher-Yates draw of `tags` distinct labels.
  std::vector<int> ids(spec.vocab);
  for (std::size_t i = 0; i < spec.vocab; ++i) ids[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < tags; ++i) {
    const std::size_t j = i + rng.below(spec.vocab - i);
    std::swap(ids[i], ids[j]);
  }
  std::vector<int> labels(ids.begin(), ids.begin() + static_cast<long>(tags));
  std::sort(labels.begin(), labels.end());

  VideoExample example;
  char name[32];
  std::snprintf(name, sizeof(name), "synth-%08zu", index);
  example.id = name;
  example.labels = std::move(labels);
  example.rgb.resize(spec.feat_dim);
  for (std::size_t c = 0; c < spec.feat_dim; ++c) {
    double v = 0.0;
    for (int l : example.labels) v += prototypes.at(static_cast<std::size_t>(l), c);
    v /= static_cast<double>(example.labels.size());
    if (spec.noise > 0.0) v += spec.noise * rng.normal();
    example.rgb[c] = static_cast<float>(v);
  }
  return example;
}

Dataset generate_synthetic(const SyntheticTaskSpec& spec, std::size_t count,
                           std::size_t start) {
  const Tensor prototypes = synthetic_prototypes(spec);
  Dataset dataset;
  dataset.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    dataset.push_back(synthesize_example(spec, prototypes, start + i));
  return dataset;
}

ExampleSchema synthetic_schema(const SyntheticTaskSpec& spec) {
  ExampleSchema schema;
  schema.rgb_dim = spec.feat_dim;
  schema.audio_dim = 0;
  return schema;
}

}  // namespace vtag
