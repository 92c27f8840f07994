#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vtag {

// One video-level training instance: pooled feature halves plus the tag set.
struct VideoExample {
  std::string id;
  std::vector<int> labels;   // ascending, unique
  std::vector<float> rgb;    // visual half of the pooled feature
  std::vector<float> audio;  // audio half
};

// Feature-key schema of the on-disk records. Key names are tooling
// conventions, so aliases are accepted for the id; dims of 0 allow an empty
// list (used by synthetic datasets that carry no audio half).
struct ExampleSchema {
  std::vector<std::string> id_keys = {"id", "video_id"};
  std::string labels_key = "labels";
  std::string rgb_key = "mean_rgb";
  std::string audio_key = "mean_audio";
  std::size_t rgb_dim = 1024;
  std::size_t audio_dim = 128;
};

using Dataset = std::vector<VideoExample>;

}  // namespace vtag
