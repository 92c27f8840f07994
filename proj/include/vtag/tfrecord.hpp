#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vtag/data.hpp"

namespace vtag {

// CRC32C (Castagnoli) over the buffer.
std::uint32_t crc32c(const void* data, std::size_t size);
// Record-stream mask: rotate right by 15 then add the mask constant.
std::uint32_t masked_crc32c(const void* data, std::size_t size);

// Record framing:
//   u64le length | u32le masked crc of the length bytes
//   payload      | u32le masked crc of the payload
// Both checksums are verified; mismatches raise CorruptionError with the
// stream offset, a short read raises TruncationError.
class TfRecordReader {
 public:
  explicit TfRecordReader(std::istream& in);
  // Next payload, or nullopt at a clean end of stream.
  std::optional<std::string> next();

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

class TfRecordWriter {
 public:
  explicit TfRecordWriter(std::ostream& out);
  void write(std::string_view payload);

 private:
  std::ostream& out_;
};

std::vector<std::string> read_record_file(const std::string& path);
void write_record_file(const std::string& path,
                       const std::vector<std::string>& payloads);

// Minimal Example-message parser for the video-level schema. Unknown fields
// are skipped per the wire-format rules; missing keys and wrong feature
// lengths raise SchemaError naming the key.
VideoExample parse_example(std::string_view bytes,
                           const ExampleSchema& schema = {});

// Inverse of parse_example for the schema fields, with a fixed key order so
// serialization is deterministic.
std::string serialize_example(const VideoExample& example,
                              const ExampleSchema& schema = {});

Dataset load_dataset(const std::vector<std::string>& paths,
                     const ExampleSchema& schema = {});
void save_dataset(const std::string& path, const Dataset& dataset,
                  const ExampleSchema& schema = {});

}  // namespace vtag
