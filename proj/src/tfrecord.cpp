#include "vtag/tfrecord.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "vtag/errors.hpp"

namespace vtag {

namespace {

constexpr std::uint32_t kCrcMaskDelta = 0xa282ead8u;

std::array<std::uint32_t, 256> make_crc32c_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t crc = i;
    for (int bit = 0; bit < 8; ++bit)
      crc = (crc & 1) ? (crc >> 1) ^ 0x82f63b78u : crc >> 1;
    table[i] = crc;
  }
  return table;
}

const std::array<std::uint32_t, 256>& crc32c_table() {
  static const auto table = make_crc32c_table();
  return table;
}

std::uint32_t load_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64le(const unsigned char* p) {
  return static_cast<std::uint64_t>(load_u32le(p)) |
         (static_cast<std::uint64_t>(load_u32le(p + 4)) << 32);
}

void store_u32le(std::uint32_t v, char* p) {
  p[0] = static_cast<char>(v & 0xff);
  p[1] = static_cast<char>((v >> 8) & 0xff);
  p[2] = static_cast<char>((v >> 16) & 0xff);
  p[3] = static_cast<char>((v >> 24) & 0xff);
}

void store_u64le(std::uint64_t v, char* p) {
  store_u32le(static_cast<std::uint32_t>(v & 0xffffffffu), p);
  store_u32le(static_cast<std::uint32_t>(v >> 32), p + 4);
}

}  // namespace

std::uint32_t crc32c(const void* data, std::size_t size) {
  const auto& table = crc32c_table();
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint32_t crc = 0xffffffffu;
  for (std::size_t i = 0; i < size; ++i)
    crc = table[(crc ^ p[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

std::uint32_t masked_crc32c(const void* data, std::size_t size) {
  const std::uint32_t crc = crc32c(data, size);
  return ((crc >> 15) | (crc << 17)) + kCrcMaskDelta;
}

TfRecordReader::TfRecordReader(std::istream& in) : in_(in) {}

std::optional<std::string> TfRecordReader::next() {
  char header[12];
  in_.read(header, sizeof(header));
  const std::streamsize got = in_.gcount();
  if (got == 0 && in_.eof()) return std::nullopt;
  if (got != sizeof(header))
    throw TruncationError("record header truncated at offset " +
                          std::to_string(offset_));

  const std::uint64_t length =
      load_u64le(reinterpret_cast<const unsigned char*>(header));
  const std::uint32_t length_crc =
      load_u32le(reinterpret_cast<const unsigned char*>(header) + 8);
  if (masked_crc32c(header, 8) != length_crc)
    throw CorruptionError("record length checksum mismatch", offset_);

  std::string payload(length, '\0');
  if (length > 0) {
    in_.read(payload.data(), static_cast<std::streamsize>(length));
    if (static_cast<std::uint64_t>(in_.gcount()) != length)
      throw TruncationError("record payload truncated at offset " +
                            std::to_string(offset_ + 12));
  }
  char footer[4];
  in_.read(footer, sizeof(footer));
  if (in_.gcount() != sizeof(footer))
    throw TruncationError("record footer truncated at offset " +
                          std::to_string(offset_ + 12 + length));
  const std::uint32_t payload_crc =
      load_u32le(reinterpret_cast<const unsigned char*>(footer));
  if (masked_crc32c(payload.data(), payload.size()) != payload_crc)
    throw CorruptionError("record payload checksum mismatch", offset_);

  offset_ += 12 + length + 4;
  return payload;
}

TfRecordWriter::TfRecordWriter(std::ostream& out) : out_(out) {}

void TfRecordWriter::write(std::string_view payload) {
  char header[12];
  store_u64le(payload.size(), header);
  store_u32le(masked_crc32c(header, 8), header + 8);
  out_.write(header, sizeof(header));
  out_.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  char footer[4];
  store_u32le(masked_crc32c(payload.data(), payload.size()), footer);
  out_.write(footer, sizeof(footer));
}

std::vector<std::string> read_record_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TruncationError("cannot open record file: " + path);
  TfRecordReader reader(in);
  std::vector<std::string> records;
  while (auto rec = reader.next()) records.push_back(std::move(*rec));
  return records;
}

void write_record_file(const std::string& path,
                       const std::vector<std::string>& payloads) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TruncationError("cannot open record file for write: " + path);
  TfRecordWriter writer(out);
  for (const auto& p : payloads) writer.write(p);
}

// ---------------------------------------------------------------------------
// Example message wire format. Layout:
//   Example    { Features features = 1; }
//   Features   { repeated entry { string key = 1; Feature value = 2; } = 1 }
//   Feature    { BytesList = 1 | FloatList = 2 | Int64List = 3 }
//   BytesList  { repeated bytes value = 1; }
//   FloatList  { repeated float value = 1; }   (packed or unpacked)
//   Int64List  { repeated int64 value = 1; }   (packed or unpacked)
// ---------------------------------------------------------------------------

namespace {

struct FeatureValue {
  std::vector<std::string> bytes_values;
  std::vector<float> float_values;
  std::vector<std::int64_t> int_values;
  enum class Kind { kNone, kBytes, kFloat, kInt } kind = Kind::kNone;
};

class WireReader {
 public:
  explicit WireReader(std::string_view buf) : buf_(buf) {}

  bool done() const { return pos_ >= buf_.size(); }

  std::uint64_t read_varint() {
    std::uint64_t value = 0;
    int shift = 0;
    while (true) {
      if (pos_ >= buf_.size())
        throw SchemaError("wire format: varint runs past the buffer");
      const auto byte = static_cast<unsigned char>(buf_[pos_++]);
      if (shift >= 64)
        throw SchemaError("wire format: varint longer than 10 bytes");
      value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if ((byte & 0x80) == 0) break;
      shift += 7;
    }
    return value;
  }

  // Returns field number; wire type through the out-param.
  std::uint32_t read_tag(std::uint32_t* wire_type) {
    const std::uint64_t key = read_varint();
    *wire_type = static_cast<std::uint32_t>(key & 0x7);
    return static_cast<std::uint32_t>(key >> 3);
  }

  std::string_view read_bytes() {
    const std::uint64_t len = read_varint();
    if (pos_ + len > buf_.size())
      throw SchemaError("wire format: length-delimited field overruns buffer");
    std::string_view out = buf_.substr(pos_, len);
    pos_ += len;
    return out;
  }

  std::uint32_t read_fixed32() {
    if (pos_ + 4 > buf_.size())
      throw SchemaError("wire format: fixed32 overruns buffer");
    const std::uint32_t v =
        load_u32le(reinterpret_cast<const unsigned char*>(buf_.data() + pos_));
    pos_ += 4;
    return v;
  }

  std::uint64_t read_fixed64() {
    if (pos_ + 8 > buf_.size())
      throw SchemaError("wire format: fixed64 overruns buffer");
    const std::uint64_t v =
        load_u64le(reinterpret_cast<const unsigned char*>(buf_.data() + pos_));
    pos_ += 8;
    return v;
  }

  void skip(std::uint32_t wire_type) {
    switch (wire_type) {
      case 0: read_varint(); break;
      case 1: read_fixed64(); break;
      case 2: read_bytes(); break;
      case 5: read_fixed32(); break;
      default:
        throw SchemaError("wire format: unsupported wire type " +
                          std::to_string(wire_type));
    }
  }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
};

float bits_to_float(std::uint32_t bits) {
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

std::uint32_t float_to_bits(float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  return bits;
}

std::vector<float> parse_float_list(std::string_view buf) {
  std::vector<float> out;
  WireReader r(buf);
  while (!r.done()) {
    std::uint32_t wire;
    const std::uint32_t field = r.read_tag(&wire);
    if (field == 1 && wire == 2) {  // packed
      std::string_view packed = r.read_bytes();
      if (packed.size() % 4 != 0)
        throw SchemaError("float list: packed payload not a multiple of 4");
      for (std::size_t i = 0; i < packed.size(); i += 4)
        out.push_back(bits_to_float(load_u32le(
            reinterpret_cast<const unsigned char*>(packed.data() + i))));
    } else if (field == 1 && wire == 5) {  // unpacked
      out.push_back(bits_to_float(r.read_fixed32()));
    } else {
      r.skip(wire);
    }
  }
  return out;
}

std::vector<std::int64_t> parse_int64_list(std::string_view buf) {
  std::vector<std::int64_t> out;
  WireReader r(buf);
  while (!r.done()) {
    std::uint32_t wire;
    const std::uint32_t field = r.read_tag(&wire);
    if (field == 1 && wire == 2) {  // packed
      WireReader packed(r.read_bytes());
      while (!packed.done())
        out.push_back(static_cast<std::int64_t>(packed.read_varint()));
    } else if (field == 1 && wire == 0) {  // unpacked
      out.push_back(static_cast<std::int64_t>(r.read_varint()));
    } else {
      r.skip(wire);
    }
  }
  return out;
}

std::vector<std::string> parse_bytes_list(std::string_view buf) {
  std::vector<std::string> out;
  WireReader r(buf);
  while (!r.done()) {
    std::uint32_t wire;
    const std::uint32_t field = r.read_tag(&wire);
    if (field == 1 && wire == 2)
      out.emplace_back(r.read_bytes());
    else
      r.skip(wire);
  }
  return out;
}

FeatureValue parse_feature(std::string_view buf) {
  FeatureValue value;
  WireReader r(buf);
  while (!r.done()) {
    std::uint32_t wire;
    const std::uint32_t field = r.read_tag(&wire);
    if (wire != 2) {
      r.skip(wire);
      continue;
    }
    std::string_view inner = r.read_bytes();
    switch (field) {
      case 1:
        value.bytes_values = parse_bytes_list(inner);
        value.kind = FeatureValue::Kind::kBytes;
        break;
      case 2:
        value.float_values = parse_float_list(inner);
        value.kind = FeatureValue::Kind::kFloat;
        break;
      case 3:
        value.int_values = parse_int64_list(inner);
        value.kind = FeatureValue::Kind::kInt;
        break;
      default:
        break;  // unknown member of the oneof
    }
  }
  return value;
}

std::map<std::string, FeatureValue> parse_feature_map(std::string_view example) {
  std::map<std::string, FeatureValue> features;
  WireReader r(example);
  while (!r.done()) {
    std::uint32_t wire;
    const std::uint32_t field = r.read_tag(&wire);
    if (field != 1 || wire != 2) {
      r.skip(wire);
      continue;
    }
    WireReader features_reader(r.read_bytes());
    while (!features_reader.done()) {
      std::uint32_t fwire;
      const std::uint32_t ffield = features_reader.read_tag(&fwire);
      if (ffield != 1 || fwire != 2) {
        features_reader.skip(fwire);
        continue;
      }
      WireReader entry(features_reader.read_bytes());
      std::string key;
      FeatureValue value;
      while (!entry.done()) {
        std::uint32_t ewire;
        const std::uint32_t efield = entry.read_tag(&ewire);
        if (efield == 1 && ewire == 2)
          key = std::string(entry.read_bytes());
        else if (efield == 2 && ewire == 2)
          value = parse_feature(entry.read_bytes());
        else
          entry.skip(ewire);
      }
      features[key] = std::move(value);
    }
  }
  return features;
}

class WireWriter {
 public:
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      buf_.push_back(static_cast<char>((v & 0x7f) | 0x80));
      v >>= 7;
    }
    buf_.push_back(static_cast<char>(v));
  }

  void tag(std::uint32_t field, std::uint32_t wire_type) {
    varint((static_cast<std::uint64_t>(field) << 3) | wire_type);
  }

  void bytes(std::uint32_t field, std::string_view data) {
    tag(field, 2);
    varint(data.size());
    buf_.append(data);
  }

  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

std::string encode_feature_bytes(const std::string& value) {
  WireWriter list;
  list.bytes(1, value);
  WireWriter feature;
  feature.bytes(1, list.str());
  return feature.str();
}

std::string encode_feature_int64(const std::vector<std::int64_t>& values) {
  WireWriter packed;
  for (std::int64_t v : values) packed.varint(static_cast<std::uint64_t>(v));
  WireWriter list;
  list.bytes(1, packed.str());
  WireWriter feature;
  feature.bytes(3, list.str());
  return feature.str();
}

std::string encode_feature_float(const std::vector<float>& values) {
  std::string raw(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i)
    store_u32le(float_to_bits(values[i]), raw.data() + 4 * i);
  WireWriter list;
  list.bytes(1, raw);
  WireWriter feature;
  feature.bytes(2, list.str());
  return feature.str();
}

std::string encode_entry(const std::string& key, const std::string& feature) {
  WireWriter entry;
  entry.bytes(1, key);
  entry.bytes(2, feature);
  WireWriter wrapped;
  wrapped.bytes(1, entry.str());
  return wrapped.str();
}

}  // namespace

VideoExample parse_example(std::string_view bytes, const ExampleSchema& schema) {
  const auto features = parse_feature_map(bytes);
  VideoExample example;

  const FeatureValue* id_value = nullptr;
  for (const auto& key : schema.id_keys) {
    auto it = features.find(key);
    if (it != features.end() &&
        it->second.kind == FeatureValue::Kind::kBytes &&
        !it->second.bytes_values.empty()) {
      id_value = &it->second;
      break;
    }
  }
  if (!id_value) {
    std::string names;
    for (const auto& key : schema.id_keys)
      names += (names.empty() ? "" : "/") + key;
    throw SchemaError("example missing key: " + names);
  }
  example.id = id_value->bytes_values.front();

  auto labels_it = features.find(schema.labels_key);
  if (labels_it == features.end() ||
      labels_it->second.kind != FeatureValue::Kind::kInt)
    throw SchemaError("example missing key: " + schema.labels_key);
  for (std::int64_t v : labels_it->second.int_values)
    example.labels.push_back(static_cast<int>(v));
  std::sort(example.labels.begin(), example.labels.end());
  example.labels.erase(std::unique(example.labels.begin(), example.labels.end()),
                       example.labels.end());

  auto read_floats = [&](const std::string& key, std::size_t dim,
                         std::vector<float>* out) {
    auto it = features.find(key);
    if (it == features.end() || it->second.kind != FeatureValue::Kind::kFloat) {
      if (dim == 0) return;  // optional when the schema expects nothing
      throw SchemaError("example missing key: " + key);
    }
    if (it->second.float_values.size() != dim)
      throw SchemaError("example key " + key + " has length " +
                        std::to_string(it->second.float_values.size()) +
                        ", expected " + std::to_string(dim));
    *out = it->second.float_values;
  };
  read_floats(schema.rgb_key, schema.rgb_dim, &example.rgb);
  read_floats(schema.audio_key, schema.audio_dim, &example.audio);
  return example;
}

std::string serialize_example(const VideoExample& example,
                              const ExampleSchema& schema) {
  std::vector<std::int64_t> labels(example.labels.begin(), example.labels.end());

  std::string body;
  body += encode_entry(schema.id_keys.front(), encode_feature_bytes(example.id));
  body += encode_entry(schema.labels_key, encode_feature_int64(labels));
  body += encode_entry(schema.audio_key, encode_feature_float(example.audio));
  body += encode_entry(schema.rgb_key, encode_feature_float(example.rgb));

  WireWriter out;
  out.bytes(1, body);
  return out.str();
}

Dataset load_dataset(const std::vector<std::string>& paths,
                     const ExampleSchema& schema) {
  Dataset dataset;
  for (const auto& path : paths)
    for (const auto& record : read_record_file(path))
      dataset.push_back(parse_example(record, schema));
  return dataset;
}

void save_dataset(const std::string& path, const Dataset& dataset,
                  const ExampleSchema& schema) {
  std::vector<std::string> payloads;
  payloads.reserve(dataset.size());
  for (const auto& example : dataset)
    payloads.push_back(serialize_example(example, schema));
  write_record_file(path, payloads);
}

}  // namespace vtag
