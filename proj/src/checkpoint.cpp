#include "vtag/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "vtag/errors.hpp"

namespace vtag {

namespace {

constexpr char kMagic[8] = {'V', 'T', 'A', 'G', 'C', 'K', 'P', 'T'};

void write_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (in.gcount() != 4) throw CheckpointError("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (in.gcount() != 8) throw CheckpointError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  write_u64(out, bits);
}

double read_f64(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double d;
  std::memcpy(&d, &bits, sizeof(d));
  return d;
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const std::uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (static_cast<std::uint32_t>(in.gcount()) != len)
    throw CheckpointError("checkpoint truncated in string field");
  return s;
}

CheckpointMeta read_meta(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError("not a checkpoint file");
  CheckpointMeta meta;
  meta.version = read_u32(in);
  if (meta.version != 1)
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(meta.version));
  meta.iteration = read_u64(in);
  for (auto& word : meta.rng_state) word = read_u64(in);
  meta.manifest = read_string(in);
  return meta;
}

}  // namespace

void save_checkpoint(
    const std::string& path, const CheckpointMeta& meta,
    const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open checkpoint for write: " + path);
  out.write(kMagic, 8);
  write_u32(out, meta.version);
  write_u64(out, meta.iteration);
  for (std::uint64_t word : meta.rng_state) write_u64(out, word);
  write_string(out, meta.manifest);

  write_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, tensor] : tensors) {
    write_string(out, name);
    write_u32(out, static_cast<std::uint32_t>(tensor->rank()));
    for (std::size_t d : tensor->shape()) write_u64(out, d);
    for (std::size_t i = 0; i < tensor->size(); ++i)
      write_f64(out, (*tensor)[i]);
  }
  if (!out) throw CheckpointError("write failed: " + path);
}

CheckpointMeta read_checkpoint_meta(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  return read_meta(in);
}

CheckpointMeta load_checkpoint(
    const std::string& path,
    const std::vector<std::pair<std::string, Tensor*>>& tensors) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  CheckpointMeta meta = read_meta(in);

  const std::uint32_t count = read_u32(in);
  if (count != tensors.size())
    throw CheckpointError("checkpoint holds " + std::to_string(count) +
                          " tensors, expected " + std::to_string(tensors.size()));
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::string name = read_string(in);
    if (name != tensors[k].first)
      throw CheckpointError("checkpoint tensor '" + name + "' where '" +
                            tensors[k].first + "' was expected");
    const std::uint32_t rank = read_u32(in);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(read_u64(in));
    Tensor* dst = tensors[k].second;
    if (shape != dst->shape())
      throw CheckpointError("checkpoint tensor '" + name + "' shape mismatch");
    for (std::size_t i = 0; i < dst->size(); ++i) (*dst)[i] = read_f64(in);
  }
  return meta;
}

}  // namespace vtag
