#include "mmgl/numerics/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>

#include "mmgl/error.hpp"

namespace mmgl {
namespace {

constexpr std::string_view kMagic = "EMB1";
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_emb1(const Tensor& t) {
  if (t.rows() > std::numeric_limits<std::uint32_t>::max() ||
      t.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::InvalidArgument, "tensor too large for EMB1: " + t.shape_string());
  }
  std::string out;
  out.reserve(kHeaderBytes + 4 * t.size());
  out.append(kMagic);
  put_u32(out, static_cast<std::uint32_t>(t.rows()));
  put_u32(out, static_cast<std::uint32_t>(t.cols()));
  for (float v : t.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor decode_emb1(std::string_view bytes, const std::string& origin) {
  if (bytes.size() < kHeaderBytes) {
    throw Error(Errc::TruncatedFile, origin + ": header needs 12 bytes, found " +
                                         std::to_string(bytes.size()));
  }
  if (bytes.substr(0, 4) != kMagic) throw Error(Errc::MalformedFile, origin + ": bad magic, expected EMB1");
  const std::uint64_t rows = get_u32(bytes, 4);
  const std::uint64_t cols = get_u32(bytes, 8);
  const std::uint64_t expected = rows * cols * 4;
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (payload < expected) {
    throw Error(Errc::TruncatedFile, origin + ": " + std::to_string(rows) + "x" + std::to_string(cols) +
                                         " needs " + std::to_string(expected) +
                                         " payload bytes, found " + std::to_string(payload));
  }
  if (payload > expected) {
    throw Error(Errc::MalformedFile, origin + ": " + std::to_string(payload - expected) +
                                         " trailing bytes after " + std::to_string(rows) + "x" +
                                         std::to_string(cols) + " payload");
  }
  std::vector<float> values(rows * cols);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
  return Tensor(rows, cols, std::move(values));
}

void write_emb1(const std::filesystem::path& path, const Tensor& t) {
  const std::string bytes = encode_emb1(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path.string());
}

Tensor read_emb1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_emb1(bytes, path.string());
}

}  // namespace mmgl
