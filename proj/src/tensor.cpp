#include "tma/tensor.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tma {

namespace {

constexpr char kMagic[4] = {'T', 'M', 'A', 'T'};

void put_u32(std::ostream& os, uint32_t v) {
  uint8_t b[4] = {uint8_t(v), uint8_t(v >> 8), uint8_t(v >> 16), uint8_t(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  uint8_t b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void write_header(std::ostream& os, Dtype dt, const std::vector<uint32_t>& dims) {
  if (dims.size() > 4) throw std::invalid_argument("tensor rank > 4");
  os.write(kMagic, 4);
  uint8_t meta[2] = {uint8_t(dt), uint8_t(dims.size())};
  os.write(reinterpret_cast<const char*>(meta), 2);
  for (uint32_t d : dims) put_u32(os, d);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_tmat(const std::string& path, const TensorU8& t) {
  auto os = open_out(path);
  write_header(os, Dtype::u8, t.dims);
  os.write(reinterpret_cast<const char*>(t.data.data()), std::streamsize(t.data.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_tmat(const std::string& path, const TensorI32& t) {
  auto os = open_out(path);
  write_header(os, Dtype::i32, t.dims);
  for (int32_t v : t.data) put_u32(os, uint32_t(v));
  if (!os) throw std::runtime_error("write failed: " + path);
}

AnyTensor read_tmat(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a TMAT file: " + path);
  uint8_t meta[2];
  is.read(reinterpret_cast<char*>(meta), 2);
  if (!is || meta[0] > 1 || meta[1] > 4)
    throw std::runtime_error("bad TMAT header: " + path);

  std::vector<uint32_t> dims(meta[1]);
  for (auto& d : dims) d = get_u32(is);
  size_t n = TensorU8::count(dims);

  AnyTensor out;
  out.dtype = Dtype(meta[0]);
  if (out.dtype == Dtype::u8) {
    out.u8.dims = dims;
    out.u8.data.resize(n);
    is.read(reinterpret_cast<char*>(out.u8.data.data()), std::streamsize(n));
  } else {
    out.i32.dims = dims;
    out.i32.data.resize(n);
    for (auto& v : out.i32.data) v = int32_t(get_u32(is));
  }
  if (!is) throw std::runtime_error("truncated TMAT payload: " + path);
  return out;
}

}  // namespace tma
