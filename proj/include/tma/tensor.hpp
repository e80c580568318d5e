#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tma {

// Dense row-major integer tensor, rank <= 4.
template <typename T>
struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<uint32_t> d) : dims(std::move(d)) {
    data.assign(count(dims), T(0));
  }

  static size_t count(const std::vector<uint32_t>& d) {
    size_t n = 1;
    for (uint32_t x : d) n *= x;
    return n;
  }

  size_t size() const { return data.size(); }

  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  // 3-d index (a, b, c) into dims {A, B, C}
  size_t idx3(size_t a, size_t b, size_t c) const {
    return (a * dims[1] + b) * dims[2] + c;
  }
  // 4-d index (a, b, c, d) into dims {A, B, C, D}
  size_t idx4(size_t a, size_t b, size_t c, size_t d) const {
    return ((a * dims[1] + b) * dims[2] + c) * dims[3] + d;
  }

  bool operator==(const Tensor&) const = default;
};

using TensorU8 = Tensor<uint8_t>;
using TensorI32 = Tensor<int32_t>;

// Flat binary tensor file: magic "TMAT", dtype byte (0 = u8, 1 = i32),
// rank byte, rank u32 little-endian dims, then the row-major payload
// little-endian.
enum class Dtype : uint8_t { u8 = 0, i32 = 1 };

struct AnyTensor {
  Dtype dtype = Dtype::u8;
  TensorU8 u8;
  TensorI32 i32;

  const std::vector<uint32_t>& dims() const { return dtype == Dtype::u8 ? u8.dims : i32.dims; }
};

void write_tmat(const std::string& path, const TensorU8& t);
void write_tmat(const std::string& path, const TensorI32& t);
AnyTensor read_tmat(const std::string& path);

}  // namespace tma
