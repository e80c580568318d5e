#include "tma/memsys.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace tma {

MemSys::MemSys(size_t capacity_bytes) : capacity_(capacity_bytes), mem_(capacity_bytes, 0) {}

void MemSys::define_region(const std::string& name, size_t bytes) {
  if (regions_.count(name)) throw std::invalid_argument("region already defined: " + name);
  if (used_ + bytes > capacity_)
    throw std::length_error("region '" + name + "' (" + std::to_string(bytes) +
                            " B) exceeds SRAM capacity " + std::to_string(capacity_) + " B");
  regions_[name] = Region{used_, bytes};
  used_ += bytes;
}

bool MemSys::has_region(const std::string& name) const { return regions_.count(name) != 0; }

size_t MemSys::region_size(const std::string& name) const { return region(name).size; }

const MemSys::Region& MemSys::region(const std::string& name) const {
  auto it = regions_.find(name);
  if (it == regions_.end()) throw std::out_of_range("no such region: " + name);
  return it->second;
}

void MemSys::write_u8(const std::string& name, size_t offset, std::span<const uint8_t> values) {
  const Region& r = region(name);
  if (offset + values.size() > r.size) throw std::out_of_range("write past region " + name);
  std::memcpy(mem_.data() + r.offset + offset, values.data(), values.size());
  auto& st = counters_.regions[name];
  st.writes += values.size();
  st.write_bytes += values.size();
}

void MemSys::read_u8(const std::string& name, size_t offset, size_t count, uint8_t* out) {
  const Region& r = region(name);
  if (offset + count > r.size) throw std::out_of_range("read past region " + name);
  std::memcpy(out, mem_.data() + r.offset + offset, count);
  auto& st = counters_.regions[name];
  st.reads += count;
  st.read_bytes += count;
}

void MemSys::write_i32(const std::string& name, size_t index, int32_t value) {
  const Region& r = region(name);
  if ((index + 1) * 4 > r.size) throw std::out_of_range("write past region " + name);
  std::memcpy(mem_.data() + r.offset + index * 4, &value, 4);
  auto& st = counters_.regions[name];
  st.writes += 1;
  st.write_bytes += 4;
}

int32_t MemSys::read_i32(const std::string& name, size_t index) {
  const Region& r = region(name);
  if ((index + 1) * 4 > r.size) throw std::out_of_range("read past region " + name);
  int32_t v;
  std::memcpy(&v, mem_.data() + r.offset + index * 4, 4);
  auto& st = counters_.regions[name];
  st.reads += 1;
  st.read_bytes += 4;
  return v;
}

void MemSys::count_read(const std::string& name, uint64_t elems, uint64_t bytes) {
  region(name);
  auto& st = counters_.regions[name];
  st.reads += elems;
  st.read_bytes += bytes;
}

void MemSys::count_write(const std::string& name, uint64_t elems, uint64_t bytes) {
  region(name);
  auto& st = counters_.regions[name];
  st.writes += elems;
  st.write_bytes += bytes;
}

void MemSys::load_from_dram_u8(const std::string& name, size_t offset,
                               std::span<const uint8_t> values) {
  counters_.dram_in_bytes += values.size();
  write_u8(name, offset, values);
}

void MemSys::load_from_dram_i32(const std::string& name, size_t offset,
                                std::span<const int32_t> values) {
  counters_.dram_in_bytes += values.size() * 4;
  for (size_t i = 0; i < values.size(); ++i) write_i32(name, offset + i, values[i]);
}

void MemSys::count_dram_in(uint64_t bytes) { counters_.dram_in_bytes += bytes; }

void MemSys::count_dram_out(uint64_t bytes) { counters_.dram_out_bytes += bytes; }

void MemSys::count_fifo_feedback(uint64_t elems) { counters_.fifo_feedback_elems += elems; }

size_t MemSys::psum_index(int f, int y, int x) const {
  const auto& b = *layer_;
  if (f < 0 || f >= b.k || y < 0 || y >= b.h || x < 0 || x >= b.w)
    throw std::out_of_range("psum coordinate out of range");
  return (size_t(f) * size_t(b.h) + size_t(y)) * size_t(b.w) + size_t(x);
}

void MemSys::begin_layer(const LayerBinding& b) {
  region(b.psum_region);
  region(b.out_region);
  layer_ = b;
  size_t n = size_t(b.k) * size_t(b.h) * size_t(b.w);
  if (region_size(b.psum_region) < n * 4)
    throw std::length_error("psum region too small for layer outputs");
  psum_written_.assign(n, 0);
  post_plane_.assign(n, 0);
  final_seen_.assign(n, 0);
}

void MemSys::store_psum(int f, int y, int x, int64_t v) {
  if (!layer_) throw std::logic_error("no active layer");
  size_t i = psum_index(f, y, x);
  if (v > INT32_MAX || v < INT32_MIN)
    throw std::overflow_error("psum value outside 32-bit storage");
  write_i32(layer_->psum_region, i, int32_t(v));
  psum_written_[i] = 1;
  counters_.psum_stores += 1;
}

int64_t MemSys::load_psum(int f, int y, int x) {
  if (!layer_) throw std::logic_error("no active layer");
  size_t i = psum_index(f, y, x);
  if (!psum_written_[i])
    throw std::logic_error("load of never-stored psum at f=" + std::to_string(f) + " y=" +
                           std::to_string(y) + " x=" + std::to_string(x));
  counters_.psum_loads += 1;
  return read_i32(layer_->psum_region, i);
}

void MemSys::store_final(int f, int y, int x, int64_t v) {
  if (!layer_) throw std::logic_error("no active layer");
  size_t i = psum_index(f, y, x);
  counters_.psum_stores += 1;  // final sums are still delivered to SRAM
  post_plane_[i] = requantize(v, layer_->post.requant_shift);
  final_seen_[i] = 1;
}

TensorU8 MemSys::finish_layer() {
  if (!layer_) throw std::logic_error("no active layer");
  const auto& b = *layer_;
  for (uint8_t seen : final_seen_)
    if (!seen) throw std::logic_error("layer finished with missing final sums");

  // post_plane_ holds the requantized activations in (f, y, x) order; emit
  // them as {h, w, k} (or {k} for vector outputs) and pool if configured.
  TensorU8 acts;
  if (b.h == 1 && b.w == 1) {
    acts.dims = {uint32_t(b.k)};
    acts.data.assign(post_plane_.begin(), post_plane_.end());
  } else {
    acts = TensorU8({uint32_t(b.h), uint32_t(b.w), uint32_t(b.k)});
    for (int f = 0; f < b.k; ++f)
      for (int y = 0; y < b.h; ++y)
        for (int x = 0; x < b.w; ++x)
          acts[acts.idx3(size_t(y), size_t(x), size_t(f))] = post_plane_[psum_index(f, y, x)];
    if (b.post.pool_k) {
      const int ph = (b.h - b.post.pool_k) / b.post.pool_s + 1;
      const int pw = (b.w - b.post.pool_k) / b.post.pool_s + 1;
      TensorU8 pooled({uint32_t(ph), uint32_t(pw), uint32_t(b.k)});
      for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
          for (int f = 0; f < b.k; ++f) {
            uint8_t m = 0;
            for (int dy = 0; dy < b.post.pool_k; ++dy)
              for (int dx = 0; dx < b.post.pool_k; ++dx)
                m = std::max(m, acts[acts.idx3(size_t(y * b.post.pool_s + dy),
                                               size_t(x * b.post.pool_s + dx), size_t(f))]);
            pooled[pooled.idx3(size_t(y), size_t(x), size_t(f))] = m;
          }
      acts = std::move(pooled);
    }
  }

  if (region_size(b.out_region) < acts.size())
    throw std::length_error("out region too small for layer activations");
  write_u8(b.out_region, 0, acts.data);
  layer_.reset();
  return acts;
}

uint8_t requantize(int64_t sum, int shift) {
  int64_t v = sum >> shift;  // arithmetic shift; negative stays negative
  if (v < 0) return 0;       // ReLU
  if (v > 255) return 255;
  return uint8_t(v);
}

TensorU8 apply_post_ops(const TensorI32& sums, const PostOps& post) {
  TensorU8 acts(sums.dims);
  for (size_t i = 0; i < sums.size(); ++i) acts[i] = requantize(sums[i], post.requant_shift);
  if (!post.pool_k || sums.dims.size() != 3) return acts;

  const int h = int(sums.dims[0]), w = int(sums.dims[1]), k = int(sums.dims[2]);
  const int ph = (h - post.pool_k) / post.pool_s + 1;
  const int pw = (w - post.pool_k) / post.pool_s + 1;
  TensorU8 pooled({uint32_t(ph), uint32_t(pw), uint32_t(k)});
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x)
      for (int f = 0; f < k; ++f) {
        uint8_t m = 0;
        for (int dy = 0; dy < post.pool_k; ++dy)
          for (int dx = 0; dx < post.pool_k; ++dx)
            m = std::max(m, acts[acts.idx3(size_t(y * post.pool_s + dy),
                                           size_t(x * post.pool_s + dx), size_t(f))]);
        pooled[pooled.idx3(size_t(y), size_t(x), size_t(f))] = m;
      }
  return pooled;
}

}  // namespace tma
