#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tma/layer.hpp"
#include "tma/tensor.hpp"

namespace tma {

inline constexpr size_t kSramBytes = 4u << 20;        // 4 MiB on-chip SRAM
inline constexpr size_t kFifoCapacity = 224;          // entries per FIFO queue

struct RegionStats {
  uint64_t reads = 0, writes = 0;          // element counts
  uint64_t read_bytes = 0, write_bytes = 0;
  bool operator==(const RegionStats&) const = default;
};

struct AccessCounters {
  std::map<std::string, RegionStats> regions;
  uint64_t psum_stores = 0;   // Psums delivered to SRAM (every emitted output)
  uint64_t psum_loads = 0;    // Psums reloaded for a further depth tile
  uint64_t dram_in_bytes = 0;
  uint64_t dram_out_bytes = 0;
  uint64_t fifo_feedback_elems = 0;  // values fed back for vertical reuse
};

// SRAM with named, disjoint, byte-backed regions plus the Psum staging and
// post-op path of one active layer. DRAM appears only as ingress/egress
// byte counters.
class MemSys {
 public:
  explicit MemSys(size_t capacity_bytes = kSramBytes);

  // Sequential region allocation; throws once the total exceeds capacity.
  void define_region(const std::string& name, size_t bytes);
  bool has_region(const std::string& name) const;
  size_t region_size(const std::string& name) const;
  size_t capacity() const { return capacity_; }

  // Element I/O with access counting.
  void write_u8(const std::string& region, size_t offset, std::span<const uint8_t> values);
  void read_u8(const std::string& region, size_t offset, size_t count, uint8_t* out);
  void write_i32(const std::string& region, size_t index, int32_t value);
  int32_t read_i32(const std::string& region, size_t index);

  // Counter-only access for modeled transfers whose payload is implicit
  // (e.g. the decomposition block re-reading a staged weight tile).
  void count_read(const std::string& region, uint64_t elems, uint64_t bytes);
  void count_write(const std::string& region, uint64_t elems, uint64_t bytes);

  // DRAM -> SRAM ingress: counts dram_in plus a region write.
  void load_from_dram_u8(const std::string& region, size_t offset, std::span<const uint8_t> values);
  void load_from_dram_i32(const std::string& region, size_t offset, std::span<const int32_t> values);
  void count_dram_in(uint64_t bytes);
  void count_dram_out(uint64_t bytes);
  void count_fifo_feedback(uint64_t elems);

  // --- Psum staging and post-ops for the active layer ---
  struct LayerBinding {
    std::string psum_region;
    std::string out_region;
    int k = 0, h = 0, w = 0;  // pre-pool output dims
    PostOps post;
  };
  void begin_layer(const LayerBinding& b);
  void store_psum(int f, int y, int x, int64_t v);   // non-final depth tile
  int64_t load_psum(int f, int y, int x);            // throws if never stored
  void store_final(int f, int y, int x, int64_t v);  // through post-ops
  // Completes pooling, writes the activations to the out region and
  // returns them ({h_final, w_final, k}, or {k} when h = w = 1).
  TensorU8 finish_layer();

  const AccessCounters& counters() const { return counters_; }

 private:
  struct Region {
    size_t offset = 0;
    size_t size = 0;
  };
  const Region& region(const std::string& name) const;
  size_t psum_index(int f, int y, int x) const;

  size_t capacity_;
  size_t used_ = 0;
  std::map<std::string, Region> regions_;
  std::vector<uint8_t> mem_;
  AccessCounters counters_;

  std::optional<LayerBinding> layer_;
  std::vector<uint8_t> psum_written_;
  std::vector<uint8_t> post_plane_;  // post-op line buffer (not SRAM-counted)
  std::vector<uint8_t> final_seen_;
};

// ReLU + right-shift requantization clamp to [0, 255], then optional max
// pooling. Free function so tests and the golden path share it.
TensorU8 apply_post_ops(const TensorI32& sums, const PostOps& post);
uint8_t requantize(int64_t sum, int shift);

}  // namespace tma
