#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hyt/num/adam.hpp"
#include "hyt/num/tensor.hpp"

namespace hyt::inline HYT_PREC::num {

struct StoredTensor {
  std::string name;
  Shape shape;
  std::vector<Real> values;
};

/// Named tensors, a free-form string header and optional Adam state.
///
/// Binary layout, all integers little-endian:
///   "HYTCKPT\0"  u32 version  u32 real_bytes (4|8)
///   u32 header_count, then per entry: str key, str value      (str = u32 len + bytes)
///   u32 tensor_count, then per tensor: str name, u32 rank, u64 dims[rank], reals
///   u8 has_optimizer; if set: u64 step, then m reals and v reals per tensor
/// Reals are IEEE-754 of width real_bytes; loading converts to the build's Real.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::map<std::string, std::string> header;
  std::vector<StoredTensor> tensors;
  bool has_optimizer = false;
  std::uint64_t optimizer_step = 0;
  std::vector<AdamMoments> moments;  // parallel to tensors when has_optimizer

  /// Throws std::out_of_range if absent.
  const std::string& at(const std::string& key) const;
  const StoredTensor* find(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);
/// Throws std::runtime_error on a bad magic, unknown version or truncation.
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace hyt::inline HYT_PREC::num
