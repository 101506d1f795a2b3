#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "simdcc/ir.hpp"
#include "simdcc/topology.hpp"

namespace simdcc {

/// Missing, unreadable or corrupt data file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed file that does not fit the machine or the destination.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDistHeaderBytes = 17;
inline constexpr std::uint32_t kDistVersion = 1;

std::size_t elem_bytes(ElemKind k);

/// "SDAT", u32 version, u32 num_nodes, u32 elems_per_node, u8 kind, then
/// node-major little-endian payload.
struct DistFile {
  std::uint32_t num_nodes = 0;
  std::uint32_t elems_per_node = 0;
  ElemKind kind = ElemKind::Float;
  std::vector<std::uint8_t> payload;

  std::size_t node_bytes() const { return elems_per_node * elem_bytes(kind); }
  /// 32-bit words of node `n`, little-endian word order for 8-byte values.
  std::vector<std::uint32_t> node_words(std::uint32_t n) const;
  void set_node_words(std::uint32_t n, const std::vector<std::uint32_t>& words);

  static DistFile make(ElemKind kind, std::uint32_t nodes, std::uint32_t elems_per_node);
};

std::vector<std::uint8_t> encode_dist_file(const DistFile& f);
/// Throws IoError on a bad magic, version, kind code or payload length.
DistFile decode_dist_file(const std::vector<std::uint8_t>& bytes);
/// Throws ShapeError when the file does not match what the caller expects.
void check_dist_shape(const DistFile& f, std::optional<ElemKind> kind, std::optional<std::uint32_t> nodes);

DistFile read_dist_file(const std::string& path);
void write_dist_file(const std::string& path, const DistFile& f);

/// BLOCK distribution of a flat (single-node) row-major array whose global
/// extents are topology[i] * block[i] on each axis. A block of higher rank
/// than the topology treats the missing topology axes as extent 1.
DistFile slice_array(const DistFile& flat, const Topology& topology, const std::vector<std::int64_t>& block);
/// Inverse of slice_array.
DistFile unslice_array(const DistFile& sliced, const Topology& topology, const std::vector<std::int64_t>& block);

}  // namespace simdcc
