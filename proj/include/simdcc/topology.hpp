#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace simdcc {

/// `AxBxC` -> {A, B, C}. Throws ConfigError unless every extent is a
/// positive integer.
std::vector<std::int64_t> parse_dims(std::string_view text, std::string_view what = "topology");

/// N-dimensional torus. Node ids are row-major over the coordinates, axis 0
/// most significant.
class Topology {
 public:
  Topology() : dims_{1} {}
  explicit Topology(std::vector<std::int64_t> dims);
  static Topology parse(std::string_view text) { return Topology(parse_dims(text)); }

  const std::vector<std::int64_t>& dims() const { return dims_; }
  int rank() const { return static_cast<int>(dims_.size()); }
  std::int64_t nodes() const { return nodes_; }

  std::vector<std::int64_t> coords(std::int64_t node) const;
  std::int64_t node_at(const std::vector<std::int64_t>& coords) const;
  /// Toroidal wrap: coordinate `axis` moves by `sign` modulo its extent.
  std::int64_t neighbor(std::int64_t node, int axis, int sign) const;
  std::string to_string() const;

 private:
  std::vector<std::int64_t> dims_;
  std::int64_t nodes_ = 1;
};

}  // namespace simdcc
