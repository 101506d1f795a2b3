#include "simdcc/topology.hpp"

#include <charconv>

#include "simdcc/diagnostics.hpp"

namespace simdcc {

std::vector<std::int64_t> parse_dims(std::string_view text, std::string_view what) {
  std::vector<std::int64_t> dims;
  auto bad = [&] {
    return ConfigError("invalid " + std::string(what) + " '" + std::string(text) +
                       "': expected positive extents like 4 or 2x2 or 2x2x2");
  };
  size_t pos = 0;
  while (true) {
    size_t x = text.find_first_of("xX", pos);
    std::string_view part = text.substr(pos, x == std::string_view::npos ? std::string_view::npos : x - pos);
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || end != part.data() + part.size() || v < 1) throw bad();
    dims.push_back(v);
    if (x == std::string_view::npos) break;
    pos = x + 1;
  }
  return dims;
}

Topology::Topology(std::vector<std::int64_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ConfigError("topology needs at least one dimension");
  nodes_ = 1;
  for (std::int64_t d : dims_) {
    if (d < 1) throw ConfigError("topology extents must be positive");
    nodes_ *= d;
    if (nodes_ > (1 << 20)) throw ConfigError("topology has too many nodes");
  }
}

std::vector<std::int64_t> Topology::coords(std::int64_t node) const {
  std::vector<std::int64_t> c(dims_.size());
  for (int a = rank() - 1; a >= 0; --a) {
    c[a] = node % dims_[a];
    node /= dims_[a];
  }
  return c;
}

std::int64_t Topology::node_at(const std::vector<std::int64_t>& c) const {
  std::int64_t id = 0;
  for (int a = 0; a < rank(); ++a) id = id * dims_[a] + c[a];
  return id;
}

std::int64_t Topology::neighbor(std::int64_t node, int axis, int sign) const {
  auto c = coords(node);
  const std::int64_t d = dims_[axis];
  c[axis] = ((c[axis] + sign) % d + d) % d;
  return node_at(c);
}

std::string Topology::to_string() const {
  std::string s;
  for (size_t i = 0; i < dims_.size(); ++i) s += (i ? "x" : "") + std::to_string(dims_[i]);
  return s;
}

}  // namespace simdcc
