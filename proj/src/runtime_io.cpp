#include "simdcc/runtime_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace simdcc {

std::size_t elem_bytes(ElemKind k) { return static_cast<std::size_t>(elem_words(k)) * 4; }

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

}  // namespace

std::vector<std::uint32_t> DistFile::node_words(std::uint32_t n) const {
  const std::size_t bytes = node_bytes();
  std::vector<std::uint32_t> words(bytes / 4);
  const std::uint8_t* base = payload.data() + n * bytes;
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = get_u32(base + 4 * i);
  return words;
}

void DistFile::set_node_words(std::uint32_t n, const std::vector<std::uint32_t>& words) {
  const std::size_t bytes = node_bytes();
  if (words.size() * 4 != bytes) throw ShapeError("node slice has the wrong length");
  std::uint8_t* base = payload.data() + n * bytes;
  for (std::size_t i = 0; i < words.size(); ++i)
    for (int b = 0; b < 4; ++b) base[4 * i + b] = static_cast<std::uint8_t>(words[i] >> (8 * b));
}

DistFile DistFile::make(ElemKind kind, std::uint32_t nodes, std::uint32_t elems_per_node) {
  DistFile f;
  f.kind = kind;
  f.num_nodes = nodes;
  f.elems_per_node = elems_per_node;
  f.payload.assign(static_cast<std::size_t>(nodes) * f.node_bytes(), 0);
  return f;
}

std::vector<std::uint8_t> encode_dist_file(const DistFile& f) {
  std::vector<std::uint8_t> out = {'S', 'D', 'A', 'T'};
  put_u32(out, kDistVersion);
  put_u32(out, f.num_nodes);
  put_u32(out, f.elems_per_node);
  out.push_back(static_cast<std::uint8_t>(f.kind));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

DistFile decode_dist_file(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kDistHeaderBytes)
    throw IoError("data file is truncated: " + std::to_string(bytes.size()) + " bytes, header needs " +
                  std::to_string(kDistHeaderBytes));
  if (std::memcmp(bytes.data(), "SDAT", 4) != 0) throw IoError("not a data file: bad magic");
  std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kDistVersion) throw IoError("unsupported data file version " + std::to_string(version));
  DistFile f;
  f.num_nodes = get_u32(bytes.data() + 8);
  f.elems_per_node = get_u32(bytes.data() + 12);
  std::uint8_t code = bytes[16];
  if (code < 1 || code > 5) throw IoError("unknown element kind code " + std::to_string(code));
  f.kind = static_cast<ElemKind>(code);
  const std::uint64_t want = static_cast<std::uint64_t>(f.num_nodes) * f.elems_per_node * elem_bytes(f.kind);
  const std::uint64_t have = bytes.size() - kDistHeaderBytes;
  if (have != want)
    throw IoError("data file payload is " + std::to_string(have) + " bytes but the header describes " +
                  std::to_string(want));
  f.payload.assign(bytes.begin() + kDistHeaderBytes, bytes.end());
  return f;
}

void check_dist_shape(const DistFile& f, std::optional<ElemKind> kind, std::optional<std::uint32_t> nodes) {
  if (kind && f.kind != *kind)
    throw ShapeError(std::string("data file holds ") + elem_kind_name(f.kind) + " elements, expected " +
                     elem_kind_name(*kind));
  if (nodes && f.num_nodes != *nodes)
    throw ShapeError("data file is sliced for " + std::to_string(f.num_nodes) + " node(s) but the machine has " +
                     std::to_string(*nodes));
}

DistFile read_dist_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_dist_file(bytes);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_dist_file(const std::string& path, const DistFile& f) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write data file '" + path + "'");
  auto bytes = encode_dist_file(f);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

struct Blocking {
  std::vector<std::int64_t> topo;   // padded to the block rank
  std::vector<std::int64_t> block;
  std::vector<std::int64_t> global;
  std::int64_t block_elems = 1;
  std::int64_t global_elems = 1;
};

Blocking blocking(const Topology& t, const std::vector<std::int64_t>& block) {
  if (block.empty()) throw ShapeError("block shape is empty");
  if (static_cast<int>(block.size()) < t.rank())
    throw ShapeError("block rank " + std::to_string(block.size()) + " is below the topology rank " +
                     std::to_string(t.rank()));
  Blocking b;
  b.topo = t.dims();
  b.topo.resize(block.size(), 1);
  b.block = block;
  for (size_t i = 0; i < block.size(); ++i) {
    if (block[i] < 1) throw ShapeError("block extents must be positive");
    b.global.push_back(b.topo[i] * block[i]);
    b.block_elems *= block[i];
    b.global_elems *= b.global[i];
  }
  return b;
}

// Calls fn(node, local_index, global_index) for every element.
template <class Fn>
void for_each_element(const Blocking& b, Fn fn) {
  const size_t r = b.block.size();
  std::vector<std::int64_t> g(r, 0);
  for (std::int64_t flat = 0; flat < b.global_elems; ++flat) {
    std::int64_t rem = flat;
    for (size_t a = r; a-- > 0;) {
      g[a] = rem % b.global[a];
      rem /= b.global[a];
    }
    std::int64_t node = 0;
    std::int64_t local = 0;
    for (size_t a = 0; a < r; ++a) {
      node = node * b.topo[a] + g[a] / b.block[a];
      local = local * b.block[a] + g[a] % b.block[a];
    }
    fn(node, local, flat);
  }
}

}  // namespace

DistFile slice_array(const DistFile& flat, const Topology& topology, const std::vector<std::int64_t>& block) {
  Blocking b = blocking(topology, block);
  if (flat.num_nodes != 1) throw ShapeError("slice expects an unsliced (single-node) file");
  if (flat.elems_per_node != static_cast<std::uint64_t>(b.global_elems))
    throw ShapeError("file holds " + std::to_string(flat.elems_per_node) + " elements but topology " +
                     topology.to_string() + " with that block needs " + std::to_string(b.global_elems));
  DistFile out = DistFile::make(flat.kind, static_cast<std::uint32_t>(topology.nodes()),
                                static_cast<std::uint32_t>(b.block_elems));
  const std::size_t eb = elem_bytes(flat.kind);
  for_each_element(b, [&](std::int64_t node, std::int64_t local, std::int64_t global) {
    std::memcpy(out.payload.data() + (node * b.block_elems + local) * eb, flat.payload.data() + global * eb, eb);
  });
  return out;
}

DistFile unslice_array(const DistFile& sliced, const Topology& topology, const std::vector<std::int64_t>& block) {
  Blocking b = blocking(topology, block);
  check_dist_shape(sliced, std::nullopt, static_cast<std::uint32_t>(topology.nodes()));
  if (sliced.elems_per_node != static_cast<std::uint64_t>(b.block_elems))
    throw ShapeError("file holds " + std::to_string(sliced.elems_per_node) + " elements per node, block needs " +
                     std::to_string(b.block_elems));
  DistFile out = DistFile::make(sliced.kind, 1, static_cast<std::uint32_t>(b.global_elems));
  const std::size_t eb = elem_bytes(sliced.kind);
  for_each_element(b, [&](std::int64_t node, std::int64_t local, std::int64_t global) {
    std::memcpy(out.payload.data() + global * eb, sliced.payload.data() + (node * b.block_elems + local) * eb, eb);
  });
  return out;
}

}  // namespace simdcc
