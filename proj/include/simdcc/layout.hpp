#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "simdcc/types.hpp"

namespace simdcc {

enum class Space { CP, NP };
const char* space_name(Space s);

struct MemoryConfig {
  std::int64_t cp_words = 65536;
  std::int64_t np_words = 65536;  // per node
};

/// Words a value of type `t` occupies in each space. Record pointers are
/// two-word CP handles (cp_offset, np_offset).
std::int64_t cp_words_of(const TypeDesc* t);
std::int64_t np_words_of(const TypeDesc* t);

/// Where a field lives inside its record. A nested record field may have a
/// part in each space.
struct FieldSlot {
  const FieldInfo* field = nullptr;
  std::int64_t cp_offset = 0;
  std::int64_t np_offset = 0;
  std::int64_t cp_size = 0;
  std::int64_t np_size = 0;
};

struct StructLayout {
  const RecordInfo* record = nullptr;
  std::vector<FieldSlot> cp_part;  // fields with CP words, base fields first
  std::vector<FieldSlot> np_part;
  std::int64_t cp_size = 0;
  std::int64_t np_size = 0;
  std::map<const FieldInfo*, FieldSlot> by_field;

  const FieldSlot& slot(const FieldInfo* f) const;
};

StructLayout split_record(const RecordInfo& record);

/// An entity's footprint: the CP part at cp_offset and the NP part at
/// np_offset. Offsets are absolute for globals, frame-relative otherwise.
struct Placement {
  std::int64_t cp_offset = 0;
  std::int64_t np_offset = 0;
  std::int64_t cp_size = 0;
  std::int64_t np_size = 0;
};

struct FrameLayout {
  std::int64_t cp_size = 0;
  std::int64_t np_size = 0;
  std::map<const Symbol*, Placement> slots;
};

struct LayoutEntry {
  std::string name;
  Space space = Space::CP;
  std::int64_t offset = 0;
  std::int64_t size = 0;
};

struct LayoutPlan {
  std::int64_t cp_static_size = 0;
  std::int64_t np_static_size = 0;
  std::map<const Symbol*, Placement> globals;
  std::map<const RecordInfo*, StructLayout> records;
  std::map<const FunctionInfo*, FrameLayout> frames;
  std::vector<LayoutEntry> entries;  // stable dump order

  const StructLayout& record(const RecordInfo* r) const;
  const Placement& global(const Symbol* s) const;
  const FrameLayout& frame(const FunctionInfo* f) const;
};

/// Throws CapacityError when a static segment does not fit the memory.
LayoutPlan compute_layout(const TypedProgram& program, const MemoryConfig& memory = {});

/// `name space offset size`, one entity per line and space.
std::string format_layout(const LayoutPlan& plan);

}  // namespace simdcc
