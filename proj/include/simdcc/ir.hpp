#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simdcc/layout.hpp"

namespace simdcc {

enum class Stream : std::uint8_t { CP, NP };

/// NP element kinds. The numeric codes are also the DistFile kind codes.
enum class ElemKind : std::uint8_t { Float = 1, Double = 2, LocalInt = 3, Vector = 4, Complex = 5 };

int elem_words(ElemKind k);
const char* elem_kind_name(ElemKind k);
std::optional<ElemKind> elem_kind_from_name(std::string_view name);
std::optional<ElemKind> elem_kind_of(const TypeDesc* t);

// name, mnemonic
#define SIMDCC_OPCODES(X)                                                                   \
  X(Push, "PUSH") X(Pop, "POP") X(Dup, "DUP") X(Pick, "PICK") X(Swap, "SWAP")               \
  X(Load, "LOAD") X(Store, "STORE") X(Add, "ADD") X(Sub, "SUB") X(Mul, "MUL") X(Div, "DIV") \
  X(Mod, "MOD") X(And, "AND") X(Or, "OR") X(Xor, "XOR") X(Shl, "SHL") X(Shr, "SHR")         \
  X(Eq, "EQ") X(Ne, "NE") X(Lt, "LT") X(Le, "LE") X(Gt, "GT") X(Ge, "GE") X(LNot, "LNOT")   \
  X(Neg, "NEG") X(BNot, "BNOT") X(FrameAddr, "FRAMEADDR") X(NpFrameAddr, "NPFRAMEADDR")     \
  X(Neighbor, "NEIGHBOR") X(IdxScale, "IDXSCALE") X(FatIdx, "FATIDX") X(HAdd, "HADD")       \
  X(Copy2, "COPY2") X(Jmp, "JMP") X(Jz, "JZ") X(Jnz, "JNZ") X(Call, "CALL")                 \
  X(Enter, "ENTER") X(Ret, "RET") X(Halt, "HALT") X(Reduce, "REDUCE") X(DLoad, "DLOAD")     \
  X(DStore, "DSTORE") X(Broadcast, "BROADCAST") X(Test, "TEST") X(Cvt, "CVT")               \
  X(Select, "SELECT") X(Copy, "COPY") X(WherePush, "WHERE_PUSH") X(WhereElse, "WHERE_ELSE") \
  X(WherePop, "WHERE_POP") X(SetOff, "SETOFF") X(ResetOff, "RESETOFF")

enum class Op : std::uint8_t {
#define SIMDCC_OP_ENUM(name, text) name,
  SIMDCC_OPCODES(SIMDCC_OP_ENUM)
#undef SIMDCC_OP_ENUM
};

const char* op_name(Op op);
std::optional<Op> op_from_name(std::string_view name);

enum class ReduceKind : std::uint8_t { Any, All, None };
enum class IndexMode : std::uint8_t { CP, NP };      // IDXSCALE
enum class BroadcastSource : std::uint8_t { Int, Raw };  // BROADCAST

/// Operand signature of an opcode in a stream, one letter per operand:
///   i integer, k element kind, t jump target, s string index,
///   r reduce kind, m index mode, b broadcast source.
/// Nothing when the opcode does not exist in that stream.
std::optional<std::string_view> operand_signature(Stream s, Op op);

struct Instr {
  Stream stream = Stream::CP;
  Op op = Op::Push;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
};

struct IrFunction {
  std::string name;
  std::int64_t entry = 0;
  std::int64_t end = 0;  // one past the last instruction
};

/// A scalar memory cell reported by --dump-state.
struct DumpCell {
  std::string name;
  Space space = Space::CP;
  std::int64_t addr = 0;
  std::string kind;  // int, ptr, float, double, localint, vector, complex
};

struct IrProgram {
  static constexpr int kVersion = 1;
  std::vector<Instr> code;
  std::vector<IrFunction> functions;
  std::int64_t entry = 0;
  std::vector<std::string> strings;
  std::vector<DumpCell> cells;
  std::int64_t cp_static_size = 0;
  std::int64_t np_static_size = 0;
};

/// `idx TAG OPCODE operands...` per line.
std::string format_instr(const IrProgram& p, std::int64_t idx);
std::string format_ir(const IrProgram& p);

std::string serialize_ir(const IrProgram& p);
/// Throws InternalError on a malformed or incompatible artifact.
IrProgram deserialize_ir(const std::string& text);

/// Stream purity, operand validity, jump range and where-mask balance.
/// Empty when the program is well formed.
std::vector<std::string> verify_ir(const IrProgram& p);

}  // namespace simdcc
