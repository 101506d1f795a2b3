// simdcc: compile and run SIMD C++ dialect programs on a simulated CP + NP torus.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "simdcc/diagnostics.hpp"
#include "simdcc/driver.hpp"
#include "simdcc/machine.hpp"
#include "simdcc/runtime_io.hpp"

using namespace simdcc;

namespace {

enum Exit { kOk = 0, kSourceError = 1, kInternalError = 2, kTrap = 3, kConfigError = 4 };

struct Options {
  std::string input;
  std::string output;
  std::string topology = "1";
  std::int64_t np_mem = 65536;
  std::int64_t cp_mem = 65536;
  std::uint64_t limit = 100'000'000;
  std::string trace;
  std::string emit_ir;
  std::string dump_layout;
  std::string dump_state;
  std::vector<std::string> binds;
  std::string block;
  std::string flat;
  std::string sliced;
};

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kSourceError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "-" (or an empty value) means the standard stream.
void emit(const std::string& target, const std::string& text, std::ostream& fallback) {
  if (target.empty() || target == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure(kSourceError, "cannot write '" + target + "'");
  out << text;
}

void add_output_flag(CLI::App* app, const std::string& name, std::string& target, const std::string& what) {
  app->add_option(name, target, what + " (to a file, or stdout when no file is given)")
      ->expected(0, 1)
      ->default_str("-");
}

void add_memory_flags(CLI::App* app, Options& o) {
  app->add_option("--np-mem", o.np_mem, "Words of NP memory per node")->capture_default_str();
  app->add_option("--cp-mem", o.cp_mem, "Words of CP memory")->capture_default_str();
}

void add_run_flags(CLI::App* app, Options& o) {
  app->add_option("--topology", o.topology, "Torus extents, e.g. 4 or 2x2 or 2x2x2")->capture_default_str();
  app->add_option("--limit", o.limit, "Instruction limit")->capture_default_str();
  app->add_option("--trace", o.trace, "Print one line per executed instruction (to a file, or stderr)")
      ->expected(0, 1)
      ->default_str("-");
  add_output_flag(app, "--dump-state", o.dump_state, "Print the final memory state");
  app->add_option("--bind", o.binds, "Map a data file name used by the program to a path: name=path");
}

MemoryConfig memory_of(const Options& o) {
  if (o.cp_mem <= 0 || o.np_mem <= 0) throw ConfigError("memory sizes must be positive");
  return MemoryConfig{o.cp_mem, o.np_mem};
}

IrProgram compile_file(const Options& o, const std::string& path, CLI::App* app) {
  const std::string src = read_text(path);
  try {
    Compilation c = compile_source(src, memory_of(o));
    if (app->count("--dump-layout")) emit(o.dump_layout, format_layout(c.layout), std::cout);
    if (app->count("--emit-ir")) emit(o.emit_ir, format_ir(c.ir), std::cout);
    return std::move(c.ir);
  } catch (const ConfigError&) {
    throw;
  } catch (const CapacityError& e) {
    throw Failure(kConfigError, path + ": error: " + e.message());
  } catch (const InternalError&) {
    throw;
  } catch (const CompileError& e) {
    throw Failure(kSourceError, e.format(path));
  }
}

int run_program(const Options& o, const IrProgram& ir, CLI::App* app) {
  RunConfig cfg;
  cfg.topology = Topology::parse(o.topology);
  memory_of(o);
  cfg.cp_words = o.cp_mem;
  cfg.np_words = o.np_mem;
  cfg.limit = o.limit;
  for (const auto& b : o.binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--bind expects name=path, got '" + b + "'");
    cfg.bindings[b.substr(0, eq)] = b.substr(eq + 1);
  }
  std::unique_ptr<std::ofstream> trace_file;
  if (app->count("--trace")) {
    if (o.trace.empty() || o.trace == "-") {
      cfg.trace = &std::cerr;
    } else {
      trace_file = std::make_unique<std::ofstream>(o.trace);
      if (!*trace_file) throw Failure(kSourceError, "cannot write '" + o.trace + "'");
      cfg.trace = trace_file.get();
    }
  }
  Machine m(ir, cfg);
  RunResult r = m.run();
  if (app->count("--dump-state")) emit(o.dump_state, m.dump_state(), std::cout);
  if (r.trap) {
    std::cerr << "trap at pc " << r.trap->pc << ": " << r.trap->reason << "\n";
    return kTrap;
  }
  std::cerr << "halted after " << r.steps << " instructions, main returned " << r.exit_code << "\n";
  return kOk;
}

std::string default_ir_path(const std::string& src) {
  std::filesystem::path p(src);
  p.replace_extension(".ir.json");
  return p.string();
}

std::vector<std::int64_t> block_of(const Options& o) { return parse_dims(o.block, "block shape"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simdcc: SIMD C++ dialect compiler and CP/NP torus simulator"};
  app.require_subcommand(1);
  Options o;

  auto* compile = app.add_subcommand("compile", "Compile a source file to an IR artifact");
  compile->add_option("source", o.input, "Source file")->required();
  compile->add_option("-o,--output", o.output, "IR artifact path (default: <source>.ir.json)");
  add_memory_flags(compile, o);
  add_output_flag(compile, "--emit-ir", o.emit_ir, "Print the IR as text");
  add_output_flag(compile, "--dump-layout", o.dump_layout, "Print the memory layout");

  auto* run = app.add_subcommand("run", "Run a compiled IR artifact");
  run->add_option("ir", o.input, "IR artifact")->required();
  add_memory_flags(run, o);
  add_run_flags(run, o);
  add_output_flag(run, "--emit-ir", o.emit_ir, "Print the IR as text");

  auto* exec = app.add_subcommand("exec", "Compile and run a source file");
  exec->add_option("source", o.input, "Source file")->required();
  add_memory_flags(exec, o);
  add_run_flags(exec, o);
  add_output_flag(exec, "--emit-ir", o.emit_ir, "Print the IR as text");
  add_output_flag(exec, "--dump-layout", o.dump_layout, "Print the memory layout");

  auto* slice = app.add_subcommand("slice", "Split a flat row-major data file into per-node blocks");
  slice->add_option("input", o.flat, "Single-node data file")->required();
  slice->add_option("output", o.sliced, "Node-major output file")->required();
  slice->add_option("--topology", o.topology, "Torus extents")->required();
  slice->add_option("--block", o.block, "Per-node block extents, e.g. 4x4")->required();

  auto* unslice = app.add_subcommand("unslice", "Reassemble per-node blocks into a flat row-major file");
  unslice->add_option("input", o.sliced, "Node-major data file")->required();
  unslice->add_option("output", o.flat, "Single-node output file")->required();
  unslice->add_option("--topology", o.topology, "Torus extents")->required();
  unslice->add_option("--block", o.block, "Per-node block extents, e.g. 4x4")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile->parsed()) {
      IrProgram ir = compile_file(o, o.input, compile);
      emit(o.output.empty() ? default_ir_path(o.input) : o.output, serialize_ir(ir), std::cout);
      return kOk;
    }
    if (run->parsed()) {
      IrProgram ir = deserialize_ir(read_text(o.input));
      if (run->count("--emit-ir")) emit(o.emit_ir, format_ir(ir), std::cout);
      return run_program(o, ir, run);
    }
    if (exec->parsed()) {
      IrProgram ir = compile_file(o, o.input, exec);
      return run_program(o, ir, exec);
    }
    if (slice->parsed()) {
      Topology t = Topology::parse(o.topology);
      write_dist_file(o.sliced, slice_array(read_dist_file(o.flat), t, block_of(o)));
      return kOk;
    }
    if (unslice->parsed()) {
      Topology t = Topology::parse(o.topology);
      write_dist_file(o.flat, unslice_array(read_dist_file(o.sliced), t, block_of(o)));
      return kOk;
    }
  } catch (const Failure& e) {
    std::cerr << e.what() << "\n";
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.message() << "\n";
    return kConfigError;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.message() << "\n";
    return kInternalError;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSourceError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}
