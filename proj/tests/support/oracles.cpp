#include "oracles.hpp"

#include <climits>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace oracle {

const char* const kPromotionRows[8] = {
    "yes yes yes yes yes yes yes yes",  // int
    "yes yes yes no no no no no",       // CP pointer
    "yes yes yes no no no no no",       // NP pointer
    "no no no yes yes yes yes yes",     // float
    "no no no yes yes yes yes yes",     // double
    "no no no no no yes no no",         // vector
    "no no no no no no yes no",         // complex
    "no no yes yes yes yes yes yes",    // localint
};

const char* const kCastRows[8] = {
    "yes no no yes yes yes yes yes",  // int
    "no yes no no no no no no",       // CP pointer
    "no yes no no no no no no",       // NP pointer
    "no no no yes yes yes yes no",    // float
    "no no no no yes no no no",       // double
    "no no no no no yes no no",       // vector
    "no no no no no no yes no",       // complex
    "no no no no no no no yes",       // localint
};

static bool cell(const char* const rows[8], int from, int to) {
  std::istringstream in(rows[from]);
  std::string word;
  for (int i = 0; i <= to; ++i) in >> word;
  return word == "yes";
}

bool table_promotion(int from, int to) { return cell(kPromotionRows, from, to); }
bool table_cast(int from, int to) { return cell(kCastRows, from, to); }

std::int64_t torus_neighbor(const std::vector<std::int64_t>& dims, std::int64_t node, int axis, int sign) {
  std::int64_t stride = 1;
  for (size_t a = axis + 1; a < dims.size(); ++a) stride *= dims[a];
  const std::int64_t d = dims[axis];
  const std::int64_t c = (node / stride) % d;
  const std::int64_t moved = (c + sign + d) % d;
  return node + (moved - c) * stride;
}

namespace {

struct BlockMap {
  std::vector<std::int64_t> topo, block, global;
  std::int64_t per_node = 1, nodes = 1;
};

BlockMap block_map(std::vector<std::int64_t> topo, const std::vector<std::int64_t>& block) {
  BlockMap m;
  topo.resize(block.size(), 1);
  m.topo = topo;
  m.block = block;
  for (size_t a = 0; a < block.size(); ++a) {
    m.global.push_back(topo[a] * block[a]);
    m.per_node *= block[a];
    m.nodes *= topo[a];
  }
  return m;
}

// Flat row-major index in the global array of element `local` on `node`.
std::int64_t global_index(const BlockMap& m, std::int64_t node, std::int64_t local) {
  const size_t r = m.block.size();
  std::vector<std::int64_t> nc(r), lc(r);
  for (size_t a = r; a-- > 0;) {
    nc[a] = node % m.topo[a];
    node /= m.topo[a];
    lc[a] = local % m.block[a];
    local /= m.block[a];
  }
  std::int64_t g = 0;
  for (size_t a = 0; a < r; ++a) g = g * m.global[a] + nc[a] * m.block[a] + lc[a];
  return g;
}

}  // namespace

std::vector<float> block_slice(const std::vector<float>& flat, const std::vector<std::int64_t>& topo,
                               const std::vector<std::int64_t>& block) {
  BlockMap m = block_map(topo, block);
  std::vector<float> out(flat.size());
  for (std::int64_t n = 0; n < m.nodes; ++n)
    for (std::int64_t l = 0; l < m.per_node; ++l) out[n * m.per_node + l] = flat.at(global_index(m, n, l));
  return out;
}

std::vector<float> block_unslice(const std::vector<float>& sliced, const std::vector<std::int64_t>& topo,
                                 const std::vector<std::int64_t>& block) {
  BlockMap m = block_map(topo, block);
  std::vector<float> out(sliced.size());
  for (std::int64_t n = 0; n < m.nodes; ++n)
    for (std::int64_t l = 0; l < m.per_node; ++l) out.at(global_index(m, n, l)) = sliced[n * m.per_node + l];
  return out;
}

std::uint32_t f32(float f) {
  std::uint32_t b;
  std::memcpy(&b, &f, 4);
  return b;
}

std::uint64_t f64(double d) {
  std::uint64_t b;
  std::memcpy(&b, &d, 8);
  return b;
}

// ---- harness ----------------------------------------------------------------

Harness::Harness(const std::string& source, const std::vector<std::int64_t>& dims, std::int64_t np_words,
                 std::map<std::string, std::string> bindings) {
  comp = std::make_unique<simdcc::Compilation>(simdcc::compile_source(source, {65536, np_words}));
  simdcc::RunConfig cfg;
  cfg.topology = simdcc::Topology(dims);
  cfg.np_words = np_words;
  cfg.bindings = std::move(bindings);
  machine = std::make_unique<simdcc::Machine>(comp->ir, cfg);
}

const simdcc::DumpCell& Harness::cell(const std::string& name) const {
  for (const auto& c : comp->ir.cells)
    if (c.name == name) return c;
  throw std::runtime_error("no dump cell named " + name);
}

void Harness::poke(const std::string& cell_name, std::int64_t node, std::uint64_t bits) {
  const auto& c = cell(cell_name);
  if (c.space == simdcc::Space::CP) {
    machine->cp_memory().at(c.addr) = static_cast<std::uint32_t>(bits);
    return;
  }
  machine->write_np(node, c.addr, *simdcc::elem_kind_from_name(c.kind), bits);
}

std::uint64_t Harness::peek(const std::string& cell_name, std::int64_t node) const {
  const auto& c = cell(cell_name);
  return machine->read_np(node, c.addr, *simdcc::elem_kind_from_name(c.kind));
}

std::int32_t Harness::peek_cp(const std::string& cell_name) const {
  return static_cast<std::int32_t>(machine->cp_memory().at(cell(cell_name).addr));
}

simdcc::RunResult Harness::run() { return machine->run(); }

// ---- scalar reference -------------------------------------------------------

namespace {

std::int32_t wrap32(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

std::int32_t trunc_sat(double v) {
  if (std::isnan(v)) return 0;
  if (v >= 2147483648.0) return INT32_MAX;
  if (v <= -2147483649.0) return INT32_MIN;
  return static_cast<std::int32_t>(std::trunc(v));
}

bool is_int(K k) { return k == K::Int || k == K::LocalInt; }

}  // namespace

Value convert(const Value& v, K to) {
  Value r;
  r.kind = to;
  if (v.kind == to) return v;
  switch (to) {
    case K::Int:
    case K::LocalInt:
      if (is_int(v.kind)) r.i = v.i;
      else r.i = trunc_sat(v.kind == K::Float ? static_cast<double>(v.f) : v.d);
      break;
    case K::Float:
      r.f = is_int(v.kind) ? static_cast<float>(v.i) : static_cast<float>(v.d);
      break;
    case K::Double:
      r.d = is_int(v.kind) ? static_cast<double>(v.i) : static_cast<double>(v.f);
      break;
  }
  return r;
}

bool apply(char op, const Value& a, const Value& b, Value& out) {
  const K k = std::max(a.kind, b.kind);
  const Value x = convert(a, k), y = convert(b, k);
  if (op == '<' || op == '=') {
    out = Value{};
    out.kind = k == K::Int ? K::Int : K::LocalInt;
    switch (k) {
      case K::Int:
      case K::LocalInt: out.i = op == '<' ? x.i < y.i : x.i == y.i; break;
      case K::Float: out.i = op == '<' ? x.f < y.f : x.f == y.f; break;
      case K::Double: out.i = op == '<' ? x.d < y.d : x.d == y.d; break;
    }
    return true;
  }
  out = Value{};
  out.kind = k;
  if (is_int(k)) {
    const std::int64_t p = x.i, q = y.i;
    switch (op) {
      case '+': out.i = wrap32(p + q); return true;
      case '-': out.i = wrap32(p - q); return true;
      case '*': out.i = wrap32(p * q); return true;
      case '/':
      case '%':
        if (q == 0) return false;
        out.i = op == '/' ? wrap32(p / q) : wrap32(p % q);
        return true;
    }
  } else if (k == K::Float) {
    switch (op) {
      case '+': out.f = x.f + y.f; return true;
      case '-': out.f = x.f - y.f; return true;
      case '*': out.f = x.f * y.f; return true;
      case '/': out.f = x.f / y.f; return true;
    }
  } else {
    switch (op) {
      case '+': out.d = x.d + y.d; return true;
      case '-': out.d = x.d - y.d; return true;
      case '*': out.d = x.d * y.d; return true;
      case '/': out.d = x.d / y.d; return true;
    }
  }
  return false;
}

namespace {

struct Gen {
  std::mt19937& rng;
  const std::vector<std::pair<std::string, K>>& vars;
  std::map<std::string, Value>& state;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  bool leaf(std::string& text, Value& v) {
    switch (pick(5)) {
      case 0: {
        int n = pick(41) - 20;
        text = n < 0 ? "(" + std::to_string(n) + ")" : std::to_string(n);
        v = Value{};
        v.kind = K::Int;
        v.i = n;
        return true;
      }
      case 1: {
        int n = pick(81) - 40;
        std::ostringstream os;
        os << "(" << n / 4.0;
        if (n % 4 == 0) os << ".0";
        os << "f)";
        text = os.str();
        v = Value{};
        v.kind = K::Float;
        v.f = static_cast<float>(n / 4.0);
        return true;
      }
      case 2: {
        int n = pick(81) - 40;
        std::ostringstream os;
        os << "(" << n / 8.0;
        if (n % 8 == 0) os << ".0";
        os << ")";
        text = os.str();
        v = Value{};
        v.kind = K::Double;
        v.d = n / 8.0;
        return true;
      }
      default: {
        const auto& var = vars[pick(static_cast<int>(vars.size()))];
        text = var.first;
        v = state.at(var.first);
        return true;
      }
    }
  }

  bool expr(int depth, std::string& text, Value& v) {
    if (depth == 0 || pick(4) == 0) return leaf(text, v);
    if (pick(6) == 0) {
      std::string a;
      Value x;
      if (!expr(depth - 1, a, x)) return false;
      text = "(-" + a + ")";
      v = x;
      switch (x.kind) {
        case K::Int:
        case K::LocalInt: v.i = wrap32(-static_cast<std::int64_t>(x.i)); break;
        case K::Float: v.f = -x.f; break;
        case K::Double: v.d = -x.d; break;
      }
      return true;
    }
    std::string a, b;
    Value x, y;
    if (!expr(depth - 1, a, x) || !expr(depth - 1, b, y)) return false;
    static const char ops[] = {'+', '-', '*', '/', '+', '*', '<', '=', '%'};
    char op = ops[pick(sizeof ops)];
    if (op == '%' && !(is_int(x.kind) && is_int(y.kind))) op = '-';
    if (!apply(op, x, y, v)) return false;
    const std::string spelled = op == '=' ? "==" : std::string(1, op);
    text = "(" + a + " " + spelled + " " + b + ")";
    return true;
  }
};

}  // namespace

RandomProgram random_np_program(std::mt19937& rng, int statements) {
  RandomProgram p;
  p.vars = {{"f0", K::Float}, {"f1", K::Float},    {"f2", K::Float},    {"d0", K::Double},
            {"d1", K::Double}, {"l0", K::LocalInt}, {"l1", K::LocalInt}, {"l2", K::LocalInt}};
  for (const auto& [name, k] : p.vars) {
    Value z;
    z.kind = k;
    p.expected[name] = z;
  }
  std::ostringstream src;
  src << "float f0, f1, f2;\ndouble d0, d1;\nlocalint l0, l1, l2;\n\nint main() {\n";
  Gen g{rng, p.vars, p.expected};
  for (int s = 0; s < statements; ++s) {
    std::string text;
    Value v;
    int tries = 0;
    while (!g.expr(3, text, v))
      if (++tries > 100) throw std::runtime_error("generator could not avoid a division by zero");
    const auto& target = p.vars[g.pick(static_cast<int>(p.vars.size()))];
    src << "  " << target.first << " = " << text << ";\n";
    p.expected[target.first] = convert(v, target.second);
  }
  src << "  return 0;\n}\n";
  p.source = src.str();
  return p;
}

}  // namespace oracle
