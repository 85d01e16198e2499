#include "lop/json_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace lop {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_complex(const std::complex<double>& z) {
  return "[" + fmt_double(z.real()) + "," + fmt_double(z.imag()) + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

// `dim` >= 0 adds the state marker field; keys stay in sorted order.
std::string matrix_body(const ComplexMatrix& m, int dim) {
  std::string out = "{\"cols\":" + std::to_string(m.cols()) + ",\"data\":[";
  bool first = true;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!first) out += ',';
      first = false;
      out += fmt_complex(m(i, j));
    }
  }
  out += ']';
  if (dim >= 0) out += ",\"dim\":" + std::to_string(dim);
  out += ",\"rows\":" + std::to_string(m.rows()) + "}";
  return out;
}

std::string register_body(const Register& r) {
  return "{\"dim\":" + std::to_string(r.dim) +
         ",\"kind\":" + (r.kind == RegKind::wire ? "\"wire\"" : "\"quantum\"") +
         ",\"name\":" + quote(r.name) + "}";
}

std::string layout_body(const SystemLayout& layout) {
  std::string out = "[";
  for (int i = 0; i < layout.size(); ++i) {
    if (i) out += ',';
    out += register_body(layout.reg(i));
  }
  out += ']';
  return out;
}

std::string int_array(const std::vector<int>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
  return out;
}

std::string double_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_double(v[i]);
  }
  out += ']';
  return out;
}

std::string name_array(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += quote(v[i]);
  }
  out += ']';
  return out;
}

// --- parsing helpers ---------------------------------------------------

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  std::size_t pos = byte == 0 ? 0 : byte - 1;  // byte positions are 1-based
  if (pos > text.size()) pos = text.size();
  int line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  return {line, static_cast<int>(pos - line_start) + 1};
}

// Drops the library's bracketed id and position prefix; the position is
// reported through JsonError itself.
std::string trim_parse_message(const char* what) {
  std::string s = what ? what : "parse error";
  if (!s.empty() && s[0] == '[') {
    auto close = s.find("] ");
    if (close != std::string::npos) s = s.substr(close + 2);
  }
  if (s.rfind("parse error", 0) == 0) {
    auto colon = s.find(": ");
    if (colon != std::string::npos) s = s.substr(colon + 2);
  }
  return s;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    throw JsonError(line, col, trim_parse_message(e.what()));
  }
}

[[noreturn]] void schema_fail(const std::string& message) {
  throw JsonError(0, 0, message);
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema_fail(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_fail(where + ": missing \"" + key + "\"");
  return *it;
}

int int_of(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    schema_fail(where + ": expected an integer");
  return j.get<int>();
}

double double_of(const json& j, const std::string& where) {
  if (!j.is_number()) schema_fail(where + ": expected a number");
  return j.get<double>();
}

std::string string_of(const json& j, const std::string& where) {
  if (!j.is_string()) schema_fail(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<int> int_array_of(const json& j, const std::string& where) {
  if (!j.is_array()) schema_fail(where + ": expected an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(int_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> double_array_of(const json& j, const std::string& where) {
  if (!j.is_array()) schema_fail(where + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(double_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> name_array_of(const json& j,
                                       const std::string& where) {
  if (!j.is_array()) schema_fail(where + ": expected an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(string_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ComplexMatrix matrix_of(const json& j, const std::string& where) {
  int rows = int_of(field(j, "rows", where), where + ".rows");
  int cols = int_of(field(j, "cols", where), where + ".cols");
  if (rows < 1 || cols < 1) schema_fail(where + ": dimensions must be >= 1");
  const json& data = field(j, "data", where);
  if (!data.is_array()) schema_fail(where + ".data: expected an array");
  if (static_cast<int>(data.size()) != rows * cols)
    schema_fail(where + ".data: expected " + std::to_string(rows * cols) +
                " entries, got " + std::to_string(data.size()));
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      const json& cell = data[static_cast<std::size_t>(i) * cols + k];
      std::string cw = where + ".data[" +
                       std::to_string(static_cast<std::size_t>(i) * cols + k) +
                       "]";
      if (!cell.is_array() || cell.size() != 2)
        schema_fail(cw + ": expected [re,im]");
      m(i, k) = std::complex<double>(double_of(cell[0], cw),
                                     double_of(cell[1], cw));
    }
  }
  return m;
}

Register register_of(const json& j, const std::string& where) {
  Register r;
  r.name = string_of(field(j, "name", where), where + ".name");
  r.dim = int_of(field(j, "dim", where), where + ".dim");
  std::string kind = string_of(field(j, "kind", where), where + ".kind");
  if (kind == "wire") {
    r.kind = RegKind::wire;
  } else if (kind == "quantum") {
    r.kind = RegKind::quantum;
  } else {
    schema_fail(where + ".kind: expected \"wire\" or \"quantum\"");
  }
  return r;
}

SystemLayout layout_of(const json& j, const std::string& where) {
  if (!j.is_array()) schema_fail(where + ": expected an array");
  std::vector<Register> regs;
  regs.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    regs.push_back(register_of(j[i], where + "[" + std::to_string(i) + "]"));
  try {
    return SystemLayout(std::move(regs));
  } catch (const std::invalid_argument& e) {
    schema_fail(where + ": " + e.what());
  }
}

ElementalOp elemental_of(const json& j, const std::string& where) {
  std::string kind = string_of(field(j, "kind", where), where + ".kind");
  try {
    if (kind == "permutation") {
      return ElementalOp::wire_permutation(
          name_array_of(field(j, "regs", where), where + ".regs"),
          int_array_of(field(j, "table", where), where + ".table"));
    }
    if (kind == "phase") {
      return ElementalOp::wire_phase(
          name_array_of(field(j, "regs", where), where + ".regs"),
          double_array_of(field(j, "angles", where), where + ".angles"));
    }
    if (kind == "observed") {
      const json& kj = field(j, "kraus", where);
      if (!kj.is_array() || kj.empty())
        schema_fail(where + ".kraus: expected a non-empty array");
      std::vector<ComplexMatrix> kraus;
      kraus.reserve(kj.size());
      for (std::size_t i = 0; i < kj.size(); ++i)
        kraus.push_back(
            matrix_of(kj[i], where + ".kraus[" + std::to_string(i) + "]"));
      const json& cj = field(j, "created", where);
      if (!cj.is_array()) schema_fail(where + ".created: expected an array");
      std::vector<Register> created;
      created.reserve(cj.size());
      for (std::size_t i = 0; i < cj.size(); ++i)
        created.push_back(
            register_of(cj[i], where + ".created[" + std::to_string(i) + "]"));
      return ElementalOp::observed_instrument(
          name_array_of(field(j, "regs", where), where + ".regs"),
          std::move(kraus),
          string_of(field(j, "ancilla", where), where + ".ancilla"),
          int_of(field(j, "ancilla_dim", where), where + ".ancilla_dim"),
          int_array_of(field(j, "out_dims", where), where + ".out_dims"),
          std::move(created));
    }
    if (kind == "forward") {
      return ElementalOp::forward_wire(
          string_of(field(j, "source", where), where + ".source"),
          string_of(field(j, "target", where), where + ".target"));
    }
  } catch (const std::invalid_argument& e) {
    schema_fail(where + ": " + e.what());
  }
  schema_fail(where + ".kind: unknown operation \"" + kind + "\"");
}

ProtocolTree tree_of(const json& j, const std::string& where) {
  if (!j.is_object()) schema_fail(where + ": expected an object");
  if (j.empty()) return ProtocolTree::leaf();
  ElementalOp op = elemental_of(field(j, "op", where), where + ".op");
  const json& ch = field(j, "children", where);
  if (!ch.is_object()) schema_fail(where + ".children: expected an object");
  int n = op.outcome_count();
  if (static_cast<int>(ch.size()) != n)
    schema_fail(where + ".children: expected " + std::to_string(n) +
                " subtrees, got " + std::to_string(ch.size()));
  std::vector<ProtocolTree> kids;
  kids.reserve(n);
  for (int k = 0; k < n; ++k) {
    auto it = ch.find(std::to_string(k));
    if (it == ch.end())
      schema_fail(where + ".children: missing \"" + std::to_string(k) + "\"");
    kids.push_back(tree_of(*it, where + ".children." + std::to_string(k)));
  }
  return ProtocolTree::step(std::move(op), std::move(kids));
}

}  // namespace

JsonError::JsonError(int line, int column, const std::string& message)
    : std::runtime_error(message), line_(line), column_(column) {}

std::string json_of_matrix(const ComplexMatrix& m) {
  return matrix_body(m, -1);
}

std::string json_of_state(const DensityMatrix& rho) {
  return matrix_body(rho.matrix(), rho.dim());
}

std::string json_of_layout(const SystemLayout& layout) {
  return layout_body(layout);
}

std::string json_of_state_file(const DensityMatrix& rho,
                               const SystemLayout& layout) {
  return "{\"layout\":" + layout_body(layout) +
         ",\"state\":" + json_of_state(rho) + "}";
}

std::string json_of_elemental(const ElementalOp& op) {
  switch (op.kind) {
    case ElementalOp::Kind::permutation:
      return "{\"kind\":\"permutation\",\"regs\":" + name_array(op.regs) +
             ",\"table\":" + int_array(op.table) + "}";
    case ElementalOp::Kind::phase:
      return "{\"angles\":" + double_array(op.angles) +
             ",\"kind\":\"phase\",\"regs\":" + name_array(op.regs) + "}";
    case ElementalOp::Kind::observed: {
      std::string kraus = "[";
      for (std::size_t i = 0; i < op.kraus.size(); ++i) {
        if (i) kraus += ',';
        kraus += matrix_body(op.kraus[i], -1);
      }
      kraus += ']';
      std::string created = "[";
      for (std::size_t i = 0; i < op.created.size(); ++i) {
        if (i) created += ',';
        created += register_body(op.created[i]);
      }
      created += ']';
      return "{\"ancilla\":" + quote(op.ancilla) +
             ",\"ancilla_dim\":" + std::to_string(op.ancilla_dim) +
             ",\"created\":" + created + ",\"kind\":\"observed\",\"kraus\":" +
             kraus + ",\"out_dims\":" + int_array(op.out_dims) +
             ",\"regs\":" + name_array(op.regs) + "}";
    }
    case ElementalOp::Kind::forward:
      return "{\"kind\":\"forward\",\"source\":" + quote(op.source) +
             ",\"target\":" + quote(op.target) + "}";
  }
  throw std::logic_error("unreachable operation kind");
}

std::string json_of_protocol(const ProtocolTree& tree) {
  if (tree.is_leaf()) return "{}";
  std::string out = "{\"children\":{";
  // Keys are outcome indices as strings, emitted in sorted (string) order.
  std::vector<std::string> keys;
  keys.reserve(tree.children().size());
  for (std::size_t k = 0; k < tree.children().size(); ++k)
    keys.push_back(std::to_string(k));
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ',';
    out += quote(keys[i]) + ":" +
           json_of_protocol(tree.children()[std::stoul(keys[i])]);
  }
  out += "},\"op\":" + json_of_elemental(tree.op()) + "}";
  return out;
}

std::string json_of_branch_report(const BranchReport& report) {
  std::string out = "{\"branches\":[";
  for (std::size_t i = 0; i < report.branches.size(); ++i) {
    const OutcomePath& b = report.branches[i];
    if (i) out += ',';
    out += "{\"definite\":{";
    bool first = true;
    for (const auto& [name, value] : b.definite) {
      if (!first) out += ',';
      first = false;
      out += quote(name) + ":" + std::to_string(value);
    }
    out += "},\"layout\":" + layout_body(b.layout) +
           ",\"live_layout\":" + layout_body(b.live_layout) +
           ",\"outcomes\":" + int_array(b.outcomes) +
           ",\"probability\":" + fmt_double(b.probability) +
           ",\"state\":" + json_of_state(b.state) + "}";
  }
  out += "],\"pruned_count\":" + std::to_string(report.pruned_count) +
         ",\"pruned_probability\":" + fmt_double(report.pruned_probability) +
         "}";
  return out;
}

std::string json_of_monotone_report(const MonotoneReport& report) {
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string("null");
  };
  return "{\"ent_entropy_pure\":" + opt(report.ent_entropy_pure) +
         ",\"eq2_lower_bound\":" + opt(report.eq2_lower_bound) +
         ",\"l1_coherence\":" + fmt_double(report.l1_coherence) +
         ",\"rel_ent_coherence\":" + fmt_double(report.rel_ent_coherence) +
         "}";
}

std::string json_of_certificate(const ObstructionCertificate& cert) {
  auto flag = [](bool b) { return b ? "true" : "false"; };
  std::string pairs = "[";
  for (std::size_t i = 0; i < cert.pairwise_rigidity.size(); ++i) {
    const RigidityEntry& e = cert.pairwise_rigidity[i];
    if (i) pairs += ',';
    pairs += std::string("{\"rigid\":") + flag(e.rigid) +
             ",\"s\":" + std::to_string(e.s) +
             ",\"s_prime\":" + std::to_string(e.s_prime) + "}";
  }
  pairs += ']';
  return std::string("{\"cptp_ok\":") + flag(cert.cptp_ok) +
         ",\"iqo_ok\":" + flag(cert.iqo_ok) +
         ",\"k4_rank_one\":" + flag(cert.k4_rank_one) +
         ",\"pairwise_rigidity\":" + pairs +
         ",\"verdict\":" + flag(cert.verdict) + "}";
}

ComplexMatrix parse_matrix(const std::string& text) {
  return matrix_of(parse_text(text), "matrix");
}

SystemLayout parse_layout(const std::string& text) {
  return layout_of(parse_text(text), "layout");
}

std::pair<DensityMatrix, SystemLayout> parse_state_file(
    const std::string& text) {
  json j = parse_text(text);
  SystemLayout layout =
      layout_of(field(j, "layout", "state file"), "state file.layout");
  const json& sj = field(j, "state", "state file");
  ComplexMatrix m = matrix_of(sj, "state file.state");
  int dim = int_of(field(sj, "dim", "state file.state"),
                   "state file.state.dim");
  if (m.rows() != m.cols() || m.rows() != dim)
    schema_fail("state file.state: \"dim\" must match a square matrix");
  if (dim != layout.total_dim())
    schema_fail("state file: state dimension " + std::to_string(dim) +
                " does not match the layout's total dimension " +
                std::to_string(layout.total_dim()));
  try {
    return {DensityMatrix(m), layout};
  } catch (const std::invalid_argument& e) {
    schema_fail(std::string("state file.state: ") + e.what());
  }
}

ProtocolTree parse_protocol(const std::string& text) {
  return tree_of(parse_text(text), "protocol");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw std::runtime_error("failed while reading " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("failed while writing " + path);
}

}  // namespace lop
