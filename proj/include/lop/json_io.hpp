#pragma once

#include "lop/counterexample.hpp"
#include "lop/elemental.hpp"
#include "lop/layout.hpp"
#include "lop/matrix.hpp"
#include "lop/monotones.hpp"
#include "lop/protocol.hpp"
#include "lop/states.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace lop {

// Text formats shared by the command-line tools and the test corpus.
//
//   matrix    {"cols":M,"data":[[re,im],...],"rows":N}   row-major entries
//   state     matrix plus "dim" (square, trace one)
//   layout    [{"dim":3,"kind":"wire","name":"w"},...]
//   op        {"kind":"permutation"|"phase"|"observed"|"forward", ...}
//   protocol  {"children":{"0":subtree,...},"op":{...}} with {} as leaf
//   state file  {"layout":[...],"state":{...}}
//
// Emission is deterministic: keys appear in sorted order, floats are
// printed with 17 significant digits, and there is no layout whitespace,
// so equal inputs serialize to identical bytes.

// Raised on malformed input text. `line`/`column` are 1-based positions of
// the offending byte for syntax errors; both are 0 for schema violations
// (well-formed JSON with missing or ill-typed fields).
class JsonError : public std::runtime_error {
 public:
  JsonError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_ = 0;
  int column_ = 0;
};

std::string json_of_matrix(const ComplexMatrix& m);
std::string json_of_state(const DensityMatrix& rho);
std::string json_of_layout(const SystemLayout& layout);
std::string json_of_state_file(const DensityMatrix& rho,
                               const SystemLayout& layout);
std::string json_of_elemental(const ElementalOp& op);
std::string json_of_protocol(const ProtocolTree& tree);
std::string json_of_branch_report(const BranchReport& report);
std::string json_of_monotone_report(const MonotoneReport& report);
std::string json_of_certificate(const ObstructionCertificate& cert);

ComplexMatrix parse_matrix(const std::string& text);
SystemLayout parse_layout(const std::string& text);
std::pair<DensityMatrix, SystemLayout> parse_state_file(
    const std::string& text);
ProtocolTree parse_protocol(const std::string& text);

// Whole-file helpers; throw std::runtime_error with the path on IO failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lop
