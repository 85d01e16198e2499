#pragma once

#include "lop/protocol.hpp"

#include <string>
#include <vector>

namespace lop {

// Two-party rewrite of a wire protocol. Every wire register w of the
// original becomes a pair of quantum registers q1_w / q2_w holding matching
// basis states, quantum registers keep their party ("q1_"/"q2_" name
// prefix), and each elemental operation is replaced by party-local quantum
// operations plus classical processing of outcome wires:
//   permutation  the same relabeling unitary on both parties' copies
//   phase        the phase unitary on party 1's copy only
//   observed     the instrument at its home party; the outcome is copied and
//                loaded into both parties' fresh quantum copies
//   forward      the far party's copy is removed by a destructive Fourier
//                measurement whose outcome selects a phase correction on the
//                near copy, which is then moved into the forward's target
// Helper registers introduced by the rewrite are named with a leading
// underscore; original names must not use one.
struct LoccTranslation {
  ProtocolTree tree;
  SystemLayout layout;  // two-party image of the original initial layout
};

LoccTranslation translate_to_locc(const ProtocolTree& tree,
                                  const SystemLayout& layout);

// Branch-by-branch equivalence check. Each translated branch operator B_t,
// restricted to its Fourier-outcome combination, must satisfy
//   B_t . V_in = scale . V_out . B_o
// where V maps every original wire value to matching values on both copies,
// B_o is the matching original branch operator, and scale collects one
// 1/sqrt(d) per removed copy of dimension d.
struct LoccBranchCheck {
  std::vector<int> translated_outcomes;
  std::vector<int> instrument_outcomes;  // outcomes of original instruments
  double deviation = 0.0;
};

struct LoccCheckReport {
  bool ok = true;
  double max_deviation = 0.0;
  std::vector<LoccBranchCheck> branches;
};

LoccCheckReport check_locc_translation(const ProtocolTree& original,
                                       const SystemLayout& layout,
                                       const LoccTranslation& translation,
                                       double tolerance = tol::structural);

}  // namespace lop
