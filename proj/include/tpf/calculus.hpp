#pragma once

#include <string_view>

#include "tpf/orbit.hpp"
#include "tpf/partial_fn.hpp"
#include "tpf/syntax.hpp"

namespace tpf {

// Denotation of a statement as an endo-function on `space`, whose variables
// must be declared in `unit`. Above the table bound the result evaluates
// lazily and keeps a reference to `unit`.
PartialFn denote_stmt(const ProgramUnit& unit, const Stmt& stmt, const SpacePtr& space);
PartialFn denote(const ProgramUnit& unit, std::string_view program);

// Loop given as condition plus body: a While, possibly wrapped in a
// one-element Seq. Returns nullptr otherwise.
const Stmt* as_loop(const Stmt& stmt);

// Broadcasts the last right-hand side over missing targets, drops dead
// earlier writes to repeated targets, and collapses to Abort when some
// right-hand side is bottom or a literal outside its target's domain.
// Throws ArityError when there are more right-hand sides than targets.
StmtPtr beta_normalize(const ProgramUnit& unit, const Stmt& beta);

// Extensional equality of two programs' denotations. Throws SpaceMismatch
// when the programs live on different spaces.
bool check_equiv(const ProgramUnit& unit, std::string_view p1, std::string_view p2);

// 0 when the loop condition fails at x, order + 1 for a finite order, and
// infinity when the loop cycles. Throws NotALoop for anything but a loop.
ExtOrder loop_iteration_count(const ProgramUnit& unit, std::string_view program, LiftedState x);

} // namespace tpf
